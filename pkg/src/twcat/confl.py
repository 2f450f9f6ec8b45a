"""Special and canonical conflations, their equivalences, and the J functor.

A canonical conflation ``X -> X(+)Y -> Y`` is determined by a degree-0 corner
``gamma : Y -> X`` with ``b1(gamma) = 0``; the middle object carries
``[[delta_X, gamma], [0, delta_Y]]``.  Composable pairs that are not special
(rotation and cone pairs) are stored with a certificate: a chain of ladder
isomorphisms ending at a canonical conflation.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence

from . import linalg
from .ad import AdMorphism, SModule, direct_sum
from .tw import TwCategory, TwError, TwMorphism, TwObject


class ConflationError(TwError):
    """A pair of morphisms fails to be a conflation of the requested kind."""


@dataclass
class Step:
    """One ladder ``h`` between composable pairs; ``forward`` means h : current -> target."""

    h: TwMorphism
    forward: bool
    target: "Conflation"


@dataclass
class Conflation:
    X: TwObject
    E: TwObject
    Y: TwObject
    f: TwMorphism
    g: TwMorphism
    kind: str  # "canonical" | "special" | "general"
    gamma: AdMorphism | None = None
    certificate: list = dc_field(default_factory=list)


class ConflCategory:
    def __init__(self, tw: TwCategory):
        self.tw = tw
        self.ad = tw.ad
        self.field = tw.field

    # -- canonical conflations ----------------------------------------------
    def extension(self, X: TwObject, Y: TwObject, gamma: AdMorphism) -> TwObject:
        """The object X(+)Y with upper triangular differential and corner gamma."""
        ad = self.ad
        if gamma.source != Y.module or gamma.target != X.module:
            raise ConflationError("gamma must map Y to X")
        if not ad.is_homogeneous(gamma, 0):
            raise ConflationError(f"gamma must have degree 0, found {sorted(ad.degrees(gamma))}")
        res = self.tw.b1(TwMorphism(Y, X, gamma))
        if not self.tw.is_zero(res):
            raise ConflationError(f"b1(gamma) != 0: residue on {sorted(tuple(x) for x in res.under.terms)}")
        parts = [X.module, Y.module]
        delta = ad.assemble([[X.delta, gamma], [None, Y.delta]], parts, parts)
        return self.tw.validate(delta.source, delta)

    def make_canonical(self, X: TwObject, Y: TwObject, gamma: AdMorphism | None = None) -> Conflation:
        if gamma is None:
            gamma = self.ad.zero(Y.module, X.module)
        E = self.extension(X, Y, gamma)
        parts = [X.module, Y.module]
        f = TwMorphism(X, E, self.ad.embedding(parts, 0))
        g = TwMorphism(E, Y, self.ad.projection(parts, 1))
        return Conflation(X, E, Y, f, g, "canonical", gamma)

    def w_of(self, xi: Conflation) -> TwMorphism:
        """sigma_X o gamma : Y -> X[1], the connecting morphism of a canonical conflation."""
        self._need_canonical(xi)
        return TwMorphism(xi.Y, self.tw.shift_object(xi.X), self.ad.circ(self.ad.sigma_of(xi.X.module), xi.gamma))

    def _need_canonical(self, xi: Conflation) -> None:
        if xi.kind != "canonical" or xi.gamma is None:
            raise ConflationError("a canonical conflation is required")

    # -- Psi ------------------------------------------------------------------
    def psi(self, h: TwMorphism) -> Conflation:
        """h : Y -> X[1] cocycle  |->  canonical conflation with gamma = -tau_X o h."""
        Y = h.source
        X = self.tw.shift_object(h.target, -1)
        if not self.tw.is_cocycle(h) and not self.tw.is_zero(h):
            raise ConflationError("psi needs a degree -1 cocycle")
        gamma = self.ad.neg(self.ad.circ(self.ad.tau_of(X.module), h.under))
        return self.make_canonical(X, Y, gamma)

    def psi_inv(self, xi: Conflation) -> TwMorphism:
        return self.w_of(xi)

    # -- special conflations ------------------------------------------------
    def fiber_problems(self, f: TwMorphism, g: TwMorphism) -> list[str]:
        F = self.field
        probs = []
        if not (self.tw.is_special(f) and self.tw.is_special(g)):
            probs.append("f and g must be special")
            return probs
        fp, gp = self.ad.special_parts(f.under), self.ad.special_parts(g.under)
        X, E, Y = f.source.module, f.target.module, g.target.module
        for u in sorted(set(X.support) | set(E.support) | set(Y.support)):
            fu = fp.get(u, F.zeros(E.dim(u), X.dim(u)))
            gu = gp.get(u, F.zeros(Y.dim(u), E.dim(u)))
            if linalg.rank(F, fu) != X.dim(u):
                probs.append(f"not an inflation at {u}")
            if linalg.rank(F, gu) != Y.dim(u):
                probs.append(f"not a deflation at {u}")
            if not F.is_zero_matrix(F.mm(gu, fu)):
                probs.append(f"g f != 0 at {u}")
            if E.dim(u) != X.dim(u) + Y.dim(u):
                probs.append(f"not exact in the middle at {u}")
        return probs

    def is_special_inflation(self, f: TwMorphism) -> bool:
        if not self.tw.is_special(f) or not self.tw.is_cocycle(f) and not self.tw.is_zero(f):
            return False
        parts = self.ad.special_parts(f.under)
        return all(linalg.rank(self.field, m) == m.shape[1] for m in parts.values())

    def is_special_deflation(self, g: TwMorphism) -> bool:
        if not self.tw.is_special(g) or not self.tw.is_cocycle(g) and not self.tw.is_zero(g):
            return False
        parts = self.ad.special_parts(g.under)
        return all(linalg.rank(self.field, m) == m.shape[0] for m in parts.values())

    def _z_morphism(self, h: TwMorphism) -> bool:
        return self.tw.is_zero(h) or self.tw.is_cocycle(h)

    def validate_special(self, f: TwMorphism, g: TwMorphism) -> Conflation:
        if f.target != g.source:
            raise ConflationError("f and g are not composable")
        probs = self.fiber_problems(f, g)
        for name, h in (("f", f), ("g", g)):
            if not self._z_morphism(h):
                probs.append(f"{name} is not a cocycle")
        if probs:
            raise ConflationError("; ".join(probs))
        return Conflation(f.source, f.target, g.target, f, g, "special")

    def canonical_pair_is_cocycle(self, X: TwObject, Y: TwObject, delta_E: AdMorphism) -> bool:
        """Whether the canonical inclusion and projection are cocycles for a given delta_E."""
        E = self.tw.validate(delta_E.source, delta_E)
        parts = [X.module, Y.module]
        f = TwMorphism(X, E, self.ad.embedding(parts, 0))
        g = TwMorphism(E, Y, self.ad.projection(parts, 1))
        return self.tw.is_zero(self.tw.b1(f)) and self.tw.is_zero(self.tw.b1(g))

    def canonicalize(self, xi: Conflation) -> tuple[TwMorphism, Conflation]:
        """A special isomorphism h : E -> X(+)Y carrying xi onto a canonical conflation."""
        if xi.kind == "canonical":
            return self.tw.identity(xi.E), xi
        if xi.kind != "special":
            raise ConflationError("only special conflations can be canonicalized directly")
        F, ad = self.field, self.ad
        fp, gp = ad.special_parts(xi.f.under), ad.special_parts(xi.g.under)
        X, E, Y = xi.X.module, xi.E.module, xi.Y.module
        phi_inv = {}
        for u in E.support:
            fu = fp.get(u, F.zeros(E.dim(u), X.dim(u)))
            gu = gp.get(u, F.zeros(Y.dim(u), E.dim(u)))
            su = linalg.right_inverse(F, gu) if gu.shape[0] else F.zeros(E.dim(u), 0)
            if su is None:
                raise ConflationError(f"g has no section at {u}")
            import numpy as np

            phi = np.concatenate([fu, su], axis=1)
            inv = linalg.inverse(F, phi)
            if inv is None:
                raise ConflationError(f"fiber at {u} is not a direct sum")
            phi_inv[u] = inv
        sumXY = direct_sum([X, Y])
        h = ad.special_of(E, sumXY, phi_inv)
        E2, hz = self.tw.transport_differential(h, xi.E)
        parts = [X, Y]
        d = E2.delta
        if not (ad.equal(ad.component(d, parts, parts, 0, 0), xi.X.delta)
                and ad.equal(ad.component(d, parts, parts, 1, 1), xi.Y.delta)
                and ad.is_zero(ad.component(d, parts, parts, 1, 0))):
            raise ConflationError("transported differential is not triangular")
        gamma = ad.component(d, parts, parts, 0, 1)
        can = self.make_canonical(xi.X, xi.Y, gamma)
        return TwMorphism(xi.E, can.E, h), can

    # -- ladders and equivalence ----------------------------------------------
    def ladder_holds(self, xi: Conflation, xi2: Conflation, h: TwMorphism) -> bool:
        """h : E -> E' is a cocycle with h*f = f' and g'*h = g, exactly."""
        tw = self.tw
        return (
            self._z_morphism(h)
            and tw.equal(tw.star(h, xi.f), xi2.f)
            and tw.equal(tw.star(xi2.g, h), xi.g)
        )

    def ladder_commutes(self, xi: Conflation, xi2: Conflation, t1: TwMorphism, t2: TwMorphism, t3: TwMorphism) -> bool:
        """Both squares of the ladder (t1, t2, t3) : xi -> xi2 commute exactly in Z."""
        tw = self.tw
        return (
            all(self._z_morphism(t) for t in (t1, t2, t3))
            and tw.equal(tw.star(t2, xi.f), tw.star(xi2.f, t1))
            and tw.equal(tw.star(xi2.g, t2), tw.star(t3, xi.g))
        )

    def solve_ladder(self, xi: Conflation, xi2: Conflation) -> TwMorphism | None:
        tw = self.tw
        return tw.solve_linear(
            xi.E,
            xi2.E,
            -1,
            [([None, xi.f], xi2.f), ([xi2.g, None], xi.g)],
            cocycle=True,
        )

    def z_inverse(self, h: TwMorphism) -> TwMorphism | None:
        """An exact two-sided star-inverse of h, or None."""
        tw = self.tw
        if tw.is_special(h):
            try:
                inv = TwMorphism(h.target, h.source, tw.special_inverse(h.under))
            except TwError:
                return None
            if tw.equal(tw.star(inv, h), tw.identity(h.source)) and tw.equal(tw.star(h, inv), tw.identity(h.target)):
                return inv
        return tw.solve_linear(
            h.target,
            h.source,
            -1,
            [([None, h], tw.identity(h.source)), ([h, None], tw.identity(h.target))],
            cocycle=True,
        )

    def triangular(self, X: TwObject, Y: TwObject, E1: TwObject, E2: TwObject, h11: TwMorphism, s: AdMorphism, h22: TwMorphism) -> TwMorphism:
        parts = [X.module, Y.module]
        parts2 = [h11.target.module, h22.target.module]
        return TwMorphism(E1, E2, self.ad.assemble([[h11.under, s], [None, h22.under]], parts, parts2))

    def corner_equation(self, gamma: AdMorphism, gamma2: AdMorphism, X: TwObject, Y: TwObject) -> TwMorphism:
        """Right-hand side b1(s) must equal for [[I, s], [0, I]] to be a cocycle."""
        return TwMorphism(Y, X, self.ad.sub(gamma2, gamma))

    def equivalent(self, xi: Conflation, xi2: Conflation) -> TwMorphism | None:
        """A ladder isomorphism xi -> xi2 with identities on the ends, or None."""
        if xi.X != xi2.X or xi.Y != xi2.Y:
            raise ConflationError("conflations must share their end objects")
        tw = self.tw
        if xi.kind in ("canonical", "special") and xi2.kind in ("canonical", "special"):
            h1, c1 = self.canonicalize(xi)
            h2, c2 = self.canonicalize(xi2)
            s = tw.is_coboundary(self.corner_equation(c1.gamma, c2.gamma, xi.X, xi.Y))
            if s is None:
                return None
            H = self.triangular(xi.X, xi.Y, c1.E, c2.E, tw.identity(xi.X), s.under, tw.identity(xi.Y))
            h2inv = TwMorphism(c2.E, xi2.E, tw.special_inverse(h2.under))
            h = tw.star(h2inv, tw.star(H, h1))
            if self.ladder_holds(xi, xi2, h):
                return h
        return self.solve_ladder(xi, xi2)

    # -- certificates -----------------------------------------------------------
    def certify(self, xi: Conflation, target: Conflation) -> Conflation:
        """Attach a one-step ladder certificate to a composable pair."""
        h = self.solve_ladder(xi, target)
        if h is None:
            raise ConflationError("no ladder to the canonical conflation")
        xi.certificate = [Step(h, True, target)]
        return xi

    def terminal(self, xi: Conflation) -> Conflation:
        """The canonical conflation the certificate ends at."""
        if xi.kind == "canonical":
            return xi
        if xi.kind == "special":
            return self.canonicalize(xi)[1]
        if not xi.certificate:
            raise ConflationError("general conflation without certificate")
        return xi.certificate[-1].target

    def verify(self, xi: Conflation) -> list[str]:
        """Replay the data of a conflation; returns the list of problems."""
        probs = []
        if xi.kind == "canonical":
            try:
                again = self.make_canonical(xi.X, xi.Y, xi.gamma)
            except ConflationError as exc:
                return [str(exc)]
            if again.E != xi.E or not self.tw.equal(again.f, xi.f) or not self.tw.equal(again.g, xi.g):
                probs.append("canonical data inconsistent")
            return probs
        if xi.kind == "special":
            try:
                self.validate_special(xi.f, xi.g)
            except ConflationError as exc:
                probs.append(str(exc))
            return probs
        cur = xi
        if not xi.certificate:
            return ["missing certificate"]
        for k, step in enumerate(xi.certificate):
            a, b = (cur, step.target) if step.forward else (step.target, cur)
            if not self.ladder_holds(a, b, step.h):
                probs.append(f"step {k}: ladder does not commute")
            if self.z_inverse(step.h) is None:
                probs.append(f"step {k}: ladder map is not invertible")
            cur = step.target
        if cur.kind != "canonical":
            probs.append("certificate does not end at a canonical conflation")
        else:
            probs.extend(self.verify(cur))
        return probs

    # -- pushouts and pullbacks -----------------------------------------------
    def pushout(self, xi: Conflation, h: TwMorphism) -> tuple[TwMorphism, Conflation]:
        """Along h : X -> X1; the new corner is h * gamma and t = diag(h, I_Y)."""
        self._need_canonical(xi)
        tw = self.tw
        gamma1 = tw.star(h, TwMorphism(xi.Y, xi.X, xi.gamma)).under
        xi1 = self.make_canonical(h.target, xi.Y, gamma1)
        t = TwMorphism(xi.E, xi1.E, self.ad.diag([h.under, self.ad.identity_of(xi.Y.module)]))
        return t, xi1

    def pullback(self, xi: Conflation, h: TwMorphism) -> tuple[TwMorphism, Conflation]:
        """Along h : Y1 -> Y; the new corner is -gamma * h and t = diag(I_X, h)."""
        self._need_canonical(xi)
        tw = self.tw
        gamma1 = tw.neg(tw.star(TwMorphism(xi.Y, xi.X, xi.gamma), h)).under
        xi1 = self.make_canonical(xi.X, h.source, gamma1)
        t = TwMorphism(xi1.E, xi.E, self.ad.diag([self.ad.identity_of(xi.X.module), h.under]))
        return t, xi1

    # -- the J functor ------------------------------------------------------------
    def J_object(self, X: TwObject) -> tuple[TwObject, TwMorphism]:
        """J(X) = X (+) X[1] with corner -tau_X, and the contraction s with b1(s) = I."""
        ad = self.ad
        X1 = self.tw.shift_object(X)
        xi = self.xi_J(X)
        parts = [X.module, X1.module]
        s = ad.assemble([[None, None], [ad.neg(ad.sigma_of(X.module)), None]], parts, parts)
        return xi.E, TwMorphism(xi.E, xi.E, s)

    def xi_J(self, X: TwObject) -> Conflation:
        X1 = self.tw.shift_object(X)
        return self.make_canonical(X, X1, self.ad.neg(self.ad.tau_of(X.module)))

    def J_morphism(self, f: TwMorphism) -> TwMorphism:
        JX = self.J_object(f.source)[0]
        JY = self.J_object(f.target)[0]
        return TwMorphism(JX, JY, self.ad.diag([f.under, self.ad.shift_morphism(f.under)]))

    # -- factorizations -------------------------------------------------------------
    def factor_through_inflation(self, h: TwMorphism, xi: Conflation) -> TwMorphism | None:
        """h' : E -> M with h' * f = h (h : X -> M)."""
        tw = self.tw
        return tw.solve_linear(xi.E, h.target, -1, [([None, xi.f], h)], cocycle=True)

    def factor_through_deflation(self, h: TwMorphism, xi: Conflation) -> TwMorphism | None:
        """h' : M -> E with g * h' = h (h : M -> Y)."""
        tw = self.tw
        return tw.solve_linear(h.source, xi.E, -1, [([xi.g, None], h)], cocycle=True)

    def factor_trivial(self, h: TwMorphism, xi: Conflation, side: str = "inflation") -> TwMorphism:
        """Factor a coboundary h through a special inflation or deflation by a coboundary."""
        tw = self.tw
        if tw.is_coboundary(h) is None:
            raise ConflationError("morphism is not homologically trivial")
        # the factor is b1(k), so it is trivial as well
        if side == "inflation":
            k = tw.solve_linear(xi.E, h.target, -2, [(lambda k: tw.star(tw.b1(k), xi.f), h)])
        else:
            k = tw.solve_linear(h.source, xi.E, -2, [(lambda k: tw.star(xi.g, tw.b1(k)), h)])
        if k is None:
            raise ConflationError("factorization failed")
        return tw.b1(k)

    def kernel_factor(self, h: TwMorphism, xi: Conflation) -> TwMorphism | None:
        """For h : E -> M with h * f = 0, find h2 : Y -> M with h2 * g = h."""
        tw = self.tw
        return tw.solve_linear(xi.Y, h.target, -1, [([None, xi.g], h)], cocycle=True)

    def cokernel_factor(self, h: TwMorphism, xi: Conflation) -> TwMorphism | None:
        """For h : M -> E with g * h = 0, find h1 : M -> X with f * h1 = h."""
        tw = self.tw
        return tw.solve_linear(h.source, xi.X, -1, [([xi.f, None], h)], cocycle=True)

    # -- rotation and cone pairs ------------------------------------------------------
    def rotation_conflation(self, xi: Conflation) -> tuple[Conflation, Conflation]:
        """E -> J(X)(+)Y -> X[1] with alpha = (h_xi, g)^t, beta = (beta_X, -h_gamma).

        Returns the certified pair and the canonical conflation it transforms
        into: E -> E(+)X[1] -> X[1] with corner (-tau_X, 0)^t.
        """
        self._need_canonical(xi)
        tw, ad = self.tw, self.ad
        X, Y, E = xi.X, xi.Y, xi.E
        X1 = tw.shift_object(X)
        JX = self.J_object(X)[0]
        h_gamma = ad.neg(ad.circ(ad.sigma_of(X.module), xi.gamma))  # Y -> X[1]
        h_xi = ad.diag([ad.identity_of(X.module), h_gamma])  # E -> J(X)
        mid = tw.direct_sum([JX, Y])
        alpha = ad.assemble([[h_xi], [xi.g.under]], [E.module], [JX.module, Y.module])
        beta_X = ad.projection([X.module, X1.module], 1)
        beta = ad.assemble([[beta_X, ad.neg(h_gamma)]], [JX.module, Y.module], [X1.module])
        eta = Conflation(E, mid, X1, TwMorphism(E, mid, alpha), TwMorphism(mid, X1, beta), "general")
        gamma1 = ad.assemble([[ad.neg(ad.tau_of(X.module))], [None]], [X1.module], [X.module, Y.module])
        eta1 = self.make_canonical(E, X1, gamma1)
        return self.certify(eta, eta1), eta1

    def rotation_conflation_left(self, xi: Conflation) -> tuple[Conflation, Conflation]:
        """Y[-1] -> J(Y[-1])(+)X -> E with alpha = (alpha_{Y[-1]}, -h^gamma)^t, beta = (h^xi, f).

        The canonical target is Y[-1] -> Y[-1](+)E -> E with corner (0, -tau_{Y[-1]}).
        """
        self._need_canonical(xi)
        tw, ad = self.tw, self.ad
        X, Y, E = xi.X, xi.Y, xi.E
        Ym = tw.shift_object(Y, -1)
        JY = self.J_object(Ym)[0]
        hg = ad.neg(ad.shift_morphism(ad.circ(ad.sigma_of(X.module), xi.gamma), -1))  # Y[-1] -> X
        h_xi = ad.assemble([[hg, None], [None, ad.identity_of(Y.module)]], [Ym.module, Y.module], [X.module, Y.module])
        mid = tw.direct_sum([JY, X])
        alpha_Y = ad.embedding([Ym.module, Y.module], 0)
        alpha = ad.assemble([[alpha_Y], [ad.neg(hg)]], [Ym.module], [JY.module, X.module])
        beta = ad.assemble([[h_xi, xi.f.under]], [JY.module, X.module], [E.module])
        eta = Conflation(Ym, mid, E, TwMorphism(Ym, mid, alpha), TwMorphism(mid, E, beta), "general")
        gamma1 = ad.assemble([[None, ad.neg(ad.tau_of(Ym.module))]], [X.module, Y.module], [Ym.module])
        eta1 = self.make_canonical(Ym, E, gamma1)
        return self.certify(eta, eta1), eta1

    def cone_object(self, f: TwMorphism) -> TwObject:
        """(W, delta'_W) with W = Y (+) X[1] and corner f o tau_X."""
        X, Y = f.source, f.target
        corner = self.ad.circ(f.under, self.ad.tau_of(X.module))
        return self.extension(Y, self.tw.shift_object(X), corner)

    def cone_conflation(self, f: TwMorphism) -> tuple[Conflation, Conflation]:
        """X -> J(X)(+)Y -> W with alpha = (alpha_X, f)^t and beta = (diag(-f, I), (I, 0)^t).

        The canonical target is X -> X(+)W -> W with corner (0, -tau_X).
        """
        tw, ad = self.tw, self.ad
        X, Y = f.source, f.target
        X1 = tw.shift_object(X)
        W = self.cone_object(f)
        JX = self.J_object(X)[0]
        mid = tw.direct_sum([JX, Y])
        alpha_X = ad.embedding([X.module, X1.module], 0)
        alpha = ad.assemble([[alpha_X], [f.under]], [X.module], [JX.module, Y.module])
        hJ = ad.assemble([[ad.neg(f.under), None], [None, ad.identity_of(X1.module)]], [X.module, X1.module], [Y.module, X1.module])
        gY = ad.embedding([Y.module, X1.module], 0)
        beta = ad.assemble([[hJ, gY]], [JX.module, Y.module], [W.module])
        eta = Conflation(X, mid, W, TwMorphism(X, mid, alpha), TwMorphism(mid, W, beta), "general")
        gamma_n = ad.assemble([[None, ad.neg(ad.tau_of(X.module))]], [Y.module, X1.module], [X.module])
        eta_n = self.make_canonical(X, W, gamma_n)
        return self.certify(eta, eta_n), eta_n

    def biproduct(self, objs: Sequence[TwObject]):
        """The sum with its embeddings and projections."""
        S = self.tw.direct_sum(objs)
        emb = [self.tw.embedding(objs, i, S) for i in range(len(objs))]
        proj = [self.tw.projection(objs, i, S) for i in range(len(objs))]
        return S, emb, proj


def modules_of(objs: Sequence[TwObject]) -> list[SModule]:
    return [X.module for X in objs]
