"""Triangles in the cohomology category.

Morphisms of the cohomology category are represented by cocycles; every
equality below is equality of classes, decided by the coboundary solver.
A triangle either comes straight from a canonical conflation or carries an
isomorphism of sextuples onto the canonical triangle of one.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence

from .algebra import Report
from .confl import ConflCategory, Conflation, ConflationError
from .tw import TwCategory, TwMorphism, TwObject


class TriangleError(ConflationError):
    """Input that cannot be turned into the requested triangle data."""


@dataclass
class Triangle:
    X: TwObject
    E: TwObject
    Y: TwObject
    u: TwMorphism
    v: TwMorphism
    w: TwMorphism  # Y -> X[1]
    kind: str  # "canonical" | "derived"
    conflation: Conflation
    iso: tuple | None = None  # (t1, t2, t3) onto the canonical triangle of `conflation`

    @property
    def maps(self) -> tuple:
        return self.u, self.v, self.w


@dataclass
class Octahedron:
    triangle: Triangle  # U' -> Y' -> X' -> U'[1]
    f: TwMorphism
    g: TwMorphism
    squares: dict = dc_field(default_factory=dict)  # name -> bool


class TriCategory:
    def __init__(self, confl: ConflCategory):
        self.C = confl
        self.tw: TwCategory = confl.tw
        self.ad = confl.ad

    # -- shift functor --------------------------------------------------------
    def T(self, x, k: int = 1):
        if isinstance(x, TwObject):
            return self.tw.shift_object(x, k)
        return self.tw.shift_morphism(x, k)

    def T_inv(self, x):
        return self.T(x, -1)

    # -- cohomology-level helpers -------------------------------------------------
    def comp(self, *fs: TwMorphism) -> TwMorphism:
        """Composite f_1 f_2 ... f_n (rightmost applied first) via star."""
        out = fs[-1]
        for g in reversed(fs[:-1]):
            out = self.tw.star(g, out)
        return out

    def heq(self, f: TwMorphism, g: TwMorphism) -> bool:
        return f.source == g.source and f.target == g.target and self.tw.h_equal(f, g)

    def inverse(self, f: TwMorphism) -> TwMorphism:
        g = self.tw.h_inverse(f)
        if g is None:
            raise TriangleError("morphism is not invertible in the cohomology category")
        return g

    def is_iso(self, f: TwMorphism) -> bool:
        return self.tw.h_inverse(f) is not None

    def identity(self, X: TwObject) -> TwMorphism:
        return self.tw.identity(X)

    # -- construction -------------------------------------------------------------
    def canonical_triangle(self, xi: Conflation) -> Triangle:
        self.C._need_canonical(xi)
        w = self.C.w_of(xi)
        return Triangle(xi.X, xi.E, xi.Y, xi.f, xi.g, w, "canonical", xi)

    def sextuple_squares(self, tri: Triangle, tri2: Triangle, t1, t2, t3) -> dict:
        """The three squares of a morphism of sextuples, decided in the cohomology category."""
        return {
            "square_u": self.heq(self.comp(t2, tri.u), self.comp(tri2.u, t1)),
            "square_v": self.heq(self.comp(t3, tri.v), self.comp(tri2.v, t2)),
            "square_w": self.heq(self.comp(self.T(t1), tri.w), self.comp(tri2.w, t3)),
        }

    def derived(self, X, E, Y, u, v, w, target: Triangle, iso: tuple) -> Triangle:
        """A sextuple together with an isomorphism onto a (certified) triangle; isos compose."""
        if target.kind == "derived":
            s1, s2, s3 = target.iso
            iso = (self.comp(s1, iso[0]), self.comp(s2, iso[1]), self.comp(s3, iso[2]))
        return Triangle(X, E, Y, u, v, w, "derived", target.conflation, iso)

    def triangle_from_conflation(self, xi: Conflation) -> Triangle:
        """The sextuple (f, g, w) of a certified conflation, w taken from its canonical end."""
        if xi.kind == "canonical":
            return self.canonical_triangle(xi)
        probs = self.C.verify(xi)
        if probs:
            raise TriangleError("; ".join(probs))
        if xi.kind == "special":
            h, can = self.C.canonicalize(xi)
            mid = h
        else:
            mid = self.identity(xi.E)
            for step in xi.certificate:
                h = step.h if step.forward else self.C.z_inverse(step.h)
                mid = self.comp(h, mid)
            can = xi.certificate[-1].target
        tc = self.canonical_triangle(can)
        return self.derived(xi.X, xi.E, xi.Y, xi.f, xi.g, tc.w, tc, (self.identity(xi.X), mid, self.identity(xi.Y)))

    def identity_triangle(self, X: TwObject) -> Triangle:
        """X -> X -> 0 -> X[1]."""
        xi = self.C.make_canonical(X, self.tw.zero_object())
        return self.canonical_triangle(xi)

    def cone_of(self, f: TwMorphism) -> Triangle:
        """X -f-> Y -> W -> X[1] through the cone conflation; the J(X) summand is dropped."""
        eta, eta_n = self.C.cone_conflation(f)
        (step,) = eta.certificate
        JX = self.C.J_object(f.source)[0]
        iota_Y = self.tw.embedding([JX, f.target], 1, eta.E)
        theta2 = self.comp(step.h, iota_Y)
        W = eta.Y
        g = TwMorphism(f.target, W, self.ad.embedding([f.target.module, self.T(f.source).module], 0))
        tc = self.canonical_triangle(eta_n)
        return self.derived(f.source, f.target, W, f, g, tc.w, tc, (self.identity(f.source), theta2, self.identity(W)))

    # -- rotations ------------------------------------------------------------------
    def _canonical_of(self, tri: Triangle) -> Triangle:
        return self.canonical_triangle(tri.conflation)

    def rotate_right(self, tri: Triangle, sign: int = -1) -> Triangle:
        """E -v-> Y -w-> X[1] -(-u[1])-> E[1].  ``sign=+1`` builds the wrong rotation."""
        tc = self._canonical_of(tri)
        xi = tri.conflation
        eta, eta1 = self.C.rotation_conflation(xi)
        (step,) = eta.certificate
        JX = self.C.J_object(xi.X)[0]
        theta2 = self.comp(step.h, self.tw.embedding([JX, xi.Y], 1, eta.E))
        t1 = self.canonical_triangle(eta1)
        rot_c = self.derived(
            tc.E, tc.Y, self.T(tc.X), tc.v, tc.w, self.tw.scale(sign, self.T(tc.u)), t1,
            (self.identity(tc.E), theta2, self.identity(self.T(tc.X))),
        )
        last = self.tw.scale(sign, self.T(tri.u))
        if tri.kind == "canonical":
            return Triangle(tri.E, tri.Y, self.T(tri.X), tri.v, tri.w, last, "derived", rot_c.conflation, rot_c.iso)
        a1, a2, a3 = tri.iso
        return self.derived(tri.E, tri.Y, self.T(tri.X), tri.v, tri.w, last, rot_c, (a2, a3, self.T(a1)))

    def rotate_left(self, tri: Triangle) -> Triangle:
        """Y[-1] -(-w[-1])-> X -u-> E -v-> Y."""
        tc = self._canonical_of(tri)
        xi = tri.conflation
        eta, eta1 = self.C.rotation_conflation_left(xi)
        (step,) = eta.certificate
        Ym = self.T_inv(xi.Y)
        JY = self.C.J_object(Ym)[0]
        theta2 = self.comp(step.h, self.tw.embedding([JY, xi.X], 1, eta.E))
        t1 = self.canonical_triangle(eta1)
        rot_c = self.derived(
            Ym, tc.X, tc.E, self.tw.neg(self.T_inv(tc.w)), tc.u, tc.v, t1,
            (self.tw.neg(self.identity(Ym)), theta2, self.identity(tc.E)),
        )
        first = self.tw.neg(self.T_inv(tri.w))
        if tri.kind == "canonical":
            return Triangle(self.T_inv(tri.Y), tri.X, tri.E, first, tri.u, tri.v, "derived", rot_c.conflation, rot_c.iso)
        a1, a2, a3 = tri.iso
        return self.derived(self.T_inv(tri.Y), tri.X, tri.E, first, tri.u, tri.v, rot_c, (self.T_inv(a3), a1, a2))

    def shift_triangle(self, tri: Triangle) -> Triangle:
        """(Tu, Tv, -Tw), certified through the shifted canonical conflation."""
        xi = tri.conflation
        xs = self.C.make_canonical(self.T(xi.X), self.T(xi.Y), self.ad.shift_morphism(xi.gamma))
        tc = self.canonical_triangle(xs)
        maps = (self.T(tri.u), self.T(tri.v), self.tw.neg(self.T(tri.w)))
        iso = tuple(self.T(t) for t in tri.iso) if tri.kind == "derived" else tuple(self.identity(O) for O in (tc.X, tc.E, tc.Y))
        return Triangle(self.T(tri.X), self.T(tri.E), self.T(tri.Y), *maps, "derived", xs, iso)

    def transport(self, tri: Triangle, a: TwMorphism, b: TwMorphism, c: TwMorphism) -> Triangle:
        """The sextuple isomorphic to tri through isomorphisms a, b, c (tri -> result)."""
        ai, bi, ci = self.inverse(a), self.inverse(b), self.inverse(c)
        u = self.comp(b, tri.u, ai)
        v = self.comp(c, tri.v, bi)
        w = self.comp(self.T(a), tri.w, ci)
        iso = (ai, bi, ci)
        if tri.kind == "canonical":
            return Triangle(a.target, b.target, c.target, u, v, w, "derived", tri.conflation, iso)
        return self.derived(a.target, b.target, c.target, u, v, w, tri, iso)

    # -- verification -------------------------------------------------------------------
    def triangle_problems(self, tri: Triangle) -> list[str]:
        probs = [f"conflation: {p}" for p in self.C.verify(tri.conflation)]
        if probs:
            return probs
        tc = self._canonical_of(tri)
        if tri.kind == "canonical":
            if not (self.tw.equal(tri.u, tc.u) and self.tw.equal(tri.v, tc.v) and self.heq(tri.w, tc.w)):
                probs.append("maps differ from the canonical triangle")
            return probs
        t1, t2, t3 = tri.iso
        for name, t, src, tgt in (("t1", t1, tri.X, tc.X), ("t2", t2, tri.E, tc.E), ("t3", t3, tri.Y, tc.Y)):
            if t.source != src or t.target != tgt:
                probs.append(f"{name} has wrong ends")
                return probs
            if not (self.tw.is_cocycle(t) or self.tw.is_zero(t)) or not self.is_iso(t):
                probs.append(f"{name} is not an isomorphism")
        for name, ok in self.sextuple_squares(tri, tc, t1, t2, t3).items():
            if not ok:
                probs.append(f"{name} does not commute")
        return probs

    def is_triangle(self, tri: Triangle) -> bool:
        return not self.triangle_problems(tri)

    # -- TR3 -------------------------------------------------------------------------------
    def complete_tr3(self, theta1: TwMorphism, theta2: TwMorphism, tri: Triangle, tri2: Triangle) -> TwMorphism:
        """theta3 making (theta1, theta2, theta3) a morphism of triangles."""
        if not self.heq(self.comp(tri2.u, theta1), self.comp(theta2, tri.u)):
            raise TriangleError("input square does not commute")
        xi, xi2 = tri.conflation, tri2.conflation
        phi = tri.iso if tri.kind == "derived" else None
        psi = tri2.iso if tri2.kind == "derived" else None
        t1, t2 = theta1, theta2
        if phi is not None:
            t1 = self.comp(t1, self.inverse(phi[0]))
            t2 = self.comp(t2, self.inverse(phi[1]))
        if psi is not None:
            t1 = self.comp(psi[0], t1)
            t2 = self.comp(psi[1], t2)
        s = self.tw.sub(self.comp(xi2.f, t1), self.comp(t2, xi.f))
        if not self.tw.is_zero(s):
            s1 = self.C.factor_trivial(s, xi, "inflation")
            t2 = self.tw.add(t2, s1)
        t3 = self.C.kernel_factor(self.comp(xi2.g, t2), xi)
        if t3 is None:
            raise TriangleError("cokernel factorization failed")
        if psi is not None:
            t3 = self.comp(self.inverse(psi[2]), t3)
        if phi is not None:
            t3 = self.comp(t3, phi[2])
        return t3

    # -- TR4 ---------------------------------------------------------------------------------
    def composite_conflation(self, xi: Conflation, eta: Conflation) -> Conflation:
        """For canonical xi : X -> Y -> U' and eta : Y -> U -> X', the canonical zeta : X -> U -> Y'."""
        self.C._need_canonical(xi)
        self.C._need_canonical(eta)
        if eta.X != xi.E:
            raise TriangleError("incompatible decompositions: eta must start at the middle of xi")
        ad = self.ad
        X, Up, Xp = xi.X, xi.Y, eta.Y
        parts3 = [X.module, Up.module, Xp.module]
        rest = [Up.module, Xp.module]
        d = eta.E.delta
        blk = lambda j, i: ad.component(d, parts3, parts3, j, i)
        Yp_delta = ad.assemble([[blk(1, 1), blk(1, 2)], [blk(2, 1), blk(2, 2)]], rest, rest)
        Yp = self.tw.validate(Yp_delta.source, Yp_delta)
        corner = ad.assemble([[blk(0, 1), blk(0, 2)]], rest, [X.module])
        zeta = self.C.make_canonical(X, Yp, corner)
        if zeta.E != eta.E:
            raise TriangleError("incompatible decompositions: composite is not canonical")
        return zeta

    def octahedron_canonical(self, xi: Conflation, eta: Conflation) -> tuple[Conflation, Conflation, TwMorphism, TwMorphism]:
        """Returns (zeta, the special conflation U' -> Y' -> X', f1, g1)."""
        zeta = self.composite_conflation(xi, eta)
        ad, tw = self.ad, self.tw
        Up, Xp, Yp = xi.Y, eta.Y, zeta.Y
        rest = [Up.module, Xp.module]
        f1 = TwMorphism(Up, Yp, ad.embedding(rest, 0))
        g1 = TwMorphism(Yp, Xp, ad.projection(rest, 1))
        lower = self.C.validate_special(f1, g1)
        return zeta, lower, f1, g1

    def octahedron(self, tri1: Triangle, tri2: Triangle, tri3: Triangle) -> Octahedron:
        """Octahedral completion for tri1 : X -> Y -> Z', tri2 : Y -> Z -> X', tri3 : X -> Z -> Y'."""
        tw, C = self.tw, self.C
        u, i, i_ = tri1.maps
        v, j, j_ = tri2.maps
        vu, k, k_ = tri3.maps
        if not (tri1.E == tri2.X and tri1.X == tri3.X and tri2.E == tri3.E):
            raise TriangleError("triangles do not fit together")
        if not self.heq(vu, self.comp(v, u)):
            raise TriangleError("third triangle does not start with the composite")
        ident = lambda tri: tri.iso if tri.kind == "derived" else tuple(self.identity(O) for O in (tri.X, tri.E, tri.Y))
        # (D1): tri1 onto the canonical triangle of xi1 : A -> B -> C'
        th1, th2, th3 = ident(tri1)
        xi1 = tri1.conflation
        tx1 = self.canonical_triangle(xi1)
        # (D2): replace tri2 by a canonical triangle starting at B
        h = self.comp(v, self.inverse(th2))
        eta1, xi2 = C.cone_conflation(h)
        (step,) = eta1.certificate
        JB = C.J_object(xi1.E)[0]
        zeta2 = self.comp(step.h, tw.embedding([JB, h.target], 1, eta1.E))
        tx2 = self.canonical_triangle(xi2)
        beta3 = self.complete_tr3(th2, zeta2, tri2, tx2)
        # (D3): canonical xi3 : A -> C -> B'
        xi3, lower, f1, g1 = self.octahedron_canonical(xi1, xi2)
        tx3 = self.canonical_triangle(xi3)
        zeta3 = self.complete_tr3(th1, zeta2, tri3, tx3)
        f_bar = self.comp(self.inverse(zeta3), f1, th3)
        g_bar = self.comp(self.inverse(beta3), g1, zeta3)
        last = self.comp(self.T(i), j_)
        low_tri = self.triangle_from_conflation(lower)
        out = self.derived(tri1.Y, tri3.Y, tri2.Y, f_bar, g_bar, last, low_tri, (th3, zeta3, beta3))
        squares = {
            "f i = k v": self.heq(self.comp(f_bar, i), self.comp(k, v)),
            "g k = j": self.heq(self.comp(g_bar, k), j),
            "k' f = i'": self.heq(self.comp(k_, f_bar), i_),
            "T(u) k' = j' g": self.heq(self.comp(self.T(u), k_), self.comp(j_, g_bar)),
        }
        return Octahedron(out, f_bar, g_bar, squares)

    # -- axiom sweep ---------------------------------------------------------------------
    def verify_axioms(self, instances: Sequence[dict], rng=None) -> list[Report]:
        """Each instance: {"tri": Triangle, "theta": (t1, t2, tri2) optional, "pair": (u, v) optional}."""
        reps = {name: Report(name) for name in ("TR1a", "TR1b", "TR1c", "TR2", "TR3", "TR4")}
        if not instances:
            for rep in reps.values():
                rep.notes.append("warning: empty instance set")
            return list(reps.values())
        for n, inst in enumerate(instances):
            tri = inst["tri"]
            reps["TR1b"].checked += 1
            if not self.is_triangle(self.identity_triangle(tri.X)):
                reps["TR1b"].fail((n, "identity triangle"))
            reps["TR1c"].checked += 1
            cone = self.cone_of(tri.u)
            if not (self.is_triangle(cone) and self.tw.equal(cone.u, tri.u)):
                reps["TR1c"].fail((n, self.triangle_problems(cone)))
            reps["TR1a"].checked += 1
            two = lambda O: self.tw.scale(2, self.identity(O))
            moved = self.transport(tri, two(tri.X), self.tw.neg(self.identity(tri.E)), two(tri.Y))
            if not self.is_triangle(moved):
                reps["TR1a"].fail((n, self.triangle_problems(moved)))
            reps["TR2"].checked += 1
            r = self.rotate_right(tri)
            l = self.rotate_left(tri)
            back = self.rotate_left(r)
            bad = self.triangle_problems(r) + self.triangle_problems(l) + self.triangle_problems(back)
            if not all(self.tw.equal(a, b) for a, b in zip(back.maps, tri.maps)):
                bad.append("round trip changed the maps")
            if bad:
                reps["TR2"].fail((n, bad))
            if "theta" in inst:
                reps["TR3"].checked += 1
                t1, t2, tri2 = inst["theta"]
                try:
                    t3 = self.complete_tr3(t1, t2, tri, tri2)
                    sq = self.sextuple_squares(tri, tri2, t1, t2, t3)
                    if not all(sq.values()):
                        reps["TR3"].fail((n, sq))
                except ConflationError as exc:
                    reps["TR3"].fail((n, str(exc)))
            if "pair" in inst:
                reps["TR4"].checked += 1
                u, v = inst["pair"]
                try:
                    octa = self.octahedron(self.cone_of(u), self.cone_of(v), self.cone_of(self.comp(v, u)))
                    bad = self.triangle_problems(octa.triangle) + [k for k, ok in octa.squares.items() if not ok]
                    if bad:
                        reps["TR4"].fail((n, bad))
                except ConflationError as exc:
                    reps["TR4"].fail((n, str(exc)))
        return list(reps.values())

