"""Randomized identity sweeps shared by the CLI and the test-suite.

Every function takes a workspace and a :class:`Generator` and returns a
:class:`Report`; a failure records the case number and what broke.
"""

from __future__ import annotations

from .algebra import Report
from .confl import ConflationError
from .generate import Generator
from .tw import TwMorphism


def _check(rep: Report, case: int, name: str, ok: bool) -> None:
    rep.checked += 1
    rep.tally[name] = rep.tally.get(name, 0) + 1
    if not ok:
        rep.fail((case, name))


# -- ad level: sigma, tau and the sandwich law ------------------------------------
def sigma_tau_suite(ws, gen: Generator, cases: int = 100, max_len: int = 4) -> Report:
    ad = ws.ad
    rep = Report("sigma-tau")
    degs = range(-3, 4)
    for case in range(cases):
        X = gen.module()
        Y = gen.linked_module(X, degs)
        sX, tX, sY, tY = ad.sigma_of(X), ad.tau_of(X), ad.sigma_of(Y), ad.tau_of(Y)
        _check(rep, case, "tau o sigma = I", ad.equal(ad.circ(tX, sX), ad.identity_of(X)))
        _check(rep, case, "sigma o tau = I", ad.equal(ad.circ(sX, tX), ad.identity_of(X.shift(1))))
        _check(rep, case, "sigma[-1] = -sigma", ad.equal(ad.shift_morphism(sX, -1), ad.neg(ad.sigma_of(X.shift(-1)))))
        _check(rep, case, "tau[-1] = -tau", ad.equal(ad.shift_morphism(tX, -1), ad.neg(ad.tau_of(X.shift(-1)))))
        f = gen.hom(X, Y, gen.live_degree(X, Y, degs))
        _check(rep, case, "(f tau) sigma = f", ad.equal(ad.circ(ad.circ(f, tX), sX), f))
        _check(rep, case, "tau (sigma f) = -f", ad.equal(ad.circ(tY, ad.circ(sY, f)), ad.neg(f)))
        g = gen.hom(X, Y.shift(1), gen.live_degree(X, Y.shift(1), degs))
        _check(rep, case, "sigma (tau g) = -g", ad.equal(ad.circ(sY, ad.circ(tY, g)), ad.neg(g)))
        _check(rep, case, "sigma (f tau) = f[1]", ad.equal(ad.circ(sY, ad.circ(f, tX)), ad.shift_morphism(f)))
        _check(rep, case, "(sigma f) tau = -f[1]", ad.equal(ad.circ(ad.circ(sY, f), tX), ad.neg(ad.shift_morphism(f))))
        # chains X_0 -> ... -> X_n
        n = 1 + case % max_len
        seeded = gen.seeded_chain(n) if case % 2 == 0 else None
        if seeded is not None:
            mods, fs, ds = seeded
        else:
            mods = [gen.module()]
            for _ in range(n):
                mods.append(gen.linked_module(mods[-1], degs))
            ds = [gen.live_degree(mods[k], mods[k + 1], degs) for k in range(n)]
            fs = [gen.hom(mods[k], mods[k + 1], ds[k]) for k in range(n)]  # f_1 .. f_n
        chain = list(reversed(fs))  # written order [f_n, ..., f_1]
        base = ad.ad_bn(chain)
        sn = ad.sigma_of(mods[n])
        lhs = ad.ad_bn([ad.circ(sn, chain[0])] + chain[1:])
        _check(rep, case, "sigma pull-out", ad.equal(lhs, ad.neg(ad.circ(sn, base))))
        _check(rep, case, "shift of b_n", ad.equal(ad.ad_bn([ad.shift_morphism(f) for f in chain]), ad.shift_morphism(base)))
        for l in range(1, n):
            fl, fl1 = fs[l - 1], fs[l]
            Xl = mods[l]
            ins = list(fs)
            ins[l - 1] = ad.circ(ad.sigma_of(Xl), fl)
            ins[l] = ad.circ(fl1, ad.tau_of(Xl))
            val = ad.ad_bn(list(reversed(ins)))
            _check(rep, case, f"tau-sigma insertion l={l}", ad.equal(val, ad.scale(ws.field.sign(ds[l]), base)))
            sand = [ad.shift_morphism(f) for f in fs[l:]]
            lower = fs[: l - 1] + [ad.circ(ad.sigma_of(Xl), fl)]
            val = ad.ad_bn(list(reversed(lower + sand)))
            d_l = sum(ds[l:]) + 1
            _check(rep, case, f"sandwich l={l}", ad.equal(ad.circ(sn, base), ad.scale(ws.field.sign(d_l), val)))
    return rep


def ad_calculus_suite(ws, gen: Generator, cases: int = 100) -> Report:
    """Unit laws, special pull-outs and three-factor associativity."""
    ad, F = ws.ad, ws.field
    rep = Report("ad-calculus")
    degs = range(-3, 4)
    for case in range(cases):
        X, Y, Z, W = (gen.module() for _ in range(4))
        d = gen.live_degree(X, Y, degs)
        f = gen.hom(X, Y, d)
        _check(rep, case, "I o f = f", ad.equal(ad.circ(ad.identity_of(Y), f), f))
        _check(rep, case, "f o I = (-1)^(|f|+1) f", ad.equal(ad.circ(f, ad.identity_of(X)), ad.scale(F.sign(d + 1), f)))
        _check(rep, case, "I[1] = shifted I", ad.equal(ad.identity_of(X.shift(1)), ad.shift_morphism(ad.identity_of(X))))
        sg = ad.special_of(Y, Z, {u: F.random_matrix(gen.rng, Z.dim(u), Y.dim(u)) for u in Y.support if Z.dim(u)})
        sh = ad.special_of(Z, W, {u: F.random_matrix(gen.rng, W.dim(u), Z.dim(u)) for u in Z.support if W.dim(u)})
        g = gen.hom(Y, Z, gen.live_degree(Y, Z, degs))
        h = gen.hom(Z, W, gen.live_degree(Z, W, degs))
        dh = ad.degree(h, default=-1)
        # (h g) f = (-1)^(|h|+1) h (g f) when g special
        _check(rep, case, "assoc, g special", ad.equal(ad.circ(ad.circ(h, sg), f), ad.scale(F.sign(dh + 1), ad.circ(h, ad.circ(sg, f)))))
        # h special: strictly associative
        _check(rep, case, "assoc, h special", ad.equal(ad.circ(ad.circ(sh, g), f), ad.circ(sh, ad.circ(g, f))))
        # L(gf) = L(g) L(f)
        comp = ad.circ(sh, sg)
        _check(rep, case, "special composite is special", ad.is_special(comp))
        chain = [g, f]
        _check(rep, case, "special pull-out", ad.equal(ad.ad_bn([ad.circ(sh, chain[0])] + chain[1:]), ad.circ(sh, ad.ad_bn(chain))))
        seeded = gen.seeded_chain(2 + case % 2)
        if seeded is None:
            continue
        mods, fs, ds = seeded
        chain = list(reversed(fs))
        V = gen.module()
        sp = ad.special_of(V, mods[0], {u: F.random_matrix(gen.rng, mods[0].dim(u), V.dim(u)) for u in V.support if mods[0].dim(u)})
        lhs = ad.ad_bn(chain[:-1] + [ad.circ(chain[-1], sp)])
        rhs = ad.scale(F.sign(sum(ds[1:]) + 1), ad.circ(ad.ad_bn(chain), sp))
        _check(rep, case, "right special pull-out", ad.equal(lhs, rhs))
        l = 1 + case % (len(fs) - 1)
        Xl = mods[l]
        sm = ad.special_of(Xl, Xl, {u: F.random_matrix(gen.rng, d, d) for u, d in Xl.items})
        a, b = list(fs), list(fs)
        a[l] = ad.circ(fs[l], sm)
        b[l - 1] = ad.circ(sm, fs[l - 1])
        _check(rep, case, "special middle exchange", ad.equal(ad.ad_bn(a[::-1]), ad.scale(F.sign(ds[l] + 1), ad.ad_bn(b[::-1]))))
    return rep


# -- tw level --------------------------------------------------------------------------
def tw_suite(ws, gen: Generator, cases: int = 100) -> Report:
    tw = ws.tw
    rep = Report("tw")
    for case in range(cases):
        X, Y, Z, W = gen.object(), gen.object(), gen.object(), gen.object()
        h2 = gen.morphism(X, Y, -2)
        _check(rep, case, "b1 b1 = 0", tw.is_zero(tw.b1(tw.b1(h2))))
        hm = gen.morphism(X, Y, gen.choice((-3, -1, 0)))
        _check(rep, case, "b1 b1 = 0 (other degree)", tw.is_zero(tw.b1(tw.b1(hm))))
        f, g, h = gen.cocycle(X, Y), gen.cocycle(Y, Z), gen.cocycle(Z, W)
        gf = tw.star(g, f)
        _check(rep, case, "cocycle closure", tw.is_zero(tw.b1(gf)))
        _check(rep, case, "unit right", tw.equal(tw.star(f, tw.identity(X)), f))
        _check(rep, case, "unit left", tw.equal(tw.star(tw.identity(Y), f), f))
        _check(rep, case, "b1(I) = 0", tw.is_zero(tw.b1(tw.identity(X))))
        cb = gen.coboundary(Y, Z)
        _check(rep, case, "ideal right", tw.is_coboundary(tw.star(cb, f)) is not None)
        cb2 = gen.coboundary(X, Y)
        _check(rep, case, "ideal left", tw.is_coboundary(tw.star(g, cb2)) is not None)
        lhs, rhs = tw.star(tw.star(h, g), f), tw.star(h, tw.star(g, f))
        _check(rep, case, "H-associativity", tw.h_equal(lhs, rhs))
        _check(rep, case, "b1 commutes with shift", tw.equal(tw.b1(tw.shift_morphism(h2)), tw.shift_morphism(tw.b1(h2))))
        _check(rep, case, "strict split of b1", tw.equal(tw.split_strict_b1(tw.zero(X, Y), h2), tw.b1(h2)))
    return rep


def shift_suite(ws, gen: Generator, cases: int = 100) -> Report:
    tw, R = ws.tw, ws.tri
    rep = Report("shift")
    for case in range(cases):
        X, Y, Z = gen.object(), gen.object(), gen.object()
        f, g = gen.cocycle(X, Y), gen.cocycle(Y, Z)
        _check(rep, case, "T(g*f) = T(g)*T(f)", tw.equal(R.T(tw.star(g, f)), tw.star(R.T(g), R.T(f))))
        _check(rep, case, "T(I) = I", tw.equal(R.T(tw.identity(X)), tw.identity(R.T(X))))
        _check(rep, case, "T T^-1 = id on objects", R.T(R.T_inv(X)) == X and R.T_inv(R.T(X)) == X)
        _check(rep, case, "T T^-1 = id on morphisms", tw.equal(R.T(R.T_inv(f)), f))
        cb = gen.coboundary(X, Y)
        _check(rep, case, "T keeps coboundaries", tw.is_coboundary(R.T(cb)) is not None)
        _check(rep, case, "T^-1 keeps coboundaries", tw.is_coboundary(R.T_inv(cb)) is not None)
        _check(rep, case, "T keeps cocycles", tw.is_cocycle(R.T(f)) or tw.is_zero(f))
        if case % 4 == 0:
            xi = gen.canonical(X, Y)
            shifted = R.shift_triangle(R.canonical_triangle(xi))
            _check(rep, case, "shifted canonical triangle", R.is_triangle(shifted))
    return rep


# -- J and Psi ---------------------------------------------------------------------------
def j_suite(ws, gen: Generator, cases: int = 100) -> Report:
    tw, C = ws.tw, ws.confl
    rep = Report("J")
    for case in range(cases):
        X, Y, Z = gen.object(), gen.object(), gen.object()
        JX, s = C.J_object(X)
        _check(rep, case, "b1(s) = I", tw.equal(tw.b1(s), tw.identity(JX)))
        _check(rep, case, "I_J is a coboundary", tw.is_coboundary(tw.identity(JX)) is not None)
        _check(rep, case, "J(I) = I", tw.equal(C.J_morphism(tw.identity(X)), tw.identity(JX)))
        f, g = gen.cocycle(X, Y), gen.cocycle(Y, Z)
        _check(rep, case, "J(g*f) = J(g)*J(f)", tw.equal(C.J_morphism(tw.star(g, f)), tw.star(C.J_morphism(g), C.J_morphism(f))))
        xiJ = C.xi_J(X)
        _check(rep, case, "xi_J is a special conflation", not C.verify(xiJ) and not C.fiber_problems(xiJ.f, xiJ.g))
        # naturality ladder (f, J(f), f[1]) : xi_J(X) -> xi_J(Y)
        xiJY = C.xi_J(Y)
        _check(rep, case, "J naturality", C.ladder_commutes(xiJ, xiJY, f, C.J_morphism(f), tw.shift_morphism(f)))
        # relative projectivity / injectivity
        xi = gen.canonical()
        into = gen.cocycle(xi.X, JX)
        try:
            hp = C.factor_trivial(into, xi, "inflation")
            _check(rep, case, "maps into J factor through inflations", tw.equal(tw.star(hp, xi.f), into))
        except ConflationError:
            _check(rep, case, "maps into J factor through inflations", False)
        JU = C.J_object(xi.Y)[0]
        out = gen.cocycle(JU, xi.Y)
        try:
            hp = C.factor_trivial(out, xi, "deflation")
            _check(rep, case, "maps out of J factor through deflations", tw.equal(tw.star(xi.g, hp), out))
        except ConflationError:
            _check(rep, case, "maps out of J factor through deflations", False)
    return rep


def psi_suite(ws, gen: Generator, cases: int = 100) -> Report:
    tw, C = ws.tw, ws.confl
    rep = Report("psi")
    for case in range(cases):
        X, Y, cb = gen.pair_with_coboundary(1)
        X1 = tw.shift_object(X)
        if case % 2:
            # a summand X[1] of Y gives Hom(Y, X[1]) a nonzero class: the projection
            parts = [Y, X1]
            Y = tw.direct_sum(parts)
            proj = tw.projection(parts, 1, Y)
        h = gen.cocycle(Y, X1)
        xi = C.psi(h)
        _check(rep, case, "psi_inv psi = id", tw.equal(C.psi_inv(xi), h))
        _check(rep, case, "psi psi_inv = id", ws.ad.equal(C.psi(C.psi_inv(xi)).gamma, xi.gamma))
        if case % 2 == 0:
            h2 = tw.add(h, cb)
        else:
            h2 = tw.add(h, proj)
            for _ in range(3):
                if tw.is_coboundary(tw.sub(h, h2)) is None:
                    break
                h2 = gen.cocycle(Y, X1)
        cob = tw.is_coboundary(tw.sub(h, h2)) is not None
        eq = C.equivalent(xi, C.psi(h2))
        if cob:
            _check(rep, case, "coboundary difference => equivalent", eq is not None)
        else:
            _check(rep, case, "equivalent => coboundary difference", eq is None)
        if eq is not None:
            _check(rep, case, "equivalence is a ladder", C.ladder_holds(xi, C.psi(h2), eq))
            _check(rep, case, "equivalence is symmetric", C.equivalent(C.psi(h2), xi) is not None)
    return rep


# -- conflation calculus -------------------------------------------------------------------
def confl_suite(ws, gen: Generator, cases: int = 100) -> Report:
    tw, ad, C, F = ws.tw, ws.ad, ws.confl, ws.field
    rep = Report("conflations")
    for case in range(cases):
        xi = gen.canonical()
        X, E, Y = xi.X, xi.E, xi.Y
        X1, Y1, M = gen.object(), gen.object(), gen.object()
        h = gen.cocycle(X, X1)
        t, xp = C.pushout(xi, h)
        _check(rep, case, "pushout ladder", C.ladder_commutes(xi, xp, h, t, tw.identity(Y)))
        k = gen.cocycle(Y1, Y)
        t, xq = C.pullback(xi, k)
        _check(rep, case, "pullback ladder", C.ladder_commutes(xq, xi, tw.identity(X), t, k))
        _check(rep, case, "pushout along I", ad.equal(C.pushout(xi, tw.identity(X))[1].gamma, xi.gamma))
        _check(rep, case, "pullback along I", ad.equal(C.pullback(xi, tw.identity(Y))[1].gamma, xi.gamma))
        sp = gen.permuted(xi)
        hc, can = C.canonicalize(sp)
        _check(rep, case, "canonicalize ladder", C.ladder_holds(sp, can, hc))
        _check(rep, case, "canonicalize: equivalence both ways", C.equivalent(sp, xi) is not None and C.equivalent(xi, sp) is not None)
        _check(rep, case, "canonical corner is a cocycle", tw.is_zero(tw.b1(TwMorphism(Y, X, can.gamma))))
        # exact pair
        q = gen.cocycle(Y, M)
        hk = tw.star(q, xi.g)
        if tw.is_zero(tw.star(hk, xi.f)):
            h2 = C.kernel_factor(hk, xi)
            _check(rep, case, "kernel factorization", h2 is not None and tw.equal(tw.star(h2, xi.g), hk))
        r = gen.cocycle(M, X)
        hc2 = tw.star(xi.f, r)
        if tw.is_zero(tw.star(xi.g, hc2)):
            h1 = C.cokernel_factor(hc2, xi)
            _check(rep, case, "cokernel factorization", h1 is not None and tw.equal(tw.star(xi.f, h1), hc2))
        # biproducts
        S, emb, proj = C.biproduct([X, Y])
        _check(rep, case, "p_j s_j = I", all(tw.equal(tw.star(proj[j], emb[j]), tw.identity(O)) for j, O in enumerate([X, Y])))
        _check(rep, case, "p_j s_i = 0", tw.is_zero(tw.star(proj[0], emb[1])) and tw.is_zero(tw.star(proj[1], emb[0])))
        tot = tw.add(tw.star(emb[0], proj[0]), tw.star(emb[1], proj[1]))
        _check(rep, case, "sum s_i p_i = I", tw.equal(tot, tw.identity(S)))
        # triangular inverse
        s = gen.morphism(Y, X, -1)
        Hm = C.triangular(X, Y, S, S, tw.identity(X), s.under, tw.identity(Y))
        Hi = C.triangular(X, Y, S, S, tw.identity(X), ad.neg(s.under), tw.identity(Y))
        _check(rep, case, "triangular inverse", tw.equal(tw.star(Hi, Hm), tw.identity(S)) and tw.equal(tw.star(Hm, Hi), tw.identity(S)))
        # corner condition of a triangular ladder: b1(H) vanishes iff b1(s) = gamma' - gamma
        s2 = gen.morphism(Y, X, -1)
        g2 = ad.add(xi.gamma, tw.b1(s2).under)
        xi2 = C.make_canonical(X, Y, g2)
        H2 = C.triangular(X, Y, E, xi2.E, tw.identity(X), s2.under, tw.identity(Y))
        _check(rep, case, "corner condition", tw.is_zero(tw.b1(H2)) and C.ladder_holds(xi, xi2, H2))
        # b1-conjugation for special cocycles
        if not X.delta.terms and not Y.delta.terms:
            a = ad.special_of(Y.module, Y.module, {u: F.random_matrix(gen.rng, d, d) for u, d in Y.module.items})
            b = ad.special_of(X.module, X.module, {u: F.random_matrix(gen.rng, d, d) for u, d in X.module.items})
            mid = gen.morphism(Y, X, gen.choice((-2, -1, 0)))
            conj = TwMorphism(Y, X, ad.circ(b, ad.circ(mid.under, a)))
            rhs = ad.neg(ad.circ(b, ad.circ(tw.b1(mid).under, a)))
            _check(rep, case, "b1-conjugation", ad.equal(tw.b1(conj).under, rhs))
        # canonical inflations compose
        eta = C.make_canonical(E, gen.object())
        comp = tw.star(eta.f, xi.f)
        _check(rep, case, "composite of canonical inflations", C.is_special_inflation(comp))
        _check(rep, case, "identity is inflation and deflation", C.is_special_inflation(tw.identity(X)) and C.is_special_deflation(tw.identity(X)))
        # rotation and cone pairs are conflations
        if case % 5 == 0:
            _check(rep, case, "rotation conflation", not C.verify(C.rotation_conflation(xi)[0]))
            _check(rep, case, "left rotation conflation", not C.verify(C.rotation_conflation_left(xi)[0]))
            _check(rep, case, "cone conflation", not C.verify(C.cone_conflation(gen.cocycle(X, Y))[0]))
    return rep


# -- triangles -------------------------------------------------------------------------------
def triangle_instances(ws, gen: Generator, count: int) -> list[dict]:
    tw, C, R = ws.tw, ws.confl, ws.tri
    out = []
    for n in range(count):
        xi = gen.canonical()
        tri = R.canonical_triangle(xi)
        if n % 3 == 1:
            tri = R.cone_of(gen.cocycle(xi.X, xi.Y))
        elif n % 3 == 2:
            tri = R.rotate_right(tri)
        # TR3 data: pushout along a random t1, theta2 perturbed by q * g
        X1 = gen.object()
        t1 = gen.cocycle(tri.X, X1)
        base = R.canonical_triangle(tri.conflation)
        phi = tri.iso if tri.kind == "derived" else (R.identity(tri.X), R.identity(tri.E), R.identity(tri.Y))
        t1c = R.comp(t1, R.inverse(phi[0]))
        t2c, xp = C.pushout(base.conflation, t1c)
        tri2 = R.canonical_triangle(xp)
        q = gen.cocycle(tri.Y, xp.E)
        theta2 = tw.add(R.comp(t2c, phi[1]), tw.star(q, tri.v))
        X, Y = gen.object(), gen.object()
        pair = (gen.cocycle(X, Y), gen.cocycle(Y, gen.object()))
        out.append({"tri": tri, "theta": (t1, theta2, tri2), "pair": pair})
    return out


def tr2_mutation_detected(ws, tri) -> bool | None:
    """Whether the wrong-sign rotation is rejected; None when u[1] is 2-torsion in cohomology."""
    R, tw = ws.tri, ws.tw
    if tw.is_coboundary(tw.scale(2, R.T(tri.u))) is not None:
        return None
    return not R.is_triangle(R.rotate_right(tri, sign=+1))


def tri_suite(ws, gen: Generator, count: int = 25) -> list[Report]:
    """TR1-TR4 on generated instances, plus the wrong-sign rotation probe."""
    R = ws.tri
    instances = triangle_instances(ws, gen, count)
    reps = R.verify_axioms(instances)
    mut = Report("TR2-mutation")
    for n, inst in enumerate(instances):
        hit = tr2_mutation_detected(ws, inst["tri"])
        if hit is None:
            continue
        mut.checked += 1
        if not hit:
            mut.fail((n, "wrong-sign rotation accepted"))
    return reps + [mut]


# -- algebra and hat level ------------------------------------------------------------------
def algebra_suite(ws) -> list[Report]:
    Z = ws.algebra
    reps = Z.check_all()
    mutants = Report("unit-mutants")
    for label, bad in Z.unit_rule_mutants():
        mutants.checked += 1
        if all(r.ok for r in bad.check_all()):
            mutants.fail(label)
    return reps + [mutants]


def hat_suite(ws, window: int = 1) -> list[Report]:
    from .hat import run_hat_checks

    return run_hat_checks(ws.hat, window)


SUITES = {
    "sigma-tau": sigma_tau_suite,
    "ad-calculus": ad_calculus_suite,
    "tw": tw_suite,
    "shift": shift_suite,
    "J": j_suite,
    "psi": psi_suite,
    "conflations": confl_suite,
}
