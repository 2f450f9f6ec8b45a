import pytest

from twcat.ad import SModule
from twcat.confl import ConflationError
from twcat.generate import Generator
from twcat.hat import HatBasis
from twcat.tw import TwError, TwMorphism

from conftest import workspace


def gens(seed):
    return [(workspace(n), Generator(workspace(n), seed=seed)) for n in ("e1", "e2", "e3")]


def test_gamma_degree_checked():
    ws = workspace("e3")
    X = ws.tw.validate(SModule.of({(0, "0"): 1}))
    bad = ws.ad.morphism(X.module, X.module, {HatBasis("a", 0, 0): [[1]]})
    ok = ws.confl.make_canonical(X, X, bad)  # degree 0 and b1 = 0
    assert ws.confl.verify(ok) == []
    wrong = ws.ad.morphism(X.module, X.module, {HatBasis("c", 0, 0): [[1]]})
    with pytest.raises(ConflationError, match="degree"):
        ws.confl.make_canonical(X, X, wrong)


def test_canonical_conflation_verifies():
    for ws, gen in gens(31):
        for _ in range(10):
            assert ws.confl.verify(gen.canonical()) == []


def test_non_injective_fiber_reported():
    ws = workspace("e1")
    F = ws.field
    X = ws.tw.validate(SModule.of({(0, "0"): 1}))
    E = ws.tw.validate(SModule.of({(0, "0"): 2}))
    Y = ws.tw.validate(SModule.of({(0, "0"): 1}))
    f = TwMorphism(X, E, ws.ad.special_of(X.module, E.module, {(0, "0"): F.matrix([[0], [0]])}))
    g = TwMorphism(E, Y, ws.ad.special_of(E.module, Y.module, {(0, "0"): F.matrix([[0, 1]])}))
    with pytest.raises(ConflationError, match=r"not an inflation at \(0, '0'\)"):
        ws.confl.validate_special(f, g)


def test_triangular_differential_criterion():
    ws = workspace("e2")
    gen = Generator(ws, seed=32)
    ad, C = ws.ad, ws.confl
    lower_checked = 0
    for _ in range(30):
        X, Y = gen.object(), gen.object()
        parts = [X.module, Y.module]
        gamma = gen.cocycle(Y, X, 0).under
        upper = ad.assemble([[X.delta, gamma], [None, Y.delta]], parts, parts)
        assert C.canonical_pair_is_cocycle(X, Y, upper)
        # a lower-left block X -> Y breaks closedness of the inclusion or the projection
        cross = gen.hom(X.module, Y.module, 0)
        if ad.is_zero(cross):
            continue
        mixed = ad.assemble([[X.delta, None], [cross, Y.delta]], parts, parts)
        try:
            ws.tw.validate(mixed.source, mixed)
        except TwError:
            continue
        lower_checked += 1
        assert not C.canonical_pair_is_cocycle(X, Y, mixed)
    assert lower_checked > 0


def test_canonicalize_identity_on_canonical():
    ws = workspace("e3")
    xi = Generator(ws, seed=33).canonical()
    h, can = ws.confl.canonicalize(xi)
    assert can is xi and ws.tw.equal(h, ws.tw.identity(xi.E))


def test_canonicalize_permuted():
    for ws, gen in gens(34):
        for _ in range(10):
            xi = gen.permuted(gen.canonical())
            h, can = ws.confl.canonicalize(xi)
            assert ws.tw.is_special(h)
            assert ws.confl.ladder_holds(xi, can, h)


def test_self_equivalence_is_identity():
    ws = workspace("e2")
    xi = Generator(ws, seed=35).canonical()
    h = ws.confl.equivalent(xi, xi)
    assert h is not None and ws.tw.equal(h, ws.tw.identity(xi.E))


def test_non_coboundary_gives_inequivalent():
    ws = workspace("e1")
    tw, C = ws.tw, ws.confl
    X = tw.validate(SModule.of({(0, "0"): 1}))
    X1 = tw.shift_object(X)
    xi_id = C.psi(tw.identity(X1))
    xi_0 = C.psi(tw.zero(X1, X1))
    assert C.equivalent(xi_id, xi_0) is None


def test_pushout_along_identity_and_zero():
    for ws, gen in gens(36):
        tw, C = ws.tw, ws.confl
        xi = gen.canonical()
        t, xi1 = C.pushout(xi, tw.identity(xi.X))
        assert ws.ad.equal(xi1.gamma, xi.gamma)
        split = C.make_canonical(xi.X, xi.Y)
        _, s1 = C.pushout(split, gen.cocycle(xi.X, gen.object()))
        assert ws.ad.is_zero(s1.gamma)


def test_pullback_along_identity_and_zero():
    for ws, gen in gens(37):
        tw, C = ws.tw, ws.confl
        xi = gen.canonical()
        t, xi1 = C.pullback(xi, tw.identity(xi.Y))
        assert ws.ad.equal(xi1.gamma, xi.gamma)
        split = C.make_canonical(xi.X, xi.Y)
        _, s1 = C.pullback(split, gen.cocycle(gen.object(), xi.Y))
        assert ws.ad.is_zero(s1.gamma)


def test_pushout_pullback_ladders():
    for ws, gen in gens(38):
        tw, C = ws.tw, ws.confl
        for _ in range(10):
            xi = gen.canonical()
            h = gen.cocycle(xi.X, gen.object())
            t, xi1 = C.pushout(xi, h)
            assert C.ladder_commutes(xi, xi1, h, t, tw.identity(xi.Y))
            k = gen.cocycle(gen.object(), xi.Y)
            t, xi2 = C.pullback(xi, k)
            assert C.ladder_commutes(xi2, xi, tw.identity(xi.X), t, k)


def test_psi_round_trip_and_classes():
    for ws, gen in gens(39):
        tw, C = ws.tw, ws.confl
        for _ in range(10):
            X, Y, cb = gen.pair_with_coboundary(1)
            h = gen.cocycle(Y, tw.shift_object(X))
            xi = C.psi(h)
            assert tw.equal(C.psi_inv(xi), h)
            assert C.equivalent(xi, C.psi(tw.add(h, cb))) is not None


def test_psi_rejects_non_cocycle():
    ws = workspace("e1")
    tw = ws.tw
    X = tw.validate(SModule.of({(0, "0"): 1}))
    f = tw.random_morphism(Generator(ws, seed=1).rng, X, tw.shift_object(X), 0)
    if not tw.is_zero(f):
        with pytest.raises(ConflationError):
            ws.confl.psi(f)


def test_J_identity_and_contraction():
    for ws, gen in gens(40):
        tw, C = ws.tw, ws.confl
        for _ in range(5):
            X = gen.object()
            JX, s = C.J_object(X)
            assert tw.equal(tw.b1(s), tw.identity(JX))
            assert tw.equal(C.J_morphism(tw.identity(X)), tw.identity(JX))
            assert C.verify(C.xi_J(X)) == []


def test_J_of_zero_object():
    ws = workspace("e1")
    Z0 = ws.tw.zero_object()
    JZ, s = ws.confl.J_object(Z0)
    assert JZ.module.is_zero()


def test_factor_trivial():
    for ws, gen in gens(41):
        tw, C = ws.tw, ws.confl
        for _ in range(8):
            xi = gen.canonical()
            M = gen.object()
            assert tw.is_zero(C.factor_trivial(tw.zero(xi.X, M), xi, "inflation"))
            h = gen.coboundary(xi.X, M)
            k = C.factor_trivial(h, xi, "inflation")
            assert tw.equal(tw.star(k, xi.f), h) and tw.is_coboundary(k) is not None
            h = gen.coboundary(M, xi.Y)
            k = C.factor_trivial(h, xi, "deflation")
            assert tw.equal(tw.star(xi.g, k), h)


def test_factor_trivial_rejects_nontrivial():
    ws = workspace("e1")
    tw, C = ws.tw, ws.confl
    X = tw.validate(SModule.of({(0, "0"): 1}))
    xi = C.make_canonical(X, X)
    with pytest.raises(ConflationError):
        C.factor_trivial(tw.identity(X), xi)


def test_maps_into_J_factor_through_any_inflation():
    for ws, gen in gens(42):
        tw, C = ws.tw, ws.confl
        for _ in range(5):
            xi = gen.canonical()
            JU, _ = C.J_object(gen.object())
            h = gen.cocycle(xi.X, JU)
            k = C.factor_through_inflation(h, xi)
            assert k is not None and tw.equal(tw.star(k, xi.f), h)


def test_cone_of_zero_splits_and_cone_of_identity_is_trivial():
    for ws, gen in gens(43):
        tw, C = ws.tw, ws.confl
        X, Y = gen.object(), gen.object()
        W = C.cone_object(tw.zero(X, Y))
        assert ws.ad.equal(W.delta, tw.direct_sum([Y, tw.shift_object(X)]).delta)
        W = C.cone_object(tw.identity(X))
        assert tw.is_coboundary(tw.identity(W)) is not None
        pair, target = C.cone_conflation(gen.cocycle(X, Y))
        assert C.verify(pair) == []


def test_rotation_conflations():
    for ws, gen in gens(44):
        C = ws.confl
        for xi in (C.make_canonical(gen.object(), gen.object()), C.xi_J(gen.object()), gen.canonical()):
            pair, _ = C.rotation_conflation(xi)
            assert C.verify(pair) == []
            pair, _ = C.rotation_conflation_left(xi)
            assert C.verify(pair) == []


def test_general_conflation_without_certificate_fails_verification():
    ws = workspace("e2")
    C = ws.confl
    xi = Generator(ws, seed=45).canonical()
    pair, _ = C.rotation_conflation(xi)
    pair.certificate = []
    assert C.verify(pair) == ["missing certificate"]


def test_kernel_and_cokernel_factor():
    for ws, gen in gens(46):
        tw, C = ws.tw, ws.confl
        for _ in range(8):
            xi = gen.canonical()
            M = gen.object()
            h = tw.star(gen.cocycle(xi.Y, M), xi.g)
            k = C.kernel_factor(h, xi)
            assert k is not None and tw.equal(tw.star(k, xi.g), h)
            h = tw.star(xi.f, gen.cocycle(M, xi.X))
            k = C.cokernel_factor(h, xi)
            assert k is not None and tw.equal(tw.star(xi.f, k), h)


@pytest.mark.parametrize("name", ["e1", "e2", "e3"])
def test_corner_condition_sign(name):
    # [[h11, s], [0, h22]] : E -> E' is closed exactly when b1(s) = gamma' h22 - h11 gamma
    ws = workspace(name)
    tw, ad, C = ws.tw, ws.ad, ws.confl
    gen = Generator(ws, seed=47)
    flipped = 0
    for _ in range(15):
        xi = gen.canonical()
        X, Y = xi.X, xi.Y
        k = gen.morphism(Y, X, -1)
        h11 = tw.scale(2, tw.identity(X))
        gamma2 = ad.add(ad.scale(ws.field(2), xi.gamma), tw.b1(k).under)
        xi2 = C.make_canonical(X, Y, gamma2)
        H = C.triangular(X, Y, xi.E, xi2.E, h11, k.under, tw.identity(Y))
        assert tw.is_zero(tw.b1(H))
        if not tw.is_zero(tw.b1(k)):
            flipped += 1
            G = C.triangular(X, Y, xi.E, xi2.E, h11, ad.neg(k.under), tw.identity(Y))
            assert not tw.is_zero(tw.b1(G))
    assert flipped > 0
