import random
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from twcat.ad import AdError, AdMorphism, SModule, ZERO_MODULE, direct_sum
from twcat.generate import Generator

from conftest import workspace


def naive_bn(ad, fs):
    """b_n by expanding every choice of hat terms; no pruning, no caching."""
    F, H = ad.field, ad.H
    X, Y = fs[-1].source, fs[0].target
    acc = ad.zero(X, Y)
    for combo in product(*[list(f.terms.items()) for f in fs]):
        chain = tuple(x for x, _ in combo)
        if any(a.t != b.s for a, b in zip(chain, chain[1:])):
            continue
        if not H.Z.is_composable([x.base for x in chain]):
            continue
        mat = combo[0][1]
        for _, m in combo[1:]:
            mat = F.mm(mat, m)
        for k, c in H.hat_bn_basis(chain).items():
            acc = ad.add(acc, AdMorphism(X, Y, {k: F.mscale(c, mat)}))
    return acc


def test_zero_module_identity_is_empty():
    ad = workspace("e1").ad
    assert ad.identity_of(ZERO_MODULE).terms == {}
    assert ZERO_MODULE.shift(3).is_zero()


@pytest.mark.parametrize("name", ["e1", "e2", "e3"])
def test_identity_is_idempotent(name):
    ws = workspace(name)
    gen = Generator(ws, seed=3)
    for _ in range(20):
        X = gen.module()
        I = ws.ad.identity_of(X)
        assert ws.ad.equal(ws.ad.circ(I, I), I)


@pytest.mark.parametrize("name", ["e1", "e2", "e3"])
def test_identity_of_shift(name):
    ws = workspace(name)
    gen = Generator(ws, seed=4)
    for _ in range(20):
        X = gen.module()
        assert ws.ad.equal(ws.ad.identity_of(X.shift(1)), ws.ad.shift_morphism(ws.ad.identity_of(X)))


def test_double_shift_is_identity():
    ws = workspace("e3")
    gen = Generator(ws, seed=5)
    X, Y = gen.module(), gen.module()
    f = gen.hom(X, Y, 0)
    back = ws.ad.shift_morphism(ws.ad.shift_morphism(f, 1), -1)
    assert ws.ad.equal(back, f)


@pytest.mark.parametrize("name", ["e1", "e2", "e3"])
def test_specials_compose_to_specials(name):
    ws = workspace(name)
    gen = Generator(ws, seed=6)
    F = ws.field
    for _ in range(20):
        X = gen.module()
        mats = {u: F.random_matrix(gen.rng, d, d) for u, d in X.items}
        h = ws.ad.special_of(X, X, mats)
        assert ws.ad.is_special(ws.ad.circ(h, h))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["e1", "e2", "e3"]), st.integers(0, 10**6), st.integers(1, 3))
def test_ad_bn_matches_naive_expansion(name, seed, n):
    ws = workspace(name)
    gen = Generator(ws, seed=seed)
    chain = gen.seeded_chain(n)
    if chain is None:
        return
    mods, maps, _ = chain
    fs = list(reversed(maps))
    assert ws.ad.equal(ws.ad.ad_bn(fs), naive_bn(ws.ad, fs))


def test_component_of_single_block_is_itself():
    ws = workspace("e3")
    gen = Generator(ws, seed=7)
    X, Y = gen.module(), gen.module()
    f = gen.hom(X, Y, 0)
    assert ws.ad.equal(ws.ad.component(f, [X], [Y], 0, 0), f)


def test_components_of_identity_on_sum():
    ws = workspace("e2")
    gen = Generator(ws, seed=8)
    X, Y = gen.module(), gen.module()
    I = ws.ad.identity_of(direct_sum([X, Y]))
    parts = [X, Y]
    assert ws.ad.equal(ws.ad.component(I, parts, parts, 0, 0), ws.ad.identity_of(X))
    assert ws.ad.equal(ws.ad.component(I, parts, parts, 1, 1), ws.ad.identity_of(Y))
    assert ws.ad.is_zero(ws.ad.component(I, parts, parts, 0, 1))
    assert ws.ad.is_zero(ws.ad.component(I, parts, parts, 1, 0))


def test_component_index_checked():
    ws = workspace("e1")
    X = SModule.of({(0, "0"): 1})
    with pytest.raises(AdError):
        ws.ad.component(ws.ad.identity_of(X), [X], [X], 1, 0)


@pytest.mark.parametrize("name", ["e2", "e3"])
@pytest.mark.parametrize("n", [2, 3])
def test_matrix_of_bn_is_bn_of_matrices(name, n):
    """Blockwise: component (j, i) of b_n(F_n..F_1) sums b_n over index paths."""
    ws = workspace(name)
    ad = ws.ad
    gen = Generator(ws, seed=10 + n)
    for _ in range(15):
        seeded = gen.seeded_chain(n)
        if seeded is None:
            return
        mods, maps, degs = seeded
        extra = [gen.module(2) for _ in mods]
        parts = [[m, e] for m, e in zip(mods, extra)]
        blocks = []
        for k, f in enumerate(maps):
            src, tgt = parts[k], parts[k + 1]
            grid = [[f if (i, j) == (0, 0) else gen.hom(src[i], tgt[j], degs[k]) for i in range(2)] for j in range(2)]
            blocks.append(grid)
        big = [ad.assemble(b, parts[k], parts[k + 1]) for k, b in enumerate(blocks)]
        total = ad.ad_bn(list(reversed(big)))
        for j, i in product(range(2), repeat=2):
            want = ad.zero(parts[0][i], parts[-1][j])
            for path in product(range(2), repeat=n - 1):
                idx = (i,) + path + (j,)
                fs = [blocks[k][idx[k + 1]][idx[k]] for k in range(n)]
                want = ad.add(want, ad.ad_bn(list(reversed(fs))))
            assert ad.equal(ad.component(total, parts[0], parts[-1], j, i), want)


def test_assemble_inverts_component():
    ws = workspace("e3")
    ad = ws.ad
    gen = Generator(ws, seed=12)
    src = [gen.module(), gen.module()]
    tgt = [gen.module(), gen.module()]
    f = gen.hom(direct_sum(src), direct_sum(tgt), 0)
    blocks = [[ad.component(f, src, tgt, j, i) for i in range(2)] for j in range(2)]
    assert ad.equal(ad.assemble(blocks, src, tgt), f)


def test_sigma_tau_degrees():
    ws = workspace("e1")
    X = SModule.of({(0, "0"): 2, (1, "0"): 1})
    assert ws.ad.degrees(ws.ad.sigma_of(X)) == {-2}
    assert ws.ad.degrees(ws.ad.tau_of(X)) == {0}


def test_hom_vector_round_trip():
    ws = workspace("e3")
    gen = Generator(ws, seed=13)
    rng = random.Random(1)
    for _ in range(10):
        X, Y = gen.module(), gen.module()
        d = rng.choice([-1, 0, 1])
        f = gen.hom(X, Y, d)
        basis = ws.ad.hom_basis(X, Y, d)
        assert ws.ad.equal(ws.ad.from_vector(X, Y, ws.ad.to_vector(f, basis), basis), f)


def test_composability_checked():
    ws = workspace("e1")
    X = SModule.of({(0, "0"): 1})
    Y = SModule.of({(0, "0"): 2})
    with pytest.raises(AdError):
        ws.ad.circ(ws.ad.identity_of(X), ws.ad.identity_of(Y))


@pytest.mark.parametrize("name", ["e1", "e2", "e3"])
def test_component_is_signed_sandwich(name):
    # block slicing agrees with (-1)^(|f|+1) p_j o f o s_i for homogeneous f
    ws = workspace(name)
    ad, F = ws.ad, ws.field
    gen = Generator(ws, seed=14)
    for _ in range(10):
        src = [gen.module(), gen.module()]
        tgt = [gen.module(), gen.module()]
        d = gen.choice((-2, -1, 0))
        f = gen.hom(direct_sum(src), direct_sum(tgt), d)
        for j, i in product(range(2), repeat=2):
            sandwich = ad.circ(ad.projection(tgt, j), ad.circ(f, ad.embedding(src, i)))
            assert ad.equal(ad.component(f, src, tgt, j, i), ad.scale(F.sign(d + 1), sandwich))
