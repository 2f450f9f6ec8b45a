from fractions import Fraction

import pytest

from twcat.algebra import AlgebraError, BasisElem, SectionAlgebra
from twcat.scalars import QQ

from conftest import workspace
from oracles import RawAlgebra


def e3_algebra(**kw):
    basis = [BasisElem("e", "0", "0", -1, True), BasisElem("a", "0", "0", 0), BasisElem("c", "0", "0", 1)]
    return SectionAlgebra(["0"], basis, {("a", "a", "a"): {"c": 1}}, **kw)


def as_fractions(d):
    return {k: Fraction(str(v)) for k, v in d.items()}


def test_left_unit_rule():
    Z = e3_algebra()
    assert Z.bn_eval(2, [{"e": 1}, {"a": 1}]) == {"a": QQ.one}


def test_right_unit_rule_degree_zero_flips_sign():
    Z = e3_algebra()
    assert Z.bn_eval(2, [{"a": 1}, {"e": 1}]) == {"a": QQ(-1)}
    assert Z.bn_eval(2, [{"c": 1}, {"e": 1}]) == {"c": QQ(1)}


def test_units_are_strict_in_higher_arity():
    Z = e3_algebra()
    assert Z.bn_eval(3, [{"e": 1}, {"a": 1}, {"a": 1}]) == {}


def test_multilinear_extension():
    Z = e3_algebra()
    out = Z.bn_eval(3, [{"a": 2}, {"a": 1, "e": 5}, {"a": QQ("1/2")}])
    assert out == {"c": QQ.one}


def test_incompatible_chain_raises():
    Z = workspace("e2").algebra
    with pytest.raises(AlgebraError):
        Z.bn_eval(2, [{"x": 1}, {"x": 1}])
    with pytest.raises(AlgebraError):
        Z.bn_eval(1, [{"nope": 1}])


def test_koszul_insert_signs():
    Z = e3_algebra()
    # r = 0: b_s applied directly
    assert Z.koszul_insert(0, 2, 1, ("e", "e", "e")) == {("e", "e"): QQ.one}
    # r = 1 past a degree -1 factor
    assert Z.koszul_insert(1, 2, 0, ("e", "e", "e")) == {("e", "e"): QQ(-1)}
    # r = 1 past a degree 0 factor
    assert Z.koszul_insert(1, 2, 0, ("a", "e", "a")) == {("a", "a"): QQ.one}


def test_koszul_insert_matches_tensor_rule():
    from oracles import koszul_tensor_apply

    Z = e3_algebra()
    for chain in Z.chains(3):
        for r in range(3):
            for s in range(1, 4 - r):
                ident = (0, lambda m: m)
                maps = [ident] * r + [(1, lambda m: m)] + [ident] * (3 - r - s)
                blocks = [(Z.basis[x].degree, x) for x in chain[:r]] + [(0, None)] * (4 - r - s)
                sign, _ = koszul_tensor_apply(maps, blocks)
                out = Z.koszul_insert(r, s, 3 - r - s, chain)
                for k, v in out.items():
                    want = {x: sign * c for x, c in as_fractions(Z.bn_basis(chain[r : r + s])).items()}
                    assert Fraction(str(v)) == want[k[r]]


def test_unit_only_chain_residue_cancels():
    Z = workspace("e1").algebra
    e = Z.units["0"]
    assert Z.stasheff_residue((e, e, e)) == {}


@pytest.mark.parametrize("name", ["e1", "e2", "e3"])
def test_shipped_algebras_pass(name):
    Z = workspace(name).algebra
    assert all(r.ok for r in Z.check_all())


@pytest.mark.parametrize("name", ["e1", "e2", "e3"])
def test_stasheff_against_oracle(name):
    Z = workspace(name).algebra
    raw = RawAlgebra.from_section(Z)
    top = 6 if name == "e3" else 5
    for n in range(1, top + 1):
        for chain in Z.chains(n):
            assert as_fractions(Z.stasheff_residue(chain)) == raw.stasheff_residue(chain), chain


def test_mutants_fail_and_match_oracle():
    Z = e3_algebra()
    mutants = Z.unit_rule_mutants()
    assert len(mutants) == 5  # e x b and b x e for b in {a, c}, plus e x e
    for label, bad in mutants:
        raw = RawAlgebra.from_section(bad)
        s3 = bad.check_stasheff(3)
        assert not s3.ok, label
        assert any("e" in chain for chain, _ in s3.failures)
        for chain in bad.chains(3):
            assert as_fractions(bad.stasheff_residue(chain)) == raw.stasheff_residue(chain)


def test_degree_zero_unit_rejected():
    basis = [BasisElem("e", "0", "0", 0, True)]
    with pytest.raises(AlgebraError, match="degree"):
        SectionAlgebra(["0"], basis)
    loose = SectionAlgebra(["0"], basis, strict=False)
    rep = loose.check_units()
    assert not rep.ok and any("degree" in str(f) for f in rep.failures)


def test_degree_law_enforced():
    basis = [BasisElem("e", "0", "0", -1, True), BasisElem("a", "0", "0", 0)]
    with pytest.raises(AlgebraError, match="degree law"):
        SectionAlgebra(["0"], basis, {("a", "a"): {"a": 1}})


def test_missing_unit_rejected():
    with pytest.raises(AlgebraError, match="no unit"):
        SectionAlgebra(["0"], [BasisElem("a", "0", "0", 0)])


def test_chain_enumeration_is_composable():
    Z = workspace("e2").algebra
    for chain in Z.chains(3):
        assert Z.is_composable(chain)
    assert ("x", "x") not in set(Z.chains(2))
