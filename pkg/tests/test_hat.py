import pytest

from twcat.algebra import BasisElem, SectionAlgebra
from twcat.hat import (
    HatAlgebra,
    HatBasis,
    HatError,
    check_hat_stasheff,
    place,
    placed_residue,
    profiles,
    run_hat_checks,
    section_summands,
)
from twcat.scalars import QQ

from conftest import workspace
from oracles import hat_sign_oracle


def with_differential():
    basis = [BasisElem("e", "0", "0", -1, True), BasisElem("a", "0", "0", 0), BasisElem("y", "0", "0", 1)]
    return HatAlgebra(SectionAlgebra(["0"], basis, {("a",): {"y": 1}}))


def test_rho_at_origin_is_identity():
    H = workspace("e3").hat
    z, s, t = H.rho({HatBasis("a", 0, 0): QQ(3)})
    assert (z, s, t) == ({"a": QQ(3)}, 0, 0)


def test_rho_strips_nu():
    H = workspace("e3").hat
    z, s, t = H.rho({HatBasis("a", 1, 0): QQ.one})
    assert z == {"a": QQ.one} and (s, t) == (1, 0)
    assert H.rho_inv(z, s, t) == {HatBasis("a", 1, 0): QQ.one}


def test_rho_inverse_degree():
    H = workspace("e3").hat
    (x,) = H.rho_inv({"a": 1}, 2, 1)
    assert H.degree(x) == 0 - 1


def test_rho_rejects_mixed_windows():
    H = workspace("e3").hat
    with pytest.raises(HatError):
        H.rho({HatBasis("a", 0, 0): 1, HatBasis("a", 1, 0): 1})


def test_b1_on_shifted_element_changes_sign():
    H = with_differential()
    assert H.hat_bn([{HatBasis("a", 1, 0): QQ.one}]) == {HatBasis("y", 1, 0): QQ(-1)}


def test_zero_window_matches_section():
    H = workspace("e3").hat
    out = H.hat_bn([{HatBasis("a", 0, 0): 1}] * 3)
    assert out == {HatBasis("c", 0, 0): QQ.one}


def test_frozen_two_factor_signs():
    H = workspace("e3").hat
    for a in ("a", "c", "e"):
        # a_1 in window (1, 1), a_2 in window (1, 0): z = 1 + (s_1 - s_2)|a_1| = 1 + |a_1|
        chain = (HatBasis(a, 1, 1), HatBasis("e", 1, 0))
        d1 = H.degree(chain[0])
        assert H.sign_exponent(chain) % 2 == (1 + d1) % 2
        assert hat_sign_oracle([d1, H.degree(chain[1])], (1, 1, 0)) == (-1) ** ((1 + d1) % 2)
        # a_1 in window (1, 0), a_2 in window (0, 0): z = 1 whatever |a_1| is
        chain = (HatBasis(a, 1, 0), HatBasis("e", 0, 0))
        assert H.sign_exponent(chain) % 2 == 1


@pytest.mark.parametrize("name", ["e1", "e2", "e3"])
def test_signs_match_koszul_expansion(name):
    H = workspace(name).hat
    Z = H.Z
    for n in range(1, Z.max_arity + 1):
        for chain in Z.chains(n):
            core = Z.bn_basis(chain)
            if not core:
                continue
            for prof in profiles(n, 2):
                placed = place(chain, prof)
                sign = hat_sign_oracle([H.degree(x) for x in placed], prof)
                want = {HatBasis(k, prof[0], prof[-1]): QQ.mul(QQ(sign), c) for k, c in core.items()}
                assert H.hat_bn_basis(placed) == want


def test_shift_of_unit_is_shifted_unit():
    H = workspace("e1").hat
    assert H.shift_elem({HatBasis("e", 0, 0): QQ.one}) == {HatBasis("e", 1, 1): QQ.one}


def test_shift_round_trip_keeps_degree():
    H = workspace("e3").hat
    a = {HatBasis("a", 2, -1): QQ(2), HatBasis("c", 2, -1): QQ(1)}
    assert H.shift_elem(H.shift_elem(a, 1), -1) == a
    x = HatBasis("a", 2, -1)
    (y,) = H.shift_elem({x: 1})
    assert H.degree(y) == H.degree(x)


def test_nu_moves():
    H = workspace("e3").hat
    x = {HatBasis("a", 0, 0): QQ.one}
    (l,) = H.nu_left(x)
    (r,) = H.nu_right_inv(x)
    assert H.degree(l) == -1 and H.degree(r) == 1
    assert H.nu_right_inv(H.nu_left(x)) == H.shift_elem(x)
    assert H.nu_inv_left(H.nu_left(x)) == x and H.nu_right(H.nu_right_inv(x)) == x


def test_sigma_tau_units():
    H = workspace("e2").hat
    for s in (-1, 0, 2):
        u = (s, "1")
        sig, tau = H.sigma_unit(u), H.tau_unit(u)
        assert {H.degree(x) for x in sig} == {-2} and {H.degree(x) for x in tau} == {0}
        assert H.circ(tau, sig) == {HatBasis("e1", s, s): QQ.one}
        assert H.circ(sig, tau) == {HatBasis("e1", s + 1, s + 1): QQ.one}
        down = H.shift_elem(sig, -1)
        assert down == {k: QQ.neg(v) for k, v in H.sigma_unit((s - 1, "1")).items()}


@pytest.mark.parametrize("name", ["e1", "e2", "e3"])
def test_identity_sweeps_window_one(name):
    reps = run_hat_checks(workspace(name).hat, 1)
    assert len(reps) >= 8
    for rep in reps:
        assert rep.ok and rep.checked > 0, rep.name


def test_hat_stasheff_detects_broken_algebra():
    Z = workspace("e3").algebra
    label, bad = Z.unit_rule_mutants()[0]
    rep = check_hat_stasheff(HatAlgebra(bad), window=1)
    assert not rep.ok


def test_precomputed_residue_agrees_on_mutants():
    Z = workspace("e3").algebra
    for _, bad in Z.unit_rule_mutants():
        H = HatAlgebra(bad)
        for n in (2, 3):
            for chain in bad.chains(n):
                terms = section_summands(bad, chain)
                for prof in profiles(n, 1):
                    assert placed_residue(H, chain, prof, terms) == H.stasheff_residue(place(chain, prof))
