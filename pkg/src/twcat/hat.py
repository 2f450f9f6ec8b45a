"""The (b, nu)-extension of a section algebra.

A hat basis element is a triple ``(base, s, t)`` standing for
``nu^s * base * nu^-t``.  It lives in window ``(s, t)``, has source idempotent
``(t, u(base))``, target ``(s, v(base))`` and degree ``|base| + t - s``.

Hat elements are dicts ``{(base, s, t): coeff}``.  Chains are in written
order as in :mod:`twcat.algebra`: for ``[x_1, ..., x_n]`` the factor ``x_l``
sits in window ``(s_{l-1}, s_l)``.
"""

from __future__ import annotations

from itertools import product
from typing import Iterable, Mapping, NamedTuple, Sequence

from .algebra import AlgebraError, Report, SectionAlgebra, add_into


class HatError(AlgebraError):
    """Window mismatch or another malformed hat-level request."""


class HatBasis(NamedTuple):
    base: str
    s: int
    t: int


HatIdem = tuple  # (shift, idempotent label)


class HatAlgebra:
    """Sign-twisted operations on window-shifted copies of a section algebra."""

    def __init__(self, section: SectionAlgebra):
        self.Z = section
        self.field = section.field
        self._cache: dict[tuple, dict] = {}

    # -- basis data -----------------------------------------------------
    def degree(self, x: HatBasis) -> int:
        return self.Z.elem(x[0]).degree + x[2] - x[1]

    def source(self, x: HatBasis) -> HatIdem:
        return (x[2], self.Z.elem(x[0]).source)

    def target(self, x: HatBasis) -> HatIdem:
        return (x[1], self.Z.elem(x[0]).target)

    def elem_degree(self, a: Mapping) -> int:
        """Degree of a homogeneous nonzero element."""
        degs = {self.degree(x) for x in a}
        if len(degs) != 1:
            raise HatError(f"element is not homogeneous (degrees {sorted(degs)})")
        return degs.pop()

    def window(self, a: Mapping) -> tuple[int, int]:
        wins = {(x[1], x[2]) for x in a}
        if len(wins) != 1:
            raise HatError("element is not window-homogeneous")
        return wins.pop()

    # -- rho maps -------------------------------------------------------
    def rho(self, a: Mapping) -> tuple[dict, int, int]:
        """Strip the window: returns (section element, s, t)."""
        if not a:
            raise HatError("rho of the zero element needs an explicit window")
        s, t = self.window(a)
        return {x[0]: c for x, c in a.items()}, s, t

    def rho_inv(self, z: Mapping, s: int, t: int) -> dict:
        return {HatBasis(k, s, t): c for k, c in z.items()}

    # -- translations ---------------------------------------------------
    @staticmethod
    def _move(a: Mapping, ds: int, dt: int) -> dict:
        return {HatBasis(x[0], x[1] + ds, x[2] + dt): c for x, c in a.items()}

    def nu_left(self, a: Mapping) -> dict:
        """nu * a."""
        return self._move(a, 1, 0)

    def nu_inv_left(self, a: Mapping) -> dict:
        """nu^-1 * a."""
        return self._move(a, -1, 0)

    def nu_right(self, a: Mapping) -> dict:
        """a * nu."""
        return self._move(a, 0, -1)

    def nu_right_inv(self, a: Mapping) -> dict:
        """a * nu^-1."""
        return self._move(a, 0, 1)

    def shift_elem(self, a: Mapping, k: int = 1) -> dict:
        """a[k] = nu^k a nu^-k."""
        return self._move(a, k, k)

    # -- idempotent actions ---------------------------------------------
    def left_idem(self, u: HatIdem, a: Mapping) -> dict:
        """e_u * a."""
        return {x: c for x, c in a.items() if self.target(x) == tuple(u)}

    def right_idem(self, a: Mapping, u: HatIdem) -> dict:
        """a * e_u."""
        return {x: c for x, c in a.items() if self.source(x) == tuple(u)}

    # -- distinguished elements -----------------------------------------
    def unit(self, u: HatIdem) -> dict:
        s, i = u
        return {HatBasis(self.Z.units[i], s, s): self.field.one}

    def sigma_unit(self, u: HatIdem) -> dict:
        """sigma(e_u) = (-1)^s nu e_u, window (s+1, s), degree -2."""
        s, i = u
        return {HatBasis(self.Z.units[i], s + 1, s): self.field.sign(s)}

    def tau_unit(self, u: HatIdem) -> dict:
        """tau(e_u) = (-1)^s e_u nu^-1, window (s, s+1), degree 0."""
        s, i = u
        return {HatBasis(self.Z.units[i], s, s + 1): self.field.sign(s)}

    # -- operations -----------------------------------------------------
    def check_chain(self, chain: Sequence[HatBasis]) -> None:
        for left, right in zip(chain, chain[1:]):
            if left[2] != right[1]:
                raise HatError(f"window mismatch between {left} and {right}")
        self.Z.chain_ends([x[0] for x in chain])

    def composable(self, chain: Sequence[HatBasis]) -> bool:
        for left, right in zip(chain, chain[1:]):
            if left[2] != right[1]:
                return False
        return self.Z.is_composable([x[0] for x in chain])

    def sign_exponent(self, chain: Sequence[HatBasis]) -> int:
        """z = s_0 - s_n + sum_{l<n} (s_l - s_n) |x_l| for a written-order chain."""
        s0 = chain[0][1]
        sn = chain[-1][2]
        z = s0 - sn
        for x in chain[:-1]:
            z += (x[2] - sn) * self.degree(x)
        return z

    def hat_bn_basis(self, chain: Sequence[HatBasis]) -> dict:
        chain = tuple(HatBasis(*x) for x in chain)
        hit = self._cache.get(chain)
        if hit is not None:
            return hit
        self.check_chain(chain)
        out: dict = {}
        core = self.Z.bn_basis([x[0] for x in chain])
        if core:
            sign = self.field.sign(self.sign_exponent(chain))
            s0, sn = chain[0][1], chain[-1][2]
            out = {HatBasis(k, s0, sn): self.field.mul(sign, c) for k, c in core.items()}
        self._cache[chain] = out
        return out

    def hat_bn(self, factors: Sequence[Mapping]) -> dict:
        """Multilinear b-hat_n; incomposable term combinations contribute zero."""
        F = self.field
        acc: dict = {}
        for combo in product(*[list(f.items()) for f in factors]):
            chain = tuple(HatBasis(*x) for x, _ in combo)
            if not self.composable(chain):
                continue
            coeff = F.one
            for _, c in combo:
                coeff = F.mul(coeff, c)
            for k, c in self.hat_bn_basis(chain).items():
                add_into(acc, k, F.mul(coeff, c), F)
        return acc

    def circ(self, x: Mapping, y: Mapping) -> dict:
        return self.hat_bn([x, y])

    def koszul_insert(self, r: int, s: int, t: int, chain: Sequence[HatBasis]) -> dict:
        chain = tuple(chain)
        F = self.field
        sign = F.sign(sum(self.degree(x) for x in chain[:r]))
        out: dict = {}
        for k, c in self.hat_bn_basis(chain[r : r + s]).items():
            add_into(out, chain[:r] + (k,) + chain[r + s :], F.mul(sign, c), F)
        return out

    def stasheff_residue(self, chain: Sequence[HatBasis]) -> dict:
        n = len(chain)
        F = self.field
        total: dict = {}
        for s in range(1, n + 1):
            for r in range(0, n - s + 1):
                for inner, c in self.koszul_insert(r, s, n - s - r, chain).items():
                    for k, d in self.hat_bn_basis(inner).items():
                        add_into(total, k, F.mul(c, d), F)
        return total


# -- enumeration helpers ---------------------------------------------------
def profiles(n: int, window: int) -> Iterable[tuple[int, ...]]:
    """All (s_0, ..., s_n) with every |s_l| <= window."""
    return product(range(-window, window + 1), repeat=n + 1)


def place(chain: Sequence[str], prof: Sequence[int]) -> tuple[HatBasis, ...]:
    return tuple(HatBasis(b, prof[i], prof[i + 1]) for i, b in enumerate(chain))


def active_chains(Z: SectionAlgebra, n: int) -> list[tuple]:
    """Section chains of length n on which some Stasheff summand is nonzero.

    The hat residue on a placed chain is a signed sum of the same section
    summands, so chains outside this list have zero residue in every window.
    """
    out = []
    for chain in Z.chains(n):
        hit = False
        for s in range(1, n + 1):
            for r in range(0, n - s + 1):
                for inner in Z.koszul_insert(r, s, n - s - r, chain):
                    if Z.bn_basis(inner):
                        hit = True
                        break
                if hit:
                    break
            if hit:
                break
        if hit:
            out.append(chain)
    return out


def _eq(a: Mapping, b: Mapping) -> bool:
    return {k: v for k, v in a.items() if v != 0} == {k: v for k, v in b.items() if v != 0}


def _scale(F, c, a: Mapping) -> dict:
    return {k: F.mul(c, v) for k, v in a.items() if F.mul(c, v) != 0}


# -- identity sweeps -----------------------------------------------------------
def check_hat_stasheff(H: HatAlgebra, window: int = 3, max_n: int | None = None) -> Report:
    rep = Report("hat-stasheff")
    max_n = max_n or H.Z.max_arity + 2
    for n in range(1, max_n + 1):
        for chain in active_chains(H.Z, n):
            terms = section_summands(H.Z, chain)
            for prof in profiles(n, window):
                rep.checked += 1
                res = placed_residue(H, chain, prof, terms)
                if res:
                    rep.fail((chain, prof, res))
    return rep


def section_summands(Z: SectionAlgebra, chain: Sequence[str]) -> list[tuple]:
    """Unsigned nonzero pieces b(.. b_s(..) ..) of the Stasheff sum on a section chain.

    Entries are (r, s, inner_output, outer_output, coefficient).
    """
    n = len(chain)
    F = Z.field
    out = []
    for s in range(1, n + 1):
        for r in range(0, n - s + 1):
            for k, c in Z.bn_basis(chain[r : r + s]).items():
                for y, d in Z.bn_basis(chain[:r] + (k,) + chain[r + s :]).items():
                    out.append((r, s, k, y, F.mul(c, d)))
    return out


def placed_residue(H: HatAlgebra, chain: Sequence[str], prof: Sequence[int], terms: Sequence[tuple]) -> dict:
    """Hat Stasheff residue of ``place(chain, prof)`` from precomputed section summands.

    Agrees with :meth:`HatAlgebra.stasheff_residue`; only the signs depend on the profile.
    """
    F = H.field
    placed = place(chain, prof)
    degs = [H.degree(x) for x in placed]
    total: dict = {}
    for r, s, k, y, c in terms:
        inner = HatBasis(k, prof[r], prof[r + s])
        e = sum(degs[:r]) + H.sign_exponent(placed[r : r + s])
        e += H.sign_exponent(placed[:r] + (inner,) + placed[r + s :])
        add_into(total, HatBasis(y, prof[0], prof[-1]), F.mul(F.sign(e), c), F)
    return total


def _bn_chains(H: HatAlgebra, n: int, window: int):
    """Placed chains for the n-ary identity sweeps.

    Every modification in these sweeps keeps the base chain, so a chain with
    vanishing section product only needs a parity-complete window of 1.
    """
    for chain in H.Z.chains(n):
        w = window if H.Z.bn_basis(chain) else min(window, 1)
        for prof in profiles(n, w):
            yield chain, prof, place(chain, prof)


def check_nu_equivariance(H: HatAlgebra, window: int = 3) -> Report:
    """The three nu-interchange rules for b-hat_n."""
    rep = Report("nu-equivariance")
    F = H.field
    for n in range(1, H.Z.max_arity + 1):
        for chain, prof, xs in _bn_chains(H, n, window):
            base = H.hat_bn_basis(xs)
            degs = [H.degree(x) for x in xs]
            # nu on the leftmost factor
            rep.checked += 1
            lhs = H.hat_bn([H.nu_left({xs[0]: 1})] + [{x: 1} for x in xs[1:]])
            rhs = _scale(F, F.sign(prof[1] - prof[n] + 1), H.nu_left(base))
            if not _eq(lhs, rhs):
                rep.fail(("nu-left", chain, prof))
            # nu^-1 on the right of the rightmost factor
            rep.checked += 1
            lhs = H.hat_bn([{x: 1} for x in xs[:-1]] + [H.nu_right_inv({xs[-1]: 1})])
            rhs = _scale(F, F.sign(1 + sum(degs[:-1])), H.nu_right_inv(base))
            if not _eq(lhs, rhs):
                rep.fail(("nu-right", chain, prof))
            # internal exchange a_l nu^-1 (x) nu a_{l+1}
            for l in range(n - 1):
                rep.checked += 1
                facs = [{x: 1} for x in xs]
                facs[l] = H.nu_right_inv(facs[l])
                facs[l + 1] = H.nu_left(facs[l + 1])
                lhs = H.hat_bn(facs)
                rhs = _scale(F, F.sign(degs[l] + prof[l + 1] - prof[l + 2] + 1), base)
                if not _eq(lhs, rhs):
                    rep.fail(("nu-exchange", chain, prof, l))
    return rep


def check_shift_equivariance(H: HatAlgebra, window: int = 3) -> Report:
    rep = Report("shift-equivariance")
    for n in range(1, H.Z.max_arity + 1):
        for chain, prof, xs in _bn_chains(H, n, window):
            for k in (1, -1):
                rep.checked += 1
                lhs = H.hat_bn([H.shift_elem({x: 1}, k) for x in xs])
                rhs = H.shift_elem(H.hat_bn_basis(xs), k)
                if not _eq(lhs, rhs):
                    rep.fail((chain, prof, k))
    return rep


def check_circ_nu_laws(H: HatAlgebra, window: int = 3) -> Report:
    """The arity-two nu laws, including the two transit rules."""
    rep = Report("circ-nu-laws")
    F = H.field
    for chain, prof, xs in _bn_chains(H, 2, window):
        s0, s1, s2 = prof
        a1, a2 = {xs[0]: 1}, {xs[1]: 1}
        d1 = H.degree(xs[0])
        prod = H.circ(a1, a2)
        cases = [
            ("nu-a1", H.circ(H.nu_left(a1), a2), _scale(F, F.sign(s1 - s2 + 1), H.nu_left(prod))),
            ("a2-nuinv", H.circ(a1, H.nu_right_inv(a2)), _scale(F, F.sign(d1 + 1), H.nu_right_inv(prod))),
            ("exchange", H.circ(H.nu_right_inv(a1), H.nu_left(a2)), _scale(F, F.sign(s1 - s2 + d1 + 1), prod)),
        ]
        for name, lhs, rhs in cases:
            rep.checked += 1
            if not _eq(lhs, rhs):
                rep.fail((name, chain, prof))
    # transit rules: a2 sits one window off and nu moves across the product
    for chain in H.Z.chains(2):
        for s0, s1, s2 in profiles(2, window):
            x1 = HatBasis(chain[0], s0, s1)
            d1 = H.degree(x1)
            a1 = {x1: 1}
            b = {HatBasis(chain[1], s1 - 1, s2): 1}
            rep.checked += 1
            lhs = H.circ(a1, H.nu_left(b))
            rhs = _scale(F, F.sign(s1 - s2 + d1 + 1), H.circ(H.nu_right(a1), b))
            if not _eq(lhs, rhs):
                rep.fail(("transit-nu", chain, (s0, s1, s2)))
            b = {HatBasis(chain[1], s1 + 1, s2): 1}
            rep.checked += 1
            lhs = H.circ(H.nu_right_inv(a1), b)
            rhs = _scale(F, F.sign(s1 - s2 + d1 + 1), H.circ(a1, H.nu_inv_left(b)))
            if not _eq(lhs, rhs):
                rep.fail(("transit-nuinv", chain, (s0, s1, s2)))
    return rep


def _hat_basis_in_window(H: HatAlgebra, window: int):
    for b in sorted(H.Z.basis):
        for s in range(-window, window + 1):
            for t in range(-window, window + 1):
                yield HatBasis(b, s, t)


def check_unit_conjugation(H: HatAlgebra, window: int = 3) -> Report:
    """nu^s e_i nu^-s acts as the strict unit of (s, i)."""
    rep = Report("unit-conjugation")
    F = H.field
    for x in _hat_basis_in_window(H, window):
        a = {x: 1}
        d = H.degree(x)
        rep.checked += 2
        if not _eq(H.circ(H.unit(H.target(x)), a), a):
            rep.fail(("left", x))
        if not _eq(H.circ(a, H.unit(H.source(x))), _scale(F, F.sign(d + 1), a)):
            rep.fail(("right", x))
        for u in (H.target(x), H.source(x)):
            e = H.unit(u)
            for facs in ([e, a, a], [a, e, a], [a, a, e]):
                if H.composable([next(iter(f)) for f in facs]):
                    rep.checked += 1
                    if H.hat_bn(facs):
                        rep.fail(("strict", x, u))
    for i in H.Z.idems:
        for s in range(-window, window + 1):
            e = H.unit((0, i))
            for _ in range(abs(s)):
                e = H.shift_elem(e, 1 if s > 0 else -1)
            rep.checked += 1
            if not _eq(e, H.unit((s, i))):
                rep.fail(("conjugate", i, s))
    return rep


def check_sigma_tau_units(H: HatAlgebra, window: int = 3) -> Report:
    """tau(e_u) o sigma(e_u) = e_u, sigma o tau = e_{nu u}, and the shift remarks."""
    rep = Report("sigma-tau-units")
    for i in H.Z.idems:
        for s in range(-window, window + 1):
            u = (s, i)
            sig, tau = H.sigma_unit(u), H.tau_unit(u)
            checks = [
                ("tau.sigma", H.circ(tau, sig), H.unit(u)),
                ("sigma.tau", H.circ(sig, tau), H.unit((s + 1, i))),
                ("sigma[-1]", H.shift_elem(sig, -1), _scale(H.field, -1, H.sigma_unit((s - 1, i)))),
                ("tau[-1]", H.shift_elem(tau, -1), _scale(H.field, -1, H.tau_unit((s - 1, i)))),
            ]
            for name, lhs, rhs in checks:
                rep.checked += 1
                if not _eq(lhs, rhs):
                    rep.fail((name, u))
    return rep


def check_shifted_unit_compositions(H: HatAlgebra, window: int = 3) -> Report:
    """Composition of a in window (s, t) with sigma(e_u), tau(e_u)."""
    rep = Report("shifted-unit-compositions")
    F = H.field
    for x in _hat_basis_in_window(H, window):
        s, t = x[1], x[2]
        a = {x: 1}
        src_i, tgt_i = H.source(x)[1], H.target(x)[1]
        cases = [
            ("a.sigma", H.circ(a, H.sigma_unit((t - 1, src_i))), _scale(F, F.sign(t - 1), H.nu_right(a))),
            ("sigma.a", H.circ(H.sigma_unit((s, tgt_i)), a), _scale(F, F.sign(t - 1), H.nu_left(a))),
            ("a.tau", H.circ(a, H.tau_unit((t, src_i))), _scale(F, F.sign(t), H.nu_right_inv(a))),
            ("tau.a", H.circ(H.tau_unit((s - 1, tgt_i)), a), _scale(F, F.sign(t), H.nu_inv_left(a))),
        ]
        for name, lhs, rhs in cases:
            rep.checked += 1
            if not _eq(lhs, rhs):
                rep.fail((name, x))
        # mismatched idempotents give zero
        for j in H.Z.idems:
            if j != src_i:
                rep.checked += 1
                if H.circ(a, H.sigma_unit((t - 1, j))):
                    rep.fail(("a.sigma-mismatch", x, j))
    return rep


def check_triple_products(H: HatAlgebra, window: int = 3) -> Report:
    rep = Report("triple-products")
    F = H.field
    for x in _hat_basis_in_window(H, window):
        s, t = x[1], x[2]
        a = {x: 1}
        ti, si = H.target(x)[1], H.source(x)[1]
        neg = lambda e: _scale(F, -1, e)  # noqa: E731
        sig_l, tau_l = H.sigma_unit((s, ti)), H.tau_unit((s - 1, ti))
        cases = [
            ("tau(sigma a)", H.circ(H.tau_unit((s, ti)), H.circ(sig_l, a)), neg(a)),
            ("sigma(tau a)", H.circ(H.sigma_unit((s - 1, ti)), H.circ(tau_l, a)), neg(a)),
            ("sigma(a tau)", H.circ(H.sigma_unit((s, ti)), H.circ(a, H.tau_unit((t, si)))), H.shift_elem(a)),
            ("(sigma a)tau", H.circ(H.circ(sig_l, a), H.tau_unit((t, si))), neg(H.shift_elem(a))),
            ("(a tau)sigma", H.circ(H.circ(a, H.tau_unit((t, si))), H.sigma_unit((t, si))), a),
        ]
        for name, lhs, rhs in cases:
            rep.checked += 1
            if not _eq(lhs, rhs):
                rep.fail((name, x))
    return rep


def check_pullouts(H: HatAlgebra, window: int = 3) -> Report:
    """sigma pulls out of the leftmost slot; tau (x) sigma in the middle costs (-1)^|a_l|."""
    rep = Report("pull-outs")
    F = H.field
    for n in range(1, H.Z.max_arity + 1):
        for chain, prof, xs in _bn_chains(H, n, window):
            facs = [{x: 1} for x in xs]
            v = H.target(xs[0])
            sig = H.sigma_unit(v)
            rep.checked += 1
            lhs = H.hat_bn([H.circ(sig, facs[0])] + facs[1:])
            rhs = _scale(F, -1, H.circ(sig, H.hat_bn_basis(xs)))
            if not _eq(lhs, rhs):
                rep.fail(("sigma-left", chain, prof))
            for l in range(n - 1):
                u = H.source(xs[l])
                mod = list(facs)
                mod[l] = H.circ(facs[l], H.tau_unit(u))
                mod[l + 1] = H.circ(H.sigma_unit(u), facs[l + 1])
                rep.checked += 1
                lhs = H.hat_bn(mod)
                rhs = _scale(F, F.sign(H.degree(xs[l])), H.hat_bn_basis(xs))
                if not _eq(lhs, rhs):
                    rep.fail(("tau-sigma-middle", chain, prof, l))
    return rep


HAT_CHECKS = {
    "hat-stasheff": check_hat_stasheff,
    "nu-equivariance": check_nu_equivariance,
    "shift-equivariance": check_shift_equivariance,
    "circ-nu-laws": check_circ_nu_laws,
    "unit-conjugation": check_unit_conjugation,
    "shifted-unit-compositions": check_shifted_unit_compositions,
    "triple-products": check_triple_products,
    "pull-outs": check_pullouts,
    "sigma-tau-units": check_sigma_tau_units,
}


def run_hat_checks(H: HatAlgebra, window: int = 3) -> list[Report]:
    return [fn(H, window) for fn in HAT_CHECKS.values()]
