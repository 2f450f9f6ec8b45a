"""Finite strictly unital b-algebras (bar-shifted A-infinity algebras).

A :class:`SectionAlgebra` holds a finite directed basis over a finite set of
idempotents together with sparse structure constants for the operations
``b_n``.  Chains are always lists in *written order*: the leftmost tensor
factor first.  For a chain ``[x_1, ..., x_n]`` to be composable the source of
each factor must equal the target of the factor to its right.

Elements are dicts ``{basis_id: coeff}``; tensors are dicts
``{(id_1, ..., id_n): coeff}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import product
from typing import Iterable, Mapping, Sequence

from .scalars import Field, QQ

Elem = dict  # basis id -> coefficient
Tensor = dict  # tuple of basis ids -> coefficient


class AlgebraError(ValueError):
    """Malformed algebra data or an incompatible chain."""


@dataclass(frozen=True)
class BasisElem:
    id: str
    source: str  # u(a)
    target: str  # v(a)
    degree: int
    is_unit: bool = False


@dataclass
class Report:
    """Outcome of a verification sweep."""

    name: str
    checked: int = 0
    failures: list = dc_field(default_factory=list)
    notes: list = dc_field(default_factory=list)
    tally: dict = dc_field(default_factory=dict)  # check name -> cases run

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, item) -> None:
        self.failures.append(item)

    def merge(self, other: "Report") -> "Report":
        self.checked += other.checked
        self.failures.extend(other.failures)
        for k, v in other.tally.items():
            self.tally[k] = self.tally.get(k, 0) + v
        return self


def add_into(acc: dict, key, coeff, field: Field) -> None:
    """acc[key] += coeff, dropping zeros."""
    v = field.add(acc.get(key, field.zero), coeff)
    if v == 0:
        acc.pop(key, None)
    else:
        acc[key] = v


class SectionAlgebra:
    """A finite strictly unital b-algebra with a directed basis.

    ``table`` maps a chain of basis ids (written order) to a linear
    combination of basis ids.  Unit products ``b_2(e_i (x) a) = a`` and
    ``b_2(a (x) e_i) = (-1)^(|a|+1) a`` are supplied automatically unless the
    table overrides them (overrides are only accepted with ``strict=False``,
    which exists so that deliberately broken algebras can be studied).
    """

    def __init__(
        self,
        idems: Sequence[str],
        basis: Iterable[BasisElem],
        table: Mapping[tuple, Mapping[str, object]] | None = None,
        field: Field = QQ,
        strict: bool = True,
    ):
        self.field = field
        self.idems = tuple(idems)
        if len(set(self.idems)) != len(self.idems):
            raise AlgebraError("idempotent labels must be unique")
        self.basis: dict[str, BasisElem] = {}
        for b in basis:
            if b.id in self.basis:
                raise AlgebraError(f"duplicate basis id {b.id!r}")
            for end in (b.source, b.target):
                if end not in self.idems:
                    raise AlgebraError(f"basis {b.id!r} uses unknown idempotent {end!r}")
            self.basis[b.id] = b
        self.units: dict[str, str] = {}
        for b in self.basis.values():
            if b.is_unit:
                if b.source in self.units:
                    raise AlgebraError(f"idempotent {b.source!r} has two units")
                self.units[b.source] = b.id
        self.table: dict[tuple, dict] = {}
        for chain, out in (table or {}).items():
            chain = tuple(chain)
            clean = {}
            for k, c in out.items():
                if k not in self.basis:
                    raise AlgebraError(f"unknown basis id {k!r} in output of {chain}")
                add_into(clean, k, field(c), field)
            for k in chain:
                if k not in self.basis:
                    raise AlgebraError(f"unknown basis id {k!r} in chain {chain}")
            self.table[chain] = clean
        self.max_arity = max([2] + [len(c) for c in self.table])
        self._cache: dict[tuple, dict] = {}
        self.load_problems = self._load_checks()
        if strict:
            bad = self.load_problems + self.check_units().failures
            if bad:
                raise AlgebraError("; ".join(str(b) for b in bad))

    # -- structure ------------------------------------------------------
    def elem(self, bid: str) -> BasisElem:
        try:
            return self.basis[bid]
        except KeyError:
            raise AlgebraError(f"unknown basis id {bid!r}") from None

    def chain_ends(self, chain: Sequence[str]) -> tuple[str, str]:
        """(source, target) of a composable written-order chain."""
        elems = [self.elem(c) for c in chain]
        for left, right in zip(elems, elems[1:]):
            if left.source != right.target:
                raise AlgebraError(f"incompatible chain {tuple(chain)}: {left.id} after {right.id}")
        return elems[-1].source, elems[0].target

    def is_composable(self, chain: Sequence[str]) -> bool:
        try:
            self.chain_ends(chain)
            return True
        except AlgebraError:
            return False

    def _load_checks(self) -> list[str]:
        problems = []
        for b in self.basis.values():
            if b.is_unit and (b.degree != -1 or b.source != b.target):
                problems.append(f"unit {b.id} must have degree -1 and equal ends (degree {b.degree})")
        for i in self.idems:
            if i not in self.units:
                problems.append(f"idempotent {i} has no unit")
        for chain, out in self.table.items():
            if not chain:
                problems.append("empty chain in table")
                continue
            try:
                src, tgt = self.chain_ends(chain)
            except AlgebraError as exc:
                problems.append(str(exc))
                continue
            want = 1 + sum(self.basis[c].degree for c in chain)
            for k in out:
                b = self.basis[k]
                if b.degree != want:
                    problems.append(f"degree law fails for {chain} -> {k}: {b.degree} != {want}")
                if (b.source, b.target) != (src, tgt):
                    problems.append(f"direction mismatch for {chain} -> {k}")
        return problems

    # -- evaluation -----------------------------------------------------
    def unit_rule(self, chain: tuple) -> dict | None:
        """Built-in value of a unit product, or None if no unit is involved."""
        units = [self.basis[c].is_unit for c in chain]
        if not any(units):
            return None
        if len(chain) != 2:
            return {}
        left, right = chain
        if self.basis[left].is_unit:
            return {right: self.field.one}
        a = self.basis[left]
        return {left: self.field.sign(a.degree + 1)}

    def bn_basis(self, chain: Sequence[str]) -> dict:
        """b_n on a composable chain of basis ids (n = len(chain))."""
        chain = tuple(chain)
        hit = self._cache.get(chain)
        if hit is not None:
            return hit
        self.chain_ends(chain)
        if chain in self.table:
            out = self.table[chain]
        else:
            rule = self.unit_rule(chain)
            out = rule if rule is not None else {}
        self._cache[chain] = out
        return out

    def bn_eval(self, n: int, factors: Sequence[Mapping[str, object]]) -> dict:
        """Multilinear extension of b_n to linear combinations of basis ids.

        Factor combinations whose chain is not composable contribute zero
        (tensor products are taken over the idempotent algebra); a chain made
        of single basis elements that is not composable raises.
        """
        if len(factors) != n:
            raise AlgebraError(f"b_{n} needs {n} factors, got {len(factors)}")
        F = self.field
        singles = all(len(f) == 1 for f in factors)
        acc: dict = {}
        for combo in product(*[list(f.items()) for f in factors]):
            chain = tuple(k for k, _ in combo)
            for k in chain:
                self.elem(k)
            if not self.is_composable(chain):
                if singles:
                    self.chain_ends(chain)
                continue
            coeff = F.one
            for _, c in combo:
                coeff = F.mul(coeff, F(c))
            for k, c in self.bn_basis(chain).items():
                add_into(acc, k, F.mul(coeff, c), F)
        return acc

    def koszul_insert(self, r: int, s: int, t: int, chain: Sequence[str]) -> dict:
        """(id^r (x) b_s (x) id^t) on a basis chain, as a tensor dict.

        The Koszul sign is (-1)^(|x_1| + ... + |x_r|) because b_s has degree 1
        and passes the r leftmost factors.
        """
        chain = tuple(chain)
        if r < 0 or t < 0 or s < 1 or len(chain) != r + s + t:
            raise AlgebraError("bad koszul_insert shape")
        self.chain_ends(chain)
        F = self.field
        sign = F.sign(sum(self.basis[c].degree for c in chain[:r]))
        left, mid, right = chain[:r], chain[r : r + s], chain[r + s :]
        out: dict = {}
        for k, c in self.bn_basis(mid).items():
            add_into(out, left + (k,) + right, F.mul(sign, c), F)
        return out

    # -- verification ---------------------------------------------------
    def chains(self, n: int) -> Iterable[tuple]:
        """All composable basis chains of length n, deterministic order."""
        ids = sorted(self.basis)

        def extend(prefix):
            if len(prefix) == n:
                yield tuple(prefix)
                return
            for k in ids:
                if prefix and self.basis[prefix[-1]].source != self.basis[k].target:
                    continue
                prefix.append(k)
                yield from extend(prefix)
                prefix.pop()

        yield from extend([])

    def stasheff_residue(self, chain: Sequence[str]) -> dict:
        """sum over r+s+t=n of b_{r+1+t}(id^r (x) b_s (x) id^t) on the chain."""
        n = len(chain)
        F = self.field
        total: dict = {}
        for s in range(1, n + 1):
            for r in range(0, n - s + 1):
                t = n - s - r
                for inner_chain, c in self.koszul_insert(r, s, t, chain).items():
                    for k, d in self.bn_basis(inner_chain).items():
                        add_into(total, k, F.mul(c, d), F)
        return total

    def check_stasheff(self, n: int) -> Report:
        rep = Report(f"stasheff[{n}]")
        for chain in self.chains(n):
            rep.checked += 1
            res = self.stasheff_residue(chain)
            if res:
                rep.fail((chain, res))
        return rep

    def check_units(self) -> Report:
        """Unit axioms: degrees, one unit per idempotent, unit rules, strictness."""
        rep = Report("units")
        F = self.field
        for i in self.idems:
            rep.checked += 1
            if i not in self.units:
                rep.fail(f"idempotent {i} has no unit")
        for b in self.basis.values():
            if b.is_unit:
                rep.checked += 1
                if b.degree != -1:
                    rep.fail(f"unit {b.id} has degree {b.degree}, expected -1")
                if b.source != b.target:
                    rep.fail(f"unit {b.id} is not a loop")
        for a in sorted(self.basis):
            ea = self.basis[a]
            u = self.units.get(ea.target)
            if u is not None:
                rep.checked += 1
                if self.bn_basis((u, a)) != {a: F.one}:
                    rep.fail(f"b2({u} x {a}) != {a}")
            u = self.units.get(ea.source)
            if u is not None:
                rep.checked += 1
                want = {a: F.sign(ea.degree + 1)}
                if self.bn_basis((a, u)) != want:
                    rep.fail(f"b2({a} x {u}) != (-1)^(|{a}|+1) {a}")
        for chain, out in self.table.items():
            if len(chain) != 2 and out and any(self.basis[c].is_unit for c in chain):
                rep.checked += 1
                rep.fail(f"unit in {chain} is not strict")
        return rep

    def check_all(self) -> list[Report]:
        reps = [self.check_units()]
        for n in range(1, self.max_arity + 3):
            reps.append(self.check_stasheff(n))
        return reps

    # -- derived algebras -------------------------------------------------
    def with_table(self, table: Mapping[tuple, Mapping[str, object]], strict: bool = False) -> "SectionAlgebra":
        return SectionAlgebra(self.idems, self.basis.values(), table, self.field, strict=strict)

    def unit_rule_mutants(self) -> list[tuple[str, "SectionAlgebra"]]:
        """Algebras obtained by flipping the sign of exactly one unit product."""
        F = self.field
        out = []
        seen = set()
        for a in sorted(self.basis):
            ea = self.basis[a]
            for chain in ((self.units.get(ea.target), a), (a, self.units.get(ea.source))):
                if None in chain or chain in seen:
                    continue
                seen.add(chain)
                val = self.bn_basis(chain)
                flipped = {k: F.neg(c) for k, c in val.items()}
                table = dict(self.table)
                table[chain] = flipped
                out.append((f"b2{chain}", self.with_table(table)))
        return out
