"""Finite-support modules over the hat idempotents and morphisms between them.

A module is a dimension vector on hat idempotents ``(s, i)``.  A morphism
``X -> Y`` is a finite sum ``sum f_x (x) x`` of scalar matrices tagged by hat
basis elements ``x``; the matrix for ``x`` has shape
``dim Y[target(x)] x dim X[source(x)]``.

Chains of morphisms are in written order ``[f_n, ..., f_1]`` (``f_1`` acts
first), matching the chains of :mod:`twcat.hat`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .algebra import AlgebraError
from .hat import HatAlgebra, HatBasis


class AdError(AlgebraError):
    """Shape, degree or composability problems with ad morphisms."""


@dataclass(frozen=True)
class SModule:
    """Dimension vector with finite support; zero entries are never stored."""

    items: tuple  # sorted ((s, i), dim) pairs

    @staticmethod
    def of(dims: Mapping) -> "SModule":
        clean = {}
        for u, d in dims.items():
            d = int(d)
            if d < 0:
                raise AdError(f"negative dimension at {u}")
            if d:
                clean[(int(u[0]), str(u[1]))] = d
        return SModule(tuple(sorted(clean.items())))

    @property
    def dims(self) -> dict:
        return dict(self.items)

    def dim(self, u) -> int:
        return self.dims.get(tuple(u), 0)

    @property
    def support(self) -> list:
        return [u for u, _ in self.items]

    @property
    def total(self) -> int:
        return sum(d for _, d in self.items)

    def shift(self, k: int = 1) -> "SModule":
        return SModule.of({(s + k, i): d for (s, i), d in self.items})

    def __add__(self, other: "SModule") -> "SModule":
        dims = self.dims
        for u, d in other.items:
            dims[u] = dims.get(u, 0) + d
        return SModule.of(dims)

    def is_zero(self) -> bool:
        return not self.items

    def __str__(self) -> str:
        return "{" + ", ".join(f"({s},{i}):{d}" for (s, i), d in self.items) + "}"


ZERO_MODULE = SModule(())


def direct_sum(mods: Sequence[SModule]) -> SModule:
    out = ZERO_MODULE
    for m in mods:
        out = out + m
    return out


def block_offsets(parts: Sequence[SModule]) -> list[dict]:
    """Per summand, the row offset of its block inside each fiber of the sum."""
    running: dict = {}
    offs = []
    for m in parts:
        offs.append({u: running.get(u, 0) for u, _ in m.items})
        for u, d in m.items:
            running[u] = running.get(u, 0) + d
    return offs


@dataclass
class AdMorphism:
    source: SModule
    target: SModule
    terms: dict  # HatBasis -> matrix

    def copy(self) -> "AdMorphism":
        return AdMorphism(self.source, self.target, {k: v.copy() for k, v in self.terms.items()})


class AdCategory:
    """Operations of the b-category of finite-support modules over a hat algebra."""

    def __init__(self, hat: HatAlgebra):
        self.H = hat
        self.Z = hat.Z
        self.field = hat.field
        self.strict_ids = self._strict_ids()
        self._prefix_cache: dict = {}

    def _strict_ids(self) -> frozenset:
        bad = set()
        for chain, out in self.Z.table.items():
            if len(chain) != 2 and out:
                bad.update(chain)
        return frozenset(b for b in self.Z.basis if b not in bad)

    # -- construction ---------------------------------------------------
    def morphism(self, X: SModule, Y: SModule, terms: Mapping) -> AdMorphism:
        F = self.field
        clean = {}
        for x, m in terms.items():
            x = HatBasis(*x)
            self.Z.elem(x.base)
            r, c = Y.dim(self.H.target(x)), X.dim(self.H.source(x))
            m = np.asarray(m, dtype=object)
            if m.ndim != 2:
                m = F.matrix(m, (r, c)) if r and c else F.zeros(r, c)
            if m.shape != (r, c):
                raise AdError(f"matrix for {x} has shape {m.shape}, expected {(r, c)}")
            m = F.matrix(m.tolist(), (r, c)) if r and c else F.zeros(r, c)
            if x in clean:
                m = F.madd(clean[x], m)
            clean[x] = m
        return AdMorphism(X, Y, {k: v for k, v in clean.items() if v.size and not F.is_zero_matrix(v)})

    def zero(self, X: SModule, Y: SModule) -> AdMorphism:
        return AdMorphism(X, Y, {})

    def identity_of(self, X: SModule) -> AdMorphism:
        F = self.field
        return AdMorphism(X, X, {HatBasis(self.Z.units[i], s, s): F.eye(d) for (s, i), d in X.items})

    def special_of(self, X: SModule, Y: SModule, mats: Mapping) -> AdMorphism:
        """L(f) = sum_u f_u (x) e_u."""
        terms = {}
        for u, m in mats.items():
            s, i = u
            terms[HatBasis(self.Z.units[i], s, s)] = m
        return self.morphism(X, Y, terms)

    def special_parts(self, f: AdMorphism) -> dict:
        """The fiber matrices of a special morphism."""
        if not self.is_special(f):
            raise AdError("morphism is not special")
        F = self.field
        out = {}
        for u in set(f.source.support) | set(f.target.support):
            out[u] = F.zeros(f.target.dim(u), f.source.dim(u))
        for x, m in f.terms.items():
            out[self.H.source(x)] = m
        return out

    # -- predicates -----------------------------------------------------
    def degrees(self, f: AdMorphism) -> set:
        return {self.H.degree(x) for x in f.terms}

    def degree(self, f: AdMorphism, default: int | None = None) -> int:
        degs = self.degrees(f)
        if not degs:
            if default is None:
                raise AdError("degree of the zero morphism is ambiguous")
            return default
        if len(degs) > 1:
            raise AdError(f"morphism is not homogeneous: degrees {sorted(degs)}")
        return degs.pop()

    def is_homogeneous(self, f: AdMorphism, d: int) -> bool:
        return all(self.H.degree(x) == d for x in f.terms)

    def is_special(self, f: AdMorphism) -> bool:
        return all(self.Z.basis[x.base].is_unit and x.s == x.t for x in f.terms)

    def is_strict(self, f: AdMorphism) -> bool:
        return all(x.base in self.strict_ids for x in f.terms)

    def equal(self, f: AdMorphism, g: AdMorphism) -> bool:
        if f.source != g.source or f.target != g.target:
            return False
        return self.is_zero(self.sub(f, g))

    def is_zero(self, f: AdMorphism) -> bool:
        return all(self.field.is_zero_matrix(m) for m in f.terms.values())

    # -- linear structure -----------------------------------------------
    def _combine(self, f: AdMorphism, g: AdMorphism, c) -> AdMorphism:
        if f.source != g.source or f.target != g.target:
            raise AdError("cannot add morphisms between different modules")
        F = self.field
        terms = {k: v.copy() for k, v in f.terms.items()}
        for k, v in g.terms.items():
            w = F.mscale(c, v)
            terms[k] = F.madd(terms[k], w) if k in terms else w
        return AdMorphism(f.source, f.target, {k: v for k, v in terms.items() if not F.is_zero_matrix(v)})

    def add(self, f: AdMorphism, g: AdMorphism) -> AdMorphism:
        return self._combine(f, g, self.field.one)

    def sub(self, f: AdMorphism, g: AdMorphism) -> AdMorphism:
        return self._combine(f, g, self.field.neg(self.field.one))

    def scale(self, c, f: AdMorphism) -> AdMorphism:
        F = self.field
        c = F(c)
        if c == 0:
            return self.zero(f.source, f.target)
        return AdMorphism(f.source, f.target, {k: F.mscale(c, v) for k, v in f.terms.items()})

    def neg(self, f: AdMorphism) -> AdMorphism:
        return self.scale(-1, f)

    def total(self, X: SModule, Y: SModule, fs: Iterable[AdMorphism]) -> AdMorphism:
        out = self.zero(X, Y)
        for f in fs:
            out = self.add(out, f)
        return out

    # -- operations -----------------------------------------------------
    def ad_bn(self, fs: Sequence[AdMorphism]) -> AdMorphism:
        """b_n on a written-order chain [f_n, ..., f_1] of composable morphisms."""
        if not fs:
            raise AdError("empty chain")
        for left, right in zip(fs, fs[1:]):
            if left.source != right.target:
                raise AdError("morphisms are not composable")
        F, H = self.field, self.H
        X, Y = fs[-1].source, fs[0].target
        n = len(fs)
        prefixes = self._live_prefixes(n)
        acc: dict = {}
        termlists = [list(f.terms.items()) for f in fs]

        def walk(j: int, ids: tuple, chain: tuple, mat) -> None:
            if j == n:
                for k, c in H.hat_bn_basis(chain).items():
                    term = F.mscale(c, mat)
                    acc[k] = F.madd(acc[k], term) if k in acc else term
                return
            for x, m in termlists[j]:
                key = ids + (x.base,)
                if key not in prefixes or (chain and chain[-1].t != x.s):
                    continue
                nxt = m if mat is None else F.mm(mat, m)
                if not F.is_zero_matrix(nxt):
                    walk(j + 1, key, chain + (x,), nxt)

        walk(0, (), (), None)
        return AdMorphism(X, Y, {k: v for k, v in acc.items() if not F.is_zero_matrix(v)})

    def _live_prefixes(self, n: int) -> frozenset:
        """Prefixes of basis chains of length n with a nonzero b_n."""
        hit = self._prefix_cache.get(n)
        if hit is None:
            Z = self.Z
            if n == 2:
                live = [c for c in Z.chains(2) if Z.bn_basis(c)]
            else:
                live = [c for c in Z.table if len(c) == n and Z.bn_basis(c)]
            hit = frozenset(c[:k] for c in live for k in range(n + 1))
            self._prefix_cache[n] = hit
        return hit

    def insertion_map(self, left: Sequence[AdMorphism], right: Sequence[AdMorphism], Xk: SModule, Yk: SModule, d: int, acc: dict, hb: Sequence[tuple] | None = None) -> dict:
        """Accumulate the sparse matrix of k -> b_n(left + [k] + right) into ``acc``.

        ``k`` ranges over Hom_d(Xk, Yk) with columns indexed like ``hb``
        (default :meth:`hom_basis`); keys of ``acc`` are output coordinates
        ``(term, row, col)`` and values are ``{column: coefficient}``.
        """
        F, H = self.field, self.H
        hb = self.hom_basis(Xk, Yk, d) if hb is None else hb
        by_x: dict = {}
        for j, (x, r, c) in enumerate(hb):
            by_x.setdefault(x, []).append((j, r, c))
        a, n = len(left), len(left) + 1 + len(right)
        prefixes = self._live_prefixes(n)
        lists = [list(f.terms.items()) for f in left] + [None] + [list(f.terms.items()) for f in right]

        def emit(chain, x, L, R):
            out = H.hat_bn_basis(chain)
            if not out:
                return
            for j, r, c in by_x[x]:
                lrows = [(i, v) for i, v in enumerate(L[:, r]) if v != 0] if L is not None else [(r, F.one)]
                rcols = [(i, v) for i, v in enumerate(R[c, :]) if v != 0] if R is not None else [(c, F.one)]
                for k, coeff in out.items():
                    for i, lv in lrows:
                        cl = F.mul(coeff, lv)
                        for q, rv in rcols:
                            key = (k, i, q)
                            row = acc.setdefault(key, {})
                            v = F.add(row.get(j, F.zero), F.mul(cl, rv))
                            if v == 0:
                                row.pop(j, None)
                                if not row:
                                    del acc[key]
                            else:
                                row[j] = v

        def walk(pos, ids, chain, x, L, R):
            if pos == n:
                emit(chain, x, L, R)
                return
            options = [(y, None) for y in by_x] if pos == a else lists[pos]
            for y, m in options:
                key = ids + (y.base,)
                if key not in prefixes or (chain and chain[-1].t != y.s):
                    continue
                if pos < a:
                    nl = m if L is None else F.mm(L, m)
                    if not F.is_zero_matrix(nl):
                        walk(pos + 1, key, chain + (y,), x, nl, R)
                elif pos == a:
                    walk(pos + 1, key, chain + (y,), y, L, R)
                else:
                    nr = m if R is None else F.mm(R, m)
                    if not F.is_zero_matrix(nr):
                        walk(pos + 1, key, chain + (y,), x, L, nr)

        walk(0, (), (), None, None, None)
        return acc

    def circ(self, g: AdMorphism, f: AdMorphism) -> AdMorphism:
        return self.ad_bn([g, f])

    # -- shifts ---------------------------------------------------------
    def shift_morphism(self, f: AdMorphism, k: int = 1) -> AdMorphism:
        return AdMorphism(
            f.source.shift(k),
            f.target.shift(k),
            {HatBasis(x.base, x.s + k, x.t + k): m.copy() for x, m in f.terms.items()},
        )

    def sigma_of(self, X: SModule) -> AdMorphism:
        """sigma_X : X -> X[1], degree -2."""
        F = self.field
        terms = {}
        for (s, i), d in X.items:
            terms[HatBasis(self.Z.units[i], s + 1, s)] = F.mscale(F.sign(s), F.eye(d))
        return AdMorphism(X, X.shift(1), terms)

    def tau_of(self, X: SModule) -> AdMorphism:
        """tau_X : X[1] -> X, degree 0."""
        F = self.field
        terms = {}
        for (s, i), d in X.items:
            terms[HatBasis(self.Z.units[i], s, s + 1)] = F.mscale(F.sign(s), F.eye(d))
        return AdMorphism(X.shift(1), X, terms)

    # -- matrix calculus --------------------------------------------------
    def component(self, f: AdMorphism, src_parts: Sequence[SModule], tgt_parts: Sequence[SModule], j: int, i: int) -> AdMorphism:
        """The (j, i) block of f with respect to the given decompositions."""
        if not (0 <= i < len(src_parts) and 0 <= j < len(tgt_parts)):
            raise AdError(f"component index ({j},{i}) out of range")
        if direct_sum(src_parts) != f.source or direct_sum(tgt_parts) != f.target:
            raise AdError("decomposition does not match the morphism's modules")
        so, to = block_offsets(src_parts)[i], block_offsets(tgt_parts)[j]
        Xi, Yj = src_parts[i], tgt_parts[j]
        terms = {}
        for x, m in f.terms.items():
            u, v = self.H.source(x), self.H.target(x)
            if Xi.dim(u) and Yj.dim(v):
                terms[x] = m[to[v] : to[v] + Yj.dim(v), so[u] : so[u] + Xi.dim(u)]
        return self.morphism(Xi, Yj, terms)

    def assemble(self, blocks: Sequence[Sequence[AdMorphism | None]], src_parts: Sequence[SModule], tgt_parts: Sequence[SModule]) -> AdMorphism:
        """Inverse of :meth:`component`: blocks[j][i] maps src_parts[i] -> tgt_parts[j]."""
        F = self.field
        X, Y = direct_sum(src_parts), direct_sum(tgt_parts)
        soffs, toffs = block_offsets(src_parts), block_offsets(tgt_parts)
        terms: dict = {}
        for j, row in enumerate(blocks):
            for i, blk in enumerate(row):
                if blk is None:
                    continue
                if blk.source != src_parts[i] or blk.target != tgt_parts[j]:
                    raise AdError(f"block ({j},{i}) has the wrong modules")
                for x, m in blk.terms.items():
                    u, v = self.H.source(x), self.H.target(x)
                    if x not in terms:
                        terms[x] = F.zeros(Y.dim(v), X.dim(u))
                    r0, c0 = toffs[j][v], soffs[i][u]
                    terms[x][r0 : r0 + m.shape[0], c0 : c0 + m.shape[1]] = F.madd(
                        terms[x][r0 : r0 + m.shape[0], c0 : c0 + m.shape[1]], m
                    )
        return self.morphism(X, Y, terms)

    def embedding(self, parts: Sequence[SModule], i: int) -> AdMorphism:
        """The special inclusion of parts[i] into their sum."""
        rows = [[None] * 1 for _ in parts]
        rows[i][0] = self.identity_of(parts[i])
        return self.assemble(rows, [parts[i]], parts)

    def projection(self, parts: Sequence[SModule], i: int) -> AdMorphism:
        row = [None] * len(parts)
        row[i] = self.identity_of(parts[i])
        return self.assemble([row], parts, [parts[i]])

    def diag(self, fs: Sequence[AdMorphism]) -> AdMorphism:
        n = len(fs)
        blocks = [[fs[j] if i == j else None for i in range(n)] for j in range(n)]
        return self.assemble(blocks, [f.source for f in fs], [f.target for f in fs])

    # -- hom spaces as vector spaces ------------------------------------
    def hom_basis(self, X: SModule, Y: SModule, d: int) -> list[tuple]:
        """Coordinates (x, row, col) of the degree-d part of Hom(X, Y)."""
        out = []
        for b in sorted(self.Z.basis):
            be = self.Z.basis[b]
            for (t, ui), dx in X.items:
                if ui != be.source:
                    continue
                s = be.degree + t - d
                dy = Y.dim((s, be.target))
                if not dy:
                    continue
                x = HatBasis(b, s, t)
                out.extend((x, r, c) for r in range(dy) for c in range(dx))
        return out

    def to_vector(self, f: AdMorphism, basis: Sequence[tuple]) -> np.ndarray:
        F = self.field
        v = F.zeros(len(basis), 1)
        index = {(x, r, c): k for k, (x, r, c) in enumerate(basis)}
        for x, m in f.terms.items():
            for r in range(m.shape[0]):
                for c in range(m.shape[1]):
                    if m[r, c] != 0:
                        if (x, r, c) not in index:
                            raise AdError(f"term {x} is outside the requested hom basis")
                        v[index[(x, r, c)], 0] = m[r, c]
        return v

    def from_vector(self, X: SModule, Y: SModule, v: np.ndarray, basis: Sequence[tuple]) -> AdMorphism:
        F = self.field
        terms: dict = {}
        for k, (x, r, c) in enumerate(basis):
            val = v[k, 0] if v.ndim == 2 else v[k]
            if val == 0:
                continue
            if x not in terms:
                terms[x] = F.zeros(Y.dim(self.H.target(x)), X.dim(self.H.source(x)))
            terms[x][r, c] = val
        return AdMorphism(X, Y, {k: m for k, m in terms.items() if not F.is_zero_matrix(m)})

    def random_morphism(self, rng, X: SModule, Y: SModule, d: int, density: float = 0.5, values=(-1, 1, 2)) -> AdMorphism:
        basis = self.hom_basis(X, Y, d)
        F = self.field
        v = F.zeros(len(basis), 1)
        for k in range(len(basis)):
            if rng.random() < density:
                v[k, 0] = F(rng.choice(values))
        return self.from_vector(X, Y, v, basis)
