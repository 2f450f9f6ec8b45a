"""Twisted objects, the insertion operations b_n^tw and cohomology-class tests.

A twisted object is a module with a degree-0 differential ``delta`` whose
coordinate graph is acyclic and which solves the Maurer-Cartan equation.
Morphisms of twisted objects are ad morphisms between the underlying modules.
Equality in the cohomology category is decided by exact linear algebra: two
cocycles agree there when their difference is ``b1`` of a degree -2 morphism.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np

from . import linalg
from .ad import AdCategory, AdError, AdMorphism, SModule, ZERO_MODULE


class TwError(AdError):
    """Invalid twisted object or morphism."""


def _morphism_key(f: AdMorphism) -> tuple:
    return tuple(sorted((tuple(x), tuple(map(str, m.flat)), m.shape) for x, m in f.terms.items()))


@dataclass(frozen=True, eq=False)
class TwObject:
    module: SModule
    delta: AdMorphism
    nil_index: int
    key: tuple

    def __eq__(self, other) -> bool:
        return isinstance(other, TwObject) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)


@dataclass
class TwMorphism:
    source: TwObject
    target: TwObject
    under: AdMorphism


class TwCategory:
    def __init__(self, ad: AdCategory):
        self.ad = ad
        self.H = ad.H
        self.Z = ad.Z
        self.field = ad.field
        self._b1_cache: dict = {}
        self._inverse_cache: dict = {}

    # -- objects --------------------------------------------------------
    def coordinate_graph_depth(self, delta: AdMorphism) -> int:
        """Longest path in the coordinate graph of delta; raises on a cycle."""
        edges: dict = {}
        nodes = set()
        for (s, i), d in delta.source.items:
            nodes.update(((s, i), k) for k in range(d))
        for x, m in delta.terms.items():
            u, v = self.H.source(x), self.H.target(x)
            rows, cols = np.nonzero(m != 0) if m.size else ((), ())
            for r, c in zip(rows, cols):
                edges.setdefault((u, int(c)), set()).add((v, int(r)))
        indeg = {n: 0 for n in nodes}
        for a, outs in edges.items():
            for b in outs:
                indeg[b] += 1
        depth = {n: 0 for n in nodes}
        queue = sorted(n for n in nodes if indeg[n] == 0)
        seen = 0
        while queue:
            n = queue.pop()
            seen += 1
            for b in edges.get(n, ()):
                depth[b] = max(depth[b], depth[n] + 1)
                indeg[b] -= 1
                if indeg[b] == 0:
                    queue.append(b)
        if seen != len(nodes):
            raise TwError("not filtration-nilpotent: the coordinate graph of delta has a cycle")
        return max(depth.values(), default=0)

    def mc_residue(self, delta: AdMorphism, nil_index: int) -> AdMorphism:
        top = min(nil_index - 1, self.Z.max_arity)
        res = self.ad.zero(delta.source, delta.target)
        for s in range(1, top + 1):
            res = self.ad.add(res, self.ad.ad_bn([delta] * s))
        return res

    def validate(self, module: SModule, delta: AdMorphism | None = None) -> TwObject:
        if delta is None:
            delta = self.ad.zero(module, module)
        if delta.source != module or delta.target != module:
            raise TwError("delta must be an endomorphism of the module")
        if not self.ad.is_homogeneous(delta, 0):
            raise TwError(f"delta must have degree 0, found degrees {sorted(self.ad.degrees(delta))}")
        nil = self.coordinate_graph_depth(delta) + 1
        res = self.mc_residue(delta, nil)
        if not self.ad.is_zero(res):
            raise TwError(f"Maurer-Cartan violated: residue on {sorted(tuple(x) for x in res.terms)}")
        return TwObject(module, delta, nil, (module, _morphism_key(delta)))

    def zero_object(self) -> TwObject:
        return self.validate(ZERO_MODULE)

    def mor(self, X: TwObject, Y: TwObject, f: AdMorphism) -> TwMorphism:
        if f.source != X.module or f.target != Y.module:
            raise TwError("morphism modules do not match the objects")
        return TwMorphism(X, Y, f)

    def identity(self, X: TwObject) -> TwMorphism:
        return TwMorphism(X, X, self.ad.identity_of(X.module))

    def zero(self, X: TwObject, Y: TwObject) -> TwMorphism:
        return TwMorphism(X, Y, self.ad.zero(X.module, Y.module))

    # -- linear structure -----------------------------------------------
    def _same(self, f: TwMorphism, g: TwMorphism) -> None:
        if f.source != g.source or f.target != g.target:
            raise TwError("morphisms have different ends")

    def add(self, f: TwMorphism, g: TwMorphism) -> TwMorphism:
        self._same(f, g)
        return TwMorphism(f.source, f.target, self.ad.add(f.under, g.under))

    def sub(self, f: TwMorphism, g: TwMorphism) -> TwMorphism:
        self._same(f, g)
        return TwMorphism(f.source, f.target, self.ad.sub(f.under, g.under))

    def scale(self, c, f: TwMorphism) -> TwMorphism:
        return TwMorphism(f.source, f.target, self.ad.scale(c, f.under))

    def neg(self, f: TwMorphism) -> TwMorphism:
        return self.scale(-1, f)

    def equal(self, f: TwMorphism, g: TwMorphism) -> bool:
        return f.source == g.source and f.target == g.target and self.ad.equal(f.under, g.under)

    def is_zero(self, f: TwMorphism) -> bool:
        return self.ad.is_zero(f.under)

    # -- operations -----------------------------------------------------
    def tw_bn(self, ts: Sequence[TwMorphism]) -> TwMorphism:
        """b_n^tw on [t_n, ..., t_1]: all delta insertions, bounded by nil indices and arity."""
        for left, right in zip(ts, ts[1:]):
            if left.source != right.target:
                raise TwError("twisted morphisms are not composable")
        n = len(ts)
        objs = [ts[-1].source] + [t.target for t in reversed(ts)]  # X_0 .. X_n
        budget = self.Z.max_arity - n
        ranges = []
        for X in objs:
            top = 0 if self.ad.is_zero(X.delta) else min(X.nil_index - 1, budget)
            ranges.append(range(0, max(top, 0) + 1))
        acc = self.ad.zero(objs[0].module, objs[-1].module)
        for mult in product(*ranges):
            if sum(mult) > budget:
                continue
            chain: list = [objs[n].delta] * mult[n]
            for k in range(n, 0, -1):
                chain.append(ts[n - k].under)
                chain.extend([objs[k - 1].delta] * mult[k - 1])
            acc = self.ad.add(acc, self.ad.ad_bn(chain))
        return TwMorphism(objs[0], objs[-1], acc)

    def b1(self, f: TwMorphism) -> TwMorphism:
        return self.tw_bn([f])

    def star(self, g: TwMorphism, f: TwMorphism) -> TwMorphism:
        return self.tw_bn([g, f])

    def split_strict_b1(self, f0: TwMorphism, f1: TwMorphism) -> TwMorphism:
        """b1(f0 + f1) with f0 strict: delta_Y o f0 + f0 o delta_X + b1(f1)."""
        if not self.ad.is_strict(f0.under):
            raise TwError("declared strict part is not strict")
        X, Y = f0.source, f0.target
        part = self.ad.add(self.ad.circ(Y.delta, f0.under), self.ad.circ(f0.under, X.delta))
        return TwMorphism(X, Y, self.ad.add(part, self.b1(f1).under))

    def split_strict_star(self, g: TwMorphism, f0: TwMorphism, f1: TwMorphism) -> TwMorphism:
        """g * (f0 + f1) with f0 strict: g o f0 + g * f1."""
        if not self.ad.is_strict(f0.under):
            raise TwError("declared strict part is not strict")
        return TwMorphism(f0.source, g.target, self.ad.add(self.ad.circ(g.under, f0.under), self.star(g, f1).under))

    # -- cocycles and coboundaries ----------------------------------------
    def is_cocycle(self, f: TwMorphism) -> bool:
        if not self.ad.is_homogeneous(f.under, -1):
            return False
        return self.is_zero(self.b1(f))

    def b1_matrix(self, X: TwObject, Y: TwObject, d: int):
        """Matrix of b1 : Hom_d(X, Y) -> Hom_{d+1}(X, Y) with both bases."""
        key = (X.key, Y.key, d)
        hit = self._b1_cache.get(key)
        if hit is not None:
            return hit
        F = self.field
        src = self.ad.hom_basis(X.module, Y.module, d)
        tgt = self.ad.hom_basis(X.module, Y.module, d + 1)
        mat = F.zeros(len(tgt), len(src))
        sparse, _, _ = self.insertion_map([None], X, Y, d)
        pos = {t: i for i, t in enumerate(tgt)}
        for key, row in sparse.items():
            for j, v in row.items():
                mat[pos[key], j] = v
        out = (mat, src, tgt)
        self._b1_cache[key] = out
        return out

    def is_coboundary(self, f: TwMorphism) -> TwMorphism | None:
        """A witness h of degree d-1 with b1(h) = f, or None."""
        X, Y = f.source, f.target
        d = self.ad.degree(f.under, default=-1)
        if self.is_zero(f):
            return self.zero(X, Y)
        mat, src, tgt = self.b1_matrix(X, Y, d - 1)
        try:
            rhs = self.ad.to_vector(f.under, tgt)
        except AdError:
            return None
        sol = linalg.solve(self.field, mat, rhs)
        if sol is None:
            return None
        return TwMorphism(X, Y, self.ad.from_vector(X.module, Y.module, sol, src))

    def h_equal(self, f: TwMorphism, g: TwMorphism) -> bool:
        """Equality of cohomology classes."""
        return self.is_coboundary(self.sub(f, g)) is not None

    def cocycle_basis(self, X: TwObject, Y: TwObject, d: int = -1) -> list[TwMorphism]:
        mat, src, _ = self.b1_matrix(X, Y, d)
        return [TwMorphism(X, Y, self.ad.from_vector(X.module, Y.module, v, src)) for v in linalg.nullspace(self.field, mat)]

    def random_cocycle(self, rng, X: TwObject, Y: TwObject, d: int = -1, values=(-1, 0, 1, 2)) -> TwMorphism:
        out = self.zero(X, Y)
        for z in self.cocycle_basis(X, Y, d):
            out = self.add(out, self.scale(rng.choice(values), z))
        return out

    def random_morphism(self, rng, X: TwObject, Y: TwObject, d: int) -> TwMorphism:
        return TwMorphism(X, Y, self.ad.random_morphism(rng, X.module, Y.module, d))

    def random_coboundary(self, rng, X: TwObject, Y: TwObject) -> TwMorphism:
        return self.b1(self.random_morphism(rng, X, Y, -2))

    # -- special isomorphisms -------------------------------------------------
    def special_inverse(self, h: AdMorphism) -> AdMorphism:
        parts = self.ad.special_parts(h)
        inv = {}
        for u, m in parts.items():
            mi = linalg.inverse(self.field, m)
            if mi is None:
                raise TwError(f"special morphism is not invertible at {u}")
            inv[u] = mi
        return self.ad.special_of(h.target, h.source, inv)

    def transport_differential(self, h: AdMorphism, X: TwObject) -> tuple[TwObject, TwMorphism]:
        """Move delta_X along a special isomorphism h: returns (Y, h as a tw morphism)."""
        if h.source != X.module:
            raise TwError("h must start at the object's module")
        hinv = self.special_inverse(h)
        dy = self.ad.neg(self.ad.circ(h, self.ad.circ(X.delta, hinv)))
        Y = self.validate(h.target, dy)
        return Y, TwMorphism(X, Y, h)

    # -- shift functor ----------------------------------------------------
    def shift_object(self, X: TwObject, k: int = 1) -> TwObject:
        return self.validate(X.module.shift(k), self.ad.shift_morphism(X.delta, k))

    def shift_morphism(self, f: TwMorphism, k: int = 1) -> TwMorphism:
        return TwMorphism(self.shift_object(f.source, k), self.shift_object(f.target, k), self.ad.shift_morphism(f.under, k))

    def sigma(self, X: TwObject) -> TwMorphism:
        return TwMorphism(X, self.shift_object(X), self.ad.sigma_of(X.module))

    def tau(self, X: TwObject) -> TwMorphism:
        return TwMorphism(self.shift_object(X), X, self.ad.tau_of(X.module))

    def circ(self, g: TwMorphism, f: TwMorphism) -> TwMorphism:
        if g.source != f.target:
            raise TwError("morphisms are not composable")
        return TwMorphism(f.source, g.target, self.ad.circ(g.under, f.under))

    # -- direct sums ---------------------------------------------------------
    def block(self, blocks: Sequence[Sequence[AdMorphism | None]], src_parts: Sequence[SModule], tgt_parts: Sequence[SModule]) -> AdMorphism:
        return self.ad.assemble(blocks, src_parts, tgt_parts)

    def direct_sum(self, objs: Sequence[TwObject]) -> TwObject:
        parts = [X.module for X in objs]
        n = len(objs)
        blocks = [[objs[j].delta if i == j else None for i in range(n)] for j in range(n)]
        return self.validate(self.ad.assemble(blocks, parts, parts).source, self.ad.assemble(blocks, parts, parts))

    def embedding(self, objs: Sequence[TwObject], i: int, total: TwObject | None = None) -> TwMorphism:
        total = total or self.direct_sum(objs)
        return TwMorphism(objs[i], total, self.ad.embedding([X.module for X in objs], i))

    def projection(self, objs: Sequence[TwObject], i: int, total: TwObject | None = None) -> TwMorphism:
        total = total or self.direct_sum(objs)
        return TwMorphism(total, objs[i], self.ad.projection([X.module for X in objs], i))

    def is_special(self, f: TwMorphism) -> bool:
        return self.ad.is_special(f.under)

    # -- linear constraint solving ------------------------------------------
    def insertion_map(self, template: Sequence[TwMorphism | None], X: TwObject, Y: TwObject, d: int) -> tuple[dict, TwObject, TwObject]:
        """Sparse matrix of k -> tw_bn(template with k : X -> Y in the None slot).

        Columns follow ``hom_basis(X, Y, d)``; the result maps
        ``(term, row, col)`` to ``{column: value}``.  Also returns the ends
        of the output.
        """
        if sum(t is None for t in template) != 1:
            raise TwError("template needs exactly one hole")
        n = len(template)
        hole = template.index(None)
        filled = [TwMorphism(X, Y, self.ad.zero(X.module, Y.module)) if t is None else t for t in template]
        for left, right in zip(filled, filled[1:]):
            if left.source != right.target:
                raise TwError("twisted morphisms are not composable")
        objs = [filled[-1].source] + [t.target for t in reversed(filled)]
        budget = self.Z.max_arity - n
        ranges = []
        for O in objs:
            top = 0 if self.ad.is_zero(O.delta) else min(O.nil_index - 1, budget)
            ranges.append(range(0, max(top, 0) + 1))
        hb = self.ad.hom_basis(X.module, Y.module, d)
        acc: dict = {}
        for mult in product(*ranges):
            if sum(mult) > budget:
                continue
            left: list = [objs[n].delta] * mult[n]
            right: list = []
            side = left
            for k in range(n, 0, -1):
                if n - k == hole:
                    side = right
                else:
                    side.append(filled[n - k].under)
                side.extend([objs[k - 1].delta] * mult[k - 1])
            self.ad.insertion_map(left, right, X.module, Y.module, d, acc, hb)
        return acc, objs[0], objs[-1]

    def solve_linear(self, X: TwObject, Y: TwObject, d: int, constraints: Sequence, cocycle: bool = False) -> TwMorphism | None:
        """Find h in Hom_d(X, Y) meeting every constraint, or None.

        Each constraint is ``(fn, rhs)`` or ``(fn, rhs, "H")``.  ``fn`` is
        either a callable linear in h returning a TwMorphism, or a template
        list for :meth:`insertion_map` with h in the ``None`` slot.  The plain
        form asks for ``fn(h) == rhs`` exactly, the ``"H"`` form only up to a
        coboundary.  With ``cocycle=True`` the solution also satisfies
        ``b1(h) == 0``.
        """
        F = self.field
        hb = self.ad.hom_basis(X.module, Y.module, d)
        ncols = len(hb)
        blocks = []  # (sparse images, rhs, extra coboundary columns)
        for con in constraints:
            fn, rhs = con[0], con[1]
            if callable(fn):
                sparse, ends = self._column_images(fn, X, Y, hb)
            else:
                sparse, src, tgt = self.insertion_map(fn, X, Y, d)
                ends = (src, tgt)
            rhs_u = rhs.under if rhs is not None else None
            extra = None
            if len(con) > 2 and con[2] == "H":
                if rhs is not None:
                    ends = (rhs.source, rhs.target)
                if ends is not None:
                    kdeg = (self.ad.degree(rhs_u, default=-1) if rhs_u is not None else -1) - 1
                    extra = self.b1_matrix(ends[0], ends[1], kdeg)
            blocks.append((sparse, rhs_u, extra))
        if cocycle and ncols:
            mat, _, tgt = self.b1_matrix(X, Y, d)
            sparse: dict = {}
            for i, t in enumerate(tgt):
                row = {j: mat[i, j] for j in range(ncols) if mat[i, j] != 0}
                if row:
                    sparse[t] = row
            blocks.append((sparse, None, None))
        rows: list = []  # (block, key)
        index: dict = {}
        for b, (sparse, rhs_u, extra) in enumerate(blocks):
            keys = list(sparse)
            if rhs_u is not None:
                keys += [(x, r, c) for x, m in rhs_u.terms.items() for r, c in zip(*np.nonzero(m))]
            if extra is not None:
                keys += extra[2]
            for key in keys:
                if (b, key) not in index:
                    index[(b, key)] = len(rows)
                    rows.append((b, key))
        nk = sum(extra[0].shape[1] for _, _, extra in blocks if extra is not None)
        A = F.zeros(len(rows), ncols + nk)
        bvec = F.zeros(len(rows), 1)
        k0 = ncols
        for b, (sparse, rhs_u, extra) in enumerate(blocks):
            for key, row in sparse.items():
                i = index[(b, key)]
                for j, v in row.items():
                    A[i, j] = v
            if rhs_u is not None:
                for x, m in rhs_u.terms.items():
                    for r, c in zip(*np.nonzero(m)):
                        bvec[index[(b, (x, r, c))], 0] = m[r, c]
            if extra is not None:
                mat, _, tbasis = extra
                for ti, t in enumerate(tbasis):
                    i = index[(b, t)]
                    for q in range(mat.shape[1]):
                        if mat[ti, q] != 0:
                            A[i, k0 + q] = F.neg(mat[ti, q])
                k0 += mat.shape[1]
        if A.shape[1] == 0:
            return self.zero(X, Y) if F.is_zero_matrix(bvec) else None
        sol = linalg.solve(F, A, bvec)
        if sol is None:
            return None
        return TwMorphism(X, Y, self.ad.from_vector(X.module, Y.module, sol[:ncols], hb))

    def _column_images(self, fn, X: TwObject, Y: TwObject, hb: list) -> tuple[dict, tuple | None]:
        F = self.field
        sparse: dict = {}
        ends = None
        for j, (x, r, c) in enumerate(hb):
            m = F.zeros(Y.module.dim(self.H.target(x)), X.module.dim(self.H.source(x)))
            m[r, c] = F.one
            img = fn(TwMorphism(X, Y, AdMorphism(X.module, Y.module, {x: m})))
            ends = ends or (img.source, img.target)
            for y, mm in img.under.terms.items():
                for rr, cc in zip(*np.nonzero(mm)):
                    sparse.setdefault((y, rr, cc), {})[j] = mm[rr, cc]
        return sparse, ends

    def h_inverse(self, f: TwMorphism) -> TwMorphism | None:
        """A two-sided inverse of f in the cohomology category, or None."""
        key = (f.source.key, f.target.key, _morphism_key(f.under))
        if key in self._inverse_cache:
            return self._inverse_cache[key]
        out = self._h_inverse(f)
        self._inverse_cache[key] = out
        return out

    def _h_inverse(self, f: TwMorphism) -> TwMorphism | None:
        X, Y = f.source, f.target
        return self.solve_linear(
            Y,
            X,
            -1,
            [
                ([None, f], self.identity(X), "H"),
                ([f, None], self.identity(Y), "H"),
            ],
            cocycle=True,
        )
