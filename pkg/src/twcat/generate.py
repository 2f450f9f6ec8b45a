"""Seeded random objects, morphisms and conflations.

Twisted objects are built as iterated extensions of objects with zero
differential, glued by degree-0 cocycles; the differential is therefore
strictly block triangular and solves the Maurer-Cartan equation by
construction (every intermediate object passes validation).
"""

from __future__ import annotations

import random

from .ad import SModule
from .hat import HatBasis
from .confl import Conflation
from .tw import TwMorphism, TwObject


class Generator:
    def __init__(self, ws, seed: int = 0, dims: int = 3, window: int = 1):
        if dims < 1 or window < 0:
            raise ValueError("bounds must be positive")
        self.ws = ws
        self.rng = random.Random(seed)
        self.dims = dims
        self.window = window
        self.tw = ws.tw
        self.ad = ws.ad
        self.confl = ws.confl
        self._cache: dict = {}

    def module(self, total: int | None = None) -> SModule:
        rng = self.rng
        total = rng.randint(1, self.dims) if total is None else total
        slots = [(s, i) for s in range(-self.window, self.window + 1) for i in self.ws.algebra.idems]
        dims: dict = {}
        for _ in range(total):
            u = rng.choice(slots)
            dims[u] = dims.get(u, 0) + 1
        return SModule.of(dims)

    def base_object(self, total: int | None = None) -> TwObject:
        return self.tw.validate(self.module(total))

    def object(self, layers: int = 2) -> TwObject:
        """An iterated extension with at most ``dims`` coordinates in total."""
        budget = self.rng.randint(1, self.dims)
        X = self.base_object(self.rng.randint(1, budget))
        used = X.module.total
        for _ in range(layers - 1):
            if used >= budget:
                break
            Y = self.base_object(self.rng.randint(1, budget - used))
            gamma = self.tw.random_cocycle(self.rng, Y, X, 0)
            X = self.confl.extension(X, Y, gamma.under)
            used = X.module.total
        return X

    def hom(self, X: SModule, Y: SModule, d: int, tries: int = 4):
        """A random degree-d map, retried a few times to avoid zero."""
        f = self.ad.random_morphism(self.rng, X, Y, d)
        while tries > 1 and self.ad.is_zero(f) and self.ad.hom_basis(X, Y, d):
            f = self.ad.random_morphism(self.rng, X, Y, d)
            tries -= 1
        return f

    def seeded_chain(self, n: int):
        """Modules X_0..X_n and maps f_1..f_n built around a basis chain with nonzero b_n.

        Returns (modules, maps, degrees) or None when the algebra has no such chain.
        """
        Z = self.ws.algebra
        key = ("live", n)
        if key not in self._cache:
            self._cache[key] = [c for c in Z.chains(n) if Z.bn_basis(c)]
        live = self._cache[key]
        if not live:
            return None
        chain = self.rng.choice(live)[::-1]  # x_1 first
        shifts = [self.rng.randint(-self.window, self.window) for _ in range(n + 1)]
        idems = [Z.basis[chain[0]].source] + [Z.basis[x].target for x in chain]
        mods = []
        for s, i in zip(shifts, idems):
            dims = {(s, i): 1}
            if self.rng.random() < 0.5:
                extra = (self.rng.randint(-self.window, self.window), self.rng.choice(Z.idems))
                dims[extra] = dims.get(extra, 0) + 1
            mods.append(SModule.of(dims))
        maps, degrees = [], []
        for k, x in enumerate(chain):
            src, tgt = mods[k], mods[k + 1]
            term = HatBasis(x, shifts[k + 1], shifts[k])
            r, c = tgt.dim(self.ws.hat.target(term)), src.dim(self.ws.hat.source(term))
            m = self.ws.field.zeros(r, c)
            m[0, 0] = self.ws.field(self.rng.choice((1, -1, 2)))
            d = Z.basis[x].degree + shifts[k] - shifts[k + 1]
            f = self.ad.add(self.ad.morphism(src, tgt, {term: m}), self.ad.random_morphism(self.rng, src, tgt, d, density=0.3))
            maps.append(f)
            degrees.append(d)
        return mods, maps, degrees

    def linked_module(self, X: SModule, degrees, tries: int = 12) -> SModule:
        """A module Y with some nonzero Hom(X, Y) in one of ``degrees``."""
        for _ in range(tries):
            Y = self.module()
            if any(self.ad.hom_basis(X, Y, d) for d in degrees):
                return Y
        return Y

    def live_degree(self, X: SModule, Y: SModule, degrees) -> int:
        """A degree from ``degrees`` with a nonzero hom space, if any exists."""
        live = [d for d in degrees if self.ad.hom_basis(X, Y, d)]
        return self.rng.choice(live or list(degrees))

    def morphism(self, X: TwObject, Y: TwObject, d: int = -1) -> TwMorphism:
        return self.tw.random_morphism(self.rng, X, Y, d)

    def cocycle(self, X: TwObject, Y: TwObject, d: int = -1) -> TwMorphism:
        return self.tw.random_cocycle(self.rng, X, Y, d)

    def coboundary(self, X: TwObject, Y: TwObject, tries: int = 4) -> TwMorphism:
        c = self.tw.random_coboundary(self.rng, X, Y)
        while tries > 1 and self.tw.is_zero(c):
            c = self.tw.random_coboundary(self.rng, X, Y)
            tries -= 1
        return c

    def pair_with_coboundary(self, shift: int = 0, tries: int = 8) -> tuple[TwObject, TwObject, TwMorphism]:
        """Objects X, Y and a coboundary Y -> X[shift], preferring a nonzero one."""
        for _ in range(tries):
            X, Y = self.object(), self.object()
            c = self.coboundary(Y, self.tw.shift_object(X, shift))
            if not self.tw.is_zero(c):
                break
        return X, Y, c

    def canonical(self, X: TwObject | None = None, Y: TwObject | None = None) -> Conflation:
        X = X or self.object()
        Y = Y or self.object()
        gamma = self.tw.random_cocycle(self.rng, Y, X, 0)
        return self.confl.make_canonical(X, Y, gamma.under)

    def permuted(self, xi: Conflation) -> Conflation:
        """A special conflation isomorphic to xi through a random fiberwise permutation."""
        F = self.ws.field
        mats = {}
        for u, d in xi.E.module.items:
            perm = list(range(d))
            self.rng.shuffle(perm)
            m = F.zeros(d, d)
            for r, c in enumerate(perm):
                m[r, c] = F(self.rng.choice((1, -1, 2))) if F.p != 2 else F.one
            mats[u] = m
        h = self.ad.special_of(xi.E.module, xi.E.module, mats)
        E2, hz = self.tw.transport_differential(h, xi.E)
        f = TwMorphism(xi.X, E2, self.ad.circ(h, xi.f.under))
        hinv = self.tw.special_inverse(h)
        g = TwMorphism(E2, xi.Y, self.ad.circ(xi.g.under, hinv))
        return self.confl.validate_special(f, g)

    def choice(self, seq):
        return self.rng.choice(seq)
