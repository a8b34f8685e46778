"""Coordinate charts and sample-point generation."""
from __future__ import annotations

import random
from typing import Iterable, Mapping

from gmpy2 import mpq

from ..symexpr import VarTable, all_zero, random_rational, sym


class Chart:
    """A single coordinate chart.

    ``params`` are symbolic constants (for example a mass) that may appear in
    component expressions.  ``domain`` maps symbol names to open intervals
    used when drawing sample points; unlisted symbols get small nonzero
    rationals.
    """

    def __init__(self, dim: int = 4, coords: Iterable[str] | None = None,
                 params: Iterable[str] = (), domain: Mapping[str, tuple] | None = None,
                 oriented: bool = True):
        if dim < 2:
            raise ValueError("chart dimension must be at least 2")
        coords = tuple(coords) if coords is not None else tuple(f"x{i}" for i in range(dim))
        if len(coords) != dim:
            raise ValueError(f"expected {dim} coordinate names, got {len(coords)}")
        params = tuple(params)
        if len(set(coords + params)) != len(coords) + len(params):
            raise ValueError("coordinate and parameter names must be distinct")
        self.dim = dim
        self.coords = coords
        self.params = params
        self.domain = {k: (mpq(lo), mpq(hi)) for k, (lo, hi) in (domain or {}).items()}
        self.oriented = oriented
        self.vars = VarTable()
        self.vars.extend(coords, "chart")
        self.vars.extend(params, "param")

    def coord(self, i: int):
        return sym(self.coords[i])

    @property
    def indices(self) -> range:
        return range(self.dim)

    def draw(self, rng: random.Random, symbols: Iterable[str]) -> dict:
        pt = {}
        for s in symbols:
            if s in self.domain:
                lo, hi = self.domain[s]
                pt[s] = lo + (hi - lo) * mpq(rng.randint(1, 63), 64)
            else:
                pt[s] = random_rational(rng)
        return pt

    def sampler(self, symbols: Iterable[str]):
        symbols = sorted(set(symbols))

        def draw(rng: random.Random) -> dict:
            return self.draw(rng, symbols)

        return draw

    def zero_test(self, exprs, samples: int = 32, seed: int = 0, labels=None):
        """Zero-test a family of expressions at points drawn from this chart."""
        exprs = list(exprs)
        syms = set()
        for e in exprs:
            syms |= e.free_symbols
        sampler = self.sampler(syms) if self.domain else None
        return all_zero(exprs, samples, seed, sampler, labels)

    def __eq__(self, other):
        return (isinstance(other, Chart) and self.coords == other.coords
                and self.params == other.params)

    def __hash__(self):
        return hash((self.coords, self.params))

    def __repr__(self):
        return f"Chart(dim={self.dim}, coords={self.coords})"
