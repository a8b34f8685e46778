"""Component arrays of symbolic scalars."""
from __future__ import annotations

import itertools
from typing import Callable, Mapping

import numpy as np

from ..symexpr import ZERO, ScalarExpr, as_expr, parse
from .chart import Chart

SYMMETRIC = "symmetric"
ANTISYMMETRIC = "antisymmetric"


class SymmetryError(ValueError):
    """A declared index symmetry does not hold."""


def expr_array(data) -> np.ndarray:
    """Object array of ScalarExpr from nested data (strings are parsed)."""
    src = np.asarray(data, dtype=object)
    arr = np.empty(src.shape, dtype=object)
    for idx in np.ndindex(arr.shape):
        v = src[idx]
        arr[idx] = parse(v) if isinstance(v, str) else as_expr(v)
    return arr


def zeros(dim: int, rank: int) -> np.ndarray:
    arr = np.empty((dim,) * rank, dtype=object)
    arr.fill(ZERO)
    return arr


def check_symmetries(chart: Chart, comps: np.ndarray, symmetries: Mapping, samples: int = 8) -> None:
    rank = comps.ndim
    for (i, j), kind in symmetries.items():
        if not (0 <= i < j < rank):
            raise ValueError(f"bad symmetry slot pair {(i, j)}")
        sign = 1 if kind == SYMMETRIC else -1
        if kind not in (SYMMETRIC, ANTISYMMETRIC):
            raise ValueError(f"unknown symmetry {kind!r}")
        diffs, labels = [], []
        for idx in np.ndindex(comps.shape):
            if idx[i] > idx[j] or (sign == 1 and idx[i] == idx[j]):
                continue
            swapped = list(idx)
            swapped[i], swapped[j] = swapped[j], swapped[i]
            d = comps[idx] - sign * comps[tuple(swapped)]
            if d.num:
                diffs.append(d)
                labels.append(str(idx))
        if diffs:
            v = chart.zero_test(diffs, samples, labels=labels)
            if not v.is_zero:
                raise SymmetryError(f"{kind} symmetry in slots {(i, j)} fails: {v}")


class TensorField:
    """Tensor components relative to a chart.

    ``kinds`` lists index positions in written order, ``u`` for upper and
    ``l`` for lower, so a torsion T_mu^nu_lambda has kinds ``"lul"``.
    """

    def __init__(self, chart: Chart, kinds: str, components, symmetries: Mapping | None = None,
                 check: bool = True):
        if set(kinds) - {"u", "l"}:
            raise ValueError(f"bad index kinds {kinds!r}")
        comps = components if isinstance(components, np.ndarray) and components.dtype == object \
            else expr_array(components)
        if comps.ndim == 0 and kinds == "":
            comps = comps.reshape(())
        if comps.shape != (chart.dim,) * len(kinds):
            raise ValueError(f"component shape {comps.shape} does not match {kinds!r} in dim {chart.dim}")
        self.chart = chart
        self.kinds = kinds
        self.components = comps
        self.symmetries = dict(symmetries or {})
        if check and self.symmetries:
            check_symmetries(chart, comps, self.symmetries)

    @property
    def valence(self) -> tuple[int, int]:
        return self.kinds.count("u"), self.kinds.count("l")

    @property
    def rank(self) -> int:
        return len(self.kinds)

    def __getitem__(self, idx):
        return self.components[idx]

    def map(self, f: Callable[[ScalarExpr], ScalarExpr]) -> "TensorField":
        out = np.empty_like(self.components)
        for idx in np.ndindex(out.shape):
            out[idx] = f(self.components[idx])
        return TensorField(self.chart, self.kinds, out, self.symmetries, check=False)

    def _binary(self, other: "TensorField", sign: int) -> "TensorField":
        if other.kinds != self.kinds or other.chart != self.chart:
            raise ValueError("tensor kinds or charts differ")
        out = self.components + other.components if sign > 0 else self.components - other.components
        common = {k: v for k, v in self.symmetries.items() if other.symmetries.get(k) == v}
        return TensorField(self.chart, self.kinds, out, common, check=False)

    def __add__(self, other):
        return self._binary(other, 1)

    def __sub__(self, other):
        return self._binary(other, -1)

    def __neg__(self):
        return self.map(lambda e: -e)

    def scale(self, c) -> "TensorField":
        c = as_expr(c)
        return self.map(lambda e: e * c)

    def entries(self):
        """(index tuple, expression) pairs in row-major order."""
        for idx in np.ndindex(self.components.shape):
            yield idx, self.components[idx]

    def is_zero(self, samples: int = 32, seed: int = 0):
        items = list(self.entries())
        return self.chart.zero_test([e for _, e in items], samples, seed, [str(i) for i, _ in items])

    def nonzero_entries(self) -> dict:
        return {idx: e for idx, e in self.entries() if e.num}

    def __repr__(self):
        nz = len(self.nonzero_entries())
        return f"TensorField({self.kinds!r}, dim={self.chart.dim}, nonzero={nz})"


def identity_tensor(chart: Chart) -> TensorField:
    comps = zeros(chart.dim, 2)
    for i in chart.indices:
        comps[i, i] = as_expr(1)
    return TensorField(chart, "ul", comps, check=False)


def one_form(chart: Chart, comps) -> TensorField:
    return TensorField(chart, "l", comps)


def vector(chart: Chart, comps) -> TensorField:
    return TensorField(chart, "u", comps)


def all_indices(dim: int, rank: int):
    return itertools.product(range(dim), repeat=rank)
