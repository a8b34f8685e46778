"""Metrics, tetrads and symbolic matrix inversion."""
from __future__ import annotations

import random

import numpy as np

from ..symexpr import ONE, ZERO, ScalarExpr
from .chart import Chart
from .tensor import SYMMETRIC, TensorField, expr_array, zeros

LORENTZIAN = "lorentzian"
RIEMANNIAN = "riemannian"


class SingularMetricError(ValueError):
    """Metric or tetrad is not invertible (or has the wrong signature)."""


def minkowski(dim: int) -> np.ndarray:
    eta = zeros(dim, 2)
    eta[0, 0] = ONE
    for i in range(1, dim):
        eta[i, i] = -ONE
    return eta


def euclidean(dim: int) -> np.ndarray:
    e = zeros(dim, 2)
    for i in range(dim):
        e[i, i] = ONE
    return e


def determinant(m: np.ndarray) -> ScalarExpr:
    """Determinant by Laplace expansion over memoized minors."""
    n = m.shape[0]
    memo: dict = {}

    def minor(rows: tuple, cols: tuple) -> ScalarExpr:
        if len(rows) == 1:
            return m[rows[0], cols[0]]
        key = (rows, cols)
        if key in memo:
            return memo[key]
        r0 = rows[0]
        acc = ZERO
        for k, c in enumerate(cols):
            a = m[r0, c]
            if not a.num:
                continue
            sub = minor(rows[1:], cols[:k] + cols[k + 1:])
            term = a * sub
            acc = acc + term if k % 2 == 0 else acc - term
        memo[key] = acc
        return acc

    return minor(tuple(range(n)), tuple(range(n)))


def inverse(m: np.ndarray) -> tuple[np.ndarray, ScalarExpr]:
    """(adjugate / det, det) of a square matrix of expressions."""
    n = m.shape[0]
    if n == 1:
        d = m[0, 0]
        out = zeros(1, 2)
        out[0, 0] = ONE / d
        return out, d
    det = determinant(m)
    if not det.num:
        raise SingularMetricError("matrix is singular (zero determinant)")
    inv_det = ONE / det
    out = zeros(n, 2)
    idx = list(range(n))
    for i in range(n):
        for j in range(n):
            rows = [r for r in idx if r != j]
            cols = [c for c in idx if c != i]
            sub = np.empty((n - 1, n - 1), dtype=object)
            for a, r in enumerate(rows):
                for b, c in enumerate(cols):
                    sub[a, b] = m[r, c]
            cof = determinant(sub)
            if (i + j) % 2:
                cof = -cof
            out[i, j] = cof * inv_det
    return out, det


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n, k = a.shape
    k2, p = b.shape
    out = np.empty((n, p), dtype=object)
    for i in range(n):
        for j in range(p):
            acc = ZERO
            for t in range(k):
                x, y = a[i, t], b[t, j]
                if x.num and y.num:
                    acc = acc + x * y
            out[i, j] = acc
    return out


def _numeric(m: np.ndarray, point) -> np.ndarray:
    return np.array([[float(m[i, j].evaluate(point)) for j in range(m.shape[1])]
                     for i in range(m.shape[0])])


def signature_at(m: np.ndarray, point) -> tuple[int, int]:
    """(positive, negative) eigenvalue counts of a numeric symmetric matrix."""
    ev = np.linalg.eigvalsh(_numeric(m, point))
    scale = max(1.0, float(np.max(np.abs(ev))))
    if np.any(np.abs(ev) < 1e-12 * scale):
        raise SingularMetricError(f"degenerate metric at {point}")
    return int(np.sum(ev > 0)), int(np.sum(ev < 0))


def _sample_points(chart: Chart, exprs, count: int, seed: int):
    syms = set()
    for e in exprs:
        syms |= e.free_symbols
    rng = random.Random(seed)
    pts, tries = [], 0
    while len(pts) < count and tries < 50 * count:
        tries += 1
        pt = chart.draw(rng, sorted(syms))
        try:
            for e in exprs:
                e.evaluate(pt)
        except (ArithmeticError, ValueError):
            continue
        pts.append(pt)
    return pts


class MetricField:
    """A nondegenerate symmetric (0,2) field with its inverse.

    The inverse is computed by adjugate over determinant unless supplied, in
    which case g . ginv = identity is verified.
    """

    def __init__(self, chart: Chart, g, ginv=None, signature: str = LORENTZIAN,
                 check: bool = True, samples: int = 32, sign_points: int = 3):
        self.chart = chart
        comps = g.components if isinstance(g, TensorField) else expr_array(g)
        self.g = TensorField(chart, "ll", comps, {(0, 1): SYMMETRIC}, check=check)
        if signature not in (LORENTZIAN, RIEMANNIAN):
            raise ValueError(f"unknown signature {signature!r}")
        self.signature = signature
        if ginv is None:
            inv, self.det = inverse(self.g.components)
            verify = False
        else:
            inv = ginv.components if isinstance(ginv, TensorField) else expr_array(ginv)
            self.det = None
            verify = check
        self.ginv = TensorField(chart, "uu", inv, {(0, 1): SYMMETRIC}, check=False)
        if verify:
            prod = matmul(self.g.components, self.ginv.components)
            diffs = [prod[i, j] - (ONE if i == j else ZERO) for i in chart.indices for j in chart.indices]
            v = chart.zero_test(diffs, samples)
            if not v.is_zero:
                raise SingularMetricError(f"supplied inverse is wrong: {v}")
        if check and sign_points:
            self.check_signature(sign_points)

    def check_signature(self, points: int = 3, seed: int = 0) -> None:
        comps = self.g.components
        exprs = [comps[i, j] for i in self.chart.indices for j in self.chart.indices]
        pts = _sample_points(self.chart, exprs, points, seed)
        if not pts:
            raise SingularMetricError("no admissible point to check the signature")
        n = self.chart.dim
        want = (1, n - 1) if self.signature == LORENTZIAN else (n, 0)
        for pt in pts:
            got = signature_at(comps, pt)
            if got != want:
                raise SingularMetricError(
                    f"signature {got} at {pt} is not {self.signature} {want}")

    @property
    def dim(self) -> int:
        return self.chart.dim

    def lower(self, i, j) -> ScalarExpr:
        return self.g.components[i, j]

    def upper(self, i, j) -> ScalarExpr:
        return self.ginv.components[i, j]

    def __repr__(self):
        return f"MetricField({self.signature}, dim={self.dim})"


class TetradField:
    """Coframe components h^a_mu (row a, column mu) with the dual frame h^mu_a."""

    def __init__(self, chart: Chart, coframe, frame=None, check: bool = True, samples: int = 32):
        self.chart = chart
        self.coframe = coframe if isinstance(coframe, np.ndarray) and coframe.dtype == object \
            else expr_array(coframe)
        n = chart.dim
        if self.coframe.shape != (n, n):
            raise ValueError("tetrad must be a dim x dim matrix")
        if frame is None:
            try:
                inv, det = inverse(self.coframe)
            except SingularMetricError as exc:
                raise SingularMetricError("singular tetrad") from exc
            self.frame = inv  # inv[mu, a] = h^mu_a
            self.det = det
        else:
            self.frame = frame if isinstance(frame, np.ndarray) else expr_array(frame)
            self.det = None
            if check:
                prod = matmul(self.coframe, self.frame)
                diffs = [prod[a, b] - (ONE if a == b else ZERO) for a in range(n) for b in range(n)]
                v = chart.zero_test(diffs, samples)
                if not v.is_zero:
                    raise SingularMetricError(f"frame is not dual to the coframe: {v}")

    @property
    def dim(self) -> int:
        return self.chart.dim

    def co(self, a, mu) -> ScalarExpr:
        """h^a_mu"""
        return self.coframe[a, mu]

    def fr(self, mu, a) -> ScalarExpr:
        """h^mu_a"""
        return self.frame[mu, a]

    @classmethod
    def identity(cls, chart: Chart) -> "TetradField":
        return cls(chart, euclidean(chart.dim), euclidean(chart.dim), check=False)

    def transformed(self, lam) -> "TetradField":
        """Tetrad h'^a_mu = Lambda^a_b h^b_mu for a constant matrix Lambda."""
        lam = expr_array(lam)
        return TetradField(self.chart, matmul(lam, self.coframe))

    def __repr__(self):
        return f"TetradField(dim={self.dim})"
