"""Metrics from tetrads, space-time splittings and integrability."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ..symexpr import ONE, ZERO, ScalarExpr, sqrt
from .metric import LORENTZIAN, RIEMANNIAN, MetricField, SingularMetricError, TetradField, _sample_points
from .tensor import TensorField, zeros


def _induced(h: TetradField, eta: list) -> tuple[np.ndarray, np.ndarray]:
    n = h.dim
    g = zeros(n, 2)
    gi = zeros(n, 2)
    for mu in range(n):
        for nu in range(mu, n):
            acc = ZERO
            inv = ZERO
            for a in range(n):
                if h.co(a, mu).num and h.co(a, nu).num:
                    acc = acc + h.co(a, mu) * h.co(a, nu) * eta[a]
                if h.fr(mu, a).num and h.fr(nu, a).num:
                    inv = inv + h.fr(mu, a) * h.fr(nu, a) * eta[a]
            g[mu, nu] = g[nu, mu] = acc
            gi[mu, nu] = gi[nu, mu] = inv
    return g, gi


def metric_from_tetrad(h: TetradField, check: bool = True) -> MetricField:
    """g_{mu nu} = h^a_mu h^b_nu eta_ab with eta = diag(1, -1, ..., -1)."""
    eta = [1] + [-1] * (h.dim - 1)
    g, gi = _induced(h, eta)
    return MetricField(h.chart, g, gi, LORENTZIAN, check=check)


def riemannian_from_tetrad(h: TetradField, check: bool = True) -> MetricField:
    """g^R_{mu nu} = sum_a h^a_mu h^a_nu."""
    g, gi = _induced(h, [1] * h.dim)
    return MetricField(h.chart, g, gi, RIEMANNIAN, check=check)


def orthonormality_residual(h: TetradField, g: MetricField, eta: list | None = None) -> list[ScalarExpr]:
    """g^{mu nu} h^a_mu h^b_nu - eta^{ab} for all (a, b)."""
    n = h.dim
    eta = eta or [1] + [-1] * (n - 1)
    out = []
    gi = g.ginv.components
    for a in range(n):
        for b in range(n):
            acc = ZERO
            for mu in range(n):
                for nu in range(n):
                    if gi[mu, nu].num and h.co(a, mu).num and h.co(b, nu).num:
                        acc = acc + gi[mu, nu] * h.co(a, mu) * h.co(b, nu)
            out.append(acc - (eta[a] if a == b else 0))
    return out


@dataclass(frozen=True)
class SpacetimeSplit:
    h0: TensorField
    metric: MetricField
    norm: ScalarExpr  # g^R(sigma, sigma)


def spacetime_metric(sigma: TensorField, gR: MetricField, samples: int = 32, points: int = 10) -> SpacetimeSplit:
    """Lorentzian g = 2 h0 (x) h0 - g^R with h0 = sigma / sqrt(g^R(sigma, sigma))."""
    chart = gR.chart
    n = chart.dim
    if gR.signature != RIEMANNIAN:
        raise ValueError("gR must be riemannian")
    s = sigma.components
    gi = gR.ginv.components
    norm = ZERO
    for mu in range(n):
        for nu in range(n):
            if gi[mu, nu].num and s[mu].num and s[nu].num:
                norm = norm + gi[mu, nu] * s[mu] * s[nu]
    pts = _sample_points(chart, [norm] + list(s), max(points, 1), 0)
    for pt in pts:
        if all(float(c.evaluate(pt)) == 0.0 for c in s):
            raise SingularMetricError(f"one-form vanishes at {pt}")
    if not norm.num:
        raise SingularMetricError("one-form vanishes identically")
    root = sqrt(norm)
    h0 = TensorField(chart, "l", np.array([c / root for c in s], dtype=object), check=False)
    g = zeros(n, 2)
    inv_norm = ONE / norm
    gl = gR.g.components
    for mu in range(n):
        for nu in range(mu, n):
            g[mu, nu] = g[nu, mu] = s[mu] * s[nu] * inv_norm * 2 - gl[mu, nu]
    metric = MetricField(chart, g, None, LORENTZIAN, check=False)
    for pt in pts:
        from .metric import signature_at

        got = signature_at(g, pt)
        if got != (1, n - 1):
            raise SingularMetricError(f"induced metric has signature {got} at {pt}")
    return SpacetimeSplit(h0, metric, norm)


def unit_norm_residual(split: SpacetimeSplit, gR: MetricField) -> ScalarExpr:
    """g^{R, mu nu} h0_mu h0_nu - 1."""
    n = gR.dim
    h = split.h0.components
    gi = gR.ginv.components
    acc = ZERO
    for mu in range(n):
        for nu in range(n):
            if gi[mu, nu].num:
                acc = acc + gi[mu, nu] * h[mu] * h[nu]
    return acc - 1


def exterior_derivative(w: TensorField) -> TensorField:
    """(dw)_{mu nu} = d_mu w_nu - d_nu w_mu for a one-form."""
    chart = w.chart
    n = chart.dim
    out = zeros(n, 2)
    for mu in range(n):
        for nu in range(mu + 1, n):
            v = w[nu].diff(chart.coords[mu]) - w[mu].diff(chart.coords[nu])
            out[mu, nu] = v
            out[nu, mu] = -v
    return TensorField(chart, "ll", out, check=False)


def three_form_dw_wedge_w(w: TensorField) -> dict:
    """Components of dw ^ w on dx^a ^ dx^b ^ dx^c for a < b < c."""
    F = exterior_derivative(w).components
    n = w.chart.dim
    out = {}
    for a, b, c in itertools.combinations(range(n), 3):
        out[(a, b, c)] = F[a, b] * w[c] + F[b, c] * w[a] + F[c, a] * w[b]
    return out


@dataclass(frozen=True)
class IntegrabilityVerdict:
    integrable: bool
    components: dict
    verdict: object


def integrability_check(h0: TensorField, samples: int = 32, seed: int = 0) -> IntegrabilityVerdict:
    """Decide dh0 ^ h0 = 0 componentwise."""
    comps = three_form_dw_wedge_w(h0)
    keys = sorted(comps)
    v = h0.chart.zero_test([comps[k] for k in keys], samples, seed, [str(k) for k in keys])
    return IntegrabilityVerdict(v.is_zero, comps, v)
