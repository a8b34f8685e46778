"""Lagrangian densities on the jet space of metrics and connections."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..symexpr import ScalarExpr, as_expr, parse
from .jets import JetContext, parse_name


class JetVariableError(ValueError):
    """Lagrangian mentions a symbol that is not a declared jet variable."""


@dataclass
class LagrangianDensity:
    """Coefficient of the volume form, an expression in jet variables."""

    context: JetContext
    density: ScalarExpr
    name: str = "L"
    # curvature-built Lagrangians also record dL/dR
    curvature_form: bool = False
    # builder(alg) re-creates the density over another algebra (see backend)
    builder: object = None

    def __post_init__(self):
        self.density = as_expr(self.density)
        for s in self.density.free_symbols:
            jv = parse_name(s)
            if jv is None or jv.kind in ("t", "c"):
                raise JetVariableError(f"{s!r} is not a field jet variable")
            if jv.kind in ("s", "k") and jv.order > self.context.orders[jv.kind]:
                raise JetVariableError(f"{s!r} exceeds the context jet order")

    def order(self) -> int:
        out = 0
        for s in self.density.free_symbols:
            jv = parse_name(s)
            if jv.kind in ("s", "k"):
                out = max(out, jv.order)
        return out


def curvature_array(ctx) -> np.ndarray:
    """R[l, m, a, b] = k_{lm}^a_b - k_{ml}^a_b + k_l^g_b k_m^a_g - k_m^g_b k_l^a_g.

    Here k_{lm}^a_b is the jet d_l k_m^a_b.
    """
    n = ctx.dim
    R = np.empty((n,) * 4, dtype=object)
    for l in range(n):
        for m in range(n):
            for a in range(n):
                for b in range(n):
                    if l == m:
                        R[l, m, a, b] = ctx.zero
                        continue
                    if m < l:
                        R[l, m, a, b] = -R[m, l, a, b]
                        continue
                    acc = ctx.k(m, a, b, l) - ctx.k(l, a, b, m)
                    for g in range(n):
                        acc = acc + ctx.k(l, g, b) * ctx.k(m, a, g) - ctx.k(m, g, b) * ctx.k(l, a, g)
                    R[l, m, a, b] = acc
    return R


def scalar_curvature_jet(ctx, R: np.ndarray | None = None):
    """sigma^{mb} R_{lm}^l_b."""
    R = curvature_array(ctx) if R is None else R
    n = ctx.dim
    acc = ctx.zero
    for m in range(n):
        for b in range(n):
            inner = ctx.zero
            for l in range(n):
                inner = inner + R[l, m, l, b]
            acc = acc + ctx.s(m, b) * inner
    return acc


def hilbert_einstein(ctx: JetContext | None = None) -> LagrangianDensity:
    """L = sigma^{mb} R_{lm}^l_b sqrt(sigma)."""
    ctx = ctx or JetContext()
    return LagrangianDensity(ctx, _he(ctx), "hilbert_einstein", True, _he)


def _he(alg):
    return scalar_curvature_jet(alg) * alg.rs()


def yang_mills(ctx: JetContext | None = None) -> LagrangianDensity:
    """L = sigma^{ml} sigma^{ng} R_{mn}^a_b R_{lg}^b_a sqrt(sigma)."""
    ctx = ctx or JetContext()
    return LagrangianDensity(ctx, _ym(ctx), "yang_mills", True, _ym)


def _ym(ctx):
    R = curvature_array(ctx)
    n = ctx.dim
    acc = ctx.zero
    # contract R_{mn}^a_b R_{lg}^b_a over (a, b) first
    for m in range(n):
        for nn in range(m + 1, n):
            for l in range(n):
                for g in range(l + 1, n):
                    prod = ctx.zero
                    for a in range(n):
                        for b in range(n):
                            prod = prod + R[m, nn, a, b] * R[l, g, b, a]
                    # antisymmetry in (m, n) and (l, g) gives the factor 4 / 2 pairs
                    coef = ctx.s(m, l) * ctx.s(nn, g) - ctx.s(m, g) * ctx.s(nn, l)
                    acc = acc + coef * prod * 2
    return acc * ctx.rs()


def from_text(ctx: JetContext, text: str, name: str = "L") -> LagrangianDensity:
    return LagrangianDensity(ctx, parse(text), name)
