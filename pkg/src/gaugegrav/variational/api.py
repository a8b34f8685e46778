"""Public entry points: Euler-Lagrange operator, identity reports, currents."""
from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np
from gmpy2 import mpq

from ..reports import Report
from ..symexpr import NONZERO, PROVEN, ZERO, ScalarExpr, ZeroVerdict, as_expr, is_zero
from . import identities as ids
from .backend import SymbolicJets, check_identities, exact_zero, grouped, prefixed
from .jets import HALF, JetContext, parse_name
from .lagrangians import LagrangianDensity, hilbert_einstein


class LagrangianOrderError(ValueError):
    """The Lagrangian is of higher jet order than the operator accepts."""


def total_derivative(e, lam: int, ctx: JetContext) -> ScalarExpr:
    return ctx.total_derivative(e, lam)


@dataclass
class VariationalDerivatives:
    context: JetContext
    sigma: np.ndarray   # E_{ab}, symmetric
    k: np.ndarray       # E^mu_a^b indexed [mu, a, b]

    def all(self) -> list:
        n = self.context.dim
        out = [(f"E_s{a}{b}", self.sigma[a, b]) for a in range(n) for b in range(a, n)]
        out += [(f"E_k{m}{a}{b}", self.k[m, a, b]) for m in range(n) for a in range(n) for b in range(n)]
        return out


def euler_lagrange(L: LagrangianDensity, higher_order: bool = False) -> VariationalDerivatives:
    """E_{ab} = (d/dsigma^{ab} - d_lam d/dsigma^{ab}_lam) L and the k-analogue.

    Higher-order Lagrangians need ``higher_order=True``; the operator then
    uses the full alternating sum over derivative multi-indices.
    """
    if L.order() > 1 and not higher_order:
        raise LagrangianOrderError(f"Lagrangian {L.name} has jet order {L.order()}, expected <= 1")
    J = SymbolicJets(L)
    n = L.context.dim
    S = np.empty((n, n), dtype=object)
    K = np.empty((n, n, n), dtype=object)
    for a in range(n):
        for b in range(a, n):
            S[a, b] = S[b, a] = J.E_s(a, b)
    for m in range(n):
        for a in range(n):
            for b in range(n):
                K[m, a, b] = J.E_k(m, a, b)
    return VariationalDerivatives(L.context, S, K)


# --------------------------------------------------------------------------
# Levi-Civita substitution
# --------------------------------------------------------------------------


def levi_civita_substitution(ctx: JetContext) -> dict:
    """k_mu^b_l -> -1/2 sigma^{bn} (d_mu s_{nl} + d_l s_{mn} - d_n s_{ml})."""
    n = ctx.dim
    out = {}
    for mu in range(n):
        for b in range(n):
            for l in range(n):
                acc = ZERO
                for v in range(n):
                    acc = acc + ctx.s(b, v) * (ctx.d_sl(v, l, mu) + ctx.d_sl(mu, v, l) - ctx.d_sl(mu, l, v))
                out[ctx.k_name(mu, b, l)] = acc * (-HALF)
    return out


def _decide_values(ctx, values: dict, samples, seed, exact=None) -> ZeroVerdict:
    if exact is None:
        exact = ctx.dim <= 2
    names = set()
    for v in values.values():
        names |= as_expr(v).free_symbols
    sampler = ctx.sampler(names)
    found = []
    for label, e in values.items():
        e = as_expr(e)
        if not e.num:
            continue
        if exact and exact_zero(ctx, e):
            continue
        v = is_zero(e, samples, seed, sampler, label=str(label))
        if v.status == NONZERO:
            return v
        found.append(v)
    if exact or not found:
        return ZeroVerdict(PROVEN)
    return ZeroVerdict(found[0].status, samples)


def minkowski_point(ctx: JetContext) -> dict:
    """Flat jet point: sigma = eta, every derivative and connection jet zero."""
    pt = {"rs": mpq(1)}
    for a, b in ctx.sigma_pairs():
        v = ctx.eta[a] if a == b else 0
        pt[ctx.s_name(a, b)] = mpq(v)
        pt[f"sl{a}{b}"] = mpq(v)
    return pt


def _at_point(e, pt):
    e = as_expr(e)
    full = dict(pt)
    for s in e.free_symbols:
        full.setdefault(s, mpq(0))
    return e.evaluate(full)


# --------------------------------------------------------------------------
# reports
# --------------------------------------------------------------------------


def field_equations_HE(dim: int = 4, samples: int = 32, seed: int = 0, mode: str = "auto",
                       lowering: str = "middle") -> Report:
    """Hilbert-Einstein field equations in their three printed forms."""
    ctx = JetContext(dim)
    L = hilbert_einstein(ctx)
    rep = Report(f"Hilbert-Einstein field equations (dim {dim})")
    ident = prefixed(metric=ids.he_metric_equation, connection=ids.he_connection_equation,
                     form=lambda J: ids.he_metricity_torsion_equation(J, lowering))
    v = grouped(check_identities(L, ident, mode, samples, seed),
                {"metric equation": "metric", "connection equation": "connection",
                 "torsion and non-metricity form": "form"})
    for name, verdict in v.items():
        rep.add(name, verdict)
    # Levi-Civita connection solves the connection equation
    J = SymbolicJets(L)
    lc = levi_civita_substitution(ctx)
    vals = {f"E_k{m}{a}{b}": as_expr(J.E_k(m, a, b)).subs(lc)
            for m in range(dim) for a in range(dim) for b in range(dim)}
    rep.add("Levi-Civita solves connection equation", _decide_values(ctx, vals, samples, seed))
    pt = minkowski_point(ctx)
    bad = [(lab, _at_point(e, pt)) for lab, e in euler_lagrange(L).all() if _at_point(e, pt) != 0]
    if bad:
        rep.add("Minkowski solves both", ZeroVerdict(NONZERO, 1, pt, bad[0][1], bad[0][0]))
    else:
        rep.add("Minkowski solves both", ZeroVerdict(PROVEN))
    return rep


def invariance_identities(L: LagrangianDensity, samples: int = 32, seed: int = 0, mode: str = "auto") -> Report:
    """Coefficients of the first variational formula expanded in tau jets."""
    rep = Report(f"invariance identities for {L.name}")
    parts = {
        "momentum antisymmetry": ids.momentum_antisymmetry,
        "momentum relation": ids.momentum_relation,
        "third-order coefficient": ids.third_order_symmetry,
        "second-order coefficient": ids.second_order_identity,
        "first-order coefficient": ids.first_order_identity,
        "first variational formula": ids.first_variation,
    }
    keys = {name: f"p{i}" for i, name in enumerate(parts)}
    ident = prefixed(**{keys[name]: fn for name, fn in parts.items()})
    v = grouped(check_identities(L, ident, mode, samples, seed), keys)
    for name in parts:
        rep.add(name, v[name])
    return rep


def noether_identities(L: LagrangianDensity, samples: int = 32, seed: int = 0, mode: str = "auto") -> Report:
    """Generalized Bianchi identities, one verdict per direction lam."""
    rep = Report(f"Noether identities for {L.name}")
    for label, v in check_identities(L, ids.noether_identity, mode, samples, seed).items():
        rep.add(f"lambda={label[1:]}", v)
    return rep


def energy_momentum_current(L: LagrangianDensity) -> list:
    """J^lam in jet variables and the gauge-parameter jets t."""
    J = SymbolicJets(L)
    cur = ids.current(J)
    return [cur[lam] for lam in range(L.context.dim)]


def komar_superpotential(L: LagrangianDensity) -> np.ndarray:
    """U^{mu lam} = 2 dL/dR_{mu lam}^a_n (D_n tau^a + t_n^a_s tau^s) = pi^{mu lam}_a^n (d_n tau^a - k_s^a_n tau^s)."""
    J = SymbolicJets(L)
    U = ids.superpotential(J)
    n = L.context.dim
    out = np.empty((n, n), dtype=object)
    for (m, l), v in U.items():
        out[m, l] = v
    return out


def komar_report(L: LagrangianDensity, samples: int = 32, seed: int = 0) -> Report:
    ctx = L.context
    n = ctx.dim
    U = komar_superpotential(L)
    rep = Report(f"Komar superpotential for {L.name}")
    anti = {f"U{m}{l}": U[m, l] + U[l, m] for m in range(n) for l in range(m, n)}
    rep.add("antisymmetry", _decide_values(ctx, anti, samples, seed, exact=True if n <= 2 else None))
    # d_m d_l commute, so pair (m, l) with (l, m) before differentiating
    div = ZERO
    for m in range(n):
        for l in range(m, n):
            pair = U[m, l] + U[l, m] if l != m else U[m, m]
            if as_expr(pair).num:
                div = div + ctx.d(pair, l, m)
    rep.add("double divergence", _decide_values(ctx, {"ddU": div}, samples, seed))
    return rep


def levi_civita_komar(L: LagrangianDensity) -> np.ndarray:
    """Superpotential with the connection replaced by the Levi-Civita one."""
    lc = levi_civita_substitution(L.context)
    U = komar_superpotential(L)
    return np.vectorize(lambda e: as_expr(e).subs(lc), otypes=[object])(U)


# --------------------------------------------------------------------------
# weak conservation on shell
# --------------------------------------------------------------------------


def _float_eval(e: ScalarExpr, pt: dict) -> float:
    return float(as_expr(e).evaluate(pt))


def weak_conservation(L: LagrangianDensity, points: int = 3, seed: int = 0, tol: float = 1e-24,
                      max_iter: int = 30) -> dict:
    """Numeric check that d_lam J^lam vanishes on shell.

    At each random jet point the connection jets (k and k_lam) are moved by
    Gauss-Newton least squares until every variational derivative vanishes.
    Iterates are kept as exact rationals (float steps, exact residuals), so
    the constraints are met far below double precision before d_lam J^lam
    is evaluated.  Returns the largest constraint and divergence residuals.
    """
    ctx = L.context
    n = ctx.dim
    J = SymbolicJets(L)
    eqs = [as_expr(e) for _, e in euler_lagrange(L).all()]
    eqs = [e for e in eqs if e.num]
    cur = ids.current(J)
    div = ZERO
    for lam in range(n):
        div = div + ctx.d(cur[lam], lam)
    unknowns = sorted({s for e in eqs for s in e.free_symbols if parse_name(s).kind == "k"})
    jac = [[e.formal_diff(u) for u in unknowns] for e in eqs]
    names = set(div.free_symbols)
    for e in eqs:
        names |= e.free_symbols
    rng = random.Random(seed)
    sampler = ctx.sampler(names)
    worst_c, worst_d = 0.0, 0.0
    for _ in range(points):
        pt = sampler(rng)
        for _ in range(max_iter):
            r = [e.evaluate(pt) for e in eqs]
            if max(abs(float(v)) for v in r) < tol:
                break
            fpt = {k: float(v) for k, v in pt.items()}
            A = np.array([[_float_eval(c, fpt) if c.num else 0.0 for c in row] for row in jac])
            step, *_ = np.linalg.lstsq(A, -np.array([float(v) for v in r]), rcond=None)
            for u, dx in zip(unknowns, step):
                pt[u] = pt[u] + mpq(float(dx))
        r = [e.evaluate(pt) for e in eqs]
        worst_c = max(worst_c, max(abs(float(v)) for v in r))
        worst_d = max(worst_d, abs(float(div.evaluate(pt))))
    return {"constraint_residual": worst_c, "divergence_residual": worst_d, "points": points}
