"""Functorial lifts of base vector fields onto natural bundles.

Fiber coordinates are formal indeterminates named by their indices:

* tensor bundle of valence (m, k): ``xd`` + ``u`` + upper digits + ``l`` +
  lower digits, e.g. ``xdu01l2`` for xdot^{01}_2;
* frame bundle: ``H`` + upper + lower, ``H01`` for H^0_1;
* connection bundle: ``k`` + mu + alpha + beta, ``k101`` for k_1^0_1;
* metric bundle: ``s`` + alpha + beta with alpha <= beta.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .geometry import Chart, WorldConnection
from .symexpr import ZERO, ScalarExpr, VarTable, as_expr, sym


class BundleMismatchError(ValueError):
    """Bracket of fields living on different bundles."""


class BaseVectorField:
    """tau = tau^lam d_lam on a chart."""

    def __init__(self, chart: Chart, components: Sequence):
        from .symexpr import parse

        comps = tuple(parse(c) if isinstance(c, str) else as_expr(c) for c in components)
        if len(comps) != chart.dim:
            raise ValueError("vector field needs one component per coordinate")
        self.chart = chart
        self.components = comps

    def __getitem__(self, i):
        return self.components[i]

    def d(self, alpha: int, nu: int) -> ScalarExpr:
        """d_nu tau^alpha"""
        return self.components[alpha].diff(self.chart.coords[nu])

    def dd(self, alpha: int, mu: int, nu: int) -> ScalarExpr:
        return self.d(alpha, mu).diff(self.chart.coords[nu])

    def bracket(self, other: "BaseVectorField") -> "BaseVectorField":
        """[tau, tau']^mu = tau^nu d_nu tau'^mu - tau'^nu d_nu tau^mu."""
        n = self.chart.dim
        out = []
        for mu in range(n):
            acc = ZERO
            for nu in range(n):
                acc = acc + self[nu] * other.d(mu, nu) - other[nu] * self.d(mu, nu)
            out.append(acc)
        return BaseVectorField(self.chart, out)

    def combine(self, a, other: "BaseVectorField", b) -> "BaseVectorField":
        return BaseVectorField(self.chart, [x * a + y * b for x, y in zip(self.components, other.components)])

    def __repr__(self):
        return f"BaseVectorField({[str(c) for c in self.components]})"


@dataclass
class LiftedVectorField:
    base: BaseVectorField
    bundle: str
    fiber_vars: tuple
    fiber: dict = field(default_factory=dict)

    def component(self, var: str) -> ScalarExpr:
        chart = self.base.chart
        if var in chart.coords:
            return self.base[chart.coords.index(var)]
        return self.fiber.get(var, ZERO)

    @property
    def variables(self) -> tuple:
        return tuple(self.base.chart.coords) + tuple(self.fiber_vars)

    def vartable(self) -> VarTable:
        t = VarTable()
        t.extend(self.base.chart.coords, "chart")
        t.extend(self.base.chart.params, "param")
        t.extend(self.fiber_vars, "fiber")
        return t

    def apply(self, f: ScalarExpr) -> ScalarExpr:
        """Directional derivative of a function on the bundle."""
        acc = ZERO
        for v in self.variables:
            c = self.component(v)
            if c.num:
                dv = f.diff(v)
                if dv.num:
                    acc = acc + c * dv
        return acc

    def __sub__(self, other: "LiftedVectorField") -> "LiftedVectorField":
        _same_bundle(self, other)
        base = self.base.combine(1, other.base, -1)
        fib = {v: self.component(v) - other.component(v) for v in self.fiber_vars}
        return LiftedVectorField(base, self.bundle, self.fiber_vars, fib)

    def combine(self, a, other: "LiftedVectorField", b) -> "LiftedVectorField":
        _same_bundle(self, other)
        base = self.base.combine(a, other.base, b)
        fib = {v: self.component(v) * a + other.component(v) * b for v in self.fiber_vars}
        return LiftedVectorField(base, self.bundle, self.fiber_vars, fib)

    def all_components(self) -> list[tuple[str, ScalarExpr]]:
        return [(v, self.component(v)) for v in self.variables]

    def is_zero(self, samples: int = 32, seed: int = 0):
        comps = self.all_components()
        return self.base.chart.zero_test([c for _, c in comps], samples, seed, [v for v, _ in comps])


def _same_bundle(u: LiftedVectorField, v: LiftedVectorField) -> None:
    if u.bundle != v.bundle or u.fiber_vars != v.fiber_vars or u.base.chart != v.base.chart:
        raise BundleMismatchError(f"fields live on {u.bundle!r} and {v.bundle!r}")


def bracket(u: LiftedVectorField, v: LiftedVectorField) -> LiftedVectorField:
    """Commutator [u, v]^A = u^B d_B v^A - v^B d_B u^A of vector fields on the bundle."""
    _same_bundle(u, v)
    comps = {}
    for var in u.variables:
        comps[var] = u.apply(v.component(var)) - v.apply(u.component(var))
    chart = u.base.chart
    base = BaseVectorField(chart, [comps[c] for c in chart.coords])
    fib = {var: comps[var] for var in u.fiber_vars}
    return LiftedVectorField(base, u.bundle, u.fiber_vars, fib)


# --------------------------------------------------------------------------
# fiber coordinate names
# --------------------------------------------------------------------------


def tensor_var(upper: Sequence[int], lower: Sequence[int]) -> str:
    return "xd" + ("u" + "".join(map(str, upper)) if upper else "") + ("l" + "".join(map(str, lower)) if lower else "")


def frame_var(mu: int, a: int) -> str:
    return f"H{mu}{a}"


def connection_var(mu: int, alpha: int, beta: int) -> str:
    return f"k{mu}{alpha}{beta}"


def sigma_var(alpha: int, beta: int) -> str:
    a, b = sorted((alpha, beta))
    return f"s{a}{b}"


# --------------------------------------------------------------------------
# lifts
# --------------------------------------------------------------------------


def lift_tensor(tau: BaseVectorField, m: int, k: int) -> LiftedVectorField:
    """Lift onto (m contravariant, k covariant) tensors."""
    if m + k < 1:
        raise ValueError("tensor bundle needs m + k >= 1")
    n = tau.chart.dim
    names = []
    fib = {}
    for idx in itertools.product(range(n), repeat=m + k):
        up, lo = idx[:m], idx[m:]
        var = tensor_var(up, lo)
        names.append(var)
        acc = ZERO
        for i in range(m):
            for nu in range(n):
                d = tau.d(up[i], nu)
                if d.num:
                    src = up[:i] + (nu,) + up[i + 1:]
                    acc = acc + d * sym(tensor_var(src, lo))
        for j in range(k):
            for nu in range(n):
                d = tau.d(nu, lo[j])
                if d.num:
                    src = lo[:j] + (nu,) + lo[j + 1:]
                    acc = acc - d * sym(tensor_var(up, src))
        fib[var] = acc
    return LiftedVectorField(tau, f"tensor({m},{k})", tuple(names), fib)


def lift_frame(tau: BaseVectorField) -> LiftedVectorField:
    """tau^mu d_mu + d_nu tau^alpha H^nu_a d/dH^alpha_a."""
    n = tau.chart.dim
    names, fib = [], {}
    for alpha in range(n):
        for a in range(n):
            var = frame_var(alpha, a)
            names.append(var)
            acc = ZERO
            for nu in range(n):
                d = tau.d(alpha, nu)
                if d.num:
                    acc = acc + d * sym(frame_var(nu, a))
            fib[var] = acc
    return LiftedVectorField(tau, "frame", tuple(names), fib)


def _connection_part(tau: BaseVectorField) -> tuple[list, dict]:
    n = tau.chart.dim
    names, fib = [], {}
    for mu in range(n):
        for alpha in range(n):
            for beta in range(n):
                var = connection_var(mu, alpha, beta)
                names.append(var)
                acc = tau.dd(alpha, mu, beta)
                for nu in range(n):
                    d = tau.d(alpha, nu)
                    if d.num:
                        acc = acc + d * sym(connection_var(mu, nu, beta))
                    d = tau.d(nu, beta)
                    if d.num:
                        acc = acc - d * sym(connection_var(mu, alpha, nu))
                    d = tau.d(nu, mu)
                    if d.num:
                        acc = acc - d * sym(connection_var(nu, alpha, beta))
                fib[var] = acc
    return names, fib


def lift_connection_bundle(tau: BaseVectorField) -> LiftedVectorField:
    names, fib = _connection_part(tau)
    return LiftedVectorField(tau, "connections", tuple(names), fib)


def lift_sigma_c(tau: BaseVectorField) -> LiftedVectorField:
    """Generator of general covariant transformations on metrics x connections."""
    n = tau.chart.dim
    names, fib = [], {}
    for alpha in range(n):
        for beta in range(alpha, n):
            var = sigma_var(alpha, beta)
            names.append(var)
            acc = ZERO
            for nu in range(n):
                d = tau.d(alpha, nu)
                if d.num:
                    acc = acc + d * sym(sigma_var(nu, beta))
                d = tau.d(beta, nu)
                if d.num:
                    acc = acc + d * sym(sigma_var(alpha, nu))
            fib[var] = acc
    knames, kfib = _connection_part(tau)
    fib.update(kfib)
    return LiftedVectorField(tau, "metrics x connections", tuple(names + knames), fib)


def horizontal_lift(G: WorldConnection, tau: BaseVectorField) -> LiftedVectorField:
    """tau^lam (d_lam + Gamma_lam^mu_nu xdot^nu d/dxdot^mu) on the tangent bundle."""
    n = tau.chart.dim
    names, fib = [], {}
    for mu in range(n):
        var = tensor_var((mu,), ())
        names.append(var)
        acc = ZERO
        for lam in range(n):
            for nu in range(n):
                c = G[lam, mu, nu]
                if c.num and tau[lam].num:
                    acc = acc + tau[lam] * c * sym(tensor_var((nu,), ()))
        fib[var] = acc
    return LiftedVectorField(tau, "tensor(1,0)", tuple(names), fib)


LIFTS = {
    "tensor(1,0)": lambda t: lift_tensor(t, 1, 0),
    "tensor(0,1)": lambda t: lift_tensor(t, 0, 1),
    "tensor(1,1)": lambda t: lift_tensor(t, 1, 1),
    "tensor(0,2)": lambda t: lift_tensor(t, 0, 2),
    "tensor(2,0)": lambda t: lift_tensor(t, 2, 0),
    "frame": lift_frame,
    "connections": lift_connection_bundle,
    "sigma_c": lift_sigma_c,
}


def morphism_defect(lift, tau: BaseVectorField, tau2: BaseVectorField) -> LiftedVectorField:
    """bracket(L(tau), L(tau')) - L([tau, tau'])."""
    return bracket(lift(tau), lift(tau2)) - lift(tau.bracket(tau2))


@dataclass(frozen=True)
class HorizontalWitness:
    tau: BaseVectorField
    tau2: BaseVectorField
    verdict: object


def horizontal_lift_witness(G: WorldConnection, candidates: Sequence[BaseVectorField], samples: int = 32):
    """Search pairs of candidates for a failure of the horizontal lift to respect brackets.

    Returns the first pair whose defect is nonzero, or None.
    """
    for tau, tau2 in itertools.combinations(candidates, 2):
        defect = bracket(horizontal_lift(G, tau), horizontal_lift(G, tau2)) - horizontal_lift(G, tau.bracket(tau2))
        v = defect.is_zero(samples)
        if not v.is_zero:
            return HorizontalWitness(tau, tau2, v)
    return None
