"""World connections and their calculus.

Sign conventions used throughout (all identities below hold exactly as
written, no hidden sign flips):

* Christoffel symbols of the first kind carry a leading minus,
  ``{mu nu a} = -1/2 (d_mu g_{nu a} + d_a g_{nu mu} - d_nu g_{mu a})`` and
  ``Gamma_mu^b_a = g^{b nu} {mu nu a}``.
* Lowering acts on the middle slot: ``Gamma_{mu nu a} = g_{nu b} Gamma_mu^b_a``.
* Curvature ``R_{lm}^a_b = d_l G_m^a_b - d_m G_l^a_b + G_l^c_b G_m^a_c - G_m^c_b G_l^a_c``.
* Non-metricity ``C_{mu nu a} = d_mu g_{nu a} + Gamma_{mu nu a} + Gamma_{mu a nu}``.

With these choices the Levi-Civita connection is metric and the curvature
is minus the common textbook Riemann tensor: the unit 2-sphere has scalar
curvature -2.  :func:`to_textbook` converts a connection.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..symexpr import ZERO, ScalarExpr, as_expr
from .chart import Chart
from .metric import MetricField, TetradField
from .tensor import ANTISYMMETRIC, SYMMETRIC, TensorField, check_symmetries, expr_array, zeros

HALF = as_expr(1) / 2


class WorldConnection:
    """Components Gamma[lam, mu, nu] = Gamma_lam^mu_nu (derivative, upper, lower)."""

    def __init__(self, chart: Chart, components):
        comps = components if isinstance(components, np.ndarray) and components.dtype == object \
            else expr_array(components)
        if comps.shape != (chart.dim,) * 3:
            raise ValueError("connection components must have shape (dim, dim, dim)")
        self.chart = chart
        self.components = comps

    def __getitem__(self, idx):
        return self.components[idx]

    @classmethod
    def zero(cls, chart: Chart) -> "WorldConnection":
        return cls(chart, zeros(chart.dim, 3))

    def __sub__(self, other: "WorldConnection") -> "WorldConnection":
        return WorldConnection(self.chart, self.components - other.components)

    def __add__(self, other: "WorldConnection") -> "WorldConnection":
        return WorldConnection(self.chart, self.components + other.components)

    def difference(self, other: "WorldConnection") -> TensorField:
        return TensorField(self.chart, "lul", self.components - other.components, check=False)

    def is_zero(self, samples: int = 32, seed: int = 0):
        return self.difference(WorldConnection.zero(self.chart)).is_zero(samples, seed)

    def lowered(self, g: MetricField) -> np.ndarray:
        """Gamma_{mu nu a} = g_{nu b} Gamma_mu^b_a."""
        n = self.chart.dim
        out = zeros(n, 3)
        G = self.components
        gl = g.g.components
        for mu in range(n):
            for nu in range(n):
                for a in range(n):
                    acc = ZERO
                    for b in range(n):
                        if gl[nu, b].num and G[mu, b, a].num:
                            acc = acc + gl[nu, b] * G[mu, b, a]
                    out[mu, nu, a] = acc
        return out

    def __repr__(self):
        nz = sum(1 for x in self.components.flat if x.num)
        return f"WorldConnection(dim={self.chart.dim}, nonzero={nz})"


def raise_middle(chart: Chart, g: MetricField, low: np.ndarray) -> WorldConnection:
    """Gamma_mu^b_a = g^{b nu} X_{mu nu a}."""
    n = chart.dim
    out = zeros(n, 3)
    gi = g.ginv.components
    for mu in range(n):
        for b in range(n):
            for a in range(n):
                acc = ZERO
                for nu in range(n):
                    if gi[b, nu].num and low[mu, nu, a].num:
                        acc = acc + gi[b, nu] * low[mu, nu, a]
                out[mu, b, a] = acc
    return WorldConnection(chart, out)


def _d(chart: Chart, e: ScalarExpr, i: int) -> ScalarExpr:
    return e.diff(chart.coords[i])


def christoffel_first_kind(g: MetricField) -> np.ndarray:
    chart = g.chart
    n = chart.dim
    gl = g.g.components
    dg = np.empty((n, n, n), dtype=object)  # dg[k, i, j] = d_k g_ij
    for k in range(n):
        for i in range(n):
            for j in range(i, n):
                dg[k, i, j] = dg[k, j, i] = _d(chart, gl[i, j], k)
    out = zeros(n, 3)
    for mu in range(n):
        for nu in range(n):
            for a in range(n):
                out[mu, nu, a] = -(dg[mu, nu, a] + dg[a, nu, mu] - dg[nu, mu, a]) * HALF
    return out


def christoffel(g: MetricField) -> WorldConnection:
    """Levi-Civita connection of ``g`` in the leading-minus convention."""
    return raise_middle(g.chart, g, christoffel_first_kind(g))


def torsion(G: WorldConnection) -> TensorField:
    """T_mu^nu_lam = Gamma_mu^nu_lam - Gamma_lam^nu_mu."""
    n = G.chart.dim
    c = G.components
    out = zeros(n, 3)
    for mu in range(n):
        for nu in range(n):
            for lam in range(n):
                out[mu, nu, lam] = c[mu, nu, lam] - c[lam, nu, mu]
    return TensorField(G.chart, "lul", out, {(0, 2): ANTISYMMETRIC}, check=True)


def curvature(G: WorldConnection) -> TensorField:
    """R_{lam mu}^a_b, antisymmetric in the first two slots."""
    chart = G.chart
    n = chart.dim
    c = G.components
    out = zeros(n, 4)
    for lam in range(n):
        for mu in range(lam + 1, n):
            for a in range(n):
                for b in range(n):
                    acc = _d(chart, c[mu, a, b], lam) - _d(chart, c[lam, a, b], mu)
                    for k in range(n):
                        if c[lam, k, b].num and c[mu, a, k].num:
                            acc = acc + c[lam, k, b] * c[mu, a, k]
                        if c[mu, k, b].num and c[lam, a, k].num:
                            acc = acc - c[mu, k, b] * c[lam, a, k]
                    out[lam, mu, a, b] = acc
                    out[mu, lam, a, b] = -acc
    return TensorField(chart, "llul", out, {(0, 1): ANTISYMMETRIC}, check=True)


@dataclass(frozen=True)
class Ricci:
    """Both Ricci contractions: ``weighted`` carries the factor 1/2."""

    weighted: TensorField
    unweighted: TensorField


def ricci(G: WorldConnection, R: TensorField | None = None) -> Ricci:
    """R_{mu b} = R_{lam mu}^lam_b and its half."""
    R = curvature(G) if R is None else R
    n = G.chart.dim
    un = zeros(n, 2)
    for mu in range(n):
        for b in range(n):
            acc = ZERO
            for lam in range(n):
                acc = acc + R.components[lam, mu, lam, b]
            un[mu, b] = acc
    unweighted = TensorField(G.chart, "ll", un, check=False)
    return Ricci(unweighted.scale(HALF), unweighted)


def scalar_curvature(G: WorldConnection, g: MetricField, R: TensorField | None = None) -> ScalarExpr:
    """g^{mu b} R_{lam mu}^lam_b (unweighted contraction)."""
    rc = ricci(G, R).unweighted.components
    gi = g.ginv.components
    n = g.dim
    acc = ZERO
    for mu in range(n):
        for b in range(n):
            if gi[mu, b].num and rc[mu, b].num:
                acc = acc + gi[mu, b] * rc[mu, b]
    return acc


def nonmetricity(G: WorldConnection, g: MetricField) -> TensorField:
    chart = G.chart
    n = chart.dim
    low = G.lowered(g)
    gl = g.g.components
    out = zeros(n, 3)
    for mu in range(n):
        for nu in range(n):
            for a in range(nu, n):
                v = _d(chart, gl[nu, a], mu) + low[mu, nu, a] + low[mu, a, nu]
                out[mu, nu, a] = out[mu, a, nu] = v
    return TensorField(chart, "lll", out, {(1, 2): SYMMETRIC}, check=False)


def lower_torsion(T: TensorField, g: MetricField) -> np.ndarray:
    """T_{mu nu a} = g_{nu b} T_mu^b_a."""
    n = g.dim
    out = zeros(n, 3)
    gl = g.g.components
    t = T.components
    for mu in range(n):
        for nu in range(n):
            for a in range(n):
                acc = ZERO
                for b in range(n):
                    if gl[nu, b].num and t[mu, b, a].num:
                        acc = acc + gl[nu, b] * t[mu, b, a]
                out[mu, nu, a] = acc
    return out


def contorsion(G: WorldConnection, g: MetricField) -> TensorField:
    """S_{mu nu a} = 1/2 (T_{nu mu a} + T_{nu a mu} + T_{mu nu a} + C_{a nu mu} - C_{nu a mu})."""
    n = g.dim
    T = lower_torsion(torsion(G), g)
    C = nonmetricity(G, g).components
    out = zeros(n, 3)
    for mu in range(n):
        for nu in range(n):
            for a in range(n):
                out[mu, nu, a] = (T[nu, mu, a] + T[nu, a, mu] + T[mu, nu, a]
                                  + C[a, nu, mu] - C[nu, a, mu]) * HALF
    return TensorField(g.chart, "lll", out, {(1, 2): ANTISYMMETRIC}, check=True)


@dataclass(frozen=True)
class Splitting:
    """Levi-Civita part, contorsion S_{mu nu a} and non-metricity C_{mu nu a}."""

    levi_civita: WorldConnection
    contorsion: TensorField
    nonmetricity: TensorField


def decompose(G: WorldConnection, g: MetricField) -> Splitting:
    return Splitting(christoffel(g), contorsion(G, g), nonmetricity(G, g))


def recompose(parts: Splitting, g: MetricField) -> WorldConnection:
    """Raise {mu nu a} + S_{mu nu a} + 1/2 C_{mu nu a} back to Gamma_mu^b_a."""
    n = g.dim
    S = parts.contorsion.components
    C = parts.nonmetricity.components
    low = zeros(n, 3)
    for idx in np.ndindex(low.shape):
        low[idx] = S[idx] + C[idx] * HALF
    # raising is linear; the Levi-Civita part is already raised
    rest = raise_middle(g.chart, g, low)
    lc = parts.levi_civita
    out = zeros(n, 3)
    for idx in np.ndindex(out.shape):
        out[idx] = lc[idx] + rest[idx]
    return WorldConnection(g.chart, out)


def splitting_residual(G: WorldConnection, g: MetricField) -> np.ndarray:
    """Gamma_{mu nu a} - ({mu nu a} + S_{mu nu a} + 1/2 C_{mu nu a}), all lowered."""
    first = christoffel_first_kind(g)
    S = contorsion(G, g).components
    C = nonmetricity(G, g).components
    low = G.lowered(g)
    out = zeros(g.dim, 3)
    for idx in np.ndindex(out.shape):
        out[idx] = low[idx] - (first[idx] + S[idx] + C[idx] * HALF)
    return out


def metric_connection(g: MetricField, T: TensorField) -> WorldConnection:
    """Metric connection with prescribed torsion T_mu^nu_lam."""
    if T.kinds != "lul":
        raise ValueError("torsion must have index kinds 'lul'")
    check_symmetries(g.chart, T.components, {(0, 2): ANTISYMMETRIC})
    n = g.dim
    first = christoffel_first_kind(g)
    Tl = lower_torsion(T, g)
    low = zeros(n, 3)
    for mu in range(n):
        for nu in range(n):
            for a in range(n):
                low[mu, nu, a] = first[mu, nu, a] + (Tl[nu, mu, a] + Tl[nu, a, mu] + Tl[mu, nu, a]) * HALF
    return raise_middle(g.chart, g, low)


def symmetric_part(G: WorldConnection) -> WorldConnection:
    """Gamma - T/2, the unique torsion-free connection sharing geodesics with Gamma."""
    T = torsion(G).components
    return WorldConnection(G.chart, G.components - T * HALF)


def to_textbook(G: WorldConnection) -> WorldConnection:
    """Flip to the common convention Gamma^mu_{lam nu} = -Gamma_lam^mu_nu.

    The returned array keeps the (derivative, upper, lower) slot order.
    Curvatures computed from the flipped connection by the textbook formula
    equal minus those of :func:`curvature`.
    """
    return WorldConnection(G.chart, -G.components)


def textbook_riemann(Gt: WorldConnection) -> TensorField:
    """R^a_{b lam mu} = d_lam G^a_{mu b} - d_mu G^a_{lam b} + G^a_{lam c} G^c_{mu b} - G^a_{mu c} G^c_{lam b}.

    Input in textbook convention, slots (lam, a, b) holding G^a_{lam b};
    the result is stored in slot order (lam, mu, a, b) for comparison.
    """
    chart = Gt.chart
    n = chart.dim
    c = Gt.components
    out = zeros(n, 4)
    for lam in range(n):
        for mu in range(n):
            for a in range(n):
                for b in range(n):
                    acc = _d(chart, c[mu, a, b], lam) - _d(chart, c[lam, a, b], mu)
                    for k in range(n):
                        acc = acc + c[lam, a, k] * c[mu, k, b] - c[mu, a, k] * c[lam, k, b]
                    out[lam, mu, a, b] = acc
    return TensorField(chart, "llul", out, check=False)


# --------------------------------------------------------------------------
# tetrads and Lorentz connections
# --------------------------------------------------------------------------


def _eta(n: int) -> list:
    return [1] + [-1] * (n - 1)


def lorentz_coefficients(G: WorldConnection, h: TetradField) -> np.ndarray:
    """A[lam, a, b] = 1/2 (eta^{kb} h^a_mu - eta^{ka} h^b_mu)(d_lam h^mu_k - h^nu_k Gamma_lam^mu_nu)."""
    chart = G.chart
    n = chart.dim
    eta = _eta(n)
    # Q[lam, mu, k] = d_lam h^mu_k - h^nu_k Gamma_lam^mu_nu
    Q = zeros(n, 3)
    for lam in range(n):
        for mu in range(n):
            for k in range(n):
                acc = _d(chart, h.fr(mu, k), lam)
                for nu in range(n):
                    if h.fr(nu, k).num and G[lam, mu, nu].num:
                        acc = acc - h.fr(nu, k) * G[lam, mu, nu]
                Q[lam, mu, k] = acc
    # M[lam, a, b] = h^a_mu Q^mu_k eta^{kb}
    M = zeros(n, 3)
    for lam in range(n):
        for a in range(n):
            for b in range(n):
                acc = ZERO
                for mu in range(n):
                    if h.co(a, mu).num and Q[lam, mu, b].num:
                        acc = acc + h.co(a, mu) * Q[lam, mu, b]
                M[lam, a, b] = acc * eta[b]
    A = zeros(n, 3)
    for lam in range(n):
        for a in range(n):
            for b in range(a + 1, n):
                v = (M[lam, a, b] - M[lam, b, a]) * HALF
                A[lam, a, b] = v
                A[lam, b, a] = -v
    return A


def connection_from_lorentz(A: np.ndarray, h: TetradField) -> WorldConnection:
    """Gamma_lam^mu_nu = h^k_nu d_lam h^mu_k + eta_{ka} h^mu_b h^k_nu A_lam^{ab}."""
    chart = h.chart
    n = chart.dim
    eta = _eta(n)
    out = zeros(n, 3)
    for lam in range(n):
        for mu in range(n):
            for nu in range(n):
                acc = ZERO
                for k in range(n):
                    if h.co(k, nu).num:
                        acc = acc + h.co(k, nu) * _d(chart, h.fr(mu, k), lam)
                for a in range(n):
                    if not h.co(a, nu).num:
                        continue
                    for b in range(n):
                        if A[lam, a, b].num and h.fr(mu, b).num:
                            acc = acc + h.co(a, nu) * h.fr(mu, b) * A[lam, a, b] * eta[a]
                out[lam, mu, nu] = acc
    return WorldConnection(chart, out)


@dataclass(frozen=True)
class LorentzConnection:
    coefficients: np.ndarray  # A[lam, a, b]
    connection: WorldConnection


def lorentz_connection(G: WorldConnection, h: TetradField) -> LorentzConnection:
    """Lorentz part of ``G`` relative to the tetrad ``h`` and the connection it defines."""
    A = lorentz_coefficients(G, h)
    return LorentzConnection(A, connection_from_lorentz(A, h))


def holonomic_form_printed(G: WorldConnection, h: TetradField, g: MetricField | None = None) -> WorldConnection:
    """Coefficients 1/2 (h^k_a delta^b_mu - eta^{kc} g_{mu a} h^b_c)(d_lam h^mu_k - h^nu_k Gamma_lam^mu_nu).

    Stored as [lam, b, a].  This holonomic expression, taken literally,
    equals h^k_a d_lam h^b_k minus the Lorentz connection; see the tests.
    """
    from .spacetime import metric_from_tetrad

    chart = G.chart
    n = chart.dim
    eta = _eta(n)
    g = metric_from_tetrad(h) if g is None else g
    gl = g.g.components
    out = zeros(n, 3)
    for lam in range(n):
        Q = [[_d(chart, h.fr(mu, k), lam) - sum((h.fr(nu, k) * G[lam, mu, nu] for nu in range(n)), ZERO)
              for k in range(n)] for mu in range(n)]
        for b in range(n):
            for a in range(n):
                acc = ZERO
                for mu in range(n):
                    for k in range(n):
                        q = Q[mu][k]
                        if not q.num:
                            continue
                        coef = (h.co(k, a) if b == mu else ZERO) - gl[mu, a] * h.fr(b, k) * eta[k]
                        acc = acc + coef * q
                out[lam, b, a] = acc * HALF
    return WorldConnection(chart, out)


# --------------------------------------------------------------------------
# affine connections
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AffineWorldConnection:
    """Linear part Gamma plus a soldering (1,1) field sigma^a_lam."""

    linear: WorldConnection
    soldering: TensorField

    def coefficient(self, lam: int, mu: int, xdot: list) -> ScalarExpr:
        """A_lam^mu = Gamma_lam^mu_nu xdot^nu + sigma^mu_lam."""
        acc = self.soldering.components[mu, lam]
        for nu, v in enumerate(xdot):
            acc = acc + self.linear[lam, mu, nu] * v
        return acc


def cartan_connection(G: WorldConnection) -> AffineWorldConnection:
    """Affine connection Gamma + theta_X with the canonical soldering form."""
    from .tensor import identity_tensor

    return AffineWorldConnection(G, identity_tensor(G.chart))


def decompose_affine(A: AffineWorldConnection) -> tuple[WorldConnection, TensorField]:
    return A.linear, A.soldering
