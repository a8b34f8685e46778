"""Clifford algebra, Lorentz generators, spin connection and Dirac operator in dim 4.

Complex numbers are pairs (re, im) whose parts are exact rationals or
symbolic expressions; matrices are nested lists of them.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from gmpy2 import mpq

from .geometry import Chart, TensorField, TetradField, WorldConnection, lorentz_coefficients, metric_from_tetrad
from .geometry.metric import SingularMetricError
from .symexpr import ZERO, ScalarExpr, as_expr, sym

DIM = 4
ETA = (1, -1, -1, -1)
HALF = mpq(1, 2)
QUARTER = mpq(1, 4)


def _is_zero_part(x) -> bool:
    if isinstance(x, ScalarExpr):
        return not x.num
    return x == 0


class C:
    """Complex scalar with exact (rational or symbolic) parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, ScalarExpr) else mpq(re)
        self.im = im if isinstance(im, ScalarExpr) else mpq(im)

    def __add__(self, o):
        o = _c(o)
        return C(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return C(-self.re, -self.im)

    def __sub__(self, o):
        return self + (-_c(o))

    def __rsub__(self, o):
        return _c(o) - self

    def __mul__(self, o):
        o = _c(o)
        return C(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conj(self):
        return C(self.re, -self.im)

    def is_zero(self) -> bool:
        return _is_zero_part(self.re) and _is_zero_part(self.im)

    def __eq__(self, o):
        d = self - _c(o)
        return d.is_zero()

    def __hash__(self):
        return hash((str(self.re), str(self.im)))

    def to_complex(self, point=None) -> complex:
        def f(x):
            return float(as_expr(x).evaluate(point or {})) if isinstance(x, ScalarExpr) else float(x)
        return complex(f(self.re), f(self.im))

    def __repr__(self):
        if _is_zero_part(self.im):
            return str(self.re)
        return f"({self.re} + {self.im}i)"


def _c(x) -> C:
    return x if isinstance(x, C) else C(x, 0)


I = C(0, 1)


# --------------------------------------------------------------------------
# matrices
# --------------------------------------------------------------------------


def mat(rows) -> list:
    return [[_c(x) for x in r] for r in rows]


def identity(n: int = DIM) -> list:
    return [[C(1 if i == j else 0) for j in range(n)] for i in range(n)]


def zero_matrix(n: int = DIM) -> list:
    return [[C() for _ in range(n)] for _ in range(n)]


def mmul(A, B) -> list:
    n, k, m = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = C()
            for t in range(k):
                if not A[i][t].is_zero() and not B[t][j].is_zero():
                    acc = acc + A[i][t] * B[t][j]
            row.append(acc)
        out.append(row)
    return out


def madd(A, B) -> list:
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def msub(A, B) -> list:
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mscale(A, s) -> list:
    s = _c(s)
    return [[s * a for a in r] for r in A]


def commutator(A, B) -> list:
    return msub(mmul(A, B), mmul(B, A))


def anticommutator(A, B) -> list:
    return madd(mmul(A, B), mmul(B, A))


def mat_is_zero(A) -> bool:
    return all(x.is_zero() for r in A for x in r)


def mat_equal(A, B) -> bool:
    return mat_is_zero(msub(A, B))


def mvec(A, v) -> list:
    out = []
    for row in A:
        acc = C()
        for a, x in zip(row, v):
            if not a.is_zero() and not x.is_zero():
                acc = acc + a * x
        out.append(acc)
    return out


def trace(A):
    acc = C()
    for i in range(len(A)):
        acc = acc + A[i][i]
    return acc


def to_numpy(A, point=None) -> np.ndarray:
    return np.array([[x.to_complex(point) for x in r] for r in A], dtype=complex)


# --------------------------------------------------------------------------
# gamma matrices and generators
# --------------------------------------------------------------------------


@dataclass
class GammaRep:
    gammas: list  # gamma^a, upper index

    def __getitem__(self, a):
        return self.gammas[a]

    def lower(self, a):
        """gamma_a = eta_ab gamma^b"""
        return mscale(self.gammas[a], ETA[a])

    def clifford_residuals(self) -> dict:
        """{gamma^a, gamma^b} - 2 eta^{ab} for all 16 ordered pairs."""
        out = {}
        for a in range(DIM):
            for b in range(DIM):
                target = mscale(identity(), 2 * ETA[a] if a == b else 0)
                out[a, b] = msub(anticommutator(self.gammas[a], self.gammas[b]), target)
        return out


def _pauli():
    return [
        [[C(0), C(1)], [C(1), C(0)]],
        [[C(0), C(0, -1)], [C(0, 1), C(0)]],
        [[C(1), C(0)], [C(0), C(-1)]],
    ]


def gamma_basis() -> GammaRep:
    """Dirac basis: gamma^0 = diag(1, 1, -1, -1), gamma^i = [[0, s_i], [-s_i, 0]]."""
    g0 = [[C(1 if i == j else 0) * (1 if i < 2 else -1) for j in range(4)] for i in range(4)]
    out = [g0]
    for s in _pauli():
        g = zero_matrix()
        for i in range(2):
            for j in range(2):
                g[i][j + 2] = s[i][j]
                g[i + 2][j] = -s[i][j]
        out.append(g)
    return GammaRep(out)


def lorentz_generators(gam: GammaRep | None = None) -> dict:
    """L_ab = 1/4 [gamma_a, gamma_b] for a < b (and the antisymmetric completion)."""
    gam = gam or gamma_basis()
    out = {}
    for a in range(DIM):
        for b in range(DIM):
            out[a, b] = mscale(commutator(gam.lower(a), gam.lower(b)), QUARTER)
    return out


def generator_action_residuals(gam: GammaRep | None = None) -> dict:
    """[L_ab, gamma^c] - (delta^c_b gamma_a - delta^c_a gamma_b)."""
    gam = gam or gamma_basis()
    L = lorentz_generators(gam)
    out = {}
    for a, b in itertools.combinations(range(DIM), 2):
        for c in range(DIM):
            expect = zero_matrix()
            if c == b:
                expect = madd(expect, gam.lower(a))
            if c == a:
                expect = msub(expect, gam.lower(b))
            out[a, b, c] = msub(commutator(L[a, b], gam[c]), expect)
    return out


def lorentz_algebra_residuals(gam: GammaRep | None = None) -> dict:
    """[L_ab, L_cd] - (eta_bc L_ad - eta_ac L_bd - eta_bd L_ac + eta_ad L_bc)."""
    gam = gam or gamma_basis()
    L = lorentz_generators(gam)

    def eta(x, y):
        return ETA[x] if x == y else 0

    out = {}
    pairs = list(itertools.combinations(range(DIM), 2))
    for (a, b), (c, d) in itertools.product(pairs, pairs):
        expect = zero_matrix()
        for coef, M in ((eta(b, c), L[a, d]), (-eta(a, c), L[b, d]), (-eta(b, d), L[a, c]), (eta(a, d), L[b, c])):
            if coef:
                expect = madd(expect, mscale(M, coef))
        out[a, b, c, d] = msub(commutator(L[a, b], L[c, d]), expect)
    return out


# --------------------------------------------------------------------------
# tetrad-dependent representations
# --------------------------------------------------------------------------


def _check_tetrad(h: TetradField):
    if h.dim != DIM:
        raise ValueError("spinor module is four-dimensional")
    if h.det is not None and not as_expr(h.det).num:
        raise SingularMetricError("singular tetrad")


def rep_covector(h: TetradField, t: TensorField, gam: GammaRep | None = None) -> list:
    """rep(t) = t_lam h^lam_a gamma^a."""
    _check_tetrad(h)
    gam = gam or gamma_basis()
    out = zero_matrix()
    for a in range(DIM):
        coef = ZERO
        for lam in range(DIM):
            coef = coef + t.components[lam] * h.fr(lam, a)
        if coef.num:
            out = madd(out, mscale(gam[a], C(coef)))
    return out


def covector_norm(h: TetradField, t: TensorField) -> ScalarExpr:
    g = metric_from_tetrad(h, check=False)
    acc = ZERO
    for m in range(DIM):
        for n in range(DIM):
            acc = acc + g.ginv.components[m, n] * t.components[m] * t.components[n]
    return acc


def square_identity_residual(h: TetradField, t: TensorField, gam: GammaRep | None = None) -> list:
    """Entries of rep(t)^2 - g^{mn} t_m t_n 1."""
    R = rep_covector(h, t, gam)
    sq = mmul(R, R)
    return msub(sq, mscale(identity(), C(covector_norm(h, t))))


def nonequivalence_witness(h1: TetradField, h2: TetradField, t: TensorField, point: dict):
    """Eigenvalues of rep_h1(t) and rep_h2(t) at a point.

    Similar matrices share spectra; distinct spectra certify that the two
    representations of the covector are not equivalent.
    """
    e1 = np.sort_complex(np.linalg.eigvals(to_numpy(rep_covector(h1, t), point)))
    e2 = np.sort_complex(np.linalg.eigvals(to_numpy(rep_covector(h2, t), point)))
    n1 = float(covector_norm(h1, t).evaluate(point))
    n2 = float(covector_norm(h2, t).evaluate(point))
    return {"norm1": n1, "norm2": n2, "eig1": e1, "eig2": e2,
            "non_equivalent": not np.allclose(e1, e2, atol=1e-9)}


# --------------------------------------------------------------------------
# spin connection and Dirac operator
# --------------------------------------------------------------------------


@dataclass
class SpinConnectionCoeffs:
    """Coefficients s_lam^{ab} of L_ab in the spinor connection, antisymmetric in (a, b)."""

    coeffs: np.ndarray  # [lam, a, b]

    def __getitem__(self, idx):
        return self.coeffs[idx]

    def matrix(self, lam: int, gam: GammaRep | None = None) -> list:
        """sum_{a, b} s_lam^{ab} L_ab"""
        L = lorentz_generators(gam)
        out = zero_matrix()
        for a in range(DIM):
            for b in range(DIM):
                c = self.coeffs[lam, a, b]
                if as_expr(c).num:
                    out = madd(out, mscale(L[a, b], C(c)))
        return out

    def antisymmetry_residuals(self) -> list:
        return [self.coeffs[l, a, b] + self.coeffs[l, b, a]
                for l in range(DIM) for a in range(DIM) for b in range(DIM)]


def spin_connection(G: WorldConnection, h: TetradField) -> SpinConnectionCoeffs:
    """s_lam^{ab} = 1/4 (eta^{kb} h^a_mu - eta^{ka} h^b_mu)(d_lam h^mu_k - h^nu_k Gamma_lam^mu_nu).

    Equals one half of the Lorentz connection coefficients A_lam^{ab}.
    """
    _check_tetrad(h)
    A = lorentz_coefficients(G, h)
    out = np.empty(A.shape, dtype=object)
    for idx in itertools.product(range(DIM), repeat=3):
        out[idx] = A[idx] * HALF
    return SpinConnectionCoeffs(out)


def spin_connection_direct(G: WorldConnection, h: TetradField) -> SpinConnectionCoeffs:
    """The quarter-normalized spinor-connection formula evaluated term by term."""
    _check_tetrad(h)
    chart = G.chart
    out = np.empty((DIM,) * 3, dtype=object)
    for lam in range(DIM):
        Q = [[ZERO] * DIM for _ in range(DIM)]
        for mu in range(DIM):
            for k in range(DIM):
                acc = h.fr(mu, k).diff(chart.coords[lam])
                for nu in range(DIM):
                    acc = acc - h.fr(nu, k) * G[lam, mu, nu]
                Q[mu][k] = acc
        for a in range(DIM):
            for b in range(DIM):
                acc = ZERO
                for mu in range(DIM):
                    acc = acc + (h.co(a, mu) * Q[mu][b] * ETA[b]) - (h.co(b, mu) * Q[mu][a] * ETA[a])
                out[lam, a, b] = acc * QUARTER
    return SpinConnectionCoeffs(out)


@dataclass
class SpinorFieldExpr:
    chart: Chart
    components: list  # four C values with ScalarExpr parts

    @classmethod
    def from_parts(cls, chart: Chart, parts) -> "SpinorFieldExpr":
        """parts: four (re, im) pairs of expressions or strings."""
        from .symexpr import parse

        comps = []
        for re, im in parts:
            re = parse(re) if isinstance(re, str) else as_expr(re)
            im = parse(im) if isinstance(im, str) else as_expr(im)
            comps.append(C(re, im))
        return cls(chart, comps)

    def d(self, lam: int) -> list:
        x = self.chart.coords[lam]
        return [C(as_expr(c.re).diff(x), as_expr(c.im).diff(x)) for c in self.components]

    def transformed(self, S) -> "SpinorFieldExpr":
        return SpinorFieldExpr(self.chart, mvec(S, self.components))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __sub__(self, other: "SpinorFieldExpr") -> "SpinorFieldExpr":
        return SpinorFieldExpr(self.chart, [a - b for a, b in zip(self.components, other.components)])


def covariant_derivative(G: WorldConnection, h: TetradField, psi: SpinorFieldExpr, lam: int,
                         gam: GammaRep | None = None, spin: SpinConnectionCoeffs | None = None) -> list:
    """D_lam psi = d_lam psi - sum_{a, b} s_lam^{ab} L_ab psi."""
    spin = spin or spin_connection(G, h)
    M = spin.matrix(lam, gam)
    return [x - y for x, y in zip(psi.d(lam), mvec(M, psi.components))]


def dirac_operator(G: WorldConnection, h: TetradField, psi: SpinorFieldExpr,
                   gam: GammaRep | None = None) -> SpinorFieldExpr:
    """h^lam_a gamma^a D_lam psi."""
    _check_tetrad(h)
    gam = gam or gamma_basis()
    spin = spin_connection(G, h)
    out = [C() for _ in range(DIM)]
    for lam in range(DIM):
        D = covariant_derivative(G, h, psi, lam, gam, spin)
        for a in range(DIM):
            coef = h.fr(lam, a)
            if not coef.num:
                continue
            v = mvec(gam[a], D)
            out = [o + C(coef) * x for o, x in zip(out, v)]
    return SpinorFieldExpr(psi.chart, out)


def flat_dirac(psi: SpinorFieldExpr, gam: GammaRep | None = None) -> SpinorFieldExpr:
    """gamma^lam d_lam psi."""
    gam = gam or gamma_basis()
    out = [C() for _ in range(DIM)]
    for lam in range(DIM):
        v = mvec(gam[lam], psi.d(lam))
        out = [o + x for o, x in zip(out, v)]
    return SpinorFieldExpr(psi.chart, out)


# --------------------------------------------------------------------------
# vertical covariant differential on formal tetrad jets
# --------------------------------------------------------------------------


def frame_symbol(mu: int, k: int, lam: int | None = None) -> str:
    """Formal sigma^mu_k (``f{mu}{k}``) or its jet sigma^mu_{lam k} (``f{mu}{k}_{lam}``)."""
    return f"f{mu}{k}" if lam is None else f"f{mu}{k}_{lam}"


def coframe_symbol(a: int, mu: int) -> str:
    """Formal inverse sigma^a_mu."""
    return f"e{a}{mu}"


def vertical_covariant_differential(G: WorldConnection) -> np.ndarray:
    """Coefficients 1/4 (eta^{kb} s^a_mu - eta^{ka} s^b_mu)(s^mu_{lam k} - s^nu_k Gamma_lam^mu_nu).

    The tetrad enters through formal symbols (``frame_symbol``,
    ``coframe_symbol``); the differential is y_lam - sum C_lam^{ab} L_ab y.
    """
    out = np.empty((DIM,) * 3, dtype=object)
    for lam in range(DIM):
        Q = [[ZERO] * DIM for _ in range(DIM)]
        for mu in range(DIM):
            for k in range(DIM):
                acc = sym(frame_symbol(mu, k, lam))
                for nu in range(DIM):
                    if G[lam, mu, nu].num:
                        acc = acc - sym(frame_symbol(nu, k)) * G[lam, mu, nu]
                Q[mu][k] = acc
        for a in range(DIM):
            for b in range(DIM):
                acc = ZERO
                for mu in range(DIM):
                    acc = acc + sym(coframe_symbol(a, mu)) * Q[mu][b] * ETA[b] - sym(coframe_symbol(b, mu)) * Q[mu][a] * ETA[a]
                out[lam, a, b] = acc * QUARTER
    return out


def restrict_to_tetrad(coeffs: np.ndarray, h: TetradField) -> np.ndarray:
    """Substitute sigma^mu_k = h^mu_k, sigma^mu_{lam k} = d_lam h^mu_k, sigma^a_mu = h^a_mu."""
    chart = h.chart
    mapping = {}
    for mu in range(DIM):
        for k in range(DIM):
            mapping[frame_symbol(mu, k)] = h.fr(mu, k)
            mapping[coframe_symbol(k, mu)] = h.co(k, mu)
            for lam in range(DIM):
                mapping[frame_symbol(mu, k, lam)] = h.fr(mu, k).diff(chart.coords[lam])
    out = np.empty(coeffs.shape, dtype=object)
    for idx in itertools.product(*(range(s) for s in coeffs.shape)):
        out[idx] = as_expr(coeffs[idx]).subs(mapping)
    return out


# --------------------------------------------------------------------------
# boosts
# --------------------------------------------------------------------------


def boost_matrix(ch, sh, axis: int = 1) -> list:
    """Vector-representation boost Lambda^a_b in the (0, axis) plane."""
    L = [[mpq(1 if i == j else 0) for j in range(DIM)] for i in range(DIM)]
    L[0][0] = L[axis][axis] = mpq(ch)
    L[0][axis] = L[axis][0] = mpq(sh)
    return L


def boost_spin_matrix(ch, sh, axis: int = 1, gam: GammaRep | None = None):
    """(S, S^-1) with S gamma^b S^-1 = (Lambda^-1)^b_a gamma^a, up to scale.

    S is proportional to cosh(t/2) 1 +- sinh(t/2) gamma^0 gamma^axis; with
    cosh t = ch the ratio of the two coefficients is rational when
    (ch + 1)/(ch - 1) is a rational square, as for (5/4, 3/4).
    """
    import gmpy2

    gam = gam or gamma_basis()
    ch, sh = mpq(ch), mpq(sh)
    ratio2 = (ch + 1) / (ch - 1)
    num, den = gmpy2.isqrt(ratio2.numerator), gmpy2.isqrt(ratio2.denominator)
    if num * num != ratio2.numerator or den * den != ratio2.denominator:
        raise ValueError("boost half-angle is not rational")
    r = mpq(num, den)  # coth(t/2)
    B = mmul(gam[0], gam[axis])
    Lam = boost_matrix(ch, sh, axis)
    # Lambda^-1 for a boost: flip the sign of sinh
    inv = boost_matrix(ch, -sh, axis)
    for sign in (1, -1):
        S = madd(mscale(identity(), r), mscale(B, sign))
        # (r 1 + s B)(r 1 - s B) = (r^2 - B^2) 1 and B^2 = 1
        Sinv = mscale(msub(mscale(identity(), r), mscale(B, sign)), 1 / (r * r - 1))
        ok = True
        for b in range(DIM):
            lhs = mmul(mmul(S, gam[b]), Sinv)
            rhs = zero_matrix()
            for a in range(DIM):
                if inv[b][a]:
                    rhs = madd(rhs, mscale(gam[a], inv[b][a]))
            if not mat_equal(lhs, rhs):
                ok = False
                break
        if ok:
            return S, Sinv, Lam
    raise ArithmeticError("no spin matrix matches the boost")
