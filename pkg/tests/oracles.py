"""Independent reference computations.

Nothing here imports the geometry, variational or spinor code paths that
the tests exercise; each oracle re-derives its quantity from first
principles (finite differences, permutation sums, textbook formulas).
"""
from __future__ import annotations

import itertools

import mpmath
import numpy as np

mpmath.mp.dps = 40


# --------------------------------------------------------------------------
# finite-difference curvature in the leading-minus convention
# --------------------------------------------------------------------------


def fd_partial(f, x, i, h):
    """Central difference of f (returning an mpmath matrix or number) along x_i."""
    xp = list(x)
    xm = list(x)
    xp[i] += h
    xm[i] -= h
    return (f(xp) - f(xm)) / (2 * h)


def fd_christoffel(metric, x, h):
    """Gamma[l][b][a] = g^{b n} * (-1/2)(d_l g_{n a} + d_a g_{n l} - d_n g_{l a})."""
    n = len(x)
    g = metric(x)
    gi = g ** -1
    dg = [fd_partial(metric, x, i, h) for i in range(n)]
    G = [[[mpmath.mpf(0)] * n for _ in range(n)] for _ in range(n)]
    for l, b, a in itertools.product(range(n), repeat=3):
        acc = mpmath.mpf(0)
        for m in range(n):
            first = -(dg[l][m, a] + dg[a][m, l] - dg[m][l, a]) / 2
            acc += gi[b, m] * first
        G[l][b][a] = acc
    return G


def fd_riemann(metric, x, h=mpmath.mpf("1e-5")):
    """R[l][m][a][b] = d_l G_m^a_b - d_m G_l^a_b + G_l^c_b G_m^a_c - G_m^c_b G_l^a_c."""
    n = len(x)
    G = fd_christoffel(metric, x, h)
    dG = []
    for i in range(n):
        xp, xm = list(x), list(x)
        xp[i] += h
        xm[i] -= h
        Gp, Gm = fd_christoffel(metric, xp, h), fd_christoffel(metric, xm, h)
        dG.append([[[(Gp[l][a][b] - Gm[l][a][b]) / (2 * h) for b in range(n)] for a in range(n)] for l in range(n)])
    R = np.empty((n,) * 4, dtype=object)
    for l, m, a, b in itertools.product(range(n), repeat=4):
        acc = dG[l][m][a][b] - dG[m][l][a][b]
        for c in range(n):
            acc += G[l][c][b] * G[m][a][c] - G[m][c][b] * G[l][a][c]
        R[l, m, a, b] = acc
    return R


def schwarzschild_metric(m):
    def metric(x):
        t, r, th, ph = x
        f = 1 - 2 * m / r
        return mpmath.diag([f, -1 / f, -r ** 2, -(r * mpmath.sin(th)) ** 2])
    return metric


def sphere_metric(x):
    th, ph = x
    return mpmath.diag([1, mpmath.sin(th) ** 2])


def sphere_scalar_curvature_oracle(x):
    R = fd_riemann(sphere_metric, x)
    gi = sphere_metric(x) ** -1
    return sum(gi[m, b] * sum(R[l, m, l, b] for l in range(2)) for m in range(2) for b in range(2))


# --------------------------------------------------------------------------
# Christoffel symbols evaluated term by term
# --------------------------------------------------------------------------


def christoffel_dim2_diag(x0):
    """g = diag(1, x0^2) in the leading-minus convention, returned as {(l, m, n): value}."""
    g = np.array([[1.0, 0.0], [0.0, x0 ** 2]])
    dg = [np.array([[0.0, 0.0], [0.0, 2 * x0]]), np.zeros((2, 2))]
    gi = np.linalg.inv(g)
    out = {}
    for l, b, a in itertools.product(range(2), repeat=3):
        out[l, b, a] = sum(gi[b, m] * -0.5 * (dg[l][m, a] + dg[a][m, l] - dg[m][l, a]) for m in range(2))
    return out


# --------------------------------------------------------------------------
# exterior algebra by permutation sums
# --------------------------------------------------------------------------


def _perm_sign(p):
    sign = 1
    p = list(p)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def wedge_components(alpha, beta, p, q, n):
    """Fully antisymmetric components of alpha ^ beta from component callables.

    Uses (alpha ^ beta)_{i1..ip+q} = 1/(p! q!) sum_sigma sgn(sigma) alpha(...) beta(...),
    so that dx^0 ^ dx^1 has component 1 on (0, 1).
    """
    import math

    out = {}
    for idx in itertools.combinations(range(n), p + q):
        acc = 0
        for perm in itertools.permutations(range(p + q)):
            s = _perm_sign(perm)
            ii = [idx[k] for k in perm]
            acc += s * alpha(tuple(ii[:p])) * beta(tuple(ii[p:]))
        out[idx] = acc / (math.factorial(p) * math.factorial(q))
    return out


def d_one_form_numeric(w, x, h=1e-6):
    """Antisymmetric (dw)_{ij} = d_i w_j - d_j w_i by central differences of a callable one-form."""
    n = len(x)
    J = np.zeros((n, n))
    for i in range(n):
        xp, xm = np.array(x, float), np.array(x, float)
        xp[i] += h
        xm[i] -= h
        J[i] = (np.array(w(xp)) - np.array(w(xm))) / (2 * h)
    return J - J.T


# --------------------------------------------------------------------------
# classical Komar superpotential
# --------------------------------------------------------------------------


def classical_komar(ctx):
    """sqrt|g| (g^{l n} nabla_n tau^m - g^{m n} nabla_n tau^l) in jet variables.

    nabla uses the textbook Christoffel symbols of the lowered metric
    g_{ab} (symbols ``sl``) whose derivatives follow from
    d_n g_{ab} = -g_{ac} g_{bd} d_n sigma^{cd}.
    """
    from gaugegrav.symexpr import ZERO, sym

    n = ctx.dim

    def up(a, b):
        a, b = sorted((a, b))
        return sym(f"s{a}{b}")

    def d_up(a, b, l):
        a, b = sorted((a, b))
        return sym(f"s{a}{b}_{l}")

    def low(a, b):
        a, b = sorted((a, b))
        return sym(f"sl{a}{b}")

    def d_low(a, b, l):
        acc = ZERO
        for c in range(n):
            for d in range(n):
                acc = acc - low(a, c) * low(b, d) * d_up(c, d, l)
        return acc

    def gamma(a, b, c):
        """textbook {a; b c}"""
        acc = ZERO
        for d in range(n):
            acc = acc + up(a, d) * (d_low(d, b, c) + d_low(d, c, b) - d_low(b, c, d))
        return acc * sym("half")

    def tau(a, *deriv):
        return sym(f"t{a}" + ("_" + "".join(map(str, deriv)) if deriv else ""))

    def nabla(nu, a):
        acc = tau(a, nu)
        for s in range(n):
            acc = acc + gamma(a, nu, s) * tau(s)
        return acc

    out = {}
    for m in range(n):
        for l in range(n):
            acc = ZERO
            for nu in range(n):
                acc = acc + up(l, nu) * nabla(nu, m) - up(m, nu) * nabla(nu, l)
            out[m, l] = (acc * sym("rs")).subs({"half": _half()})
    return out


def _half():
    from gaugegrav.symexpr import const
    from gmpy2 import mpq

    return const(mpq(1, 2))


# --------------------------------------------------------------------------
# Clifford algebra in floating point
# --------------------------------------------------------------------------

ETA = np.diag([1.0, -1.0, -1.0, -1.0])


def clifford_defect(gammas) -> float:
    """max |{g^a, g^b} - 2 eta^{ab} 1| over all pairs, in floating point."""
    worst = 0.0
    for a in range(4):
        for b in range(4):
            M = gammas[a] @ gammas[b] + gammas[b] @ gammas[a] - 2 * ETA[a, b] * np.eye(4)
            worst = max(worst, float(np.abs(M).max()))
    return worst


def boost_vector(ch, sh):
    L = np.eye(4)
    L[0, 0] = L[1, 1] = ch
    L[0, 1] = L[1, 0] = sh
    return L
