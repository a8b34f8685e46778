"""Field equations, invariance identities, Noether identities and currents.

Every function here takes a backend ``J`` (symbolic or series, see
``backend``) and returns a dict from labels to quantities that must vanish
(or, for currents, the quantities themselves).  Index conventions:

* y^A = k_mu^a_b with A = (mu, a, b); y^A_lam is the jet k_{lam mu}^a_b;
* pi^{lam mu}_a^b = dL/dk_{lam mu}^a_b;
* E_{ab}, E^mu_a^b are the variational derivatives with respect to sigma^{ab}
  and k_mu^a_b, summed over ordered index pairs.
"""
from __future__ import annotations

from gmpy2 import mpq

from .lagrangians import curvature_array

HALF = mpq(1, 2)


# --------------------------------------------------------------------------
# pieces of the connection lift
# --------------------------------------------------------------------------


def u_first(J, A, gamma, eps):
    """u^A_gamma^eps: coefficient of d_eps tau^gamma in the k-component of the lift."""
    mu, a, b = A
    acc = J.zero
    if a == gamma:
        acc = acc + J.k(mu, eps, b)
    if eps == b:
        acc = acc - J.k(mu, a, gamma)
    if eps == mu:
        acc = acc - J.k(gamma, a, b)
    return acc


def u_contract(J, X, alpha, beta):
    """sum_A u^A_alpha^beta X(A) without materializing zero terms."""
    n = J.dim
    acc = J.zero
    for m in range(n):
        for b in range(n):
            acc = acc + J.k(m, beta, b) * X(m, alpha, b)
    for m in range(n):
        for a in range(n):
            acc = acc - J.k(m, a, alpha) * X(m, a, beta)
    for a in range(n):
        for b in range(n):
            acc = acc - J.k(alpha, a, b) * X(beta, a, b)
    return acc


def vertical_k(J, mu, a, b):
    """Vertical part u_V of the lifted field on k_mu^a_b, tau as jet variables."""
    n = J.dim
    acc = J.t(a, mu, b)
    for nu in range(n):
        acc = acc + J.t(a, nu) * J.k(mu, nu, b) - J.t(nu, b) * J.k(mu, a, nu) - J.t(nu, mu) * J.k(nu, a, b)
        acc = acc - J.t(nu) * J.k(mu, a, b, nu)
    return acc


def vertical_sigma(J, a, b):
    n = J.dim
    acc = J.zero
    for nu in range(n):
        acc = acc + J.s(nu, b) * J.t(a, nu) + J.s(a, nu) * J.t(b, nu) - J.t(nu) * J.s(a, b, nu)
    return acc


# --------------------------------------------------------------------------
# field equations
# --------------------------------------------------------------------------


def ricci_parts(J):
    """(R array, Ricci R_{lam a}^lam_b, scalar sigma^{ab} Ric_ab)."""
    n = J.dim
    R = curvature_array(J)
    ric = [[sum((R[l, a, l, b] for l in range(n)), J.zero) for b in range(n)] for a in range(n)]
    scal = J.zero
    for a in range(n):
        for b in range(n):
            scal = scal + J.s(a, b) * ric[a][b]
    return R, ric, scal


def he_metric_equation(J):
    """E_{ab} - sqrt(sigma) (Ric_(ab) - 1/2 sigma_{ab} R) for Hilbert-Einstein."""
    n = J.dim
    _, ric, scal = ricci_parts(J)
    rs = J.rs()
    out = {}
    for a in range(n):
        for b in range(a, n):
            expect = ((ric[a][b] + ric[b][a]) * HALF - J.sl(a, b) * scal * HALF) * rs
            out[f"E_s{a}{b}"] = J.E_s(a, b) - expect
    return out


def he_connection_formula(J, nu, a, b):
    """Closed form of E^nu_a^b for Hilbert-Einstein."""
    n = J.dim
    rs = J.rs()
    acc = -J.d(J.s(nu, b) * rs, a)
    if nu == a:
        for l in range(n):
            acc = acc + J.d(J.s(l, b) * rs, l)
    inner = J.zero
    for g in range(n):
        inner = inner + J.s(nu, g) * J.k(a, b, g) - J.s(nu, b) * J.k(g, g, a)
        if nu == a:
            for l in range(n):
                inner = inner - J.s(l, g) * J.k(l, b, g)
    for l in range(n):
        inner = inner + J.s(l, b) * J.k(l, nu, a)
    return acc + inner * rs


def he_connection_equation(J):
    n = J.dim
    return {f"E_k{nu}{a}{b}": J.E_k(nu, a, b) - he_connection_formula(J, nu, a, b)
            for nu in range(n) for a in range(n) for b in range(n)}


def _c_tensor(J):
    """c_{mu nu a} = d_mu sigma_{nu a} + k_mu^b_a sigma_{nu b} + k_mu^b_nu sigma_{b a}."""
    n = J.dim
    c = {}
    for mu in range(n):
        for nu in range(n):
            for a in range(nu, n):
                acc = J.d(J.sl(nu, a), mu)
                for b in range(n):
                    acc = acc + J.k(mu, b, a) * J.sl(nu, b) + J.k(mu, b, nu) * J.sl(b, a)
                c[mu, nu, a] = acc
                c[mu, a, nu] = acc
    return c


def _t_tensor(J):
    n = J.dim
    return {(m, v, l): J.k(m, v, l) - J.k(l, v, m) for m in range(n) for v in range(n) for l in range(n)}


LOWERINGS = ("middle", "first", "last")


def he_metricity_torsion_equation(J, lowering: str = "middle"):
    """sigma_{nu e} sigma_{b m} E^nu_a^b against sqrt(sigma) times the c/t form.

    ``lowering`` picks how t_{m e a} is read from t_m^n_l: lower the middle
    slot (sigma_{e n} t_m^n_a), or move the lowered slot first or last.
    """
    n = J.dim
    c = _c_tensor(J)
    t = _t_tensor(J)
    trace_first = [sum((t[a, g, g] for g in range(n)), J.zero) for a in range(n)]   # t_a^g_g
    trace_mid = [sum((t[g, g, m] for g in range(n)), J.zero) for m in range(n)]     # t_g^g_m
    ctr = {}
    for x in range(n):
        acc = J.zero
        for l in range(n):
            for g in range(n):
                acc = acc + J.s(l, g) * c[x, l, g]
        ctr[x] = acc  # sigma^{lg} c_{x l g}
    ctr2 = {}
    for m in range(n):
        acc = J.zero
        for l in range(n):
            for b in range(n):
                acc = acc + J.s(l, b) * c[l, b, m]
        ctr2[m] = acc  # sigma^{lb} c_{l b m}

    def t_low(m, e, a):
        acc = J.zero
        for v in range(n):
            if lowering == "middle":
                acc = acc + J.sl(e, v) * t[m, v, a]
            elif lowering == "first":
                acc = acc + J.sl(m, v) * t[e, v, a]
            elif lowering == "last":
                acc = acc + J.sl(a, v) * t[m, v, e]
            else:
                raise ValueError(lowering)
        return acc

    out = {}
    rs = J.rs()
    for a in range(n):
        for e in range(n):
            for m in range(n):
                lhs = J.zero
                for v in range(n):
                    for b in range(n):
                        lhs = lhs + J.sl(v, e) * J.sl(b, m) * J.E_k(v, a, b)
                rhs = c[a, e, m] - J.sl(m, e) * ctr[a] * HALF - J.sl(a, e) * ctr2[m] + J.sl(a, e) * ctr[m] * HALF
                rhs = rhs + t_low(m, e, a) + J.sl(m, e) * trace_first[a] + J.sl(a, e) * trace_mid[m]
                out[f"form{a}{e}{m}"] = lhs - rhs * rs
    return out


# --------------------------------------------------------------------------
# momenta and invariance identities
# --------------------------------------------------------------------------


def momentum_antisymmetry(J):
    n = J.dim
    return {f"pi{l}{m}{a}{b}": J.pi(l, m, a, b) + J.pi(m, l, a, b)
            for l in range(n) for m in range(l, n) for a in range(n) for b in range(n)}


def momentum_relation(J):
    """dL/dk_nu^a_b - (pi^{l nu}_a^s k_l^b_s - pi^{l nu}_s^b k_l^s_a)."""
    n = J.dim
    out = {}
    for nu in range(n):
        for a in range(n):
            for b in range(n):
                acc = J.dL_dk(nu, a, b)
                for l in range(n):
                    for s in range(n):
                        acc = acc - J.pi(l, nu, a, s) * J.k(l, b, s) + J.pi(l, nu, s, b) * J.k(l, s, a)
                out[f"K{nu}{a}{b}"] = acc
    return out


def current(J):
    """Canonical current J^lam = pi^lam_A (y^A_a tau^a - u^A) - tau^lam L = -pi^lam_A u_V^A - tau^lam L."""
    n = J.dim
    uv = {(mu, a, b): vertical_k(J, mu, a, b) for mu in range(n) for a in range(n) for b in range(n)}
    out = {}
    for lam in range(n):
        acc = -J.t(lam) * J.L
        for (mu, a, b), w in uv.items():
            p = J.pi(lam, mu, a, b)
            if _live(p):
                acc = acc - p * w
        out[lam] = acc
    return out


def _live(v) -> bool:
    from .backend import _nonzero

    return _nonzero(v)


def first_variation(J):
    """u_V^sigma E_sigma + u_V^k E_k - d_lam J^lam."""
    n = J.dim
    acc = J.zero
    for a in range(n):
        for b in range(n):
            acc = acc + vertical_sigma(J, a, b) * J.E_s(a, b)
    for mu in range(n):
        for a in range(n):
            for b in range(n):
                acc = acc + vertical_k(J, mu, a, b) * J.E_k(mu, a, b)
    cur = current(J)
    for lam in range(n):
        acc = acc - J.d(cur[lam], lam)
    return {"first_variation": acc}


def third_order_symmetry(J):
    """pi^{(l e}_g^{s)}: totally symmetrized momenta."""
    n = J.dim
    out = {}
    for l in range(n):
        for e in range(l, n):
            for s in range(e, n):
                for g in range(n):
                    perms = {(l, e, s), (l, s, e), (e, l, s), (e, s, l), (s, l, e), (s, e, l)}
                    acc = J.zero
                    for x, y, z in perms:
                        acc = acc + J.pi(x, y, g, z)
                    out[f"sym{l}{e}{s}{g}"] = acc
    return out


def second_order_identity(J, symmetrize: bool = True):
    """(u^A_g^{es} d_A + u^A_g^e d^s_A) L, symmetrized in (e, s) by default."""
    n = J.dim

    def raw(g, e, s):
        acc = J.dL_dk(e, g, s)
        acc = acc + u_contract(J, lambda m, a, b: J.pi(s, m, a, b), g, e)
        return acc

    out = {}
    for g in range(n):
        for e in range(n):
            for s in range(e if symmetrize else 0, n):
                v = raw(g, e, s)
                if symmetrize:
                    v = v + raw(g, s, e)
                out[f"c{g}{e}{s}"] = v
    return out


def first_order_identity(J):
    """delta^b_a L + 2 sigma^{bm} E_{am} + u^A_a^b E_A + d_m(pi^m_A u^A_a^b) - y^A_a pi^b_A."""
    n = J.dim
    out = {}
    for a in range(n):
        for b in range(n):
            acc = J.L if a == b else J.zero
            for m in range(n):
                acc = acc + J.s(b, m) * J.E_s(a, m) * 2
            acc = acc + u_contract(J, J.E_k, a, b)
            for m in range(n):
                acc = acc + J.d(u_contract(J, lambda mm, x, y, m=m: J.pi(m, mm, x, y), a, b), m)
            for mu in range(n):
                for x in range(n):
                    for y in range(n):
                        acc = acc - J.k(mu, x, y, a) * J.pi(b, mu, x, y)
            out[f"b{a}{b}"] = acc
    return out


def noether_identity_component(J, lam):
    """Generalized Bianchi identity for one direction lam."""
    n = J.dim
    acc = J.zero
    for a in range(n):
        for b in range(n):
            acc = acc - J.s(a, b, lam) * J.E_s(a, b)
    for m in range(n):
        inner = J.zero
        for b in range(n):
            inner = inner + J.s(m, b) * J.E_s(lam, b)
        acc = acc - J.d(inner, m) * 2
    for m in range(n):
        for a in range(n):
            for b in range(n):
                acc = acc - J.k(m, a, b, lam) * J.E_k(m, a, b)
    for m in range(n):
        acc = acc - J.d(u_contract(J, J.E_k, lam, m), m)
    for m in range(n):
        for b in range(n):
            acc = acc + J.d(J.E_k(m, lam, b), m, b)
    return acc


def noether_identity(J):
    return {f"N{lam}": noether_identity_component(J, lam) for lam in range(J.dim)}


# --------------------------------------------------------------------------
# superpotential
# --------------------------------------------------------------------------


def superpotential(J):
    """U^{mu lam} = pi^{mu lam}_a^nu (d_nu tau^a - k_s^a_nu tau^s)."""
    n = J.dim
    out = {}
    for mu in range(n):
        for lam in range(n):
            acc = J.zero
            for a in range(n):
                for nu in range(n):
                    p = J.pi(mu, lam, a, nu)
                    if not _live(p):
                        continue
                    w = J.t(a, nu)
                    for s in range(n):
                        w = w - J.k(s, a, nu) * J.t(s)
                    acc = acc + p * w
            out[mu, lam] = acc
    return out


def superpotential_decomposition(J):
    """J^lam minus its split into field-equation terms plus d_mu U^{mu lam}."""
    n = J.dim
    cur = current(J)
    U = superpotential(J)
    out = {}
    for lam in range(n):
        acc = cur[lam]
        for m in range(n):
            acc = acc - J.d(U[m, lam], m)
        for a in range(n):
            for m in range(n):
                acc = acc - J.s(lam, m) * J.t(a) * J.E_s(a, m) * 2
        for a in range(n):
            coef = J.zero
            for m in range(n):
                for g in range(n):
                    coef = coef + J.k(m, lam, g) * J.E_k(m, a, g)
                    coef = coef - J.k(m, g, a) * J.E_k(m, g, lam)
                    coef = coef - J.k(a, m, g) * J.E_k(lam, m, g)
            for m in range(n):
                coef = coef - J.d(J.E_k(m, a, lam), m)
            acc = acc - coef * J.t(a)
            for m in range(n):
                acc = acc - J.E_k(lam, a, m) * J.t(a, m)
        out[f"J{lam}"] = acc
    return out
