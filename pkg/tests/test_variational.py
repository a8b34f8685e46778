import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

import oracles
from gaugegrav.symexpr import NONZERO, PROVEN, ZERO, as_expr, parse, sym
from gaugegrav.variational import (
    JetContext,
    JetOrderError,
    JetVariableError,
    LagrangianDensity,
    LagrangianOrderError,
    SymbolicJets,
    energy_momentum_current,
    euler_lagrange,
    field_equations_HE,
    from_text,
    hilbert_einstein,
    invariance_identities,
    komar_report,
    komar_superpotential,
    levi_civita_komar,
    minkowski_point,
    noether_identities,
    total_derivative,
    weak_conservation,
    yang_mills,
)
from gaugegrav.variational.api import _decide_values

CTX2 = JetContext(2)


def jet_names(ctx, order):
    out = []
    for o in range(order + 1):
        for d in ctx.derivs(o):
            out += [ctx.s_name(a, b, *d) for a, b in ctx.sigma_pairs()]
            out += [ctx.k_name(m, a, b, *d) for m in range(ctx.dim) for a in range(ctx.dim) for b in range(ctx.dim)]
    return out


@st.composite
def jet_polys(draw, ctx=CTX2, order=1, terms=4):
    names = jet_names(ctx, order)
    e = ZERO
    for _ in range(draw(st.integers(1, terms))):
        t = as_expr(mpq(draw(st.integers(-4, 4)), draw(st.integers(1, 3))))
        for v in draw(st.lists(st.sampled_from(names), max_size=3)):
            t = t * sym(v)
        e = e + t
    return e


def verdicts(rep):
    return {c.name: c.verdict for c in rep.checks}


class TestTotalDerivative:
    def test_constant(self):
        assert not total_derivative(parse("7/3"), 0, CTX2).num

    def test_sigma(self):
        assert total_derivative(parse("s00"), 1, CTX2) == parse("s00_1")

    def test_leibniz_example(self):
        assert CTX2.d(parse("k101*s11"), 0) == parse("k101_0*s11 + k101*s11_0")

    def test_order_exceeded(self):
        ctx = JetContext(2, sigma_order=1)
        with pytest.raises(JetOrderError):
            ctx.d(parse("s00_1"), 0)

    def test_sqrt_det_rule(self):
        # d rs = -1/2 rs sl_ab s^ab_l
        got = CTX2.d(sym("rs"), 0)
        want = ZERO
        for a in range(2):
            for b in range(2):
                want = want + CTX2.sl(a, b) * CTX2.s(a, b, 0)
        assert got == -want * sym("rs") / 2

    @given(jet_polys(), st.integers(0, 1), st.integers(0, 1))
    def test_commute(self, e, l, m):
        assert CTX2.d(e, l, m) == CTX2.d(e, m, l)

    @given(jet_polys(), jet_polys(), st.integers(0, 1))
    def test_leibniz(self, p, q, l):
        assert CTX2.d(p * q, l) == CTX2.d(p, l) * q + p * CTX2.d(q, l)


class TestEulerLagrange:
    def test_sigma_only(self):
        E = euler_lagrange(from_text(CTX2, "s00"))
        nz = {lab: e for lab, e in E.all() if e.num}
        assert nz == {"E_s00": as_expr(1)}

    def test_oscillator(self):
        E = euler_lagrange(from_text(CTX2, "1/2*k100_0^2"))
        nz = {lab: e for lab, e in E.all() if e.num}
        assert nz == {"E_k100": parse("-k100_00")}

    def test_symmetric(self):
        E = euler_lagrange(hilbert_einstein(JetContext(3)))
        for a in range(3):
            for b in range(3):
                assert E.sigma[a, b] == E.sigma[b, a]

    def test_order_error(self):
        with pytest.raises(LagrangianOrderError):
            euler_lagrange(from_text(CTX2, "s00_11"))

    def test_undeclared_symbol(self):
        with pytest.raises(JetVariableError):
            from_text(CTX2, "s00*t0")

    @given(jet_polys(), jet_polys())
    def test_divergence_is_trivial(self, f0, f1):
        L = LagrangianDensity(CTX2, CTX2.d(f0, 0) + CTX2.d(f1, 1), "divergence")
        E = euler_lagrange(L, higher_order=True)
        assert all(not e.num for _, e in E.all())


class TestLagrangians:
    @pytest.mark.parametrize("make", [hilbert_einstein, yang_mills])
    def test_vanishes_at_flat_point(self, make):
        ctx = JetContext(3)
        L = make(ctx)
        pt = minkowski_point(ctx)
        full = {s: pt.get(s, mpq(0)) for s in L.density.free_symbols}
        assert L.density.evaluate(full) == 0

    @pytest.mark.parametrize("make", [hilbert_einstein, yang_mills])
    def test_momentum_antisymmetric(self, make):
        ctx = JetContext(3)
        J = SymbolicJets(make(ctx))
        for l in range(3):
            for m in range(3):
                for a in range(3):
                    for b in range(3):
                        assert not as_expr(J.pi(l, m, a, b) + J.pi(m, l, a, b)).num


class TestFieldEquations:
    def test_dim2_proven(self):
        v = verdicts(field_equations_HE(2))
        assert set(v) == {"metric equation", "connection equation", "torsion and non-metricity form",
                          "Levi-Civita solves connection equation", "Minkowski solves both"}
        assert all(x.status == PROVEN for x in v.values())

    def test_dim3(self):
        rep = field_equations_HE(3, samples=8)
        assert rep.ok


class TestInvariance:
    @pytest.mark.parametrize("make", [hilbert_einstein, yang_mills])
    def test_dim2_proven(self, make):
        v = verdicts(invariance_identities(make(CTX2)))
        assert all(x.status == PROVEN for x in v.values()), v

    def test_hilbert_einstein_dim3(self):
        assert invariance_identities(hilbert_einstein(JetContext(3)), samples=8).ok

    def test_broken_lagrangian_witness(self):
        v = verdicts(invariance_identities(from_text(CTX2, "k000^2")))
        assert v["momentum relation"].status == NONZERO
        assert v["momentum relation"].witness is not None

    def test_constant_lagrangian(self):
        # constant densities are not invariant: tau^lam L contributes d_lam tau^lam L
        v = verdicts(invariance_identities(from_text(CTX2, "3")))
        assert v["momentum antisymmetry"].status == PROVEN


class TestNoether:
    @pytest.mark.parametrize("make", [hilbert_einstein, yang_mills])
    def test_dim2_proven(self, make):
        rep = noether_identities(make(CTX2))
        assert [c.name for c in rep.checks] == ["lambda=0", "lambda=1"]
        assert all(c.verdict.status == PROVEN for c in rep.checks)

    def test_hilbert_einstein_dim3(self):
        assert noether_identities(hilbert_einstein(JetContext(3)), samples=8).ok

    def test_broken_lagrangian(self):
        rep = noether_identities(from_text(CTX2, "k000^2"))
        bad = [c for c in rep.checks if not c.ok]
        assert bad and bad[0].verdict.witness is not None

    def test_constant_lagrangian(self):
        L = from_text(CTX2, "5")
        assert all(not e.num for _, e in euler_lagrange(L).all())
        assert all(c.verdict.status == PROVEN for c in noether_identities(L).checks)


class TestCurrent:
    def test_zero_lagrangian(self):
        assert all(not e.num for e in energy_momentum_current(from_text(CTX2, "0")))

    @pytest.mark.parametrize("make", [hilbert_einstein, yang_mills])
    def test_constant_tau_canonical_tensor(self, make):
        ctx = CTX2
        L = make(ctx)
        cur = energy_momentum_current(L)
        for lam in range(2):
            kill = {s: ZERO for s in as_expr(cur[lam]).free_symbols if s.startswith("t") and "_" in s}
            want = ZERO
            for a in range(2):
                coef = -L.density if a == lam else ZERO
                for m in range(2):
                    for b in range(2):
                        for n in range(2):
                            pi = ctx.partial_k(L.density, m, b, n, lam)
                            coef = coef + pi * ctx.k(m, b, n, a)
                want = want + coef * ctx.t(a)
            assert not (as_expr(cur[lam]).subs(kill) - want).num

    def test_weak_conservation(self):
        res = weak_conservation(hilbert_einstein(CTX2), points=3, seed=1)
        assert res["constraint_residual"] < 1e-20
        assert res["divergence_residual"] < 1e-9


class TestKomar:
    @pytest.mark.parametrize("make", [hilbert_einstein, yang_mills])
    def test_dim2_report(self, make):
        v = verdicts(komar_report(make(CTX2)))
        assert v["antisymmetry"].status == PROVEN
        assert v["double divergence"].status == PROVEN

    @pytest.mark.parametrize("make", [hilbert_einstein, yang_mills])
    def test_antisymmetry_dim3(self, make):
        U = komar_superpotential(make(JetContext(3)))
        for m in range(3):
            for l in range(3):
                assert not as_expr(U[m, l] + U[l, m]).num

    def test_flat_point_linear_tau(self):
        ctx = JetContext(3)
        L = hilbert_einstein(ctx)
        J = SymbolicJets(L)
        U = komar_superpotential(L)
        pt = minkowski_point(ctx)
        for m in range(3):
            for l in range(3):
                got = as_expr(U[m, l])
                want = ZERO
                for a in range(3):
                    for n in range(3):
                        want = want + as_expr(J.pi(m, l, a, n)) * ctx.t(a, n)
                diff = got - want
                keep = {s: pt.get(s, mpq(0)) for s in diff.free_symbols if not s.startswith("t")}
                assert not diff.subs(keep).num

    @pytest.mark.parametrize("dim", [2, 3])
    def test_levi_civita_matches_classical(self, dim):
        ctx = JetContext(dim)
        U = levi_civita_komar(hilbert_einstein(ctx))
        C = oracles.classical_komar(ctx)
        vals = {f"{m}{l}": U[m, l] - C[m, l] for m in range(dim) for l in range(dim)}
        assert _decide_values(ctx, vals, 32, 0).is_zero

    def test_classical_oracle_not_trivial(self):
        ctx = JetContext(2)
        U = levi_civita_komar(hilbert_einstein(ctx))
        C = oracles.classical_komar(ctx)
        vals = {f"{m}{l}": U[m, l] + C[m, l] for m in range(2) for l in range(2)}
        assert _decide_values(ctx, vals, 8, 0).status == NONZERO
