import itertools
import random

import numpy as np
import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

import oracles
from gaugegrav import spinor as sp
from gaugegrav.geometry import (
    Chart,
    SingularMetricError,
    TensorField,
    TetradField,
    WorldConnection,
    lorentz_connection,
)
from gaugegrav.symexpr import ZERO, as_expr, parse

CH4 = Chart(4)
GAM = sp.gamma_basis()
GEN = sp.lorentz_generators(GAM)


def oneform(*comps):
    return TensorField(CH4, "l", [parse(c) if isinstance(c, str) else as_expr(c) for c in comps])


def tetrad(rows):
    return TetradField(CH4, [[parse(e) if isinstance(e, str) else as_expr(e) for e in r] for r in rows])


def triangular_tetrad(rng):
    """Unit-diagonal upper-triangular coframe: polynomial frame, det 1."""
    rows = []
    for a in range(4):
        row = []
        for m in range(4):
            if m < a:
                row.append(ZERO)
            elif m == a:
                row.append(as_expr(1))
            else:
                c = mpq(rng.randint(-3, 3), rng.randint(1, 3))
                row.append(parse(f"x{rng.randrange(4)}") * c + mpq(rng.randint(-2, 2), 3))
        rows.append(row)
    return TetradField(CH4, rows)


def all_zero(M):
    return all(x.is_zero() for row in M for x in row)


def rotation_tetrad():
    return tetrad([["1", "0", "0", "0"],
                   ["0", "cos(x0)", "sin(x0)", "0"],
                   ["0", "-sin(x0)", "cos(x0)", "0"],
                   ["0", "0", "0", "1"]])


class TestClifford:
    def test_all_residuals_exact(self):
        res = GAM.clifford_residuals()
        assert len(res) == 16
        assert all(all_zero(M) for M in res.values())

    def test_numeric_oracle(self):
        assert oracles.clifford_defect([sp.to_numpy(GAM[a]) for a in range(4)]) == 0.0

    def test_squares(self):
        assert sp.mat_equal(sp.mmul(GAM[0], GAM[0]), sp.identity())
        assert sp.mat_equal(sp.mmul(GAM[1], GAM[1]), sp.mscale(sp.identity(), -1))

    def test_anticommute(self):
        assert sp.mat_equal(sp.mmul(GAM[0], GAM[1]), sp.mscale(sp.mmul(GAM[1], GAM[0]), -1))

    def test_tampered_basis_detected(self):
        bad = sp.GammaRep([GAM[0], GAM[1], GAM[1], GAM[3]])
        assert not all(all_zero(M) for M in bad.clifford_residuals().values())


class TestGenerators:
    def test_traceless(self):
        assert sp.trace(GEN[0, 1]).is_zero()

    def test_disjoint_planes_commute(self):
        assert all_zero(sp.commutator(GEN[0, 1], GEN[2, 3]))

    def test_rotation_fixes_orthogonal_gamma(self):
        assert all_zero(sp.commutator(GEN[1, 2], GAM[3]))

    def test_action_on_gammas(self):
        assert all(all_zero(M) for M in sp.generator_action_residuals(GAM).values())

    def test_algebra_closes(self):
        assert all(all_zero(M) for M in sp.lorentz_algebra_residuals(GAM).values())

    def test_antisymmetric(self):
        for a, b in itertools.product(range(4), repeat=2):
            assert sp.mat_equal(GEN[a, b], sp.mscale(GEN[b, a], -1))


class TestCovectorRep:
    def test_identity_tetrad_dx0(self):
        h = TetradField.identity(CH4)
        assert sp.mat_equal(sp.rep_covector(h, oneform(1, 0, 0, 0)), GAM[0])

    @pytest.mark.parametrize("seed", range(4))
    def test_square_identity(self, seed):
        rng = random.Random(seed)
        h = triangular_tetrad(rng)
        t = oneform(*[parse(f"x{rng.randrange(4)}") * rng.randint(-3, 3) + rng.randint(-2, 2) for _ in range(4)])
        R = sp.square_identity_residual(h, t)
        assert all_zero(R)

    def test_square_identity_transcendental(self):
        h = rotation_tetrad()
        R = sp.square_identity_residual(h, oneform("x1", "exp(x0)", "1", "x2"))
        exprs = [as_expr(p) for row in R for x in row for p in (x.re, x.im)]
        assert CH4.zero_test(exprs).is_zero

    def test_null_covector(self):
        h = TetradField.identity(CH4)
        t = oneform(1, 1, 0, 0)
        assert not sp.covector_norm(h, t).num
        assert all_zero(sp.mmul(sp.rep_covector(h, t), sp.rep_covector(h, t)))

    def test_nonequivalent_tetrads(self):
        h1 = TetradField.identity(CH4)
        h2 = tetrad([["2", "0", "0", "0"], ["0", "1", "0", "0"], ["0", "0", "1", "0"], ["0", "0", "0", "1"]])
        w = sp.nonequivalence_witness(h1, h2, oneform(1, 0, 0, 0), {f"x{i}": 0 for i in range(4)})
        assert w["norm1"] == 1.0 and w["norm2"] == 0.25
        assert w["non_equivalent"]
        assert np.allclose(sorted(w["eig2"].real), [-0.5, -0.5, 0.5, 0.5])

    def test_lorentz_related_tetrads_equivalent(self):
        h1 = TetradField.identity(CH4)
        _, _, Lam = sp.boost_spin_matrix("5/4", "3/4")
        w = sp.nonequivalence_witness(h1, h1.transformed(Lam), oneform(1, 0, 0, 0), {f"x{i}": 0 for i in range(4)})
        assert not w["non_equivalent"]

    def test_singular_tetrad(self):
        with pytest.raises(SingularMetricError):
            tetrad([["x0", "0", "0", "0"], ["x0", "0", "0", "0"], ["0", "0", "1", "0"], ["0", "0", "0", "1"]])

    def test_wrong_dimension(self):
        c = Chart(3)
        with pytest.raises(ValueError):
            sp.rep_covector(TetradField.identity(c), TensorField(c, "l", [1, 0, 0]))


def rotation_oracle(x0, h=1e-6):
    """s_0^{ab} for the rotation tetrad with Gamma = 0, by finite differences in numpy."""
    eta = np.diag([1.0, -1.0, -1.0, -1.0])

    def co(t):
        c, s = np.cos(t), np.sin(t)
        return np.array([[1, 0, 0, 0], [0, c, s, 0], [0, -s, c, 0], [0, 0, 0, 1.0]])

    dfr = (np.linalg.inv(co(x0 + h)) - np.linalg.inv(co(x0 - h))) / (2 * h)
    e = co(x0)
    out = np.zeros((4, 4))
    for a, b in itertools.product(range(4), repeat=2):
        out[a, b] = 0.25 * sum(eta[k, b] * e[a, m] * dfr[m, k] - eta[k, a] * e[b, m] * dfr[m, k]
                               for m in range(4) for k in range(4))
    return out


class TestSpinConnection:
    def test_flat_zero(self):
        s = sp.spin_connection(WorldConnection.zero(CH4), TetradField.identity(CH4))
        assert all(not as_expr(x).num for x in s.coeffs.flat)

    def test_rotation_single_component(self):
        s = sp.spin_connection(WorldConnection.zero(CH4), rotation_tetrad())
        nz = {idx for idx in np.ndindex(s.coeffs.shape) if as_expr(s.coeffs[idx]).num}
        assert nz == {(0, 1, 2), (0, 2, 1)}
        ref = rotation_oracle(0.7)
        val = float(as_expr(s[0, 1, 2]).evaluate({"x0": 0.7}))
        assert val == pytest.approx(ref[1, 2], abs=1e-8)
        # d_0 f_2 = -f_1 and d_0 f_1 = f_2 give 1/4 (1 + 1)
        assert val == pytest.approx(0.5)

    @pytest.mark.parametrize("seed", range(3))
    def test_half_lorentz_and_direct_formula(self, seed):
        rng = random.Random(seed)
        h = triangular_tetrad(rng)
        comps = np.full((4, 4, 4), ZERO, dtype=object)
        for _ in range(6):
            comps[rng.randrange(4), rng.randrange(4), rng.randrange(4)] = parse(f"x{rng.randrange(4)}") * rng.randint(1, 3)
        G = WorldConnection(CH4, comps)
        s = sp.spin_connection(G, h)
        d = sp.spin_connection_direct(G, h)
        A = lorentz_connection(G, h).coefficients
        for idx in np.ndindex(A.shape):
            assert not (as_expr(s[idx]) - as_expr(d[idx])).num
            assert not (as_expr(s[idx]) * 2 - A[idx]).num
        assert all(not as_expr(r).num for r in s.antisymmetry_residuals())


class TestDirac:
    def _psi(self):
        return sp.SpinorFieldExpr.from_parts(CH4, [("x0*x1", "0"), ("x2^2", "x3"), ("1", "x0"), ("x1 + x3", "x2")])

    def test_flat_reduction(self):
        psi = self._psi()
        D = sp.dirac_operator(WorldConnection.zero(CH4), TetradField.identity(CH4), psi)
        assert (D - sp.flat_dirac(psi)).is_zero()

    def test_flat_value(self):
        psi = sp.SpinorFieldExpr.from_parts(CH4, [("x0", "0"), ("0", "0"), ("0", "0"), ("0", "0")])
        D = sp.flat_dirac(psi)
        # gamma^0 d_0 psi = gamma^0 e_0
        assert [str(as_expr(c.re)) for c in D.components] == ["1", "0", "0", "0"]

    def test_constant_spinor(self):
        psi = sp.SpinorFieldExpr.from_parts(CH4, [("1", "2"), ("0", "0"), ("3", "0"), ("0", "-1")])
        assert sp.dirac_operator(WorldConnection.zero(CH4), TetradField.identity(CH4), psi).is_zero()

    def test_boost_spin_matrix(self):
        S, Sinv, Lam = sp.boost_spin_matrix("5/4", "3/4")
        assert sp.mat_equal(sp.mmul(S, Sinv), sp.identity())
        assert Lam[0][0] == mpq(5, 4) and Lam[0][1] == mpq(3, 4)

    def test_irrational_half_angle_rejected(self):
        with pytest.raises(ValueError):
            sp.boost_spin_matrix(2, "sqrt3")

    def test_boost_equivariance(self):
        h = tetrad([["1 + x1^2", "0", "0", "0"], ["0", "1", "x0", "0"], ["0", "0", "1", "0"], ["0", "0", "0", "2"]])
        comps = np.full((4, 4, 4), ZERO, dtype=object)
        comps[0, 1, 2] = parse("x3")
        comps[1, 0, 0] = parse("1/2")
        G = WorldConnection(CH4, comps)
        psi = self._psi()
        S, _, Lam = sp.boost_spin_matrix("5/4", "3/4")
        lhs = sp.dirac_operator(G, h.transformed(Lam), psi.transformed(S))
        rhs = sp.dirac_operator(G, h, psi).transformed(S)
        assert (lhs - rhs).is_zero()

    def test_wrong_spin_matrix_breaks_equivariance(self):
        h = TetradField.identity(CH4)
        psi = self._psi()
        S, _, Lam = sp.boost_spin_matrix("5/4", "3/4")
        lhs = sp.dirac_operator(WorldConnection.zero(CH4), h.transformed(Lam), psi)
        rhs = sp.dirac_operator(WorldConnection.zero(CH4), h, psi)
        assert not (lhs - rhs).is_zero()


class TestVerticalDifferential:
    def test_flat_point(self):
        coeffs = sp.vertical_covariant_differential(WorldConnection.zero(CH4))
        h = TetradField.identity(CH4)
        assert all(not as_expr(x).num for x in sp.restrict_to_tetrad(coeffs, h).flat)

    def test_restriction_matches_spin_connection(self):
        comps = np.full((4, 4, 4), ZERO, dtype=object)
        comps[0, 1, 2] = parse("x3")
        comps[2, 2, 1] = parse("x0^2")
        G = WorldConnection(CH4, comps)
        h = rotation_tetrad()
        got = sp.restrict_to_tetrad(sp.vertical_covariant_differential(G), h)
        want = sp.spin_connection(G, h).coeffs
        diffs = [as_expr(got[i]) - as_expr(want[i]) for i in np.ndindex(got.shape)]
        assert CH4.zero_test(diffs).is_zero

    @given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3))
    def test_antisymmetric(self, lam, a, b):
        coeffs = sp.vertical_covariant_differential(WorldConnection.zero(CH4))
        assert not (as_expr(coeffs[lam, a, b]) + as_expr(coeffs[lam, b, a])).num
