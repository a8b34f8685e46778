import itertools
import random

import mpmath
import numpy as np
import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

import oracles
from gaugegrav.geometry import (
    ANTISYMMETRIC,
    RIEMANNIAN,
    Chart,
    MetricField,
    SingularMetricError,
    SymmetryError,
    TensorField,
    TetradField,
    WorldConnection,
    cartan_connection,
    christoffel,
    connection_from_lorentz,
    contorsion,
    curvature,
    decompose,
    decompose_affine,
    identity_tensor,
    integrability_check,
    lorentz_connection,
    metric_connection,
    metric_from_tetrad,
    nonmetricity,
    orthonormality_residual,
    recompose,
    ricci,
    riemannian_from_tetrad,
    scalar_curvature,
    spacetime_metric,
    splitting_residual,
    symmetric_part,
    textbook_riemann,
    to_textbook,
    torsion,
    unit_norm_residual,
)
from gaugegrav.symexpr import ZERO, as_expr, parse

SCHWARZSCHILD = ["1 - 2*m/r", "-1/(1 - 2*m/r)", "-r^2", "-r^2*sin(th)^2"]


def diag_metric(chart, entries, signature="lorentzian", check=True):
    n = chart.dim
    g = [[parse(entries[i]) if i == j else ZERO for j in range(n)] for i in range(n)]
    return MetricField(chart, g, signature=signature, check=check)


def schwarzschild():
    chart = Chart(4, ["t", "r", "th", "ph"], ["m"], {"r": (3, 12), "m": (mpq(1, 4), 1), "th": (mpq(1, 2), 2)})
    return chart, diag_metric(chart, SCHWARZSCHILD)


def sphere():
    chart = Chart(2, ["th", "ph"], domain={"th": (mpq(1, 2), mpq(5, 2))})
    return chart, diag_metric(chart, ["1", "sin(th)^2"], RIEMANNIAN)


def random_poly(rng, coords, deg=2, terms=3):
    out = ZERO
    for _ in range(terms):
        t = as_expr(mpq(rng.randint(-4, 4), rng.randint(1, 5)))
        for _ in range(rng.randint(0, deg)):
            t = t * parse(rng.choice(coords))
        out = out + t
    return out


def perturbed_eta(rng, dim, scale=mpq(1, 10)):
    chart = Chart(dim)
    eta = [1] + [-1] * (dim - 1)
    g = np.empty((dim, dim), dtype=object)
    for i in range(dim):
        for j in range(i, dim):
            v = random_poly(rng, chart.coords) * scale
            if i == j:
                v = v + eta[i]
            g[i, j] = g[j, i] = v
    return chart, MetricField(chart, g, check=False)


def random_connection(rng, chart, terms=2):
    n = chart.dim
    return WorldConnection(chart, [[[random_poly(rng, chart.coords, 2, terms) for _ in range(n)]
                                    for _ in range(n)] for _ in range(n)])


def metric_corpus():
    out = []
    c = Chart(4)
    out.append(("minkowski", diag_metric(c, ["1", "-1", "-1", "-1"])))
    out.append(("diag exponential", diag_metric(c, ["1", "-exp(2*x0)", "-exp(2*x0)", "-1"])))
    out.append(("schwarzschild", schwarzschild()[1]))
    out.append(("2-sphere", sphere()[1]))
    c2 = Chart(2)
    out.append(("dim-2 x0^2", diag_metric(c2, ["1", "x0^2"], check=False)))
    c3 = Chart(3)
    out.append(("dim-3 conformal", diag_metric(c3, ["1 + x1^2", "-(1 + x1^2)", "-(1 + x1^2)"], check=False)))
    rng = random.Random(5)
    for dim in (2, 3, 3, 4):
        out.append((f"perturbed eta dim {dim}", perturbed_eta(rng, dim)[1]))
    return out


class TestLeviCivita:
    def test_minkowski_flat(self):
        g = metric_corpus()[0][1]
        assert all(not e.num for e in christoffel(g).components.flat)

    def test_dim2_example(self):
        c = Chart(2)
        G = christoffel(diag_metric(c, ["1", "x0^2"], check=False))
        assert G[1, 0, 1] == parse("x0")
        assert G[0, 1, 1] == parse("-1/x0")
        assert G[1, 1, 0] == parse("-1/x0")
        ref = oracles.christoffel_dim2_diag(1.5)
        for idx in itertools.product(range(2), repeat=3):
            assert float(G[idx].evaluate({"x0": mpq(3, 2), "x1": 0})) == pytest.approx(ref[idx])

    @pytest.mark.parametrize("name,g", metric_corpus(), ids=lambda x: x if isinstance(x, str) else "")
    def test_metric_and_torsion_free(self, name, g):
        G = christoffel(g)
        assert nonmetricity(G, g).is_zero(32)
        assert torsion(G).is_zero(32)

    def test_schwarzschild_scalar_curvature_zero(self):
        chart, g = schwarzschild()
        assert scalar_curvature(christoffel(g), g).is_zero_structural() or \
            chart.zero_test([scalar_curvature(christoffel(g), g)])


class TestCurvature:
    def test_flat(self):
        c = Chart(3)
        R = curvature(WorldConnection.zero(c))
        assert all(not e.num for e in R.components.flat)

    def test_constant_connection_quadratic_only(self):
        c = Chart(2)
        rng = random.Random(2)
        G = WorldConnection(c, [[[as_expr(mpq(rng.randint(-3, 3))) for _ in range(2)] for _ in range(2)]
                                for _ in range(2)])
        R = curvature(G)
        for l, m, a, b in itertools.product(range(2), repeat=4):
            quad = sum((G[l, g, b] * G[m, a, g] - G[m, g, b] * G[l, a, g] for g in range(2)), ZERO)
            assert R[l, m, a, b] == quad

    def test_sphere_scalar_curvature(self):
        chart, g = sphere()
        assert scalar_curvature(christoffel(g), g) == as_expr(-2)

    def test_sphere_ricci_is_minus_metric(self):
        chart, g = sphere()
        rc = ricci(christoffel(g))
        for i, j in itertools.product(range(2), repeat=2):
            assert rc.unweighted[i, j] == -g.g[i, j]
            assert rc.weighted[i, j] * 2 == rc.unweighted[i, j]

    @pytest.mark.parametrize("which", ["sphere", "schwarzschild"])
    def test_finite_difference_oracle(self, which):
        if which == "sphere":
            chart, g = sphere()
            metric = oracles.sphere_metric
        else:
            chart, g = schwarzschild()
            metric = oracles.schwarzschild_metric(mpmath.mpf("0.6"))
        R = curvature(christoffel(g)).components
        rng = random.Random(17)
        for _ in range(5):
            if which == "sphere":
                x = [mpmath.mpf(rng.uniform(0.5, 2.5)), mpmath.mpf(rng.uniform(-3, 3))]
                pt = {"th": x[0], "ph": x[1]}
            else:
                x = [mpmath.mpf(rng.uniform(-2, 2)), mpmath.mpf(rng.uniform(3, 9)),
                     mpmath.mpf(rng.uniform(0.5, 2.5)), mpmath.mpf(rng.uniform(-3, 3))]
                pt = {"t": x[0], "r": x[1], "th": x[2], "ph": x[3], "m": mpmath.mpf("0.6")}
            ref = oracles.fd_riemann(metric, x)
            scale = max(abs(v) for v in ref.flat)
            fpt = {k: float(v) for k, v in pt.items()}
            for idx in np.ndindex(R.shape):
                got = float(R[idx].evaluate(fpt))
                assert abs(got - float(ref[idx])) <= 1e-6 * float(scale)

    def test_textbook_converter_flips_sign(self):
        chart, g = sphere()
        G = christoffel(g)
        R = curvature(G).components
        Rt = textbook_riemann(to_textbook(G)).components
        for idx in np.ndindex(R.shape):
            assert not (R[idx] + Rt[idx]).num

    @given(st.integers(0, 10_000))
    def test_antisymmetry(self, seed):
        rng = random.Random(seed)
        c = Chart(rng.choice([2, 3]))
        R = curvature(random_connection(rng, c)).components
        for idx in np.ndindex(R.shape):
            l, m, a, b = idx
            assert not (R[l, m, a, b] + R[m, l, a, b]).num


class TestTorsion:
    def test_single_component(self):
        c = Chart(2)
        comps = np.empty((2, 2, 2), dtype=object)
        comps.fill(ZERO)
        comps[0, 1, 1] = parse("x0")
        T = torsion(WorldConnection(c, comps))
        assert T[0, 1, 1] == parse("x0") and T[1, 1, 0] == parse("-x0")

    def test_symmetric_part_example(self):
        c = Chart(2)
        comps = np.empty((2, 2, 2), dtype=object)
        comps.fill(ZERO)
        comps[0, 1, 1] = parse("x0")
        S = symmetric_part(WorldConnection(c, comps))
        assert S[0, 1, 1] == parse("x0/2")

    @given(st.integers(0, 10_000))
    def test_symmetric_part_torsion_free(self, seed):
        rng = random.Random(seed)
        c = Chart(3)
        assert all(not e.num for e in torsion(symmetric_part(random_connection(rng, c))).components.flat)

    @pytest.mark.parametrize("seed", range(10))
    def test_levi_civita_torsion_free_random(self, seed):
        chart, g = perturbed_eta(random.Random(seed), 3)
        assert all(not e.num for e in torsion(christoffel(g)).components.flat)


class TestSplitting:
    def test_nonmetricity_example(self):
        c = Chart(4)
        g = diag_metric(c, ["1", "-exp(2*x0)", "-1", "-1"])
        C = nonmetricity(WorldConnection.zero(c), g)
        assert C[0, 1, 1] == parse("-2*exp(2*x0)")
        nz = {idx for idx, e in C.entries() if e.num}
        assert nz == {(0, 1, 1)}

    def test_levi_civita_parts_vanish(self):
        chart, g = perturbed_eta(random.Random(1), 3)
        parts = decompose(christoffel(g), g)
        assert all(not e.num for e in parts.contorsion.components.flat)
        assert all(not e.num for e in parts.nonmetricity.components.flat)

    @pytest.mark.parametrize("seed,dim", [(s, 2 + s % 3) for s in range(10)])
    def test_round_trip_exact(self, seed, dim):
        rng = random.Random(100 + seed)
        chart, g = perturbed_eta(rng, dim)
        G = random_connection(rng, chart)
        back = recompose(decompose(G, g), g)
        assert all(not (back[i] - G[i]).num for i in np.ndindex(G.components.shape))
        assert all(not e.num for e in splitting_residual(G, g).flat)

    def test_contorsion_antisymmetric(self):
        rng = random.Random(4)
        chart, g = perturbed_eta(rng, 3)
        S = contorsion(random_connection(rng, chart), g).components
        for m, n, a in np.ndindex(S.shape):
            assert not (S[m, n, a] + S[m, a, n]).num

    def test_torsion_free_nonmetric_contorsion_from_c(self):
        rng = random.Random(8)
        chart, g = perturbed_eta(rng, 2)
        G = symmetric_part(random_connection(rng, chart))
        S = contorsion(G, g).components
        C = nonmetricity(G, g).components
        for m, n, a in np.ndindex(S.shape):
            assert not (S[m, n, a] - (C[a, n, m] - C[n, a, m]) / 2).num


class TestMetricConnection:
    def _torsion(self, rng, chart):
        n = chart.dim
        T = np.empty((n, n, n), dtype=object)
        T.fill(ZERO)
        for m in range(n):
            for v in range(n):
                for l in range(m + 1, n):
                    e = random_poly(rng, chart.coords, 1, 2)
                    T[m, v, l], T[l, v, m] = e, -e
        return TensorField(chart, "lul", T, {(0, 2): ANTISYMMETRIC})

    def test_zero_torsion_gives_levi_civita(self):
        chart, g = perturbed_eta(random.Random(2), 2)
        T = TensorField(chart, "lul", np.full((2, 2, 2), ZERO, dtype=object))
        G = metric_connection(g, T)
        L = christoffel(g)
        assert all(not (G[i] - L[i]).num for i in np.ndindex(G.components.shape))

    @given(st.integers(0, 10_000))
    def test_torsion_and_metricity(self, seed):
        rng = random.Random(seed)
        chart, g = perturbed_eta(rng, 2)
        T = self._torsion(rng, chart)
        G = metric_connection(g, T)
        assert all(not (torsion(G)[i] - T[i]).num for i in np.ndindex(T.components.shape))
        assert all(not e.num for e in nonmetricity(G, g).components.flat)

    def test_malformed_torsion_rejected(self):
        chart = Chart(2)
        T = np.full((2, 2, 2), ZERO, dtype=object)
        T[0, 0, 1] = parse("x0")
        with pytest.raises(SymmetryError):
            metric_connection(diag_metric(chart, ["1", "-1"]), TensorField(chart, "lul", T))


class TestTetrads:
    def test_identity_tetrad(self):
        c = Chart(4)
        h = TetradField.identity(c)
        g = metric_from_tetrad(h).g.components
        gr = riemannian_from_tetrad(h).g.components
        for i, j in itertools.product(range(4), repeat=2):
            assert g[i, j] == as_expr((1 if i == 0 else -1) if i == j else 0)
            assert gr[i, j] == as_expr(1 if i == j else 0)

    def test_diagonal_tetrad(self):
        c = Chart(4)
        f = ["1 + x1^2", "2", "exp(x0)", "x2^2 + 1"]
        h = TetradField(c, [[parse(f[a]) if a == m else ZERO for m in range(4)] for a in range(4)])
        g = metric_from_tetrad(h).g.components
        for a in range(4):
            assert g[a, a] == parse(f[a]) ** 2 * (1 if a == 0 else -1)

    def test_triple_relation_and_orthonormality(self):
        c = Chart(3)
        rng = random.Random(9)
        co = [[random_poly(rng, c.coords, 1, 2) * mpq(1, 10) + (1 if a == m else 0) for m in range(3)]
              for a in range(3)]
        h = TetradField(c, co)
        g = metric_from_tetrad(h, check=False)
        gr = riemannian_from_tetrad(h, check=False)
        for i, j in itertools.product(range(3), repeat=2):
            assert not (g.g[i, j] - (2 * h.co(0, i) * h.co(0, j) - gr.g[i, j])).num
        assert c.zero_test(orthonormality_residual(h, g))

    def test_singular_tetrad(self):
        c = Chart(2)
        with pytest.raises(SingularMetricError):
            TetradField(c, [["x0", "x1"], ["2*x0", "2*x1"]])

    def test_singular_metric(self):
        with pytest.raises(SingularMetricError):
            MetricField(Chart(2), [["x0", "x0"], ["x0", "x0"]])

    def test_wrong_signature(self):
        with pytest.raises(SingularMetricError):
            diag_metric(Chart(2), ["1", "1"])


class TestLorentzConnection:
    def test_flat(self):
        c = Chart(4)
        lc = lorentz_connection(WorldConnection.zero(c), TetradField.identity(c))
        assert all(not e.num for e in lc.coefficients.flat)
        assert all(not e.num for e in lc.connection.components.flat)

    def _tetrad(self, rng, dim):
        c = Chart(dim)
        co = [[random_poly(rng, c.coords, 1, 2) * mpq(1, 8) + (1 if a == m else 0) for m in range(dim)]
              for a in range(dim)]
        return c, TetradField(c, co)

    @given(st.integers(0, 10_000))
    def test_round_trip_from_antisymmetric(self, seed):
        rng = random.Random(seed)
        c, h = self._tetrad(rng, 2)
        A = np.full((2, 2, 2), ZERO, dtype=object)
        for l in range(2):
            e = random_poly(rng, c.coords, 1, 2)
            A[l, 0, 1], A[l, 1, 0] = e, -e
        G = connection_from_lorentz(A, h)
        back = lorentz_connection(G, h)
        assert all(not (back.coefficients[i] - A[i]).num for i in np.ndindex(A.shape))
        assert all(not (back.connection[i] - G[i]).num for i in np.ndindex(A.shape))

    def test_antisymmetric_and_metric(self):
        rng = random.Random(21)
        c, h = self._tetrad(rng, 3)
        G = random_connection(rng, c, 1)
        lc = lorentz_connection(G, h)
        A = lc.coefficients
        for l, a, b in np.ndindex(A.shape):
            assert not (A[l, a, b] + A[l, b, a]).num
        g = metric_from_tetrad(h, check=False)
        assert nonmetricity(lc.connection, g).is_zero(16)


class TestSpacetime:
    def test_dx0_euclidean(self):
        c = Chart(4)
        gR = diag_metric(c, ["1"] * 4, RIEMANNIAN)
        for scale in ("1", "2"):
            sigma = TensorField(c, "l", [parse(scale), ZERO, ZERO, ZERO])
            split = spacetime_metric(sigma, gR)
            for i, j in itertools.product(range(4), repeat=2):
                want = (1 if i == 0 else -1) if i == j else 0
                assert split.metric.g[i, j] == as_expr(want)

    def test_tilted_form(self):
        c = Chart(4)
        gR = diag_metric(c, ["1"] * 4, RIEMANNIAN)
        sigma = TensorField(c, "l", [parse("1"), ZERO, parse("x1"), ZERO])
        split = spacetime_metric(sigma, gR, points=10)
        assert c.zero_test([unit_norm_residual(split, gR)])
        g = split.metric.g
        assert g[0, 2] == parse("2*x1/(1 + x1^2)")
        rng = np.random.default_rng(0)
        for _ in range(10):
            pt = {k: float(v) for k, v in zip(c.coords, rng.uniform(-2, 2, 4))}
            M = np.array([[float(g[i, j].evaluate(pt)) for j in range(4)] for i in range(4)])
            ev = np.linalg.eigvalsh(M)
            assert (ev > 0).sum() == 1 and (ev < 0).sum() == 3

    def test_vanishing_form(self):
        c = Chart(2)
        with pytest.raises(SingularMetricError):
            spacetime_metric(TensorField(c, "l", [ZERO, ZERO]), diag_metric(c, ["1", "1"], RIEMANNIAN))


class TestIntegrability:
    def test_exact_forms(self):
        c = Chart(4)
        assert integrability_check(TensorField(c, "l", [parse("1"), ZERO, ZERO, ZERO])).integrable
        assert integrability_check(TensorField(c, "l", [parse("exp(x0) + x0^2"), ZERO, ZERO, ZERO])).integrable

    def test_tilted_not_integrable(self):
        c = Chart(4)
        w = TensorField(c, "l", [parse("1"), ZERO, parse("x1"), ZERO])
        v = integrability_check(w)
        assert not v.integrable
        # component on dx^0 ^ dx^1 ^ dx^2 with the standard exterior derivative
        assert v.components[(0, 1, 2)] == as_expr(1)

    def test_against_permutation_oracle(self):
        c = Chart(4)
        rng = random.Random(3)
        comps = [random_poly(rng, c.coords, 2, 3) for _ in range(4)]
        w = TensorField(c, "l", comps)
        got = integrability_check(w).components
        x = [0.3, -0.7, 1.1, 0.4]
        pt = dict(zip(c.coords, x))

        def wnum(y):
            return [float(e.evaluate(dict(zip(c.coords, y)))) for e in comps]

        F = oracles.d_one_form_numeric(wnum, x)
        wv = wnum(x)
        # dw = 1/2 F_ij dx^i ^ dx^j has fully antisymmetric components F_ij
        ref = oracles.wedge_components(lambda ij: F[ij[0], ij[1]], lambda k: wv[k[0]], 2, 1, 4)
        for key, e in got.items():
            assert float(e.evaluate(pt)) == pytest.approx(ref[key], abs=1e-6)


class TestAffine:
    def test_cartan_round_trip(self):
        c = Chart(3)
        G = random_connection(random.Random(1), c)
        A = cartan_connection(G)
        lin, sold = decompose_affine(A)
        assert lin is G
        assert all(not (sold[i] - identity_tensor(c)[i]).num for i in np.ndindex(sold.components.shape))

    def test_flat_soldering(self):
        c = Chart(2)
        A = cartan_connection(WorldConnection.zero(c))
        assert A.coefficient(0, 0, [parse("v0"), parse("v1")]) == as_expr(1)
        assert not A.coefficient(0, 1, [parse("v0"), parse("v1")]).num
