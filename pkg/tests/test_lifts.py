import random

import numpy as np
import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from gaugegrav.geometry import Chart, WorldConnection
from gaugegrav.lifts import (
    LIFTS,
    BaseVectorField,
    BundleMismatchError,
    bracket,
    horizontal_lift,
    horizontal_lift_witness,
    lift_connection_bundle,
    lift_frame,
    lift_sigma_c,
    lift_tensor,
    morphism_defect,
)
from gaugegrav.symexpr import ZERO, as_expr, parse, sym


def random_field(rng, chart, deg=2, terms=2):
    comps = []
    for _ in range(chart.dim):
        e = ZERO
        for _ in range(terms):
            t = as_expr(mpq(rng.randint(-3, 3), rng.randint(1, 3)))
            for _ in range(rng.randint(0, deg)):
                t = t * sym(rng.choice(chart.coords))
            e = e + t
        comps.append(e)
    return BaseVectorField(chart, comps)


def fiber_zero(lifted):
    return all(not e.num for e in lifted.fiber.values())


def connection_lift_oracle(tau, x, k, h=1e-4):
    """Fiber components of the connection-bundle lift, from finite differences of tau."""
    n = len(x)

    def t(y):
        return np.array([float(c.evaluate({f"x{i}": y[i] for i in range(n)})) for c in tau.components])

    J = np.zeros((n, n))  # J[a, v] = d_v tau^a
    H = np.zeros((n, n, n))  # H[a, m, b] = d_m d_b tau^a
    for v in range(n):
        e = np.zeros(n)
        e[v] = h
        J[:, v] = (t(x + e) - t(x - e)) / (2 * h)
        for w in range(n):
            f = np.zeros(n)
            f[w] = h
            H[:, v, w] = (t(x + e + f) - t(x + e - f) - t(x - e + f) + t(x - e - f)) / (4 * h * h)
    out = np.zeros((n, n, n))
    for m in range(n):
        for a in range(n):
            for b in range(n):
                out[m, a, b] = (J[a] @ k[m, :, b] - J[:, b] @ k[m, a, :] - J[:, m] @ k[:, a, b]
                                + H[a, m, b])
    return out


class TestExamples:
    @pytest.mark.parametrize("kind", sorted(LIFTS))
    def test_constant_field_pure_horizontal(self, kind):
        c = Chart(3)
        lifted = LIFTS[kind](BaseVectorField(c, ["1", "0", "0"]))
        assert fiber_zero(lifted)

    def test_tensor_contravariant(self):
        lifted = lift_tensor(BaseVectorField(Chart(2), ["x1", "0"]), 1, 0)
        assert lifted.component("xdu0") == sym("xdu1")
        assert not lifted.component("xdu1").num

    def test_tensor_covariant_sign(self):
        lifted = lift_tensor(BaseVectorField(Chart(2), ["x0", "0"]), 0, 1)
        assert lifted.component("xdl0") == -sym("xdl0")

    def test_frame(self):
        lifted = lift_frame(BaseVectorField(Chart(2), ["0", "x0"]))
        for a in range(2):
            assert lifted.component(f"H1{a}") == sym(f"H0{a}")
            assert not lifted.component(f"H0{a}").num

    def test_connection_linear_field(self):
        lifted = lift_connection_bundle(BaseVectorField(Chart(2), ["x0", "0"]))
        # three homogeneous terms on k_0^0_0, no inhomogeneous part
        assert lifted.component("k000") == -sym("k000")
        assert lifted.component("k101") == sym("k101")
        assert lifted.component("k110") == -sym("k110")
        assert lifted.component("k011") == -sym("k011")

    def test_connection_quadratic_field(self):
        # direct expansion: 2 x0 k000 - 2 x0 k000 - 2 x0 k000 + d_00 tau^0
        lifted = lift_connection_bundle(BaseVectorField(Chart(2), ["x0^2", "0"]))
        assert lifted.component("k000") == parse("2 - 2*x0*k000")
        assert lifted.component("k101") == parse("2*x0*k101")
        assert not lifted.component("k111").num

    def test_connection_against_finite_differences(self):
        rng = random.Random(4)
        c = Chart(3)
        tau = random_field(rng, c, 2, 3)
        lifted = lift_connection_bundle(tau)
        x = np.array([0.3, -0.4, 0.8])
        k = np.array([[[rng.uniform(-1, 1) for _ in range(3)] for _ in range(3)] for _ in range(3)])
        pt = {f"x{i}": x[i] for i in range(3)}
        pt.update({f"k{m}{a}{b}": k[m, a, b] for m in range(3) for a in range(3) for b in range(3)})
        ref = connection_lift_oracle(tau, x, k)
        for (m, a, b), want in np.ndenumerate(ref):
            assert float(lifted.component(f"k{m}{a}{b}").evaluate(pt)) == pytest.approx(want, abs=1e-5)

    def test_sigma_component(self):
        lifted = lift_sigma_c(BaseVectorField(Chart(2), ["x1", "0"]))
        assert lifted.component("s00") == 2 * sym("s01")
        assert lifted.component("s01") == sym("s11")
        assert not lifted.component("s11").num

    def test_commuting_translations(self):
        c = Chart(2)
        for kind, lift in LIFTS.items():
            d = bracket(lift(BaseVectorField(c, ["1", "0"])), lift(BaseVectorField(c, ["0", "1"])))
            assert all(not e.num for _, e in d.all_components()), kind

    def test_base_bracket_example(self):
        c = Chart(2)
        t1, t2 = BaseVectorField(c, ["0", "x0"]), BaseVectorField(c, ["x1", "0"])
        b = t1.bracket(t2)
        assert b.components == (parse("x0"), parse("-x1"))
        defect = morphism_defect(LIFTS["tensor(1,0)"], t1, t2)
        assert all(not e.num for _, e in defect.all_components())


class TestFunctoriality:
    @pytest.mark.parametrize("kind", sorted(LIFTS))
    @given(seed=st.integers(0, 10_000), dim=st.sampled_from([2, 3]))
    def test_bracket_morphism(self, kind, seed, dim):
        rng = random.Random(seed)
        c = Chart(dim)
        defect = morphism_defect(LIFTS[kind], random_field(rng, c), random_field(rng, c))
        assert all(not e.num for _, e in defect.all_components())


class TestProperties:
    @pytest.mark.parametrize("kind", sorted(LIFTS))
    @given(seed=st.integers(0, 10_000))
    def test_projection(self, kind, seed):
        rng = random.Random(seed)
        tau = random_field(rng, Chart(3))
        lifted = LIFTS[kind](tau)
        for i, x in enumerate(tau.chart.coords):
            assert lifted.component(x) == tau[i]

    @pytest.mark.parametrize("kind", sorted(LIFTS))
    @given(seed=st.integers(0, 10_000))
    def test_linearity(self, kind, seed):
        rng = random.Random(seed)
        c = Chart(2)
        t1, t2 = random_field(rng, c), random_field(rng, c)
        a, b = mpq(rng.randint(-5, 5), rng.randint(1, 4)), mpq(rng.randint(-5, 5), rng.randint(1, 4))
        lhs = LIFTS[kind](t1.combine(a, t2, b))
        rhs = LIFTS[kind](t1).combine(a, LIFTS[kind](t2), b)
        assert all(not e.num for _, e in (lhs - rhs).all_components())

    def test_connection_part_affine(self):
        # fiber components are affine in k: second k-derivatives vanish
        rng = random.Random(1)
        lifted = lift_connection_bundle(random_field(rng, Chart(2)))
        for v, e in lifted.fiber.items():
            for w in lifted.fiber_vars:
                for u in lifted.fiber_vars:
                    assert not e.diff(w).diff(u).num


class TestErrors:
    def test_bundle_mismatch(self):
        tau = BaseVectorField(Chart(2), ["x1", "x0"])
        with pytest.raises(BundleMismatchError):
            bracket(lift_frame(tau), lift_connection_bundle(tau))

    def test_empty_tensor_bundle(self):
        with pytest.raises(ValueError):
            lift_tensor(BaseVectorField(Chart(2), ["1", "0"]), 0, 0)

    def test_wrong_component_count(self):
        with pytest.raises(ValueError):
            BaseVectorField(Chart(3), ["1", "0"])


class TestHorizontal:
    def test_nonflat_connection_witness(self):
        c = Chart(2)
        comps = np.full((2, 2, 2), ZERO, dtype=object)
        comps[0, 1, 1] = parse("x1")
        comps[1, 0, 0] = parse("x0")
        G = WorldConnection(c, comps)
        cands = [BaseVectorField(c, e) for e in (["1", "0"], ["0", "1"], ["x1", "0"])]
        w = horizontal_lift_witness(G, cands)
        assert w is not None and not w.verdict.is_zero

    def test_flat_constant_connection_no_witness(self):
        c = Chart(2)
        G = WorldConnection.zero(c)
        cands = [BaseVectorField(c, e) for e in (["1", "0"], ["0", "1"])]
        assert horizontal_lift_witness(G, cands) is None

    def test_horizontal_lift_projects(self):
        c = Chart(2)
        tau = BaseVectorField(c, ["x1", "1"])
        lifted = horizontal_lift(WorldConnection.zero(c), tau)
        assert lifted.component("x0") == tau[0] and fiber_zero(lifted)
