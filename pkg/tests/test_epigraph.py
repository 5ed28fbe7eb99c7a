import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ebcheck import epigraph as epi
from ebcheck.batteries import hoffman_battery, lemma25_function, linear_max, lipschitz_battery
from ebcheck.errorbound import hoffman_constant
from ebcheck.exceptions import PointNotInEpigraph
from ebcheck.functions import Affine, Max, Quadratic

X_ = Affine([1.0])
ABS = Max([Affine([1.0]), Affine([-1.0])])


def _grid_epi_distance(f, x, r, tau, lo=-3, hi=3, n=600001):
    u = np.linspace(lo, hi, n)
    return float(np.min(np.abs(u - x) / tau + np.maximum(f.values(u[:, None]) - r, 0.0)))


class TestTauNorm:
    @pytest.mark.parametrize("tau, x, r, expected", [(1, (3, 4), 2, 7), (2, (3, 4), 2, 4.5), (0.5, (0, 0), -1, 1)])
    def test_examples(self, tau, x, r, expected):
        assert epi.tau_norm(epi.TauNorm(tau), np.array(x, float), r) == pytest.approx(expected)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            epi.TauNorm(0.0)

    def test_norm_axioms(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            tn = epi.TauNorm(rng.uniform(0.1, 10))
            (x1, x2), (r1, r2) = rng.standard_normal((2, 3)), rng.standard_normal(2)
            c = rng.uniform(-5, 5)
            assert tn(x1 + x2, r1 + r2) <= tn(x1, r1) + tn(x2, r2) + 1e-12
            assert tn(c * x1, c * r1) == pytest.approx(abs(c) * tn(x1, r1))


class TestEpiDistance:
    def test_on_graph(self):
        assert epi.epi_distance(X_, [0.0], 0.0, epi.TauNorm(1.0)) == 0.0

    def test_below_kink(self):
        assert epi.epi_distance(ABS, [0.0], -1.0, epi.TauNorm(1.0)) == pytest.approx(1.0, abs=1e-9)

    def test_beside_kink(self):
        # (1, 0) lies below the graph; moving u costs exactly what it saves in f(u)
        d = epi.epi_distance(ABS, [1.0], 0.0, epi.TauNorm(1.0))
        assert d == pytest.approx(_grid_epi_distance(ABS, 1.0, 0.0, 1.0), abs=1e-6)
        assert d == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("tau", [0.5, 1.0, 3.0])
    def test_grid_oracle(self, tau):
        f = Quadratic([[1.0]], None, -0.5)
        rng = np.random.default_rng(1)
        for x, r in zip(rng.uniform(-1.5, 1.5, 15), rng.uniform(-1, 1, 15)):
            got = epi.epi_distance(f, [x], r, epi.TauNorm(tau))
            assert got == pytest.approx(_grid_epi_distance(f, x, r, tau), abs=1e-5)

    def test_zero_iff_in_epigraph(self):
        rng = np.random.default_rng(2)
        X = rng.uniform(-2, 2, (500, 1))
        R = rng.uniform(-2, 2, 500)
        D = epi.epi_distances(ABS, X, R, 1.0)
        inside = ABS.values(X) <= R
        assert np.all((D <= 1e-9) == inside)


class TestPhi:
    def test_examples(self):
        tn = epi.TauNorm(1.0)
        assert epi.phi(ABS, [0.0], -1.0, tn) == pytest.approx(2.0, abs=1e-9)
        assert epi.phi(X_, [-1.0], 0.5, tn) == pytest.approx(0.5)
        assert epi.phi(ABS, [0.0], 0.0, tn) == 0.0


class TestNormalCones:
    def test_abs_at_origin(self):
        K = epi.epi_frechet_normal_cone(ABS, [0.0], 0.0)
        assert K.contains([1.0, -1.0]) and K.contains([-1.0, -1.0]) and K.contains([0.0, -1.0])
        assert not K.contains([1.0, 0.0]) and not K.contains([0.0, 1.0])

    def test_step_at_graph(self):
        f = lemma25_function()
        K = epi.epi_frechet_normal_cone(f, [0.0], 0.0)
        rng = np.random.default_rng(3)
        for v in rng.standard_normal((400, 2)):
            assert K.contains(v) == (v[0] + v[1] >= 0 and v[1] <= 0)

    def test_step_above_graph(self):
        f = lemma25_function()
        cones = epi.epi_limiting_normal_cones(f, [0.0], 1.0)
        assert any(c.contains([0.0, -1.0]) for c in cones)

    def test_below_graph_raises(self):
        with pytest.raises(PointNotInEpigraph):
            epi.epi_frechet_normal_cone(ABS, [1.0], 0.0)

    def test_interior_is_zero(self):
        assert epi.epi_frechet_normal_cone(ABS, [0.0], 2.0).is_zero


class TestLemma25:
    def test_zero_cone_above_graph(self):
        rep = epi.check_lemma25(ABS, [0.0], 3.0)
        assert rep.frechet_holds and rep.limiting_holds and not rep.violated

    def test_smooth_equal_cones(self):
        f = Quadratic([[2.0, 0.0], [0.0, 1.0]], [1.0, 0.0])
        z = np.array([0.3, -0.7])
        assert not epi.check_lemma25(f, z, f.value(z)).violated

    def test_counterexample(self):
        rep = epi.check_lemma25(lemma25_function(), [0.0], 1.0)
        assert rep.frechet_holds and not rep.limiting_holds
        np.testing.assert_allclose(rep.witness, [0.0, -1.0])
        assert not rep.continuous and rep.notes

    @pytest.mark.parametrize("inst", lipschitz_battery(), ids=lambda i: i.name)
    def test_battery_inclusions(self, inst):
        fz = inst.f.value(inst.xbar)
        for r in (fz, fz + 0.1, fz + 1.0):
            rep = epi.check_lemma25(inst.f, inst.xbar, r)
            assert rep.frechet_holds and rep.limiting_holds


class TestInequality:
    def test_identity(self):
        rep = epi.check_inequality_411(X_, 1.0, [0.0], n_samples=2000)
        assert rep.holds and rep.n_samples == 2000

    def test_hoffman_instance(self):
        A, b = hoffman_battery(3, seed=4)[2]
        f = linear_max(A, b)
        H = hoffman_constant(A, b)
        assert epi.check_inequality_411(f, H * (1 + 1e-9), np.zeros(A.shape[1]), n_samples=3000).holds

    def test_remark_violations(self, remark_f):
        from ebcheck.batteries import remark31_point

        curve = [remark31_point(k) for k in np.geomspace(100, 10_000, 30)]
        rep = epi.check_inequality_411(remark_f, 5.0, [0.0, 0.0], delta0=0.05, n_samples=200, points=curve)
        assert rep.n_violations > 0 and rep.witness is not None

    def test_deterministic(self):
        a = epi.check_inequality_411(ABS, 1.0, [0.0], n_samples=500, seed=3)
        b = epi.check_inequality_411(ABS, 1.0, [0.0], n_samples=500, seed=3)
        assert a == b


@settings(max_examples=50, deadline=None)
@given(x=st.floats(-2, 2), r=st.floats(-2, 2), tau=st.floats(0.2, 5))
def test_epi_distance_bounds(x, r, tau):
    """The tau-distance lies between zero and the vertical gap, and never undercuts the grid minimum."""
    d = epi.epi_distance(ABS, [x], r, epi.TauNorm(tau))
    assert -1e-12 <= d <= max(abs(x) - r, 0.0) + 1e-12
    assert d >= _grid_epi_distance(ABS, x, r, tau, n=20001) - 1e-3
