import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from ebcheck import errorbound as eb
from ebcheck.batteries import hoffman_battery, linear_max, lipschitz_battery, remark31_point
from ebcheck.exceptions import InfeasibleSystem, PointInSolutionSet, PointNotInSolutionSet, SizeLimitExceeded
from ebcheck.functions import Affine, DistTo, Max, Quadratic
from ebcheck.geometry import Ball, HalfspaceSystem

X_ = Affine([1.0])


def _sampled_hoffman(A, n=200_000, seed=0):
    """Brute-force lower estimate of the Hoffman constant of A x <= 0."""
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, A.shape[1]))
    f = linear_max(A, np.zeros(A.shape[0]))
    fx = f.values(X)
    out = fx > 1e-9
    d = HalfspaceSystem(A, np.zeros(A.shape[0])).distances(X[out])
    return float(np.max(d / fx[out]))


class TestRatio:
    def test_examples(self, remark_f):
        assert eb.ratio(X_, [5.0]) == pytest.approx(1.0)
        assert eb.ratio(Affine([2.0]), [1.0]) == pytest.approx(0.5)
        for k in (4, 16, 64, 100):
            assert eb.ratio(remark_f, remark31_point(k)) == pytest.approx(np.sqrt(2 * k), abs=1e-6)

    def test_inside_raises(self):
        with pytest.raises(PointInSolutionSet):
            eb.ratio(X_, [-1.0])


class TestEstimateModulus:
    def test_identity(self):
        est = eb.estimate_modulus(X_, eb.ModulusQuery(np.zeros(1)))
        assert est.verdict == eb.HOLDS and est.tau_hat == pytest.approx(1.0, abs=1e-3)
        assert len(est.per_level) == 8
        assert [lv.delta for lv in est.per_level] == [0.5 * 2.0**-j for j in range(8)]

    def test_remark_fails_with_growing_sups(self, remark_f):
        est = eb.estimate_modulus(remark_f, eb.ModulusQuery(np.zeros(2), samples_per_level=1024))
        assert est.verdict == eb.FAILS and np.isinf(est.tau_hat)
        # along the approach curve the ratio is 2 / |x|, so the level sups grow like 1 / delta
        deltas = np.array([lv.delta for lv in est.per_level])
        slope = np.polyfit(np.log(deltas), np.log(est.sups), 1)[0]
        assert slope == pytest.approx(-1.0, abs=0.3)
        assert len(est.witnesses) == len(est.per_level)

    def test_quadratic_fails(self):
        est = eb.estimate_modulus(Quadratic([[1.0]]), eb.ModulusQuery(np.zeros(1), samples_per_level=512))
        assert est.verdict == eb.FAILS

    def test_wedge_matches_hoffman(self):
        f = Max([Affine([1.0, 1.0]), Affine([-1.0, 0.0])])
        est = eb.estimate_modulus(f, eb.ModulusQuery(np.zeros(2)))
        H = eb.hoffman_constant([[1.0, 1.0], [-1.0, 0.0]], [0.0, 0.0])
        assert abs(est.tau_hat - H) <= 0.1 * H

    def test_distance_functions_have_unit_modulus(self, remark_sets):
        for S in (Ball([1.0, 0.0], 1.0), remark_sets[1], HalfspaceSystem([[1.0, 2.0]], [0.0])):
            est = eb.estimate_modulus(DistTo(S), eb.ModulusQuery(np.zeros(2), samples_per_level=1024))
            assert est.verdict == eb.HOLDS and est.tau_hat == pytest.approx(1.0, abs=1e-3)

    def test_interior_point_flags_empty_levels(self):
        f = Affine([1.0], -10.0)
        est = eb.estimate_modulus(f, eb.ModulusQuery(np.zeros(1), levels=3, samples_per_level=64))
        assert any("EmptySampleLevel" in fl for fl in est.flags)

    def test_xbar_outside_raises(self):
        with pytest.raises(PointNotInSolutionSet):
            eb.estimate_modulus(X_, eb.ModulusQuery(np.ones(1)))

    def test_deterministic(self):
        f = Max([Affine([1.0, 1.0]), Affine([-1.0, 0.0])])
        q = eb.ModulusQuery(np.zeros(2), samples_per_level=256, seed=4)
        assert eb.estimate_modulus(f, q).sups.tolist() == eb.estimate_modulus(f, q).sups.tolist()

    @pytest.mark.parametrize("inst", [i for i in lipschitz_battery() if i.name != "x^2"], ids=lambda i: i.name)
    def test_posterior_check(self, inst):
        est = eb.estimate_modulus(inst.f, eb.ModulusQuery(inst.xbar, samples_per_level=1024))
        assert est.verdict == eb.HOLDS
        assert eb.posterior_violations(inst.f, est, inst.xbar, n_samples=10_000) == 0


@pytest.mark.parametrize("c", [0.5, 2.0, 10.0])
def test_scaling(c):
    A = np.array([[1.0, 1.0], [-1.0, 0.0]])
    q = eb.ModulusQuery(np.zeros(2), samples_per_level=512)
    base = eb.estimate_modulus(linear_max(A, [0, 0]), q).tau_hat
    scaled = eb.estimate_modulus(linear_max(c * A, [0, 0]), q).tau_hat
    assert scaled == pytest.approx(base / c, abs=1e-6)


class TestHoffman:
    def test_one_dimensional(self):
        assert eb.hoffman_constant([[1.0]], [0.0]) == pytest.approx(1.0)

    def test_orthant(self):
        # the residual max(x1, x2)_+ at (t, t) is t while the distance is sqrt(2) t
        assert eb.hoffman_constant(np.eye(2), [0.0, 0.0]) == pytest.approx(np.sqrt(2.0))
        assert _sampled_hoffman(np.eye(2)) == pytest.approx(np.sqrt(2.0), rel=1e-3)

    def test_nearly_parallel_rows(self):
        A = np.array([[1.0, 0.0], [1.0, 0.1]])
        H = eb.hoffman_constant(A, [0.0, 0.0])
        assert H == pytest.approx(1.0)
        assert _sampled_hoffman(A) <= H + 1e-9

    def test_random_against_sampling(self):
        for A, b in hoffman_battery(8, seed=21):
            H = eb.hoffman_constant(A, b)
            s = _sampled_hoffman(A, n=50_000)
            assert s <= H * (1 + 1e-9)
            assert s >= 0.9 * H

    def test_infeasible(self):
        with pytest.raises(InfeasibleSystem):
            eb.hoffman_constant([[1.0], [-1.0]], [-1.0, -1.0])

    def test_size_limit(self):
        with pytest.raises(SizeLimitExceeded):
            eb.hoffman_constant(np.ones((7, 2)), np.zeros(7))

    def test_offset_system(self):
        # shifting b moves the polyhedron but keeps the realized active sets here
        A = np.array([[1.0, 1.0], [-1.0, 0.0]])
        assert eb.hoffman_constant(A, [1.0, 2.0]) == pytest.approx(eb.hoffman_constant(A, [0.0, 0.0]))


class TestEstimator:
    def test_fit_predict(self):
        est = eb.ModulusEstimator(samples_per_level=256).fit(Affine([2.0]), np.zeros(1))
        assert est.verdict_ == eb.HOLDS and est.tau_hat_ == pytest.approx(0.5, abs=1e-3)
        np.testing.assert_allclose(est.predict([[1.0], [-1.0]]), [est.tau_hat_ * 2.0, 0.0])

    def test_unfitted(self):
        with pytest.raises(NotFittedError):
            eb.ModulusEstimator().predict([[1.0]])

    def test_params_round_trip(self):
        est = eb.ModulusEstimator(levels=5, seed=3)
        assert clone(est).get_params() == est.get_params()


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-3, 3, allow_nan=False), min_size=2, max_size=2).filter(lambda a: np.linalg.norm(a) > 0.1))
def test_single_halfspace_modulus(a):
    """For a single row the modulus is 1 / |a|."""
    a = np.array(a)
    est = eb.estimate_modulus(Affine(a), eb.ModulusQuery(np.zeros(2), levels=4, samples_per_level=256))
    assert est.tau_hat == pytest.approx(1.0 / np.linalg.norm(a), rel=1e-6)
    assert eb.hoffman_constant([a], [0.0]) == pytest.approx(1.0 / np.linalg.norm(a))
