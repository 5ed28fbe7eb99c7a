import numpy as np
import pytest

from ebcheck import composite as comp
from ebcheck import errorbound as eb
from ebcheck.batteries import boundary_counterexample, composite_battery, lipschitz_battery
from ebcheck.exceptions import SurjectivityFailure
from ebcheck.functions import Affine, ComposeConvexSmooth, Max, Quadratic, SmoothMap
from ebcheck.subdifferential import subdiff_membership_oracle
from ebcheck.validation import unit_ball_samples

MAX2 = Max([Affine([1.0, 0.0]), Affine([0.0, 1.0])])
ROT = SmoothMap.linear([[1.0, 1.0], [1.0, -1.0]])
BENT = SmoothMap([Quadratic(0.5 * np.eye(2), [1.0, 0.0]), Quadratic([[0.0, 0.25], [0.25, 0.0]], [0.0, 1.0])])


class TestSurjectivity:
    def test_identity(self):
        assert comp.surjectivity_check(SmoothMap.identity(2), [3.0, 1.0]) == (True, pytest.approx(1.0))

    def test_rank_deficient(self):
        ok, smin = comp.surjectivity_check(SmoothMap.linear([[1.0, 0.0], [1.0, 0.0]]), [0.0, 0.0])
        assert not ok and smin == pytest.approx(0.0, abs=1e-12)

    def test_rotation(self):
        ok, smin = comp.surjectivity_check(ROT, [0.0, 0.0])
        assert ok and smin == pytest.approx(np.sqrt(2.0))


class TestBoundaryCondition:
    def test_polyhedral(self):
        assert comp.boundary_condition_check(MAX2)[0]

    def test_constant(self):
        ok, w = comp.boundary_condition_check(Affine([0.0, 0.0], -1.0))
        assert ok and w is None

    def test_flat_patch_rejected(self):
        ok, w = comp.boundary_condition_check(boundary_counterexample())
        assert not ok
        np.testing.assert_allclose(w, [0.0], atol=1e-9)


class TestMetricRegularity:
    @pytest.mark.parametrize("psi, kappa", [
        (SmoothMap.identity(2), 1.0),
        (SmoothMap.linear(2 * np.eye(2)), 0.5),
        (ROT, 1 / np.sqrt(2.0)),
    ])
    def test_affine_exact(self, psi, kappa):
        mr = comp.metric_regularity_kappa(psi, np.zeros(2))
        assert mr.exact and abs(mr.kappa - kappa) <= 1e-9

    def test_nonlinear_validates_on_fresh_samples(self):
        xbar = np.zeros(2)
        mr = comp.metric_regularity_kappa(BENT, xbar)
        assert not mr.exact and mr.kappa == pytest.approx(1.1 * mr.raw_max)
        rng = np.random.default_rng(99)
        X = xbar + unit_ball_samples(rng, 10_000, 2, 0.1)
        Y = BENT.value(xbar) + unit_ball_samples(rng, 10_000, 2, 0.1)
        violations = 0
        for x, y in zip(X, Y):
            gap = np.linalg.norm(y - BENT.value(x))
            d = comp._preimage_distance(BENT, x, y)
            violations += d > mr.kappa * gap + 1e-6
        assert violations == 0

    def test_not_surjective(self):
        with pytest.raises(SurjectivityFailure):
            comp.metric_regularity_kappa(SmoothMap.linear([[1.0, 1.0], [2.0, 2.0]]), np.zeros(2))


class TestChainRule:
    def test_identity(self):
        s = comp.chain_subdiff(comp.CompositeProblem(MAX2, SmoothMap.identity(2), [0, 0]), [0.0, 0.0])
        assert sorted(map(tuple, s.vertices)) == [(0.0, 1.0), (1.0, 0.0)]

    def test_doubled(self):
        s = comp.chain_subdiff(comp.CompositeProblem(MAX2, SmoothMap.linear(2 * np.eye(2)), [0, 0]), [0.0, 0.0])
        assert sorted(map(tuple, s.vertices)) == [(0.0, 2.0), (2.0, 0.0)]

    def test_wide_map(self):
        s = comp.chain_subdiff(comp.CompositeProblem(Affine([1.0]), SmoothMap([Affine([1.0, 1.0])]), [0, 0]), [0, 0])
        np.testing.assert_allclose(s.vertices, [[1.0, 1.0]])

    def test_not_surjective(self):
        p = comp.CompositeProblem(MAX2, SmoothMap.linear([[1.0], [1.0]]), [0.0])
        with pytest.raises(SurjectivityFailure):
            comp.chain_subdiff(p, [0.0])

    @pytest.mark.parametrize("inst", composite_battery(), ids=lambda i: i.name)
    def test_battery_vertices_pass_oracle(self, inst):
        p = comp.CompositeProblem(inst.g, inst.psi, inst.xbar)
        rng = np.random.default_rng(4)
        for x in [inst.xbar, *(inst.xbar + 0.1 * rng.standard_normal((2, inst.psi.dim)))]:
            for v in comp.chain_subdiff(p, x).vertices:
                assert subdiff_membership_oracle(p.f, x, v, eta=1e-6)

    def test_normal_cone(self):
        p = comp.CompositeProblem(MAX2, ROT, [0, 0])
        K = comp.composite_normal_cone(p, [0.0, 0.0])
        assert K.contains([1.0, 1.0]) and K.contains([1.0, -1.0]) and not K.contains([-1.0, 0.0])


INVARIANCE_G = [i for i in lipschitz_battery() if i.f.dim == 2 and i.f.convex and i.name != "dist(ball)"
                and i.name != "dist(A2)"]


@pytest.mark.parametrize("inst", INVARIANCE_G, ids=lambda i: i.name)
@pytest.mark.parametrize("M", [[[1.0, 1.0], [1.0, -1.0]], [[2.0, 0.5], [0.0, 0.5]]])
def test_verdict_invariant_under_invertible_affine_maps(inst, M):
    M = np.array(M)
    offset = inst.xbar - M @ np.zeros(2)
    psi = SmoothMap.linear(M, offset)
    q = eb.ModulusQuery(np.zeros(2), samples_per_level=1024)
    base = eb.estimate_modulus(inst.f, eb.ModulusQuery(inst.xbar, samples_per_level=1024))
    composed = eb.estimate_modulus(ComposeConvexSmooth(inst.f, psi), q)
    assert composed.verdict == base.verdict
    s = np.linalg.svd(M, compute_uv=False)
    assert composed.tau_hat <= base.tau_hat / s.min() * 1.05


def test_square_invariance():
    q = eb.ModulusQuery(np.zeros(1), samples_per_level=512)
    f = ComposeConvexSmooth(Quadratic([[1.0]]), SmoothMap.linear([[3.0]]))
    assert eb.estimate_modulus(f, q).verdict == eb.FAILS
