import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ebcheck import subdifferential as sd
from ebcheck.batteries import composite_battery, lipschitz_battery
from ebcheck.composite import CompositeProblem, chain_subdiff
from ebcheck.functions import Affine, ComposeConvexSmooth, DistTo, Max, Min, SmoothMap
from ebcheck.geometry import ConvexBody

ABS = Max([Affine([1.0]), Affine([-1.0])])
MAX2 = Max([Affine([1.0, 0.0]), Affine([0.0, 1.0])])


class TestFrechet:
    def test_abs_at_kink(self):
        s = sd.frechet_subdiff(ABS, [0.0])
        assert sorted(s.vertices.ravel().tolist()) == [-1.0, 1.0]
        assert s.singular.is_zero

    def test_distance_to_lens_at_vertex(self, remark_sets):
        _, A2 = remark_sets
        s = sd.frechet_subdiff(DistTo(A2), [0.0, 0.0])
        # quarter disk in the third quadrant, polygonal to within the sagitta
        assert s.contains([-1.0, 0.0]) and s.contains([0.0, -1.0]) and s.contains([-0.7, -0.7])
        assert not s.contains([0.1, -0.5]) and not s.contains([-0.8, -0.8])
        assert len(s.vertices) >= 64

    def test_composite_identity(self):
        s = sd.frechet_subdiff(ComposeConvexSmooth(MAX2, SmoothMap.identity(2)), [0.0, 0.0])
        assert s.contains([0.5, 0.5]) and s.contains([1.0, 0.0]) and not s.contains([0.0, 0.0])

    def test_distance_outside_unique_projection(self):
        from ebcheck.geometry import Ball

        s = sd.frechet_subdiff(DistTo(Ball([0.0, 0.0], 1.0)), [0.0, 3.0])
        np.testing.assert_allclose(s.vertices, [[0.0, 1.0]])


class TestLimiting:
    def test_remark_first_set(self, remark_sets):
        A1, _ = remark_sets
        s = sd.limiting_subdiff(DistTo(A1), [0.0, 0.0])
        for t in np.linspace(0, 1, 11):
            assert s.contains([t, 0.0]) and s.contains([0.0, -t])
        assert s.contains(np.array([1.0, 1.0]) / np.sqrt(2.0))

    def test_negative_abs_is_two_points(self):
        s = sd.limiting_subdiff(Min([Affine([1.0]), Affine([-1.0])]), [0.0])
        assert s.nonconvex and len(s.pieces) == 2
        assert s.contains([1.0]) and s.contains([-1.0]) and not s.contains([0.0])
        assert sd.frechet_subdiff(Min([Affine([1.0]), Affine([-1.0])]), [0.0]).body.is_empty


class TestOracle:
    def test_abs(self):
        assert sd.subdiff_membership_oracle(ABS, [0.0], [0.5], eta=1e-6)
        assert not sd.subdiff_membership_oracle(ABS, [0.0], [1.5], eta=1e-6)

    def test_remark(self, remark_f):
        assert sd.subdiff_membership_oracle(remark_f, [0.0, 0.0], [-0.3, -0.3], eta=1e-6)


class TestScaledUnionHull:
    def test_interval(self):
        h = sd.scaled_union_hull(ConvexBody([[-1.0], [1.0]]), 2.0)
        assert sorted(h.vertices.ravel().tolist()) == [-2.0, 0.0, 2.0] or sorted(h.vertices.ravel()) == [-2.0, 2.0]
        assert h.contains([1.9]) and not h.contains([2.1])

    def test_segment(self):
        h = sd.scaled_union_hull(ConvexBody([[1.0, 0.0]]), 3.0)
        assert h.contains([1.5, 0.0]) and h.contains([0.0, 0.0]) and not h.contains([3.5, 0.0])

    def test_triangle_against_bisection(self):
        body = ConvexBody([[1.0, 0.0], [0.0, 1.0]])
        rng = np.random.default_rng(0)
        for tau, vs in ((1.0, rng.uniform(-0.5, 1.5, (1000, 2))), (2.5, rng.uniform(-1, 3, (1000, 2)))):
            hull = sd.scaled_union_hull(body, tau)
            for v in vs:
                direct = _in_star_hull(body, tau, v)
                if direct is None:
                    continue
                assert hull.contains(v) == direct


def _in_star_hull(body, tau, v, tol=1e-6):
    """Is ``v`` in ``lam * body`` for some ``lam`` in [0, tau]?

    ``lam -> d(v, lam * body)`` is convex, so a ternary search finds its minimum.
    Returns None when the answer sits within the numerical band of the boundary.
    """
    def gap(lam):
        return body.distance(v / lam) * lam if lam > 0 else float(np.linalg.norm(v))

    lo, hi = 0.0, tau
    for _ in range(60):
        m1, m2 = lo + (hi - lo) / 3, hi - (hi - lo) / 3
        if gap(m1) <= gap(m2):
            hi = m2
        else:
            lo = m1
    best = min(gap(lo), gap(tau), gap(0.0))
    if abs(best - tol) < 1e-5:
        return None
    return bool(best <= tol)


def test_inscribed_radius():
    square = ConvexBody([[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]])
    assert sd.inscribed_radius(square) == pytest.approx(1.0)
    assert sd.inscribed_radius(ConvexBody([[1.0, 0.0], [-1.0, 0.0]])) == 0.0
    assert sd.inscribed_radius(ConvexBody([[1.0, 1.0], [2.0, 1.0], [1.0, 2.0]])) == 0.0


def test_remark_epsilon_value():
    from ebcheck.batteries import remark31_epsilon

    assert remark31_epsilon() == pytest.approx(np.sin(np.pi / 8), abs=1e-12)


@pytest.mark.parametrize("inst", lipschitz_battery(), ids=lambda i: i.name)
def test_battery_frechet_in_limiting_and_oracle(inst):
    rng = np.random.default_rng(11)
    for x in [inst.xbar, *(inst.xbar + 0.3 * rng.standard_normal((3, inst.f.dim)))]:
        fr = sd.frechet_subdiff(inst.f, x)
        lim = sd.limiting_subdiff(inst.f, x)
        assert sd.singular_subdiff(inst.f, x).is_zero
        for v in fr.vertices:
            assert lim.contains(v)
            assert sd.subdiff_membership_oracle(inst.f, x, v, eta=1e-6)


@pytest.mark.parametrize("inst", [i for i in composite_battery() if i.psi.is_affine], ids=lambda i: i.name)
def test_chain_rule_matches_flattened_max(inst):
    """For affine psi the composite is itself a max of affine pieces; both routes must agree."""
    chain = chain_subdiff(CompositeProblem(inst.g, inst.psi, inst.xbar), inst.xbar)
    M, off = inst.psi.affine_parts()
    pieces = inst.g.pieces if isinstance(inst.g, Max) else [inst.g]
    flat = Max([Affine(M.T @ p.a, p.a @ off + p.b) for p in pieces])
    direct = sd.frechet_subdiff(flat, inst.xbar)
    for v in chain.vertices:
        assert direct.body.distance(v) <= 1e-6
    for v in direct.vertices:
        assert chain.body.distance(v) <= 1e-6


@settings(max_examples=40, deadline=None)
@given(
    w=st.floats(0.1, 5.0),
    x=st.lists(st.floats(-2, 2, allow_nan=False), min_size=2, max_size=2),
)
def test_norm_subgradients_pass_oracle(w, x):
    from ebcheck.functions import NormScaled

    f = NormScaled(w, 2)
    for v in sd.frechet_subdiff(f, x).vertices[:8]:
        assert sd.subdiff_membership_oracle(f, x, v, eta=1e-6, n_samples=240)
