"""Named regression instances shared by the command line and the test suite."""
from dataclasses import dataclass

import numpy as np

from . import geometry as geo
from .epigraph import StepFunction1D
from .functions import Affine, ComposeConvexSmooth, DistTo, Max, NormScaled, Quadratic, SmoothMap
from .geometry import ConvexBody
from .subdifferential import arc_points, inscribed_radius

# ---------------------------------------------------------------------------
# the two-set example without a local error bound


def remark31_sets():
    """``A1`` (a quadrant plus a ray) and ``A2`` (a lens of two unit disks)."""
    A1 = geo.Union([
        geo.HalfspaceSystem([[1.0, 0.0], [0.0, -1.0]], [0.0, 0.0]),
        geo.HalfspaceSystem([[1.0, 1.0], [-1.0, -1.0], [-1.0, 0.0]], [0.0, 0.0, 0.0]),
    ])
    A2 = geo.Intersection([
        geo.HalfspaceSystem([[-1.0, 0.0], [0.0, -1.0]], [0.0, 0.0]),
        geo.Ball([1.0, 0.0], 1.0),
        geo.Ball([0.0, 1.0], 1.0),
    ])
    return A1, A2


def remark31_function():
    A1, A2 = remark31_sets()
    return Max([DistTo(A1), DistTo(A2)])


def remark31_point(k):
    """The approach point ``(1/k, sqrt(2/k - 1/k^2))``, which lies on the boundary of ``A2``."""
    return np.array([1.0 / k, np.sqrt(2.0 / k - 1.0 / k**2)])


def remark31_lower_body(k_arc=64):
    """Convex hull of the stated lower estimate of the limiting subdifferential at 0.

    The estimate is the union of ``[0,1] x {0}``, ``{0} x [-1,0]``, the unit
    vector ``(1,1)/sqrt(2)`` and the third-quadrant quarter disk.
    """
    e = np.array([[np.sqrt(0.5), np.sqrt(0.5)]])
    pts = np.vstack([[[0.0, 0.0], [1.0, 0.0], [0.0, -1.0]], e, arc_points(np.pi, 1.5 * np.pi, k_arc)])
    return ConvexBody(pts)


def remark31_epsilon():
    """Radius of the ball at 0 inside the stated lower estimate (``sin(pi/8)``).

    Exact because the binding facet joins ``e`` and ``(-1, 0)``, both vertices.
    """
    return inscribed_radius(remark31_lower_body())


# ---------------------------------------------------------------------------
# Lipschitz battery


@dataclass
class Instance:
    name: str
    f: object
    xbar: np.ndarray


def lipschitz_battery():
    """Ten locally Lipschitz functions with a reference solution ``xbar``."""
    _, A2 = remark31_sets()
    e1, e2 = np.eye(2)
    items = [
        ("x", Affine([1.0]), [0.0]),
        ("abs", Max([Affine([1.0]), Affine([-1.0])]), [0.0]),
        ("2x", Affine([2.0]), [0.0]),
        ("max(x1,x2)", Max([Affine(e1), Affine(e2)]), [0.0, 0.0]),
        ("max(x1+x2,-x1)", Max([Affine([1.0, 1.0]), Affine([-1.0, 0.0])]), [0.0, 0.0]),
        ("2|x|", NormScaled(2.0, 2), [0.0, 0.0]),
        ("dist(ball)", DistTo(geo.Ball([1.0, 0.0], 1.0)), [0.0, 0.0]),
        ("dist(A2)", DistTo(A2), [0.0, 0.0]),
        ("|x|^2-1", Quadratic(np.eye(2), None, -1.0), [1.0, 0.0]),
        ("x^2", Quadratic([[1.0]]), [0.0]),
    ]
    return [Instance(n, f, np.asarray(x, dtype=float)) for n, f, x in items]


def hoffman_battery(n_instances=20, seed=0, max_n=3, max_m=5):
    """Seeded homogeneous systems ``A x <= 0`` as ``(A, b)`` pairs."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n_instances):
        n = int(rng.integers(1, max_n + 1))
        m = int(rng.integers(1, max_m + 1))
        out.append((rng.standard_normal((m, n)), np.zeros(m)))
    return out


def linear_max(A, b):
    """``x -> max_i (a_i.x - b_i)``."""
    return Max([Affine(a, -bi) for a, bi in zip(np.atleast_2d(A), b)])


# ---------------------------------------------------------------------------
# composite battery


@dataclass
class CompositeInstance:
    name: str
    g: object
    psi: SmoothMap
    xbar: np.ndarray

    @property
    def f(self):
        return ComposeConvexSmooth(self.g, self.psi)


def _bowl(n, i, s=1.0):
    """``x_i + s |x|^2``, a quadratic with isotropic Hessian."""
    c = np.zeros(n)
    c[i] = 1.0
    return Quadratic(s * np.eye(n), c, 0.0)


def composite_battery():
    """Ten polyhedral ``g`` composed with surjective affine or quadratic ``psi``."""
    e = np.eye(3)
    max2 = Max([Affine([1.0, 0.0]), Affine([0.0, 1.0])])
    items = [
        ("max2-id", max2, SmoothMap.identity(2), [0, 0]),
        ("max2-2x", max2, SmoothMap.linear(2 * np.eye(2)), [0, 0]),
        ("y-id", Affine([1.0]), SmoothMap.identity(1), [0]),
        ("y-2x", Affine([1.0]), SmoothMap.linear([[2.0]]), [0]),
        ("max2-shear", max2, SmoothMap.linear([[1.0, 1.0], [0.0, 1.0]]), [0, 0]),
        ("wedge-affine", Max([Affine([1.0, 1.0]), Affine([-1.0, 0.0])]),
         SmoothMap.linear([[1.0, 0.0], [1.0, 1.0]]), [0, 0]),
        ("y-bowl", Affine([1.0]), SmoothMap([_bowl(1, 0)]), [0]),
        ("half-bowl", Affine([1.0, 0.0]), SmoothMap([_bowl(2, 0), Affine([0.0, 1.0])]), [0, 0]),
        ("max2-bowls", max2, SmoothMap([_bowl(2, 0, 0.5), _bowl(2, 1, 0.5)]), [0, 0]),
        ("max3-bowl", Max([Affine(r) for r in e]),
         SmoothMap([_bowl(3, 0), Affine(e[1]), Affine(e[2])]), [0, 0, 0]),
    ]
    return [CompositeInstance(n, g, psi, np.asarray(x, dtype=float)) for n, g, psi, x in items]


def lemma25_function():
    """``x`` for ``x <= 0`` and ``1`` for ``x > 0``."""
    return StepFunction1D(1.0, 0.0, 1.0)


def boundary_counterexample():
    """``-1`` for ``y <= 0`` and ``1`` for ``y > 0``: its solution set has a boundary point with ``g < 0``."""
    return StepFunction1D(0.0, -1.0, 1.0)
