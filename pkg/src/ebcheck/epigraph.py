"""Epigraph geometry: the tau-norm, epigraph distances and normal cones.

Also hosts :class:`StepFunction1D`, a discontinuous lower semicontinuous
function whose epigraph cones are known in closed form.  It is the standard
example showing that the limiting normal-cone inclusion for epigraphs needs
continuity.
"""
from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from ._config import resolve
from .exceptions import PointNotInEpigraph
from .geometry import PolyhedralCone
from .subdifferential import frechet_subdiff, limiting_subdiff
from .validation import check_points, check_positive, check_vector, derived_rng, unit_ball_samples


@dataclass(frozen=True)
class TauNorm:
    """``|(x, r)|_tau = |x| / tau + |r|``."""

    tau: float

    def __post_init__(self):
        check_positive(self.tau, "tau")

    def __call__(self, x, r):
        return float(np.linalg.norm(np.atleast_1d(x)) / self.tau + abs(r))


def tau_norm(tn, x, r):
    return tn(x, r)


# ---------------------------------------------------------------------------
# the discontinuous builtin


class StepFunction1D:
    """``f(x) = slope * x + left_value`` for ``x <= 0`` and ``right_value`` for ``x > 0``.

    Requires ``right_value > left_value`` so that ``f`` is lower
    semicontinuous with a jump at 0.  The defaults give the function that is
    ``x`` on the left and ``1`` on the right.
    """

    dim = 1
    continuous = False
    convex = False

    def __init__(self, slope=1.0, left_value=0.0, right_value=1.0):
        if not right_value > left_value:
            raise ValueError("right_value must exceed left_value for lower semicontinuity")
        self.slope = float(slope)
        self.left_value = float(left_value)
        self.right_value = float(right_value)

    def values(self, X):
        x = check_points(X, 1)[:, 0]
        return np.where(x > 0, self.right_value, self.slope * x + self.left_value)

    def value(self, x):
        return float(self.values(np.atleast_1d(np.asarray(x, dtype=float)).reshape(1, 1))[0])

    __call__ = value

    def solution_set(self):
        if self.right_value <= 0:
            raise ValueError("solution set of a step with nonpositive right value is not modelled")
        rows, rhs = [[1.0]], [0.0]
        if self.slope != 0.0:
            rows.append([self.slope])
            rhs.append(-self.left_value)
        elif self.left_value > 0:
            rows.append([0.0])
            rhs.append(-1.0)
        return geo.HalfspaceSystem(rows, rhs)

    def _left_cone(self):
        return PolyhedralCone([[1.0, 0.0], [self.slope, -1.0]], 2)

    def epi_frechet_normal_cone(self, z, r, tol=None):
        tol = resolve(tol)
        z = float(np.ravel(z)[0])
        fz = self.value(z)
        if r < fz - tol.membership:
            raise PointNotInEpigraph(f"({z}, {r}) lies below the graph")
        at_graph = abs(r - fz) <= tol.membership
        if abs(z) > tol.active:
            grad = self.slope if z < 0 else 0.0
            return PolyhedralCone([[grad, -1.0]], 2) if at_graph else PolyhedralCone.zero(2)
        if at_graph:
            return self._left_cone()
        if r < self.right_value - tol.membership:
            return PolyhedralCone([[1.0, 0.0]], 2)
        # at the corner (0, right_value) the two local pieces have opposite
        # tangent halfplanes, and above it the point is interior
        return PolyhedralCone.zero(2)

    def epi_limiting_normal_cones(self, z, r, tol=None):
        """Limiting normal cone as a list of convex cones whose union it is."""
        tol = resolve(tol)
        z = float(np.ravel(z)[0])
        if abs(z) <= tol.active and abs(r - self.right_value) <= tol.membership:
            return [PolyhedralCone([[1.0, 0.0]], 2), PolyhedralCone([[0.0, -1.0]], 2)]
        return [self.epi_frechet_normal_cone(z, r, tol)]

    def __repr__(self):
        return f"StepFunction1D(slope={self.slope}, left={self.left_value}, right={self.right_value})"


# ---------------------------------------------------------------------------
# epigraph distance


def _pattern_directions(n, rng, n_random=4):
    eye = np.eye(n)
    dirs = [eye, -eye]
    if n <= 3:
        signs = np.array(np.meshgrid(*[[-1.0, 1.0]] * n)).reshape(n, -1).T
        dirs.append(signs / np.sqrt(n))
    R = rng.standard_normal((n_random, n))
    dirs.append(R / np.linalg.norm(R, axis=1, keepdims=True))
    return np.vstack(dirs)


def epi_distances(f, X, R, tau, n_iter=60, seed=0):
    """Batched ``d_tau((x, r), epi f) = min_u |u - x| / tau + (f(u) - r)_+``.

    Each point is refined by a pattern search started at ``u = x`` inside the
    ball of radius ``tau * (f(x) - r)_+``, which contains every minimizer.
    The search only accepts improvements, so the result never undercuts the
    true value by more than rounding.
    """
    X = check_points(X, f.dim)
    R = np.asarray(R, dtype=float).reshape(-1)
    excess = np.maximum(f.values(X) - R, 0.0)
    best = excess.copy()
    U = X.copy()
    step = 0.5 * tau * excess
    active = excess > 0
    D = _pattern_directions(f.dim, derived_rng(seed, 3))
    for _ in range(n_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        cand = U[idx, None, :] + step[idx, None, None] * D[None, :, :]
        flat = cand.reshape(-1, f.dim)
        fv = f.values(flat).reshape(idx.size, D.shape[0])
        obj = np.linalg.norm(cand - X[idx, None, :], axis=2) / tau + np.maximum(fv - R[idx, None], 0.0)
        j = np.argmin(obj, axis=1)
        val = obj[np.arange(idx.size), j]
        improved = val < best[idx] - 1e-15
        upd = idx[improved]
        U[upd] = cand[improved, j[improved]]
        best[upd] = val[improved]
        shrink = idx[~improved]
        step[shrink] *= 0.5
        active[idx] = step[idx] > 1e-10 * (1.0 + tau * excess[idx])
    return best


def epi_distance(f, x, r, tn):
    """Distance from ``(x, r)`` to ``epi f`` in the tau-norm ``tn``."""
    x = check_vector(x, f.dim)
    return float(epi_distances(f, x[None, :], [r], tn.tau)[0])


def phi(f, x, r, tn):
    """``d_tau((x, r), epi f) + |r|``."""
    return epi_distance(f, x, r, tn) + abs(r)


# ---------------------------------------------------------------------------
# epigraph normal cones


def _lift(body_vertices, dim):
    if len(body_vertices) == 0:
        return PolyhedralCone.zero(dim + 1)
    V = np.atleast_2d(body_vertices)
    return PolyhedralCone(np.column_stack([V, -np.ones(V.shape[0])]), dim + 1)


def _check_in_epi(f, z, r, tol):
    fz = f.value(z)
    if r < fz - tol.membership * (1.0 + abs(fz)):
        raise PointNotInEpigraph(f"r={r} is below f(z)={fz}")
    return fz


def epi_frechet_normal_cone(f, z, r, tol=None):
    """Fréchet normal cone to ``epi f`` at ``(z, r)`` (a cone in R^{n+1})."""
    tol = resolve(tol)
    if isinstance(f, StepFunction1D):
        return f.epi_frechet_normal_cone(z, r, tol)
    z = check_vector(z, f.dim, "z")
    fz = _check_in_epi(f, z, r, tol)
    if r > fz + tol.membership * (1.0 + abs(fz)):
        return PolyhedralCone.zero(f.dim + 1)
    return _lift(frechet_subdiff(f, z, tol).vertices, f.dim)


def epi_limiting_normal_cones(f, z, r, tol=None):
    """Limiting normal cone to ``epi f`` as a union of convex cones."""
    tol = resolve(tol)
    if isinstance(f, StepFunction1D):
        return f.epi_limiting_normal_cones(z, r, tol)
    z = check_vector(z, f.dim, "z")
    fz = _check_in_epi(f, z, r, tol)
    if r > fz + tol.membership * (1.0 + abs(fz)):
        return [PolyhedralCone.zero(f.dim + 1)]
    sub = limiting_subdiff(f, z, tol)
    bodies = sub.pieces if sub.nonconvex else [sub.body]
    return [_lift(b.vertices, f.dim) for b in bodies]


@dataclass
class Lemma25Report:
    frechet_holds: bool
    limiting_holds: bool
    continuous: bool
    witness: np.ndarray = None
    notes: list = field(default_factory=list)

    @property
    def violated(self):
        return not (self.frechet_holds and self.limiting_holds)


def _first_outside(cones, targets, tol):
    for cone in cones:
        for gvec in cone.generators:
            if not any(t.contains(gvec, tol) for t in targets):
                return gvec
    return None


def check_lemma25(f, z, r, tol=None):
    """Check the epigraph normal-cone inclusions from ``(z, r)`` down to ``(z, f(z))``.

    The Fréchet inclusion is always checked.  The limiting one is checked as
    well; for a discontinuous ``f`` a failure is expected and the report
    carries the offending generator.
    """
    tol = resolve(tol)
    fz = f.value(z)
    continuous = getattr(f, "continuous", True)
    lhs = epi_frechet_normal_cone(f, z, r, tol)
    rhs = epi_frechet_normal_cone(f, z, fz, tol)
    w_frechet = _first_outside([lhs], [rhs], tol)
    w_lim = _first_outside(epi_limiting_normal_cones(f, z, r, tol), epi_limiting_normal_cones(f, z, fz, tol), tol)
    notes = []
    if not continuous:
        notes.append("f is discontinuous at z; the limiting inclusion is not guaranteed")
    witness = w_frechet if w_frechet is not None else w_lim
    return Lemma25Report(w_frechet is None, w_lim is None, continuous, witness, notes)


# ---------------------------------------------------------------------------
# the key inequality of the primal proof


@dataclass
class InequalityReport:
    tau: float
    n_samples: int
    n_violations: int
    max_violation: float
    witness: tuple = None

    @property
    def holds(self):
        return self.n_violations == 0


def check_inequality_411(f, tau, xbar, delta0=0.1, n_samples=10_000, seed=0, points=None, slack=1e-7, tol=None):
    """Sample ``d(x, S_f) <= tau * (d_tau((x, r), epi f) + |r|)`` near ``xbar``.

    ``x`` is drawn from ``B(xbar, delta0)`` (plus any extra ``points``), and
    ``r`` from ``[-1, 1]`` with a third of the draws at ``r = 0``.
    """
    check_positive(tau, "tau")
    xbar = check_vector(xbar, f.dim, "xbar")
    rng = derived_rng(seed, 4)
    X = xbar + unit_ball_samples(rng, n_samples, f.dim, delta0)
    if points is not None:
        X = np.vstack([X, check_points(points, f.dim)])
    R = rng.uniform(-1.0, 1.0, X.shape[0])
    R[rng.random(X.shape[0]) < 1 / 3] = 0.0
    if points is not None:
        R[n_samples:] = 0.0
    S = f.solution_set()
    d = S.distances(X, tol)
    # epi distance lies in [0, (f - r)_+]; only points whose verdict depends on
    # its exact value are refined
    epi = np.maximum(f.values(X) - R, 0.0)
    open_ = (d > tau * np.abs(R) + slack) & (d <= tau * (epi + np.abs(R)) + slack)
    if open_.any():
        epi[open_] = epi_distances(f, X[open_], R[open_], tau, seed=seed)
    bound = tau * (epi + np.abs(R))
    gap = d - bound
    bad = gap > slack
    k = int(np.argmax(gap))
    witness = (X[k].copy(), float(R[k])) if bad.any() else None
    return InequalityReport(float(tau), X.shape[0], int(bad.sum()), float(max(gap.max(), 0.0)), witness)
