"""Composite-convex inequalities ``g(psi(x)) <= 0``.

Covers surjectivity of the Jacobian, the chain rule for subdifferentials,
the boundary condition ``bd(S_g) ⊆ g^{-1}(0)`` and the metric-regularity
constant of ``psi``.
"""
from dataclasses import dataclass, field

import numpy as np

from . import functions as fn
from ._config import TOL_RANK, resolve
from .exceptions import EmptySet, NewtonDivergence, SurjectivityFailure
from .geometry import PolyhedralCone
from .subdifferential import Subdifferential, frechet_subdiff
from .validation import check_vector, derived_rng, unit_ball_samples


@dataclass
class CompositeProblem:
    g: object
    psi: fn.SmoothMap
    xbar: np.ndarray

    def __post_init__(self):
        self.xbar = check_vector(self.xbar, self.psi.dim, "xbar")
        if self.g.dim != self.psi.out_dim:
            raise ValueError("g and psi are not chain-compatible")

    @property
    def f(self):
        return fn.ComposeConvexSmooth(self.g, self.psi)

    @property
    def ybar(self):
        return self.psi.value(self.xbar)


def surjectivity_check(psi, x, tol_rank=TOL_RANK):
    """``(surjective, smallest singular value)`` of the Jacobian at ``x``."""
    J = psi.jacobian(x)
    s = np.linalg.svd(J, compute_uv=False)
    smin = float(s.min()) if s.size == J.shape[0] else 0.0
    return smin > tol_rank, smin


def _require_surjective(psi, x):
    ok, smin = surjectivity_check(psi, x)
    if not ok:
        raise SurjectivityFailure(f"Jacobian at {np.asarray(x).tolist()} has smallest singular value {smin:.3g}")
    return psi.jacobian(x)


def boundary_condition_check(g, n_samples=2000, seed=0, center=None, radius=3.0, tol=None):
    """Sample ``bd(S_g)`` by projecting exterior points and check ``g = 0`` there.

    Returns ``(holds, witness)``; ``witness`` is a boundary point with
    ``g < 0`` when the condition fails.  An empty sampled exterior makes the
    condition hold vacuously.
    """
    tol = resolve(tol)
    c = np.zeros(g.dim) if center is None else check_vector(center, g.dim, "center")
    S = g.solution_set()
    Y = c + unit_ball_samples(derived_rng(seed, 20), n_samples, g.dim, radius)
    outside = g.values(Y) > tol.membership
    if not outside.any():
        return True, None
    try:
        d, P = S.nearest(Y[outside], tol)
    except EmptySet:
        raise EmptySet("the solution set of g is empty") from None
    gp = g.values(P)
    bad = np.abs(gp) > tol.membership * (1.0 + np.abs(P).max(axis=1))
    if bad.any():
        return False, P[int(np.argmax(np.abs(gp) * bad))]
    return True, None


@dataclass
class MetricRegularity:
    kappa: float
    raw_max: float
    exact: bool
    sigma_min: float
    lipschitz: float
    skipped: int = 0
    flags: list = field(default_factory=list)

    @property
    def transfer(self):
        """Constant ``c`` in ``tau_f <= c * tau_g`` (``1 / sigma_min``)."""
        return 1.0 / self.sigma_min


def _preimage_distance(psi, x, y, max_iter=50):
    """Distance from ``x`` to a nearby point of ``psi^{-1}(y)``.

    Damped Gauss-Newton steps reach the fibre; each step also removes the
    tangential component of ``z - x`` so that the limit is a stationary point
    of the distance.
    """
    z = x.copy()
    for _ in range(max_iter):
        J = psi.jacobian(z)
        Jp = np.linalg.pinv(J)
        res = psi.value(z) - y
        step = Jp @ res + (np.eye(z.shape[0]) - Jp @ J) @ (z - x)
        t = 1.0
        base = np.linalg.norm(res)
        while t > 1e-4:
            cand = z - t * step
            if np.linalg.norm(psi.value(cand) - y) <= max(base, 1e-14) * (1 - 0.1 * t) or base < 1e-13:
                break
            t *= 0.5
        z = z - t * step
        if np.linalg.norm(step) < 1e-13:
            break
    if np.linalg.norm(psi.value(z) - y) > 1e-9 * (1.0 + np.linalg.norm(y)):
        raise NewtonDivergence("no preimage found")
    return float(np.linalg.norm(z - x))


def metric_regularity_kappa(psi, xbar, delta0=0.1, n_samples=2000, seed=0, inflation=1.1):
    """Estimate ``kappa`` with ``d(x, psi^{-1}(y)) <= kappa |y - psi(x)|`` near ``xbar``.

    Affine maps give the exact value ``1 / sigma_min``.  Otherwise the
    quotient is sampled, its max is inflated by ``inflation`` and extremal
    singular values of the Jacobian over the ball are reported as well.
    """
    xbar = check_vector(xbar, psi.dim, "xbar")
    _, smin = surjectivity_check(psi, xbar)
    if smin <= TOL_RANK:
        raise SurjectivityFailure("Jacobian is not surjective at xbar")
    if psi.is_affine:
        M, _ = psi.affine_parts()
        s = np.linalg.svd(M, compute_uv=False)
        return MetricRegularity(1.0 / s.min(), 1.0 / s.min(), True, float(s.min()), float(s.max()))
    rng = derived_rng(seed, 21)
    X = xbar + unit_ball_samples(rng, n_samples, psi.dim, delta0)
    Y = psi.value(xbar) + unit_ball_samples(rng, n_samples, psi.out_dim, delta0)
    svals = np.array([np.linalg.svd(psi.jacobian(x), compute_uv=False)[[0, -1]] for x in X])
    raw, skipped = 0.0, 0
    for x, y in zip(X, Y):
        gap = np.linalg.norm(y - psi.value(x))
        if gap < 1e-12:
            continue
        try:
            raw = max(raw, _preimage_distance(psi, x, y) / gap)
        except NewtonDivergence:
            skipped += 1
    flags = [f"NewtonDivergence: {skipped} samples skipped"] if skipped else []
    return MetricRegularity(inflation * raw, raw, False, float(svals[:, 1].min()), float(svals[:, 0].max()),
                            skipped, flags)


def chain_subdiff(p, x, tol=None):
    """``J(x)^T dg(psi(x))`` for a surjective Jacobian ``J``."""
    x = check_vector(x, p.psi.dim)
    J = _require_surjective(p.psi, x)
    inner = frechet_subdiff(p.g, p.psi.value(x), tol)
    return Subdifferential(
        inner.body.linear_image(J.T),
        PolyhedralCone.zero(p.psi.dim),
        sagitta=inner.sagitta * float(np.linalg.norm(J, 2)),
    )


def composite_normal_cone(p, x, tol=None):
    """``N(S, x) = J(x)^T N(S_g, psi(x))`` for surjective ``J``."""
    x = check_vector(x, p.psi.dim)
    J = _require_surjective(p.psi, x)
    return p.g.solution_set().frechet_normal_cone(p.psi.value(x), tol).linear_image(J.T)
