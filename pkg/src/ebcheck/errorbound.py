"""Local error bounds: pointwise ratios, multi-scale modulus estimation and
the exact Hoffman constant of a linear system.
"""
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.optimize import linprog
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import _polytope
from ._config import resolve
from .exceptions import InfeasibleSystem, PointInSolutionSet, PointNotInSolutionSet, SizeLimitExceeded
from .validation import check_matrix, check_positive, check_vector, derived_rng, sphere_samples, unit_ball_samples

HOLDS = "HOLDS"
FAILS = "FAILS"
INCONCLUSIVE = "INCONCLUSIVE"

#: relative change between the two finest level sups below which the
#: estimate is declared stable
STABLE_BAND = 0.10
#: number of finest level-to-level steps searched for divergence evidence
DIVERGENCE_WINDOW = 3


def ratio(f, x, tol=None):
    """``d(x, S_f) / f_+(x)`` for a point outside the solution set."""
    tol = resolve(tol)
    x = check_vector(x, f.dim)
    fx = f.value(x)
    if fx <= tol.membership:
        raise PointInSolutionSet(f"f(x) = {fx:.3g} is not positive")
    return f.solution_set().distance(x, tol) / fx


@dataclass(frozen=True)
class ModulusQuery:
    xbar: np.ndarray
    delta0: float = 0.5
    levels: int = 8
    samples_per_level: int = 4096
    seed: int = 0
    rho: float = 1.25
    polish_steps: int = 20
    n_polish: int = 4

    def __post_init__(self):
        check_positive(self.delta0, "delta0")
        check_positive(self.rho - 1.0, "rho - 1")
        if self.levels < 2:
            raise ValueError("levels must be at least 2")


@dataclass
class LevelRecord:
    level: int
    delta: float
    sup_ratio: float
    argmax: np.ndarray
    n_outside: int


@dataclass
class ModulusEstimate:
    per_level: list
    tau_hat: float
    verdict: str
    flags: list = field(default_factory=list)

    @property
    def sups(self):
        return np.array([lv.sup_ratio for lv in self.per_level])

    @property
    def witnesses(self):
        return [lv.argmax for lv in self.per_level if lv.argmax is not None]


def _ratios(f, S, X, tol):
    fx = f.values(X)
    d = S.distances(X, tol)
    out = np.full(X.shape[0], -np.inf)
    ok = (fx > 0) & (d > tol.dist)
    out[ok] = d[ok] / fx[ok]
    return out


def shell_samples(rng, n_samples, center, inner, outer):
    """Uniform samples of the shell ``inner < |x - center| <= outer``."""
    n = center.shape[0]
    u = sphere_samples(rng, n_samples, n)
    t = rng.random(n_samples)
    r = (inner**n + t * (outer**n - inner**n)) ** (1.0 / n)
    return center + u * r[:, None]


def _polish(f, S, x0, r0, center, inner, outer, steps, tol):
    """Coordinate ascent on the ratio, kept inside the sampling shell."""
    n = x0.shape[0]
    dirs = np.vstack([np.eye(n), -np.eye(n)])
    x, best = x0.copy(), r0
    h = (outer - inner) / 4
    for _ in range(steps):
        cand = x + h * dirs
        radius = np.linalg.norm(cand - center, axis=1)
        inside = (radius > inner) & (radius <= outer)
        if inside.any():
            vals = np.full(cand.shape[0], -np.inf)
            vals[inside] = _ratios(f, S, cand[inside], tol)
            j = int(np.argmax(vals))
            if vals[j] > best:
                x, best = cand[j], float(vals[j])
                continue
        h *= 0.5
    return x, best


def _verdict(sups, rho):
    finite = sups[np.isfinite(sups) & (sups > 0)]
    if finite.size == 0:
        return HOLDS, 0.0
    tau_hat = float(np.max(finite[-2:]))
    # sampling noise can flatten a single step of a divergent ladder, so two
    # consecutive rho-growths anywhere among the finest three steps count
    grew = finite[1:] >= rho * finite[:-1]
    window = grew[-DIVERGENCE_WINDOW:]
    if np.any(window[1:] & window[:-1]):
        return FAILS, tau_hat
    if finite.size >= 2 and abs(finite[-1] - finite[-2]) < STABLE_BAND * max(finite[-1], finite[-2]):
        return HOLDS, tau_hat
    return INCONCLUSIVE, tau_hat


def estimate_modulus(f, q, tol=None):
    """Multi-level sampled estimate of the local error-bound modulus at ``q.xbar``.

    Level ``j`` samples the shell ``delta_{j+1} < |x - xbar| <= delta_j`` with
    ``delta_j = delta0 * 2**-j``, so that the sup over the ball ``B(xbar,
    delta_j)`` is the running max of the finer shells.  Shell sups that keep
    growing by the factor ``rho`` toward ``xbar`` signal a missing error
    bound; stable shell sups give ``tau_hat``.
    """
    tol = resolve(tol)
    xbar = check_vector(q.xbar, f.dim, "xbar")
    if f.value(xbar) > tol.membership:
        raise PointNotInSolutionSet(f"f(xbar) = {f.value(xbar):.3g} > 0")
    S = f.solution_set()
    records, flags = [], []
    for j in range(q.levels):
        delta = q.delta0 * 2.0 ** -j
        rng = derived_rng(q.seed, 10, j)
        X = shell_samples(rng, q.samples_per_level, xbar, delta / 2, delta)
        r = _ratios(f, S, X, tol)
        outside = np.isfinite(r)
        if not outside.any():
            flags.append(f"EmptySampleLevel: level {j} had no samples outside S_f")
            records.append(LevelRecord(j, delta, np.nan, None, 0))
            continue
        best_x, best_r = X[int(np.argmax(r))], float(np.max(r))
        for i in np.argsort(r)[::-1][: q.n_polish]:
            if not np.isfinite(r[i]):
                break
            x, v = _polish(f, S, X[i], float(r[i]), xbar, delta / 2, delta, q.polish_steps, tol)
            if v > best_r:
                best_x, best_r = x, v
        records.append(LevelRecord(j, delta, best_r, best_x, int(outside.sum())))
    sups = np.array([lv.sup_ratio for lv in records])
    verdict, tau_hat = _verdict(sups, q.rho)
    if np.all(np.isnan(sups)):
        flags.append("all levels empty: xbar is interior to S_f")
    if verdict == FAILS:
        tau_hat = np.inf
    return ModulusEstimate(records, tau_hat, verdict, flags)


def posterior_violations(f, estimate, xbar, n_samples=10_000, seed=1, inflation=1.1, tol=None):
    """Count fresh finest-level samples breaking ``d <= inflation * tau_hat * f_+``."""
    tol = resolve(tol)
    delta = estimate.per_level[-1].delta
    X = check_vector(xbar, f.dim) + unit_ball_samples(derived_rng(seed, 11), n_samples, f.dim, delta)
    d = f.solution_set().distances(X, tol)
    bound = inflation * estimate.tau_hat * np.maximum(f.values(X), 0.0)
    return int(np.sum(d > bound + tol.dist))


# ---------------------------------------------------------------------------
# Hoffman constant


def _face_amplification(AJ, tol=1e-12):
    """``max{|v| : v in cone(A_J), A_J v <= 1}`` by vertex enumeration."""
    n = AJ.shape[1]
    H = _polytope.polar_generators(AJ, n)
    C = np.vstack([H, AJ])
    rhs = np.concatenate([np.zeros(H.shape[0]), np.ones(AJ.shape[0])])
    best = 0.0
    for rows in combinations(range(C.shape[0]), n):
        M = C[list(rows)]
        if np.linalg.svd(M, compute_uv=False)[-1] < 1e-12:
            continue
        v = np.linalg.solve(M, rhs[list(rows)])
        if np.all(C @ v <= rhs + 1e-9 * (1.0 + np.abs(rhs))):
            best = max(best, float(np.linalg.norm(v)))
    return best


def _realized(A, b, J, n):
    """True if some ``x`` in the set has active set exactly ``J``."""
    rest = [i for i in range(A.shape[0]) if i not in J]
    # variables (x, s): maximize s subject to A_rest x + s <= b_rest
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A_ub = np.column_stack([A[rest], np.ones(len(rest))]) if rest else None
    b_ub = b[rest] if rest else None
    A_eq = np.column_stack([A[J], np.zeros(len(J))])
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b[J],
                  bounds=[(None, None)] * n + [(None, 1.0)], method="highs")
    return res.status == 0 and -res.fun > 1e-9


def hoffman_constant(A, b, max_size=6):
    """Hoffman constant of ``{x : A x <= b}`` for the residual ``max_i (a_i.x - b_i)_+``.

    With ``p`` the projection of ``x`` onto the set, ``x - p`` lies in the
    cone of the rows active at ``p``, and only those rows matter as ``x``
    approaches ``p``.  The constant is therefore the largest
    ``max{|v| : v in cone(A_J), A_J v <= 1}`` over the active sets ``J``
    realized at points of the set.
    """
    A = check_matrix(A)
    b = check_vector(b, A.shape[0], "b")
    m, n = A.shape
    if m > max_size or n > max_size:
        raise SizeLimitExceeded(f"system is {m}x{n}, limit is {max_size}")
    if linprog(np.zeros(n), A_ub=A, b_ub=b, bounds=[(None, None)] * n, method="highs").status != 0:
        raise InfeasibleSystem("A x <= b has no solution")
    keep = np.linalg.norm(A, axis=1) > 0
    A, b = A[keep], b[keep]
    best = 0.0
    for size in range(1, A.shape[0] + 1):
        for J in combinations(range(A.shape[0]), size):
            J = list(J)
            if _realized(A, b, J, n):
                best = max(best, _face_amplification(A[J]))
    return best


# ---------------------------------------------------------------------------
# estimator facade


class ModulusEstimator(BaseEstimator):
    """Estimator wrapper around :func:`estimate_modulus`.

    ``fit(f, xbar)`` stores ``tau_hat_``, ``verdict_`` and ``levels_``;
    ``predict(X)`` returns the error-bound prediction ``tau_hat * f_+(X)``,
    an upper estimate of ``d(X, S_f)`` near ``xbar``.
    """

    def __init__(self, delta0=0.5, levels=8, samples_per_level=4096, rho=1.25, seed=0):
        self.delta0 = delta0
        self.levels = levels
        self.samples_per_level = samples_per_level
        self.rho = rho
        self.seed = seed

    def fit(self, f, xbar=None):
        xbar = np.zeros(f.dim) if xbar is None else check_vector(xbar, f.dim, "xbar")
        q = ModulusQuery(xbar, self.delta0, self.levels, self.samples_per_level, self.seed, self.rho)
        est = estimate_modulus(f, q)
        self.function_ = f
        self.xbar_ = xbar
        self.estimate_ = est
        self.tau_hat_ = est.tau_hat
        self.verdict_ = est.verdict
        self.levels_ = est.per_level
        return self

    def predict(self, X):
        check_is_fitted(self, "tau_hat_")
        return self.tau_hat_ * np.maximum(self.function_.values(X), 0.0)
