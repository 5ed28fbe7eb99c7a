"""Deciders for the dual inclusion conditions behind local error bounds.

Each checker returns a :class:`CertificateReport`.  Inclusions of a
normal-cone slice ``K ∩ B`` in a convex body are decided by
:func:`cone_slice_in_body`, exactly from facets in dimension <= 3 and by
direction sampling above.
"""
from dataclasses import dataclass, field

import numpy as np

from . import _polytope
from . import composite as comp
from . import errorbound as eb
from ._config import resolve
from .exceptions import BoundaryConditionFailure, OriginNotInBody, SurjectivityFailure
from .geometry import PolyhedralCone
from .subdifferential import frechet_subdiff, limiting_subdiff, scaled_union_hull
from .validation import check_vector, derived_rng, unit_ball_samples

THM31, THM32, THM33, THM34 = "THM31", "THM32", "THM33", "THM34"
HOLDS, FAILS, UNSUPPORTED = "HOLDS", "FAILS", "UNSUPPORTED"


@dataclass
class CertificateReport:
    condition_id: str
    verdict: str
    tau_used: float = None
    witnesses: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def holds(self):
        return self.verdict == HOLDS


# ---------------------------------------------------------------------------
# cone slice inclusion


def _truncated_vertices(C, scale=1e3):
    if C.bounded:
        return C.vertices
    M = scale * (1.0 + np.abs(C.vertices).max())
    return np.vstack([C.vertices] + [C.vertices + M * r for r in C.rays])


def _exact_route(K, C, tol):
    V = _truncated_vertices(C)
    normals, offsets, _, basis, complement = _polytope.body_facets(V)
    for g in K.generators:
        off = complement.T @ g if complement.shape[1] else np.zeros(0)
        if np.linalg.norm(off) > tol:
            return False, g / np.linalg.norm(g)
    for c, d in zip(normals, offsets):
        nc = np.linalg.norm(c)
        p = K.project(c)
        if np.linalg.norm(p) > d + tol * nc:
            return False, p / np.linalg.norm(p)
    return True, None


def _sampling_route(K, C, tol, n_dirs, seed):
    U = K.unit_directions(derived_rng(seed, 30), n_dirs)
    for u in U:
        if C.distance(u) > tol:
            return False, u
    return True, None


def cone_slice_in_body(K, C, tol=None, route="auto", n_dirs=10_000, seed=0):
    """Decide ``K ∩ B ⊆ C`` for a convex body ``C`` containing 0.

    ``tol`` is an absolute slack (defaults to ``tol_cert``).  Returns
    ``(holds, witness)`` with a unit vector of ``K`` outside ``C`` on failure.
    """
    slack = resolve(None).cert if tol is None else float(tol)
    if C.is_empty or C.distance(np.zeros(C.dim)) > slack:
        raise OriginNotInBody("the body must contain the origin")
    if K.is_zero:
        return True, None
    if route == "auto":
        route = "exact" if K.dim <= 3 else "sampling"
    if route == "exact":
        return _exact_route(K, C, slack)
    return _sampling_route(K, C, slack, n_dirs, seed)


def _slice_slack(tol, tau, sagitta):
    return tol.cert + tau * sagitta


# ---------------------------------------------------------------------------
# inclusion checks for a general f


def _continuity_note(f):
    if getattr(f, "continuous", True):
        return ["ContinuityAssumed: f is a finite structured expression, continuous at xbar"]
    return ["f is not continuous at xbar"]


def check_thm31(f, xbar, tol=None):
    """``N(S_f, xbar) ⊆ [0, ∞) ∂f(xbar) + ∂^∞ f(xbar)``, generator-wise."""
    tol = resolve(tol)
    xbar = check_vector(xbar, f.dim, "xbar")
    K = f.solution_set().limiting_normal_cone(xbar, tol)
    sub = limiting_subdiff(f, xbar, tol)
    bodies = sub.pieces if sub.nonconvex else [sub.body]
    gens = [b.vertices for b in bodies if not b.is_empty] + [sub.singular.generators]
    rhs = PolyhedralCone(np.vstack(gens), f.dim)
    witnesses = []
    for g in K.generators:
        res = rhs.residual(g)
        if res > tol.cert:
            witnesses.append((g, res))
    verdict = FAILS if witnesses else HOLDS
    return CertificateReport(THM31, verdict, None, witnesses, _continuity_note(f))


def check_thm33(f, xbar, tau, tol=None, n_dirs=10_000, seed=0):
    """``N(S_f, xbar) ∩ B ⊆ [0, tau] ∂f(xbar) + ∂^∞ f(xbar)``."""
    tol = resolve(tol)
    xbar = check_vector(xbar, f.dim, "xbar")
    K = f.solution_set().limiting_normal_cone(xbar, tol)
    sub = limiting_subdiff(f, xbar, tol)
    slack = _slice_slack(tol, tau, sub.sagitta)
    notes = _continuity_note(f)
    if sub.nonconvex:
        # the right-hand side is a union of star hulls: test sampled directions
        notes.append("NonConvexLimitingBody: union-of-hulls test over sampled directions")
        hulls = [scaled_union_hull(p, tau) for p in sub.pieces]
        for u in K.unit_directions(derived_rng(seed, 31), n_dirs):
            if not any(h.distance(u) <= slack for h in hulls):
                return CertificateReport(THM33, FAILS, tau, [(u, min(h.distance(u) for h in hulls))], notes)
        return CertificateReport(THM33, HOLDS, tau, [], notes)
    C = scaled_union_hull(sub.body, tau)
    ok, w = cone_slice_in_body(K, C, slack, n_dirs=n_dirs, seed=seed)
    witnesses = [] if ok else [(w, C.distance(w))]
    return CertificateReport(THM33, HOLDS if ok else FAILS, tau, witnesses, notes)


def _sample_solution_points(f, xbar, delta, n_points, seed, tol):
    """``xbar`` plus nearest points of ``S_f`` to random probes in ``B(xbar, delta)``."""
    S = f.solution_set()
    probes = xbar + unit_ball_samples(derived_rng(seed, 32), n_points, f.dim, delta)
    _, P = S.nearest(probes, tol)
    keep = np.isfinite(P).all(axis=1) & (np.linalg.norm(P - xbar, axis=1) <= delta)
    return np.vstack([xbar[None, :], P[keep]])


def check_thm32(f, xbar, tau, delta0=0.1, eps=0.01, n_points=32, seed=0, n_pairs=256, tol=None):
    """Fuzzy inclusion at sampled ``x`` in ``S_f ∩ B(xbar, delta0)``.

    For each ``x`` the unit generators of ``N̂(S_f, x)`` must lie within
    ``eps`` of ``[0, (1 + eps) tau] ∂̂f(u)`` for some sampled ``u`` in
    ``B_f(x, eps)``; singular parts vanish for the supported classes.  A
    HOLDS verdict means covered at the sampled resolution.
    """
    tol = resolve(tol)
    xbar = check_vector(xbar, f.dim, "xbar")
    S = f.solution_set()
    rng = derived_rng(seed, 33)
    witnesses = []
    for x in _sample_solution_points(f, xbar, delta0, n_points, seed, tol):
        K = S.frechet_normal_cone(x, tol)
        if K.is_zero:
            continue
        pending = list(K.generators)
        fx = f.value(x)
        U = np.vstack([x[None, :], x + unit_ball_samples(rng, n_pairs - 1, f.dim, eps)])
        U = U[np.abs(f.values(U) - fx) < eps]
        for u in U:
            sub = frechet_subdiff(f, u, tol)
            if sub.body.is_empty:
                continue
            hull = scaled_union_hull(sub.body, (1 + eps) * tau)
            slack = eps + tol.cert + (1 + eps) * tau * sub.sagitta
            pending = [g for g in pending if hull.distance(g) > slack]
            if not pending:
                break
        witnesses.extend((g, float("nan")) for g in pending)
        if witnesses:
            break
    notes = [f"covered at sampled resolution ({n_pairs} points u per x)"]
    return CertificateReport(THM32, FAILS if witnesses else HOLDS, tau, witnesses, notes)


# ---------------------------------------------------------------------------
# composite problems


def _thm34_pieces(g, psi, xbar, delta, n_points, seed, tol, check_boundary=True):
    p = comp.CompositeProblem(g, psi, xbar)
    comp._require_surjective(psi, p.xbar)
    if check_boundary:
        ok, w = comp.boundary_condition_check(g, center=p.ybar, tol=tol)
        if not ok:
            raise BoundaryConditionFailure(f"boundary point {w.tolist()} has g < 0")
    pieces = []
    for x in _sample_solution_points(p.f, p.xbar, delta, n_points, seed, tol):
        try:
            K = comp.composite_normal_cone(p, x, tol)
        except SurjectivityFailure:  # points off the surjectivity region are skipped
            continue
        if K.is_zero:
            continue
        sub = comp.chain_subdiff(p, x, tol)
        pieces.append((x, K, sub))
    return pieces


def _thm34_decide(pieces, tau, tol):
    for x, K, sub in pieces:
        C = scaled_union_hull(sub.body, tau)
        ok, w = cone_slice_in_body(K, C, _slice_slack(tol, tau, sub.sagitta))
        if not ok:
            return False, (w, C.distance(w))
    return True, None


def check_thm34(g, psi, xbar, tau, delta=0.05, n_points=16, seed=0, tol=None):
    """``N̂(S, x) ∩ B ⊆ [0, tau] ∂̂f(x)`` at sampled ``x`` in ``S ∩ B(xbar, delta)``."""
    tol = resolve(tol)
    pieces = _thm34_pieces(g, psi, xbar, delta, n_points, seed, tol)
    ok, w = _thm34_decide(pieces, tau, tol)
    notes = [f"{len(pieces)} sampled points with nonzero normal cone"]
    return CertificateReport(THM34, HOLDS if ok else FAILS, tau, [] if ok else [w], notes)


def tau_star_search(g, psi, xbar, delta=0.05, n_points=16, seed=0, lo=2.0**-10, hi=2.0**10, n_iter=40, tol=None):
    """Smallest ``tau`` in ``[lo, hi]`` passing :func:`check_thm34` (inf if none)."""
    tol = resolve(tol)
    pieces = _thm34_pieces(g, psi, xbar, delta, n_points, seed, tol)
    if not _thm34_decide(pieces, hi, tol)[0]:
        return np.inf
    if _thm34_decide(pieces, lo, tol)[0]:
        return lo
    a, b = np.log(lo), np.log(hi)
    for _ in range(n_iter):
        mid = 0.5 * (a + b)
        if _thm34_decide(pieces, np.exp(mid), tol)[0]:
            b = mid
        else:
            a = mid
    return float(np.exp(b))


@dataclass
class Thm35Report:
    verdict_f: str
    verdict_g: str
    tau_f: float
    tau_g: float
    kappa: float
    kappa_transfer: float
    lipschitz: float
    agree: bool
    transfer_ok: bool
    estimates: tuple = ()


def check_thm35(g, psi, xbar, query=None, transfer_band=1.25, tol=None):
    """Compare the sampled moduli of ``g∘psi`` at ``xbar`` and of ``g`` at ``psi(xbar)``."""
    p = comp.CompositeProblem(g, psi, xbar)
    q = query or eb.ModulusQuery(p.xbar)
    qf = eb.ModulusQuery(p.xbar, q.delta0, q.levels, q.samples_per_level, q.seed, q.rho)
    qg = eb.ModulusQuery(p.ybar, q.delta0, q.levels, q.samples_per_level, q.seed, q.rho)
    ef = eb.estimate_modulus(p.f, qf, tol)
    eg = eb.estimate_modulus(g, qg, tol)
    mr = comp.metric_regularity_kappa(psi, p.xbar)
    agree = ef.verdict == eg.verdict
    transfer_ok = True
    if ef.verdict == eb.HOLDS and eg.verdict == eb.HOLDS:
        transfer_ok = ef.tau_hat <= transfer_band * mr.transfer * eg.tau_hat
    return Thm35Report(ef.verdict, eg.verdict, ef.tau_hat, eg.tau_hat, mr.kappa, mr.transfer, mr.lipschitz,
                       agree, transfer_ok, (ef, eg))
