"""Low-level polyhedral kernels: min-norm points, cone duality, facets.

Everything here works on plain numpy arrays with points stored as rows.
"""
from itertools import combinations

import numpy as np
from scipy.optimize import nnls
from scipy.spatial import ConvexHull, QhullError


def min_norm_point(P, max_iter=500, tol=1e-12):
    """Point of minimum Euclidean norm in ``conv(rows of P)`` (Wolfe's algorithm).

    Returns ``(point, weights)`` where ``weights`` are convex coefficients over
    the rows of ``P``.
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    m = P.shape[0]
    if m == 1:
        return P[0].copy(), np.ones(1)
    scale = max(1.0, float(np.max(np.abs(P))))
    start = int(np.argmin(np.einsum("ij,ij->i", P, P)))
    S = [start]
    lam = np.array([1.0])
    x = P[start].copy()
    for _ in range(max_iter):
        # major cycle: most improving vertex
        vals = P @ x
        j = int(np.argmin(vals))
        if x @ x - vals[j] <= tol * scale * scale or j in S:
            break
        S.append(j)
        lam = np.append(lam, 0.0)
        while True:
            # affine minimizer over the current corral
            Q = P[S]
            k = len(S)
            M = np.ones((k + 1, k + 1))
            M[:k, :k] = Q @ Q.T
            M[k, k] = 0.0
            rhs = np.zeros(k + 1)
            rhs[k] = 1.0
            sol = np.linalg.lstsq(M, rhs, rcond=None)[0]
            alpha = sol[:k]
            if np.all(alpha > tol):
                lam = alpha
                x = alpha @ Q
                break
            # minor cycle: step toward the affine minimizer until a weight hits zero
            mask = alpha <= tol
            denom = lam[mask] - alpha[mask]
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(denom > 0, lam[mask] / denom, np.inf)
            theta = min(1.0, float(np.min(ratios))) if ratios.size else 1.0
            lam = theta * alpha + (1 - theta) * lam
            keep = lam > tol
            S = [s for s, kk in zip(S, keep) if kk]
            lam = lam[keep]
            lam = lam / lam.sum()
            x = lam @ P[S]
    weights = np.zeros(m)
    weights[S] = lam
    return x, weights


def polytope_distance(V, y):
    """Euclidean distance from ``y`` to ``conv(rows of V)``."""
    V = np.atleast_2d(np.asarray(V, dtype=float))
    y = np.asarray(y, dtype=float)
    p, _ = min_norm_point(V - y)
    return float(np.linalg.norm(p))


def project_onto_cone(G, c):
    """Projection of ``c`` onto ``cone(rows of G)`` via nonnegative least squares."""
    c = np.asarray(c, dtype=float)
    if G is None or len(G) == 0:
        return np.zeros_like(c)
    lam, _ = nnls(np.asarray(G, dtype=float).T, c)
    return lam @ G


def cone_residual(G, v):
    """Distance from ``v`` to ``cone(rows of G)``."""
    v = np.asarray(v, dtype=float)
    if G is None or len(G) == 0:
        return float(np.linalg.norm(v))
    lam, res = nnls(np.asarray(G, dtype=float).T, v)
    return float(res)


def _null_and_range(H, tol):
    _, s, Vt = np.linalg.svd(H)
    rank = int(np.sum(s > tol * max(1.0, s[0] if s.size else 1.0)))
    return Vt[rank:].T, Vt[:rank].T


def halfspace_cone_generators(H, dim, tol=1e-10):
    """Generators (rows) of the cone ``{v : H v <= 0}``.

    Lineality directions are returned as +/- pairs; the pointed part is
    enumerated from intersections of ``r-1`` facet hyperplanes.
    """
    H = np.asarray(H, dtype=float).reshape(-1, dim)
    norms = np.linalg.norm(H, axis=1)
    H = H[norms > tol]
    if H.shape[0] == 0:
        eye = np.eye(dim)
        return np.vstack([eye, -eye])
    H = H / np.linalg.norm(H, axis=1, keepdims=True)
    N, B = _null_and_range(H, 1e-10)
    gens = []
    for col in N.T:
        gens.append(col)
        gens.append(-col)
    r = B.shape[1]
    Hr = H @ B
    rays = []
    if r == 1:
        for s in (1.0, -1.0):
            if np.all(Hr[:, 0] * s <= tol):
                rays.append(np.array([s]))
    elif r > 1:
        for rows in combinations(range(Hr.shape[0]), r - 1):
            sub = Hr[list(rows)]
            _, s, Vt = np.linalg.svd(sub)
            if np.sum(s > 1e-10) != r - 1:
                continue
            w = Vt[-1]
            for sign in (1.0, -1.0):
                ww = sign * w
                if np.all(Hr @ ww <= tol):
                    rays.append(ww)
    for w in rays:
        g = B @ w
        g = g / np.linalg.norm(g)
        gens.append(g)
    if not gens:
        return np.zeros((0, dim))
    return dedupe_directions(np.array(gens))


def dedupe_directions(G, tol=1e-9):
    """Drop zero rows and duplicate directions (after normalization)."""
    G = np.atleast_2d(np.asarray(G, dtype=float))
    out = []
    for g in G:
        n = np.linalg.norm(g)
        if n <= tol:
            continue
        u = g / n
        if not any(np.linalg.norm(u - o) <= 1e-7 for o in out):
            out.append(u)
    if not out:
        return np.zeros((0, G.shape[1]))
    return np.array(out)


def polar_generators(G, dim):
    """Generators of the polar cone ``{v : <g, v> <= 0 for all rows g of G}``."""
    if G is None or len(G) == 0:
        return halfspace_cone_generators(np.zeros((0, dim)), dim)
    return halfspace_cone_generators(G, dim)


def body_facets(V, tol=1e-10):
    """H-representation of ``conv(rows of V)`` as ``(normals, offsets, basis)``.

    The hull is described inside its affine hull: ``basis`` is an orthonormal
    matrix (n x k) with the hull contained in ``origin + span(basis)`` where
    origin is ``V[0]``; facets satisfy ``normals @ z <= offsets`` in the
    original coordinates for points already lying in that affine hull.
    Returns also the orthogonal complement so callers can test flatness.
    """
    V = np.atleast_2d(np.asarray(V, dtype=float))
    n = V.shape[1]
    origin = V[0]
    D = V - origin
    if D.shape[0] > 1:
        _, s, Vt = np.linalg.svd(D)
        k = int(np.sum(s > tol * max(1.0, s[0])))
    else:
        Vt = np.eye(n)
        k = 0
    basis = Vt[:k].T
    complement = Vt[k:].T if k < n else np.zeros((n, 0))
    if k == 0:
        return np.zeros((0, n)), np.zeros(0), origin, basis, complement
    coords = D @ basis
    if k == 1:
        lo, hi = coords[:, 0].min(), coords[:, 0].max()
        normals = np.array([basis[:, 0], -basis[:, 0]])
        offsets = np.array([hi + basis[:, 0] @ origin, -lo - basis[:, 0] @ origin])
        return normals, offsets, origin, basis, complement
    try:
        hull = ConvexHull(coords)
    except QhullError:
        hull = ConvexHull(coords, qhull_options="QJ")
    eq = hull.equations
    local_normals = eq[:, :-1]
    local_offsets = -eq[:, -1]
    normals = local_normals @ basis.T
    offsets = local_offsets + normals @ origin
    return normals, offsets, origin, basis, complement


def hull_vertices(V, tol=1e-10):
    """Rows of ``V`` that are extreme points of their convex hull."""
    V = np.atleast_2d(np.asarray(V, dtype=float))
    if V.shape[0] <= 2:
        return dedupe_points(V)
    origin = V[0]
    D = V - origin
    _, s, Vt = np.linalg.svd(D)
    k = int(np.sum(s > tol * max(1.0, s[0] if s.size else 1.0)))
    if k == 0:
        return V[:1]
    coords = D @ Vt[:k].T
    if k == 1:
        c = coords[:, 0]
        return V[[int(np.argmin(c)), int(np.argmax(c))]]
    try:
        hull = ConvexHull(coords)
    except QhullError:
        return dedupe_points(V)
    return V[np.sort(hull.vertices)]


def dedupe_points(V, tol=1e-12):
    V = np.atleast_2d(np.asarray(V, dtype=float))
    out = []
    for v in V:
        if not any(np.linalg.norm(v - o) <= tol for o in out):
            out.append(v)
    return np.array(out)
