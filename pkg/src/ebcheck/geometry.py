"""Structured closed sets in R^n, normal cones and convex bodies.

Every set is reduced to a finite union of *constraint systems*.  A system is
an intersection of halfspaces, Euclidean balls and (optionally) smooth
sublevel constraints.  Systems built only from halfspaces and balls are
projected onto in closed form by enumerating candidate active sets, which is
exact for the low dimensions this toolkit targets; systems carrying smooth
constraints fall back to SLSQP.

Normal cones are returned as :class:`PolyhedralCone` (finitely generated), and
subdifferential-like sets as :class:`ConvexBody` (V-representation).
"""
from functools import cached_property
from itertools import combinations

import numpy as np
from scipy.optimize import linprog, minimize

from . import _polytope
from ._config import K_ARC, resolve
from .exceptions import (
    DimensionMismatch,
    EmptySet,
    PointNotInSet,
    UnsupportedStructure,
)
from .validation import check_matrix, check_points, check_vector, derived_rng, sphere_samples


# ---------------------------------------------------------------------------
# cones and bodies


class PolyhedralCone:
    """``cone(generators)``; an empty generator list is the zero cone."""

    def __init__(self, generators, dim=None):
        G = np.asarray(generators, dtype=float)
        if G.size == 0:
            if dim is None:
                raise ValueError("dim is required for the zero cone")
            G = np.zeros((0, int(dim)))
        G = np.atleast_2d(G)
        if dim is not None and G.shape[1] != dim:
            raise DimensionMismatch(f"generators have dimension {G.shape[1]}, expected {dim}")
        self.generators = _polytope.dedupe_directions(G)
        self.dim = G.shape[1]

    @classmethod
    def zero(cls, dim):
        return cls(np.zeros((0, dim)), dim)

    @classmethod
    def full(cls, dim):
        eye = np.eye(dim)
        return cls(np.vstack([eye, -eye]), dim)

    @property
    def is_zero(self):
        return self.generators.shape[0] == 0

    def residual(self, v):
        v = check_vector(v, self.dim, "v")
        n = np.linalg.norm(v)
        if n == 0:
            return 0.0
        return _polytope.cone_residual(self.generators, v / n)

    def contains(self, v, tol=None):
        return self.residual(v) <= resolve(tol).cert

    def project(self, c):
        return _polytope.project_onto_cone(self.generators, check_vector(c, self.dim, "c"))

    def polar(self):
        return PolyhedralCone(_polytope.polar_generators(self.generators, self.dim), self.dim)

    def intersect(self, other):
        P = np.vstack([self.polar().generators, other.polar().generators])
        return PolyhedralCone(_polytope.halfspace_cone_generators(P, self.dim), self.dim)

    def __add__(self, other):
        return PolyhedralCone(np.vstack([self.generators, other.generators]), self.dim)

    def linear_image(self, M):
        """Image under the linear map ``v -> M v``."""
        M = np.atleast_2d(np.asarray(M, dtype=float))
        if self.is_zero:
            return PolyhedralCone.zero(M.shape[0])
        return PolyhedralCone(self.generators @ M.T, M.shape[0])

    def contains_cone(self, other, tol=None):
        return all(self.contains(g, tol) for g in other.generators)

    def unit_directions(self, rng, n_samples):
        """Unit vectors of the cone: normalized random nonnegative combinations."""
        G = self.generators
        if G.shape[0] == 0:
            return np.zeros((0, self.dim))
        W = rng.exponential(size=(n_samples, G.shape[0]))
        # sparsify so that faces of the cone are sampled too
        mask = rng.random(W.shape) < 0.5
        mask[np.arange(n_samples), rng.integers(0, G.shape[0], n_samples)] = True
        D = (W * mask) @ G
        norms = np.linalg.norm(D, axis=1)
        keep = norms > 1e-12
        return np.vstack([G, D[keep] / norms[keep, None]])

    def __repr__(self):
        return f"PolyhedralCone(dim={self.dim}, generators={self.generators.tolist()})"


class ConvexBody:
    """``conv(vertices) + cone(rays)``."""

    def __init__(self, vertices, rays=None, dim=None):
        V = np.asarray(vertices, dtype=float)
        if V.size == 0:
            if dim is None:
                raise ValueError("dim is required for an empty body")
            V = np.zeros((0, int(dim)))
        V = np.atleast_2d(V)
        self.dim = V.shape[1] if dim is None else int(dim)
        if V.shape[1] != self.dim:
            raise DimensionMismatch("vertex dimension mismatch")
        self.vertices = V
        R = np.zeros((0, self.dim)) if rays is None or len(rays) == 0 else np.atleast_2d(np.asarray(rays, float))
        self.rays = _polytope.dedupe_directions(R) if R.shape[0] else R

    @classmethod
    def empty(cls, dim):
        return cls(np.zeros((0, dim)), dim=dim)

    @property
    def is_empty(self):
        return self.vertices.shape[0] == 0

    @property
    def bounded(self):
        return self.rays.shape[0] == 0

    def reduced(self):
        if self.vertices.shape[0] <= 1:
            return self
        return ConvexBody(_polytope.hull_vertices(self.vertices), self.rays, self.dim)

    def linear_image(self, M):
        M = np.atleast_2d(np.asarray(M, dtype=float))
        return ConvexBody(self.vertices @ M.T, self.rays @ M.T if self.rays.size else None, dim=M.shape[0])

    def scaled(self, t):
        return ConvexBody(t * self.vertices, self.rays, self.dim)

    def distance(self, y):
        y = check_vector(y, self.dim, "y")
        if self.is_empty:
            return np.inf
        if self.bounded:
            return _polytope.polytope_distance(self.vertices, y)
        # truncate the recession cone; adequate for unit-scale queries
        M = 1e3 * (1.0 + np.linalg.norm(y) + np.abs(self.vertices).max())
        V = np.vstack([self.vertices] + [self.vertices + M * r for r in self.rays])
        return _polytope.polytope_distance(V, y)

    def contains(self, y, tol=None):
        return self.distance(y) <= resolve(tol).cert

    def support(self, c):
        c = check_vector(c, self.dim, "c")
        if any(c @ r > 1e-12 for r in self.rays):
            return np.inf
        return float(np.max(self.vertices @ c))

    def __repr__(self):
        return f"ConvexBody(dim={self.dim}, n_vertices={len(self.vertices)}, n_rays={len(self.rays)})"


def cone_ball_slice(cone, k_arc=K_ARC):
    """Polytope inner approximation of ``cone ∩ unit ball`` (contains 0).

    In R^1 and R^2 the arcs are sampled with ``k_arc`` points; in higher
    dimension normalized generators and normalized pairwise midpoints are used.
    Returns ``(body, sagitta)`` where ``sagitta`` bounds the radial gap to
    the exact slice.
    """
    n = cone.dim
    G = cone.generators
    if G.shape[0] == 0:
        return ConvexBody(np.zeros((1, n))), 0.0
    if n == 1:
        pts = [np.zeros(1)] + [np.sign(g) for g in G]
        return ConvexBody(_polytope.dedupe_points(np.array(pts))), 0.0
    if n == 2:
        if _covers_plane(G):
            start, span = 0.0, 2 * np.pi
        else:
            angles = np.sort(np.mod(np.arctan2(G[:, 1], G[:, 0]), 2 * np.pi))
            gaps = np.diff(np.append(angles, angles[0] + 2 * np.pi))
            i = int(np.argmax(gaps))
            start = angles[(i + 1) % len(angles)]
            span = 2 * np.pi - gaps[i]
            inner = np.mod(angles - start, 2 * np.pi)
            if abs(span - np.pi) < 1e-9 and not np.any((inner > 1e-9) & (inner < span - 1e-9)):
                # a line: two opposite rays
                u = np.array([np.cos(start), np.sin(start)])
                return ConvexBody(np.array([np.zeros(2), u, -u])), 0.0
        if span <= 1e-12:
            pts = np.array([[0.0, 0.0], [np.cos(start), np.sin(start)]])
            return ConvexBody(pts), 0.0
        k = min(4 * k_arc, max(2, int(np.ceil(k_arc * span / (np.pi / 2)))))
        t = start + np.linspace(0.0, span, k + 1)
        full = span >= 2 * np.pi - 1e-12
        if full:
            t = t[:-1]
        arc = np.column_stack([np.cos(t), np.sin(t)])
        V = arc if full else np.vstack([np.zeros((1, 2)), arc])
        return ConvexBody(V), 1.0 - np.cos(span / k / 2)
    units = list(G)
    for i, j in combinations(range(G.shape[0]), 2):
        m = G[i] + G[j]
        if np.linalg.norm(m) > 1e-9:
            units.append(m / np.linalg.norm(m))
    V = np.vstack([np.zeros((1, n)), np.array(units)])
    return ConvexBody(V), 1.0


def _covers_plane(G):
    """True if cone(G) in R^2 is the whole plane."""
    angles = np.sort(np.mod(np.arctan2(G[:, 1], G[:, 0]), 2 * np.pi))
    gaps = np.diff(np.append(angles, angles[0] + 2 * np.pi))
    return bool(np.max(gaps) < np.pi - 1e-12)


# ---------------------------------------------------------------------------
# constraint systems


class SmoothConstraint:
    """``func(x) <= level`` for a function exposing ``value``/``gradient``."""

    def __init__(self, func, level=0.0):
        self.func = func
        self.level = float(level)

    def value(self, x):
        return self.func.value(x) - self.level

    def gradient(self, x):
        return self.func.gradient(x)


class ConstraintSystem:
    """``{x : A x <= b, |x - c_j| <= r_j, smooth_k(x) <= 0}``."""

    def __init__(self, dim, A=None, b=None, centers=None, radii=None, smooth=(), convex=True):
        self.dim = int(dim)
        self.A = np.zeros((0, dim)) if A is None else check_matrix(A, dim)
        self.b = np.zeros(0) if b is None else np.atleast_1d(np.asarray(b, dtype=float))
        self.centers = np.zeros((0, dim)) if centers is None else np.atleast_2d(np.asarray(centers, float)).reshape(-1, dim)
        self.radii = np.zeros(0) if radii is None else np.atleast_1d(np.asarray(radii, dtype=float))
        self.smooth = tuple(smooth)
        self.convex = bool(convex)
        if self.A.shape[0] != self.b.shape[0] or self.centers.shape[0] != self.radii.shape[0]:
            raise DimensionMismatch("constraint data shape mismatch")

    def intersect(self, other):
        return ConstraintSystem(
            self.dim,
            np.vstack([self.A, other.A]),
            np.concatenate([self.b, other.b]),
            np.vstack([self.centers, other.centers]),
            np.concatenate([self.radii, other.radii]),
            self.smooth + other.smooth,
            self.convex and other.convex,
        )

    @property
    def closed_form(self):
        return not self.smooth

    @property
    def n_constraints(self):
        return self.A.shape[0] + self.centers.shape[0] + len(self.smooth)

    # -- membership -----------------------------------------------------
    def violation(self, X):
        """Largest constraint violation per row of ``X`` (<= 0 means inside)."""
        X = np.atleast_2d(X)
        out = np.full(X.shape[0], -np.inf)
        if self.A.shape[0]:
            out = np.maximum(out, np.max(X @ self.A.T - self.b, axis=1))
        if self.centers.shape[0]:
            d = np.linalg.norm(X[:, None, :] - self.centers[None, :, :], axis=2) - self.radii
            out = np.maximum(out, np.max(d, axis=1))
        for con in self.smooth:
            out = np.maximum(out, np.array([con.value(x) for x in X]))
        return out

    # -- closed-form projection ----------------------------------------
    @cached_property
    def _candidates(self):
        """Affine/spherical pieces obtained by fixing subsets of constraints active."""
        n = self.dim
        k_lin = self.A.shape[0]
        total = k_lin + self.centers.shape[0]
        out = []
        for size in range(0, min(n, total) + 1):
            for subset in combinations(range(total), size):
                lin = [i for i in subset if i < k_lin]
                balls = [i - k_lin for i in subset if i >= k_lin]
                rows = [self.A[i] for i in lin]
                rhs = [self.b[i] for i in lin]
                if balls:
                    c0, r0 = self.centers[balls[0]], self.radii[balls[0]]
                    for j in balls[1:]:
                        cj, rj = self.centers[j], self.radii[j]
                        rows.append(2.0 * (cj - c0))
                        rhs.append(cj @ cj - c0 @ c0 - rj * rj + r0 * r0)
                if rows:
                    L = np.array(rows)
                    h = np.array(rhs)
                    Lp = np.linalg.pinv(L, rcond=1e-12)
                    z0 = Lp @ h
                    if np.linalg.norm(L @ z0 - h) > 1e-9 * (1.0 + np.linalg.norm(h)):
                        continue
                    P = np.eye(n) - Lp @ L
                else:
                    z0 = np.zeros(n)
                    P = np.eye(n)
                P[np.abs(P) < 1e-15] = 0.0
                free_dim = int(round(np.trace(P)))
                if not balls:
                    out.append(("affine", z0, P, None, None, free_dim))
                    continue
                cp = z0 + P @ (c0 - z0)
                rr = r0 * r0 - np.sum((c0 - cp) ** 2)
                if rr < -1e-10 * (1.0 + r0 * r0):
                    continue
                out.append(("sphere", z0, P, cp, np.sqrt(max(rr, 0.0)), free_dim))
        return out

    def _closed_form_nearest(self, X, tol):
        X = np.atleast_2d(X)
        N, n = X.shape
        best_d = np.full(N, np.inf)
        best_p = np.full((N, n), np.nan)
        # candidates are exact up to rounding; a loose test would accept outside points
        feas_tol = 1e-10
        for kind, z0, P, cp, r, free_dim in self._candidates:
            Y = z0 + (X - z0) @ P.T
            if kind == "affine":
                cands = [Y]
            else:
                U = Y - cp
                nu = np.linalg.norm(U, axis=1, keepdims=True)
                if free_dim == 0:
                    cands = [np.broadcast_to(cp, Y.shape)] if r <= 1e-12 else []
                else:
                    fallback = P[:, int(np.argmax(np.linalg.norm(P, axis=0)))]
                    fallback = fallback / np.linalg.norm(fallback)
                    dirs = np.where(nu > 1e-14, U / np.where(nu > 1e-14, nu, 1.0), fallback)
                    cands = [cp + r * dirs]
                    if free_dim == 1:
                        cands.append(cp - r * dirs)
            for Z in cands:
                viol = self.violation(Z)
                ok = viol <= feas_tol * (1.0 + np.linalg.norm(Z, axis=1))
                d = np.linalg.norm(X - Z, axis=1)
                better = ok & (d < best_d)
                best_d[better] = d[better]
                best_p[better] = Z[better]
        return best_d, best_p

    # -- smooth projection --------------------------------------------
    def _slsqp_nearest_one(self, x, tol):
        cons = []
        if self.A.shape[0]:
            cons.append({"type": "ineq", "fun": lambda z: self.b - self.A @ z, "jac": lambda z: -self.A})
        for c, r in zip(self.centers, self.radii):
            cons.append({
                "type": "ineq",
                "fun": lambda z, c=c, r=r: r * r - (z - c) @ (z - c),
                "jac": lambda z, c=c: -2.0 * (z - c),
            })
        for con in self.smooth:
            cons.append({
                "type": "ineq",
                "fun": lambda z, con=con: -con.value(z),
                "jac": lambda z, con=con: -np.atleast_1d(con.gradient(z)),
            })
        best = (np.inf, None)
        starts = [x]
        rng = np.random.default_rng(0)
        starts += [x + 1e-3 * (1.0 + np.linalg.norm(x)) * rng.standard_normal(self.dim) for _ in range(2)]
        for z0 in starts:
            res = minimize(
                lambda z: 0.5 * np.sum((z - x) ** 2),
                z0,
                jac=lambda z: z - x,
                constraints=cons,
                method="SLSQP",
                options={"ftol": 1e-16, "maxiter": 500},
            )
            z = res.x
            if self.violation(z[None, :])[0] <= 10 * tol.membership:
                d = float(np.linalg.norm(z - x))
                if d < best[0]:
                    best = (d, z)
            if best[1] is not None and res.success:
                break
        return best

    def nearest(self, X, tol=None):
        """``(distances, nearest points)`` for each row of ``X``; inf if empty."""
        tol = resolve(tol)
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.closed_form:
            return self._closed_form_nearest(X, tol)
        d = np.full(X.shape[0], np.inf)
        P = np.full(X.shape, np.nan)
        inside = self.violation(X) <= 0.0
        d[inside] = 0.0
        P[inside] = X[inside]
        for i in np.flatnonzero(~inside):
            di, pi = self._slsqp_nearest_one(X[i], tol)
            if pi is not None:
                d[i], P[i] = di, pi
        return d, P

    # -- normal cones ----------------------------------------------------
    def active_gradients(self, a, tol):
        """``(linear_rows, nonlinear_gradients)`` active at ``a``."""
        lin = []
        if self.A.shape[0]:
            slack = self.A @ a - self.b
            scale = np.linalg.norm(self.A, axis=1) * (1.0 + np.linalg.norm(a))
            lin = [self.A[i] for i in np.flatnonzero(np.abs(slack) <= tol.active * scale)]
        nonlin = []
        for c, r in zip(self.centers, self.radii):
            if abs(np.linalg.norm(a - c) - r) <= tol.active * (1.0 + r):
                nonlin.append(a - c)
        for con in self.smooth:
            if abs(con.value(a)) <= tol.active * (1.0 + np.linalg.norm(a)):
                nonlin.append(np.atleast_1d(con.gradient(a)))
        return lin, nonlin

    def _cq_holds(self, lin, nonlin):
        """Mixed Mangasarian-Fromovitz check: linear rows weakly, others strictly."""
        if not nonlin:
            return True
        if any(np.linalg.norm(g) < 1e-12 for g in nonlin):
            return False
        G = np.array(nonlin)
        G = G / np.linalg.norm(G, axis=1, keepdims=True)
        A_ub = G
        b_ub = -np.ones(len(nonlin))
        if lin:
            L = np.array(lin)
            A_ub = np.vstack([G, L])
            b_ub = np.concatenate([b_ub, np.zeros(len(lin))])
        res = linprog(np.zeros(self.dim), A_ub=A_ub, b_ub=b_ub, bounds=[(-1e3, 1e3)] * self.dim, method="highs")
        return res.status == 0

    def is_singleton_at(self, a, tol):
        """True if the system's feasible set is ``{a}`` (support test in +/- e_i)."""
        M = 1e4 * (1.0 + np.linalg.norm(a))
        probes = np.vstack([a + M * np.eye(self.dim), a - M * np.eye(self.dim)])
        _, P = self.nearest(probes, tol)
        if np.any(np.isnan(P)):
            return False
        return bool(np.max(np.linalg.norm(P - a, axis=1)) <= 1e3 * tol.dist)

    def frechet_normal_cone(self, a, tol, owner=None):
        lin, nonlin = self.active_gradients(a, tol)
        if self._cq_holds(lin, nonlin):
            return PolyhedralCone(np.array(lin + nonlin) if (lin or nonlin) else np.zeros((0, self.dim)), self.dim)
        if self.is_singleton_at(a, tol):
            return PolyhedralCone.full(self.dim)
        if owner is None:
            raise UnsupportedStructure("constraint qualification fails at a non-isolated point")
        # certify candidate generators against the epsilon-normal definition
        eye = np.eye(self.dim)
        candidates = lin + nonlin + list(eye) + list(-eye)
        keep = [g for g in candidates if sampled_normal_test(owner, a, g, 0.0, n_samples=512, seed=0, tol=tol)]
        return PolyhedralCone(np.array(keep) if keep else np.zeros((0, self.dim)), self.dim)


# ---------------------------------------------------------------------------
# set expressions


class ClosedSet:
    """Base class: subclasses implement :meth:`systems`."""

    dim: int

    def systems(self):
        raise NotImplementedError

    @cached_property
    def _systems(self):
        return self.systems()

    @property
    def is_convex(self):
        s = self._systems
        return len(s) == 1 and s[0].convex

    def nearest(self, X, tol=None):
        """Distances and one nearest point per row of ``X``."""
        X = check_points(X, self.dim)
        best_d = np.full(X.shape[0], np.inf)
        best_p = np.full(X.shape, np.nan)
        for system in self._systems:
            d, P = system.nearest(X, tol)
            better = d < best_d
            best_d[better] = d[better]
            best_p[better] = P[better]
        if np.all(np.isinf(best_d)):
            raise EmptySet(f"{type(self).__name__} is empty")
        return best_d, best_p

    def distances(self, X, tol=None):
        return self.nearest(X, tol)[0]

    def distance(self, x, tol=None):
        x = check_vector(x, self.dim)
        return float(self.nearest(x[None, :], tol)[0][0])

    def project(self, x, tol=None):
        """All nearest points found (one per minimizing piece, deduplicated)."""
        tol = resolve(tol)
        x = check_vector(x, self.dim)
        found = []
        for system in self._systems:
            d, P = system.nearest(x[None, :], tol)
            if np.isfinite(d[0]):
                found.append((d[0], P[0]))
        if not found:
            raise EmptySet(f"{type(self).__name__} is empty")
        dmin = min(d for d, _ in found)
        pts = [p for d, p in found if d <= dmin + tol.dist * (1.0 + dmin)]
        return list(_polytope.dedupe_points(np.array(pts), tol=tol.dist))

    def contains(self, x, tol=None):
        tol = resolve(tol)
        return self.distance(x, tol) <= tol.membership * (1.0 + np.linalg.norm(x))

    def _pieces_at(self, a, tol):
        a = check_vector(a, self.dim, "a")
        pieces = []
        for system in self._systems:
            d, _ = system.nearest(a[None, :], tol)
            if d[0] <= tol.membership * (1.0 + np.linalg.norm(a)):
                pieces.append(system)
        if not pieces:
            raise PointNotInSet(f"point {a.tolist()} is not in the set")
        return a, pieces

    def frechet_normal_cone(self, a, tol=None):
        tol = resolve(tol)
        a, pieces = self._pieces_at(a, tol)
        cones = [p.frechet_normal_cone(a, tol, owner=self) for p in pieces]
        out = cones[0]
        for c in cones[1:]:
            out = out.intersect(c)
        return out

    def limiting_normal_cone(self, a, tol=None):
        tol = resolve(tol)
        a, pieces = self._pieces_at(a, tol)
        gens = [p.frechet_normal_cone(a, tol, owner=self).generators for p in pieces]
        return PolyhedralCone(np.vstack(gens), self.dim)


class HalfspaceSystem(ClosedSet):
    """``{x : A x <= b}``."""

    def __init__(self, A, b):
        A = check_matrix(A)
        b = np.atleast_1d(np.asarray(b, dtype=float))
        if b.shape[0] != A.shape[0]:
            raise DimensionMismatch("A and b have incompatible shapes")
        self.A, self.b = A, b
        self.dim = A.shape[1]

    def systems(self):
        zero = np.linalg.norm(self.A, axis=1) == 0
        if np.any(self.b[zero] < 0):
            return [ConstraintSystem(self.dim, np.zeros((1, self.dim)), [-1.0])]
        return [ConstraintSystem(self.dim, self.A[~zero], self.b[~zero])]

    def __repr__(self):
        return f"HalfspaceSystem(A={self.A.tolist()}, b={self.b.tolist()})"


class Ball(ClosedSet):
    def __init__(self, center, radius):
        self.center = check_vector(center, name="center")
        self.radius = float(radius)
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")
        self.dim = self.center.shape[0]

    def systems(self):
        return [ConstraintSystem(self.dim, centers=self.center[None, :], radii=[self.radius])]

    def __repr__(self):
        return f"Ball(center={self.center.tolist()}, radius={self.radius})"


class Singleton(Ball):
    def __init__(self, point):
        super().__init__(point, 0.0)

    def __repr__(self):
        return f"Singleton({self.center.tolist()})"


class Union(ClosedSet):
    def __init__(self, children):
        children = list(children)
        if not children:
            raise ValueError("Union needs at least one child")
        dims = {c.dim for c in children}
        if len(dims) != 1:
            raise DimensionMismatch("Union children differ in dimension")
        self.children = children
        self.dim = dims.pop()

    def systems(self):
        return [s for c in self.children for s in c._systems]

    def __repr__(self):
        return f"Union({self.children!r})"


class Intersection(ClosedSet):
    def __init__(self, children):
        children = list(children)
        if not children:
            raise ValueError("Intersection needs at least one child")
        dims = {c.dim for c in children}
        if len(dims) != 1:
            raise DimensionMismatch("Intersection children differ in dimension")
        self.children = children
        self.dim = dims.pop()

    def systems(self):
        out = self.children[0]._systems
        for child in self.children[1:]:
            out = [s.intersect(t) for s in out for t in child._systems]
        return out

    def __repr__(self):
        return f"Intersection({self.children!r})"


class SublevelSet(ClosedSet):
    """``{x : f(x) <= level}``; structure is taken from ``f.constraint_systems``."""

    def __init__(self, f, level=0.0):
        self.f = f
        self.level = float(level)
        self.dim = f.dim

    def systems(self):
        return self.f.constraint_systems(self.level)

    def __repr__(self):
        return f"SublevelSet({self.f!r}, {self.level})"


# ---------------------------------------------------------------------------
# module-level operations


def distance(S, x, tol=None):
    """Euclidean distance from ``x`` to ``S``."""
    return S.distance(x, tol)


def project(S, x, tol=None):
    return S.project(x, tol)


def frechet_normal_cone(S, a, tol=None):
    return S.frechet_normal_cone(a, tol)


def limiting_normal_cone(S, a, tol=None):
    return S.limiting_normal_cone(a, tol)


def cone_membership(K, v, tol=None):
    """``v`` in ``cone(K.generators)`` up to a normalized NNLS residual of ``tol.cert``."""
    return K.contains(v, tol)


def sampled_normal_test(S, a, v, eps=0.0, n_samples=2000, seed=0, delta0=1e-2, tol=None):
    """Check the epsilon-normal inequality on points of ``S`` sampled near ``a``.

    Points are obtained by projecting onto ``S`` random probes at radii spread
    log-uniformly between ``10 * tol.dist`` and ``delta0``.  Returns False iff
    some sample satisfies ``<v, x - a> > (eps + tol.cert) * |x - a|`` beyond
    the membership slack of the sampled point.
    """
    tol = resolve(tol)
    a = check_vector(a, S.dim, "a")
    v = check_vector(v, S.dim, "v")
    if np.linalg.norm(v) == 0:
        return True
    rng = derived_rng(seed, 1)
    lo, hi = np.log(10 * tol.dist), np.log(delta0)
    radii = np.exp(rng.uniform(lo, hi, n_samples))
    Y = a + sphere_samples(rng, n_samples, S.dim) * radii[:, None]
    # also probe along +/- v, where violations of a candidate normal concentrate
    t = np.exp(np.linspace(lo, hi, 32))
    u = v / np.linalg.norm(v)
    Y = np.vstack([Y, a + t[:, None] * u, a - t[:, None] * u])
    _, X = S.nearest(Y, tol)
    D = X - a
    r = np.linalg.norm(D, axis=1)
    keep = (r > 10 * tol.dist) & (r <= 2 * delta0) & np.isfinite(r)
    lhs = D[keep] @ v
    # sampled points are only known to lie in S up to the membership tolerance
    slack = np.linalg.norm(v) * tol.membership * (1.0 + np.linalg.norm(X[keep], axis=1))
    return bool(np.all(lhs <= (eps + tol.cert) * r[keep] + slack))
