"""Structured function expressions and smooth maps.

A :class:`FuncExpr` is finite-valued on R^n and knows how to evaluate itself
(pointwise and batched), differentiate where it is smooth, and describe its
sublevel sets as unions of constraint systems for :mod:`ebcheck.geometry`.
"""
import numpy as np

from . import geometry as geo
from ._config import resolve
from .exceptions import DimensionMismatch, NotDifferentiableHere
from .validation import check_matrix, check_points, check_vector, derived_rng


class FuncExpr:
    dim: int
    #: structural convexity (True only when guaranteed by construction)
    convex = False
    smooth = False
    lipschitz = True

    def value(self, x):
        x = check_vector(x, self.dim)
        return float(self.values(x[None, :])[0])

    def __call__(self, x):
        return self.value(x)

    def values(self, X):
        raise NotImplementedError

    def gradient(self, x, tol=None):
        raise NotDifferentiableHere(f"{type(self).__name__} has no gradient rule")

    def constraint_systems(self, level):
        """Sublevel set ``{f <= level}`` as a list of constraint systems."""
        return [geo.ConstraintSystem(self.dim, smooth=[geo.SmoothConstraint(self, level)], convex=self.convex)]

    def solution_set(self):
        return geo.SublevelSet(self, 0.0)

    def _batch(self, X):
        return check_points(X, self.dim)


def _infeasible(dim):
    return geo.ConstraintSystem(dim, np.zeros((1, dim)), [-1.0])


class Affine(FuncExpr):
    """``x -> a.x + b``."""

    convex = True
    smooth = True

    def __init__(self, a, b=0.0):
        self.a = check_vector(a, name="a")
        self.b = float(b)
        self.dim = self.a.shape[0]

    def values(self, X):
        return self._batch(X) @ self.a + self.b

    def gradient(self, x, tol=None):
        check_vector(x, self.dim)
        return self.a.copy()

    def hessian(self):
        return np.zeros((self.dim, self.dim))

    def constraint_systems(self, level):
        if np.linalg.norm(self.a) == 0:
            return [geo.ConstraintSystem(self.dim)] if self.b <= level else [_infeasible(self.dim)]
        return [geo.ConstraintSystem(self.dim, self.a[None, :], [level - self.b])]

    def solution_set(self):
        return geo.HalfspaceSystem(self.a[None, :], [-self.b])

    def __repr__(self):
        return f"Affine({self.a.tolist()}, {self.b})"


class Quadratic(FuncExpr):
    """``x -> x'Qx + c.x + d`` with ``Q`` symmetrized on construction."""

    smooth = True

    def __init__(self, Q, c=None, d=0.0):
        Q = check_matrix(Q)
        if Q.shape[0] != Q.shape[1]:
            raise DimensionMismatch("Q must be square")
        self.Q = 0.5 * (Q + Q.T)
        self.dim = Q.shape[0]
        self.c = np.zeros(self.dim) if c is None else check_vector(c, self.dim, "c")
        self.d = float(d)
        eig = np.linalg.eigvalsh(self.Q)
        self.convex = bool(eig.min() >= -1e-12)

    def values(self, X):
        X = self._batch(X)
        return np.einsum("ij,jk,ik->i", X, self.Q, X) + X @ self.c + self.d

    def gradient(self, x, tol=None):
        x = check_vector(x, self.dim)
        return 2.0 * self.Q @ x + self.c

    def hessian(self):
        return 2.0 * self.Q

    def _isotropic(self):
        q = self.Q[0, 0]
        if q > 0 and np.allclose(self.Q, q * np.eye(self.dim), atol=1e-14):
            return q
        return None

    def constraint_systems(self, level):
        if np.allclose(self.Q, 0.0):
            return Affine(self.c, self.d).constraint_systems(level)
        q = self._isotropic()
        if q is not None:
            center = -self.c / (2 * q)
            r2 = (level - self.d) / q + center @ center
            if r2 < 0:
                return [_infeasible(self.dim)]
            return [geo.ConstraintSystem(self.dim, centers=center[None, :], radii=[np.sqrt(r2)])]
        return super().constraint_systems(level)

    def solution_set(self):
        if np.allclose(self.Q, 0.0):
            return Affine(self.c, self.d).solution_set()
        q = self._isotropic()
        if q is not None:
            center = -self.c / (2 * q)
            r2 = -self.d / q + center @ center
            if abs(r2) <= 1e-15:
                return geo.Singleton(center)
            if r2 > 0:
                return geo.Ball(center, np.sqrt(r2))
        return geo.SublevelSet(self, 0.0)

    def __repr__(self):
        return f"Quadratic({self.Q.tolist()}, {self.c.tolist()}, {self.d})"


class DistTo(FuncExpr):
    """Euclidean distance to a closed set."""

    def __init__(self, S):
        self.S = S
        self.dim = S.dim
        self.convex = S.is_convex

    def values(self, X):
        return self.S.distances(self._batch(X))

    def gradient(self, x, tol=None):
        tol = resolve(tol)
        x = check_vector(x, self.dim)
        d = self.S.distance(x, tol)
        if d <= tol.dist:
            if self.S.frechet_normal_cone(x, tol).is_zero:
                return np.zeros(self.dim)
            raise NotDifferentiableHere("distance function at a boundary point")
        proj = self.S.project(x, tol)
        if len(proj) > 1:
            raise NotDifferentiableHere("nearest point is not unique")
        return (x - proj[0]) / d

    def constraint_systems(self, level):
        if level == 0.0:
            return self.S._systems
        if level < 0:
            return [_infeasible(self.dim)]
        return super().constraint_systems(level)

    def solution_set(self):
        return self.S

    def __repr__(self):
        return f"DistTo({self.S!r})"


class NormScaled(FuncExpr):
    """``x -> weight * |x|``."""

    convex = True

    def __init__(self, weight, dim):
        self.weight = float(weight)
        if not self.weight > 0:
            raise ValueError("weight must be positive")
        self.dim = int(dim)

    def values(self, X):
        return self.weight * np.linalg.norm(self._batch(X), axis=1)

    def gradient(self, x, tol=None):
        x = check_vector(x, self.dim)
        n = np.linalg.norm(x)
        if n <= resolve(tol).active:
            raise NotDifferentiableHere("norm at the origin")
        return self.weight * x / n

    def constraint_systems(self, level):
        if level < 0:
            return [_infeasible(self.dim)]
        return [geo.ConstraintSystem(self.dim, centers=np.zeros((1, self.dim)), radii=[level / self.weight])]

    def solution_set(self):
        return geo.Singleton(np.zeros(self.dim))

    def __repr__(self):
        return f"NormScaled({self.weight}, dim={self.dim})"


class _PiecewiseBase(FuncExpr):
    def __init__(self, pieces):
        pieces = list(pieces)
        if not pieces:
            raise ValueError(f"{type(self).__name__} needs at least one piece")
        dims = {p.dim for p in pieces}
        if len(dims) != 1:
            raise DimensionMismatch("pieces differ in input dimension")
        self.pieces = pieces
        self.dim = dims.pop()

    def piece_values(self, x):
        return np.array([p.value(x) for p in self.pieces])

    def active(self, x, tol=None):
        """Indices of pieces attaining the max/min within ``tol.active``."""
        tol = resolve(tol)
        vals = self.piece_values(x)
        best = self._select(vals)
        return [i for i, v in enumerate(vals) if abs(v - best) <= tol.active * (1.0 + abs(best))]

    def gradient(self, x, tol=None):
        x = check_vector(x, self.dim)
        act = self.active(x, tol)
        grads = [self.pieces[i].gradient(x, tol) for i in act]
        if all(np.allclose(g, grads[0], atol=1e-12) for g in grads):
            return grads[0]
        raise NotDifferentiableHere(f"{len(act)} active pieces with distinct gradients")


class Max(_PiecewiseBase):
    _select = staticmethod(np.max)

    @property
    def convex(self):
        return all(p.convex for p in self.pieces)

    def values(self, X):
        X = self._batch(X)
        return np.max(np.column_stack([p.values(X) for p in self.pieces]), axis=1)

    def constraint_systems(self, level):
        out = self.pieces[0].constraint_systems(level)
        for p in self.pieces[1:]:
            out = [s.intersect(t) for s in out for t in p.constraint_systems(level)]
        return out

    def solution_set(self):
        if all(isinstance(p, Affine) for p in self.pieces):
            A = np.array([p.a for p in self.pieces])
            b = np.array([-p.b for p in self.pieces])
            return geo.HalfspaceSystem(A, b)
        return geo.Intersection([p.solution_set() for p in self.pieces])

    def __repr__(self):
        return f"Max({self.pieces!r})"


class Min(_PiecewiseBase):
    _select = staticmethod(np.min)

    def values(self, X):
        X = self._batch(X)
        return np.min(np.column_stack([p.values(X) for p in self.pieces]), axis=1)

    def constraint_systems(self, level):
        return [s for p in self.pieces for s in p.constraint_systems(level)]

    def solution_set(self):
        return geo.Union([p.solution_set() for p in self.pieces])

    def __repr__(self):
        return f"Min({self.pieces!r})"


class SmoothMap:
    """``psi(x) = (phi_1(x), ..., phi_m(x))`` with affine/quadratic components."""

    def __init__(self, components):
        components = list(components)
        if not components:
            raise ValueError("a smooth map needs at least one component")
        for c in components:
            if not isinstance(c, (Affine, Quadratic)):
                raise TypeError("smooth map components must be Affine or Quadratic")
        dims = {c.dim for c in components}
        if len(dims) != 1:
            raise DimensionMismatch("components differ in input dimension")
        self.components = components
        self.dim = dims.pop()
        self.out_dim = len(components)

    @classmethod
    def identity(cls, n):
        return cls([Affine(e, 0.0) for e in np.eye(n)])

    @classmethod
    def linear(cls, M, offset=None):
        M = check_matrix(M)
        offset = np.zeros(M.shape[0]) if offset is None else check_vector(offset, M.shape[0])
        return cls([Affine(row, o) for row, o in zip(M, offset)])

    @property
    def is_affine(self):
        return all(isinstance(c, Affine) or np.allclose(c.Q, 0.0) for c in self.components)

    def affine_parts(self):
        """``(M, offset)`` for an affine map."""
        M = np.array([c.a if isinstance(c, Affine) else c.c for c in self.components])
        off = np.array([c.b if isinstance(c, Affine) else c.d for c in self.components])
        return M, off

    def value(self, x):
        x = check_vector(x, self.dim)
        return np.array([c.value(x) for c in self.components])

    __call__ = value

    def values(self, X):
        X = check_points(X, self.dim)
        return np.column_stack([c.values(X) for c in self.components])

    def jacobian(self, x):
        x = check_vector(x, self.dim)
        return np.array([c.gradient(x) for c in self.components])

    def pullback(self, y_coef, y_const=0.0):
        """The function ``x -> y_coef . psi(x) + y_const`` as Affine/Quadratic."""
        y_coef = check_vector(y_coef, self.out_dim)
        a = np.zeros(self.dim)
        Q = np.zeros((self.dim, self.dim))
        const = float(y_const)
        for w, c in zip(y_coef, self.components):
            if isinstance(c, Affine):
                a += w * c.a
                const += w * c.b
            else:
                Q += w * c.Q
                a += w * c.c
                const += w * c.d
        if np.allclose(Q, 0.0):
            return Affine(a, const)
        return Quadratic(Q, a, const)

    def __repr__(self):
        return f"SmoothMap({self.components!r})"


def _polyhedral_rows(g):
    """Rows ``(c, d)`` with ``g(y) = max_i c_i.y + d_i`` if ``g`` is polyhedral."""
    if isinstance(g, Affine):
        return [(g.a, g.b)]
    if isinstance(g, Max) and all(isinstance(p, Affine) for p in g.pieces):
        return [(p.a, p.b) for p in g.pieces]
    return None


def midpoint_convexity_violation(g, n_pairs=1000, radius=2.0, seed=0, center=None):
    """Largest ``g(mid) - (g(u)+g(v))/2`` over random pairs (<= 0 for convex g)."""
    rng = derived_rng(seed, 7)
    c = np.zeros(g.dim) if center is None else check_vector(center, g.dim)
    U = c + rng.uniform(-radius, radius, (n_pairs, g.dim))
    V = c + rng.uniform(-radius, radius, (n_pairs, g.dim))
    gap = g.values(0.5 * (U + V)) - 0.5 * (g.values(U) + g.values(V))
    return float(np.max(gap))


class ComposeConvexSmooth(FuncExpr):
    """``x -> g(psi(x))`` with ``g`` convex (validated by midpoint tests)."""

    def __init__(self, g, psi, validate=True, tol=None):
        if g.dim != psi.out_dim:
            raise DimensionMismatch(f"g expects dimension {g.dim}, psi returns {psi.out_dim}")
        self.g = g
        self.psi = psi
        self.dim = psi.dim
        if validate:
            viol = midpoint_convexity_violation(g)
            if viol > resolve(tol).cert * 10:
                raise ValueError(f"g failed the midpoint convexity test (gap {viol:.3g})")
        self.convex = g.convex and psi.is_affine

    def values(self, X):
        return self.g.values(self.psi.values(self._batch(X)))

    def gradient(self, x, tol=None):
        x = check_vector(x, self.dim)
        return self.psi.jacobian(x).T @ self.g.gradient(self.psi.value(x), tol)

    def _flat_quadratic(self):
        """``g∘psi`` as a single quadratic when ``g`` is quadratic and ``psi`` affine."""
        if not (isinstance(self.g, Quadratic) and self.psi.is_affine):
            return None
        M, off = self.psi.affine_parts()
        Q, c = self.g.Q, self.g.c
        return Quadratic(M.T @ Q @ M, M.T @ (2.0 * Q @ off + c), off @ Q @ off + c @ off + self.g.d)

    def constraint_systems(self, level):
        flat = self._flat_quadratic()
        if flat is not None:
            return flat.constraint_systems(level)
        rows = _polyhedral_rows(self.g)
        if rows is None:
            return super().constraint_systems(level)
        out = [geo.ConstraintSystem(self.dim)]
        for c, d in rows:
            out = [s.intersect(t) for s in out for t in self.psi.pullback(c, d).constraint_systems(level)]
        return out

    def solution_set(self):
        rows = _polyhedral_rows(self.g)
        if rows is not None and self.psi.is_affine:
            M, off = self.psi.affine_parts()
            A = np.array([c @ M for c, _ in rows])
            b = np.array([-(c @ off + d) for c, d in rows])
            return geo.HalfspaceSystem(A, b)
        flat = self._flat_quadratic()
        if flat is not None:
            return flat.solution_set()
        if isinstance(self.g, NormScaled) and self.psi.is_affine:
            # weight * |M x + off| <= 0 exactly on the affine subspace M x = -off
            M, off = self.psi.affine_parts()
            return geo.HalfspaceSystem(np.vstack([M, -M]), np.concatenate([-off, off]))
        return geo.SublevelSet(self, 0.0)

    def __repr__(self):
        return f"ComposeConvexSmooth({self.g!r}, {self.psi!r})"


# ---------------------------------------------------------------------------
# module-level operations


def eval(f, x):  # noqa: A001 - mirrors the operation name
    return f.value(x)


def plus_part(f, x):
    """``max(f(x), 0)``."""
    return max(f.value(x), 0.0)


def plus_parts(f, X):
    return np.maximum(f.values(X), 0.0)


def gradient(f, x, tol=None):
    return f.gradient(x, tol)


def solution_set(f):
    return f.solution_set()


def jacobian(psi, x):
    return psi.jacobian(x)


def finite_difference_gradient(func, x, h=1e-5):
    """Central differences of a scalar function."""
    x = check_vector(x)
    g = np.zeros_like(x)
    for i in range(x.shape[0]):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (func(x + e) - func(x - e)) / (2 * h)
    return g


def gradient_check(f, x, h=1e-5):
    """Relative error between the closed-form gradient and central differences."""
    g = f.gradient(x)
    fd = finite_difference_gradient(f.value, x, h)
    return float(np.linalg.norm(g - fd) / max(1.0, np.linalg.norm(fd)))
