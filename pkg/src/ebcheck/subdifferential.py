"""Fréchet, limiting and singular subdifferentials as finitely generated bodies.

The rules are the exact finite-dimensional ones for the expression classes in
:mod:`ebcheck.functions`: gradients for smooth pieces, convex hulls of active
gradients for maxima, normal-cone slices for distance functions at points of
the set, and the chain rule through a surjective Jacobian.
"""
from dataclasses import dataclass, field

import numpy as np

from . import _polytope
from . import functions as fn
from ._config import K_ARC, TOL_RANK, resolve
from .exceptions import NotDifferentiableHere, SurjectivityFailure, UnboundedBody, UnsupportedStructure
from .geometry import ConvexBody, PolyhedralCone, cone_ball_slice
from .validation import check_vector, derived_rng, sphere_samples

FRECHET = "Frechet"
LIMITING = "Limiting"


@dataclass
class Subdifferential:
    """A subdifferential stored as ``body`` plus its ``singular`` cone.

    When the set is a union of convex pieces that is not itself convex,
    ``pieces`` lists them, ``nonconvex`` is set and ``body`` is their hull.
    ``sagitta`` bounds the gap of polygonal arc approximations.
    """

    body: ConvexBody
    singular: PolyhedralCone
    kind: str = FRECHET
    pieces: list = field(default_factory=list)
    nonconvex: bool = False
    sagitta: float = 0.0

    @property
    def dim(self):
        return self.body.dim

    @property
    def vertices(self):
        return self.body.vertices

    def contains(self, v, tol=None):
        tol = resolve(tol)
        slack = tol.cert + self.sagitta
        if self.nonconvex:
            return any(p.distance(v) <= slack for p in self.pieces)
        return self.body.distance(v) <= slack


def _point_body(v):
    return ConvexBody(np.atleast_2d(v))


def _hull(bodies, dim):
    bodies = [b for b in bodies if not b.is_empty]
    if not bodies:
        return ConvexBody.empty(dim)
    V = np.vstack([b.vertices for b in bodies])
    rays = [b.rays for b in bodies if b.rays.size]
    return ConvexBody(_polytope.hull_vertices(_polytope.dedupe_points(V)), np.vstack(rays) if rays else None, dim)


def _wrap(body, kind=FRECHET, sagitta=0.0, pieces=None):
    pieces = pieces or []
    return Subdifferential(
        body, PolyhedralCone.zero(body.dim), kind, pieces, nonconvex=len(pieces) > 1, sagitta=sagitta
    )


def _ball_body(dim, radius):
    body, sag = cone_ball_slice(PolyhedralCone.full(dim))
    return body.scaled(radius), sag * radius


def _surjective_jacobian(psi, x, tol_rank=TOL_RANK):
    J = psi.jacobian(x)
    s = np.linalg.svd(J, compute_uv=False)
    if s.size < J.shape[0] or s.min() <= tol_rank:
        raise SurjectivityFailure(f"Jacobian has rank < {J.shape[0]} at {np.asarray(x).tolist()}")
    return J


# ---------------------------------------------------------------------------
# Fréchet subdifferential


def frechet_subdiff(f, x, tol=None):
    """Fréchet subdifferential of ``f`` at ``x``.

    For maxima whose active pieces are nonsmooth, the hull of the pieces'
    Fréchet bodies is returned.  Every vector of that hull is a Fréchet
    subgradient, so the result is exact for smooth pieces and an inner
    estimate otherwise.
    """
    tol = resolve(tol)
    x = check_vector(x, f.dim)
    if isinstance(f, (fn.Affine, fn.Quadratic)):
        return _wrap(_point_body(f.gradient(x)))
    if isinstance(f, fn.NormScaled):
        if np.linalg.norm(x) > tol.active:
            return _wrap(_point_body(f.gradient(x)))
        body, sag = _ball_body(f.dim, f.weight)
        return _wrap(body, sagitta=sag)
    if isinstance(f, fn.DistTo):
        return _distance_subdiff(f, x, tol, limiting=False)
    if isinstance(f, fn.Max):
        subs = [frechet_subdiff(f.pieces[i], x, tol) for i in f.active(x, tol)]
        sag = max(s.sagitta for s in subs)
        return _wrap(_hull([s.body for s in subs], f.dim), sagitta=sag)
    if isinstance(f, fn.Min):
        subs = [frechet_subdiff(f.pieces[i], x, tol) for i in f.active(x, tol)]
        if any(len(s.vertices) != 1 or s.body.rays.size for s in subs):
            raise UnsupportedStructure("Fréchet rule for min is implemented for smooth active pieces")
        first = subs[0].vertices[0]
        if all(np.allclose(s.vertices[0], first, atol=tol.cert) for s in subs):
            return _wrap(_point_body(first))
        return _wrap(ConvexBody.empty(f.dim))
    if isinstance(f, fn.ComposeConvexSmooth):
        J = _surjective_jacobian(f.psi, x)
        inner = frechet_subdiff(f.g, f.psi.value(x), tol)
        return _wrap(inner.body.linear_image(J.T), sagitta=inner.sagitta * np.linalg.norm(J, 2))
    try:
        return _wrap(_point_body(f.gradient(x, tol)))
    except NotDifferentiableHere as exc:
        raise UnsupportedStructure(f"no subdifferential rule for {type(f).__name__}") from exc


def _distance_subdiff(f, x, tol, limiting):
    S = f.S
    d = S.distance(x, tol)
    if d > tol.dist:
        proj = S.project(x, tol)
        grads = [(x - p) / d for p in proj]
        if len(grads) == 1:
            return _wrap(_point_body(grads[0]))
        # several nearest points: the limiting set is the finite set of unit
        # vectors toward x, which is never convex
        pieces = [_point_body(g) for g in grads]
        return _wrap(_hull(pieces, f.dim), kind=LIMITING, pieces=pieces)
    if not limiting:
        body, sag = cone_ball_slice(S.frechet_normal_cone(x, tol))
        return _wrap(body, sagitta=sag)
    _, systems = S._pieces_at(x, tol)
    slices = [cone_ball_slice(s.frechet_normal_cone(x, tol, owner=S)) for s in systems]
    bodies = [b for b, _ in slices]
    sag = max(s for _, s in slices)
    return _wrap(_hull(bodies, f.dim), kind=LIMITING, sagitta=sag)


# ---------------------------------------------------------------------------
# limiting subdifferential


def limiting_subdiff(f, x, tol=None):
    """Limiting subdifferential by enumeration of the structural pieces at ``x``."""
    tol = resolve(tol)
    x = check_vector(x, f.dim)
    if isinstance(f, fn.DistTo):
        return _distance_subdiff(f, x, tol, limiting=True)
    if isinstance(f, fn.Max):
        subs = [limiting_subdiff(f.pieces[i], x, tol) for i in f.active(x, tol)]
        bodies = [b for s in subs for b in (s.pieces or [s.body])]
        out = _wrap(_hull(bodies, f.dim), kind=LIMITING, sagitta=max(s.sagitta for s in subs))
        return out
    if isinstance(f, fn.Min):
        subs = [limiting_subdiff(f.pieces[i], x, tol) for i in f.active(x, tol)]
        pieces = [b for s in subs for b in (s.pieces or [s.body])]
        unique = []
        for p in pieces:
            if not any(
                p.vertices.shape == q.vertices.shape and np.allclose(p.vertices, q.vertices) for q in unique
            ):
                unique.append(p)
        return _wrap(_hull(unique, f.dim), kind=LIMITING, pieces=unique if len(unique) > 1 else None,
                     sagitta=max(s.sagitta for s in subs))
    out = frechet_subdiff(f, x, tol)
    out.kind = LIMITING
    return out


def singular_subdiff(f, x, tol=None):
    """Singular subdifferential; zero for every supported (Lipschitz) class."""
    return PolyhedralCone.zero(f.dim)


# ---------------------------------------------------------------------------
# oracles and hulls


def subdiff_membership_oracle(f, x, v, eta=1e-6, n_samples=2000, seed=0, delta0=1e-2, n_levels=12):
    """Sampled check of ``f(u) - f(x) - <v, u - x> >= -eta |u - x|`` near ``x``.

    Radii sweep ``delta0 * 2**-j`` for ``j < n_levels``; directions are random
    unit vectors plus the coordinate directions.  Returns False on the first
    violation.
    """
    x = check_vector(x, f.dim)
    v = check_vector(v, f.dim, "v")
    rng = derived_rng(seed, 2)
    eye = np.eye(f.dim)
    per_level = max(1, n_samples // n_levels)
    fx = f.value(x)
    for j in range(n_levels):
        r = delta0 * 2.0 ** -j
        D = np.vstack([eye, -eye, sphere_samples(rng, per_level, f.dim)])
        U = x + r * D
        gap = f.values(U) - fx - (U - x) @ v
        if np.any(gap < -eta * r):
            return False
    return True


def scaled_union_hull(body, tau):
    """``conv({0} ∪ tau * body)``, the union of ``lam * body`` over ``lam`` in [0, tau]."""
    if not body.bounded:
        raise UnboundedBody("the star hull needs a bounded body")
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    V = np.vstack([np.zeros((1, body.dim)), tau * body.vertices])
    return ConvexBody(_polytope.dedupe_points(V), dim=body.dim)


def inscribed_radius(body):
    """Radius of the largest Euclidean ball centred at 0 inside a bounded body.

    Zero when the body is flat or the origin is not interior.
    """
    if body.is_empty:
        return 0.0
    normals, offsets, _, basis, _ = _polytope.body_facets(body.vertices)
    if basis.shape[1] < body.dim or normals.shape[0] == 0:
        return 0.0
    r = offsets / np.linalg.norm(normals, axis=1)
    return float(max(0.0, r.min()))


def arc_points(start, stop, k=K_ARC):
    """Unit vectors on the planar arc from angle ``start`` to ``stop``."""
    t = np.linspace(start, stop, k + 1)
    return np.column_stack([np.cos(t), np.sin(t)])
