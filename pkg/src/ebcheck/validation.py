"""Input validation helpers in the spirit of ``sklearn.utils.validation``."""
import numpy as np

from .exceptions import DimensionMismatch


def check_vector(x, dim=None, name="x"):
    """Return ``x`` as a finite 1-D float array, optionally of length ``dim``."""
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.ndim != 1:
        raise DimensionMismatch(f"{name} must be a vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    if dim is not None and arr.shape[0] != dim:
        raise DimensionMismatch(f"{name} has dimension {arr.shape[0]}, expected {dim}")
    return arr


def check_points(X, dim=None, name="X"):
    """Return ``X`` as a 2-D float array of row points."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1) if dim == 1 else arr.reshape(1, -1)
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {arr.shape}")
    if dim is not None and arr.shape[1] != dim:
        raise DimensionMismatch(f"{name} has {arr.shape[1]} columns, expected {dim}")
    return arr


def check_matrix(A, n_cols=None, name="A"):
    arr = np.asarray(A, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be a matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    if n_cols is not None and arr.shape[1] != n_cols:
        raise DimensionMismatch(f"{name} has {arr.shape[1]} columns, expected {n_cols}")
    return arr


def check_positive(value, name):
    value = float(value)
    if not value > 0 or not np.isfinite(value):
        raise ValueError(f"{name} must be a positive finite number, got {value}")
    return value


def derived_rng(seed, *keys):
    """Generator seeded from ``(seed, *keys)`` so results never depend on call order."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, keys)]))


def unit_ball_samples(rng, n_samples, dim, radius=1.0):
    """Uniform samples in the closed Euclidean ball of given radius."""
    g = rng.standard_normal((n_samples, dim))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    r = radius * rng.random((n_samples, 1)) ** (1.0 / dim)
    return g / norms * r


def sphere_samples(rng, n_samples, dim):
    g = rng.standard_normal((n_samples, dim))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return g / norms
