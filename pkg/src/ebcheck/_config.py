"""Numerical tolerances shared by every module."""
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    membership: float = 1e-7
    active: float = 1e-7
    dist: float = 1e-7
    cert: float = 1e-6

    def with_cert(self, cert):
        return replace(self, cert=float(cert))


DEFAULT_TOL = Tolerances()

# vertices placed on each circular arc of a cone/ball slice
K_ARC = 64
# singular values below this count as rank deficiency
TOL_RANK = 1e-8


def resolve(tol):
    return DEFAULT_TOL if tol is None else tol
