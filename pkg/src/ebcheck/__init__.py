"""Numerical verification of local error bounds for nonsmooth inequalities.

The modules mirror the layers of the theory: ``geometry`` (sets, cones,
convex bodies), ``functions`` (expression trees), ``subdifferential``,
``epigraph``, ``errorbound`` (modulus estimation and Hoffman constants),
``certificates`` (dual sufficient and necessary conditions) and
``composite`` (convex functions of smooth maps).
"""
from . import (
    batteries,
    certificates,
    composite,
    epigraph,
    errorbound,
    functions,
    geometry,
    subdifferential,
)
from ._config import DEFAULT_TOL, Tolerances
from .certificates import (
    CertificateReport,
    check_thm31,
    check_thm32,
    check_thm33,
    check_thm34,
    check_thm35,
    cone_slice_in_body,
    tau_star_search,
)
from .composite import CompositeProblem, chain_subdiff, metric_regularity_kappa
from .errorbound import ModulusEstimator, ModulusQuery, estimate_modulus, hoffman_constant
from .exceptions import EBError, ProblemParseError
from .functions import Affine, ComposeConvexSmooth, DistTo, Max, Min, NormScaled, Quadratic, SmoothMap
from .geometry import Ball, ConvexBody, HalfspaceSystem, Intersection, PolyhedralCone, Singleton, Union
from .subdifferential import frechet_subdiff, limiting_subdiff, singular_subdiff, subdiff_membership_oracle

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOL", "Tolerances", "EBError", "ProblemParseError",
    "Affine", "Quadratic", "DistTo", "NormScaled", "Max", "Min", "SmoothMap", "ComposeConvexSmooth",
    "Ball", "ConvexBody", "HalfspaceSystem", "Intersection", "PolyhedralCone", "Singleton", "Union",
    "frechet_subdiff", "limiting_subdiff", "singular_subdiff", "subdiff_membership_oracle",
    "ModulusEstimator", "ModulusQuery", "estimate_modulus", "hoffman_constant",
    "CertificateReport", "check_thm31", "check_thm32", "check_thm33", "check_thm34", "check_thm35",
    "cone_slice_in_body", "tau_star_search",
    "CompositeProblem", "chain_subdiff", "metric_regularity_kappa",
    "batteries", "certificates", "composite", "epigraph", "errorbound", "functions", "geometry",
    "subdifferential",
]
