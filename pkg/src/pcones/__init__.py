"""Geometry of p-cones: norms, projections, automorphisms and isomorphism search.

The p-cone K_p^{n+1} is the set of points (t, x) in R^{n+1} with
t >= ||x||_p.  Throughout the package a cone is named by its ambient
dimension n + 1, and p = inf is spelled ``math.inf`` (or ``"inf"`` on
the command line).
"""

from importlib.metadata import PackageNotFoundError, version

from .autgroup import (
    GeneralizedPermutation,
    LinearMap,
    StructuredAutomorphism,
    apply,
    homogeneity_probe,
    is_structural_automorphism,
    loewy_schneider,
    random_automorphism,
    sampling_oracle_automorphism,
)
from .cone import ConeSpec, Membership, contains, dual, extreme_rays, project, project_many, sample_boundary
from .duality import (
    IsoSearchReport,
    SearchVerdict,
    certify_iso,
    four_candidates_check,
    iso_search,
    selfdual_search,
    violation,
)
from .errors import PConeError
from .manifold import GraphChart, boundary_map, gauss_normal, lambda_vector, locus_membership, tangent_basis
from .pnorm import Exponent, Smoothness, c2_divergence_probe, classify_c2, conjugate, gradient, hessian, norm

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

__all__ = [
    "Exponent",
    "Smoothness",
    "conjugate",
    "norm",
    "gradient",
    "hessian",
    "classify_c2",
    "c2_divergence_probe",
    "ConeSpec",
    "Membership",
    "contains",
    "dual",
    "extreme_rays",
    "sample_boundary",
    "project",
    "project_many",
    "GeneralizedPermutation",
    "StructuredAutomorphism",
    "LinearMap",
    "apply",
    "is_structural_automorphism",
    "loewy_schneider",
    "sampling_oracle_automorphism",
    "random_automorphism",
    "homogeneity_probe",
    "GraphChart",
    "tangent_basis",
    "lambda_vector",
    "gauss_normal",
    "boundary_map",
    "locus_membership",
    "violation",
    "selfdual_search",
    "iso_search",
    "certify_iso",
    "four_candidates_check",
    "IsoSearchReport",
    "SearchVerdict",
    "PConeError",
]
