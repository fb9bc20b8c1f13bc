"""Totally geodesic hypersurface toolkit for metric Lie algebras and charts."""

from .catalog import (CATALOG_NAMES, abelian, catalog_lookup, euclidean_metric,
                      heisenberg, hyperbolic_plane, nonhomo, nonhomo_metric,
                      sl2, twisted_h2, twisted_h2_cartesian)
from .config import DEFAULT, Tolerances
from .coord_engine import (CoordinateMetric, EikonalResiduals,
                           GeodesicTrajectory, LevelSetHypersurface,
                           ScalarField, SffResult, TwistedProductSpec,
                           build_twisted_product, build_warped_product,
                           christoffel, eikonal_residuals,
                           export_trajectory_csv, frenet_numeric,
                           geodesic_integrate, riemann_at,
                           second_fundamental_form, sectional_at,
                           twisting_ode_residual, twisting_phi)
from .errors import (AlgebraFileError, BadParams, DegeneratePlane,
                     DimensionMismatch, IdealResidualExceeded, IrregularCurve,
                     JacobiViolation, MetricDegenerate, NonUnitVector,
                     NotHelixOrderTwo, NotPositiveDefinite, NotRecognized,
                     NotTotallyGeodesic, TgkitError, UnknownName)
from .lie_core import (ConnectionTable, CurvatureData, LieAlgebra,
                       MetricLieAlgebra, Subspace, bracket, complement_onb,
                       curvature_operator_eigen, curvature_tensor,
                       jacobi_residual, levi_civita, sectional, wedge_coords)
from .tg_analysis import (CaseTag, CharacterSpace, ClassificationReport,
                          FrenetData, HelixWitness, SearchConfig, SearchResult,
                          Sl2Recognition, SubspaceCheck, SubspaceWitness,
                          character_space, classify_case, codazzi_residual,
                          frenet_orbit, helix_witness, hyperplane_tg_residual,
                          normal_curvature_identity, search_tg_hyperplanes,
                          second_normal_identity, sl2_recognize,
                          tg_subspace_check)

__version__ = "0.1.0"

__all__ = [
    "CATALOG_NAMES", "DEFAULT", "Tolerances",
    "TgkitError", "DimensionMismatch", "JacobiViolation",
    "NotPositiveDefinite", "DegeneratePlane", "NonUnitVector",
    "NotHelixOrderTwo", "IdealResidualExceeded", "NotRecognized",
    "NotTotallyGeodesic", "MetricDegenerate", "IrregularCurve",
    "UnknownName", "BadParams", "AlgebraFileError",
    "LieAlgebra", "MetricLieAlgebra", "Subspace", "ConnectionTable",
    "CurvatureData", "bracket", "jacobi_residual", "levi_civita",
    "curvature_tensor", "curvature_operator_eigen", "sectional",
    "wedge_coords", "complement_onb",
    "SubspaceCheck", "SubspaceWitness", "tg_subspace_check",
    "hyperplane_tg_residual", "SearchConfig", "SearchResult",
    "search_tg_hyperplanes", "FrenetData", "frenet_orbit", "HelixWitness",
    "helix_witness", "Sl2Recognition", "sl2_recognize", "CaseTag",
    "CharacterSpace", "character_space", "codazzi_residual",
    "normal_curvature_identity", "second_normal_identity",
    "ClassificationReport", "classify_case",
    "ScalarField", "CoordinateMetric", "christoffel", "GeodesicTrajectory",
    "geodesic_integrate", "export_trajectory_csv", "LevelSetHypersurface",
    "SffResult", "second_fundamental_form", "build_warped_product",
    "TwistedProductSpec", "twisting_phi", "build_twisted_product",
    "twisting_ode_residual", "EikonalResiduals", "eikonal_residuals",
    "riemann_at", "sectional_at", "frenet_numeric",
    "sl2", "nonhomo", "heisenberg", "abelian", "euclidean_metric",
    "hyperbolic_plane", "nonhomo_metric", "twisted_h2",
    "twisted_h2_cartesian", "catalog_lookup",
]
