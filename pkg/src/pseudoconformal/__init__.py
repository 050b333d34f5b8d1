"""Geometry of hypersurfaces and null-line congruences in conformally
compactified Minkowski space, modelled on a projective quadric."""

from .catalog import CATALOG, build
from .conformal import (
    AmbientModel,
    AtInfinity,
    ProjectivePoint,
    classify_element,
    darboux_embed,
    darboux_unembed,
    hypersphere_element,
    minkowski_form,
    quadric_residual,
)
from .congruence import (
    CongruenceAnalysis,
    IsotropicCongruence,
    LeafTrace,
    congruence_affinor,
    congruence_singular_points,
    integrability_defect,
    stratify,
)
from .errors import (
    ConvergenceError,
    DegenerateBasisError,
    GeometryError,
    NonIntegrableError,
    NotLightlikeError,
    NotOnQuadricError,
)
from .frames import (
    ConformalFrame,
    ConnectionForms,
    adapt_lightlike_frame,
    complete_isotropic_frame,
    connection_forms,
    lightlike_gram,
    spacelike_gram,
    structure_residual,
    timelike_gram,
)
from .hypersurface import (
    CausalType,
    ClassificationReport,
    Immersion,
    classify_point,
    induced_metric,
    survey,
)
from .lightlike import (
    LightlikeAnalysis,
    degeneracy_check,
    focal_map,
    lightlike_affinor,
    lightlike_frame_field,
    singular_points,
    torse_directions,
)
from .linalg import BilinearForm, Signature, char_roots, scalar_product, signature

__all__ = [
    "AmbientModel",
    "AtInfinity",
    "BilinearForm",
    "CATALOG",
    "CausalType",
    "ClassificationReport",
    "ConformalFrame",
    "CongruenceAnalysis",
    "ConnectionForms",
    "ConvergenceError",
    "DegenerateBasisError",
    "GeometryError",
    "Immersion",
    "IsotropicCongruence",
    "LeafTrace",
    "LightlikeAnalysis",
    "NonIntegrableError",
    "NotLightlikeError",
    "NotOnQuadricError",
    "ProjectivePoint",
    "Signature",
    "adapt_lightlike_frame",
    "build",
    "char_roots",
    "classify_element",
    "classify_point",
    "complete_isotropic_frame",
    "congruence_affinor",
    "congruence_singular_points",
    "connection_forms",
    "darboux_embed",
    "darboux_unembed",
    "degeneracy_check",
    "focal_map",
    "hypersphere_element",
    "induced_metric",
    "integrability_defect",
    "lightlike_affinor",
    "lightlike_frame_field",
    "lightlike_gram",
    "minkowski_form",
    "quadric_residual",
    "scalar_product",
    "signature",
    "singular_points",
    "spacelike_gram",
    "stratify",
    "structure_residual",
    "survey",
    "timelike_gram",
    "torse_directions",
]

__version__ = "0.1.0"
