"""Two-metric numerical geometry on the twisted homogeneous three-spaces.

One coordinate domain carries a Riemannian and a Lorentzian metric built from
the same parameter pair.  The package evaluates surfaces against both metrics
simultaneously: orthonormal frames, connections, normals, shape operators,
curvatures, and the algebraic identities tying the two sides together.
"""

from .ambient import (
    CoordinateAmbient,
    Signature,
    SpaceParams,
    connection_gap_frame,
    curvature_frame,
    frame_gram,
    wedge_frame,
)
from .catalog import (
    CATALOG,
    BuiltSurface,
    build_surface,
    default_surfaces,
    parse_surface,
    validate_address,
)
from .errors import (
    BaseMismatch,
    ConfigInvalid,
    CurveSingular,
    DegenerateInput,
    DomainViolation,
    GeometryError,
    HypothesisViolated,
    ImmersionFailure,
    MissingContext,
    ModelMismatch,
    NonTangent,
    NullDirection,
    NumericFailure,
    OrientationFlip,
    ParameterSingularity,
    SignAmbiguous,
    TauNonzero,
    TRVanishes,
    UnsupportedFormat,
)
from .groups import GroupAmbient, berger_helicoid_chart, su11_helicoid_chart
from .identities import (
    IDENTITIES,
    IDENTITY_NAMES,
    IdentityContext,
    SampleSkip,
    curvature_suite,
    evaluate_identity,
    indefiniteness_check,
    intrinsic_curvature_r,
    ruling_defect,
    run_identities,
)
from .numdiff import FDSteps
from .suite import DEFAULT_PARAMS, SCHEMA_VERSION, SuiteConfig, run_suite
from .surfaces import (
    DEGENERATE,
    SPACELIKE,
    TIMELIKE,
    SurfaceChart,
    TwoMetricFrameData,
    causal_character,
    frame_data,
)

__version__ = "0.1.0"

__all__ = [
    "CATALOG",
    "DEFAULT_PARAMS",
    "DEGENERATE",
    "IDENTITIES",
    "IDENTITY_NAMES",
    "SCHEMA_VERSION",
    "SPACELIKE",
    "TIMELIKE",
    "BaseMismatch",
    "BuiltSurface",
    "ConfigInvalid",
    "CoordinateAmbient",
    "CurveSingular",
    "DegenerateInput",
    "DomainViolation",
    "FDSteps",
    "GeometryError",
    "GroupAmbient",
    "HypothesisViolated",
    "IdentityContext",
    "ImmersionFailure",
    "MissingContext",
    "ModelMismatch",
    "NonTangent",
    "NullDirection",
    "NumericFailure",
    "OrientationFlip",
    "ParameterSingularity",
    "SampleSkip",
    "SignAmbiguous",
    "Signature",
    "SpaceParams",
    "SuiteConfig",
    "SurfaceChart",
    "TRVanishes",
    "TauNonzero",
    "TwoMetricFrameData",
    "UnsupportedFormat",
    "berger_helicoid_chart",
    "build_surface",
    "causal_character",
    "connection_gap_frame",
    "curvature_frame",
    "curvature_suite",
    "default_surfaces",
    "evaluate_identity",
    "frame_data",
    "frame_gram",
    "indefiniteness_check",
    "intrinsic_curvature_r",
    "parse_surface",
    "ruling_defect",
    "run_identities",
    "run_suite",
    "su11_helicoid_chart",
    "validate_address",
    "wedge_frame",
]
