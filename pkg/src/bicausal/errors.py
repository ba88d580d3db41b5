"""Exception types shared across the package.

Every exception carries a short machine-readable ``code`` so the CLI and the
verification suite can report failures uniformly.  Functions raise the most
specific type that applies; ``GeometryError`` is the catch-all base.
"""

from __future__ import annotations


class GeometryError(Exception):
    """Base class for all package-specific errors."""

    code = "GEOMETRY_ERROR"

    def __init__(self, message: str = ""):
        super().__init__(message or self.__doc__ or self.code)


class DomainViolation(GeometryError):
    """Point lies outside the model domain (e.g. outside the open disk for kappa < 0)."""

    code = "DOMAIN_VIOLATION"


class BaseMismatch(GeometryError):
    """Objects evaluated at different base points, or against the wrong model, were combined."""

    code = "BASE_MISMATCH"


class NumericFailure(GeometryError):
    """A numerical invariant that must hold failed beyond tolerance."""

    code = "NUMERIC_FAILURE"


class DegenerateInput(GeometryError):
    """Tangent plane is degenerate for the Lorentzian metric; no unit normal exists."""

    code = "DEGENERATE_INPUT"


class SignAmbiguous(GeometryError):
    """Normal orientation cannot be fixed canonically and no caller choice was supplied."""

    code = "SIGN_AMBIGUOUS"


class ImmersionFailure(GeometryError):
    """Chart derivative is rank-deficient at the requested parameters."""

    code = "IMMERSION_FAILURE"


class OrientationFlip(GeometryError):
    """Normal sign convention changed across a finite-difference stencil."""

    code = "ORIENTATION_FLIP"


class NullDirection(GeometryError):
    """Requested direction is null for the Lorentzian metric; normal curvature undefined."""

    code = "NULL_DIRECTION"


class NonTangent(GeometryError):
    """Vector expected to be tangent (to the surface or the model) is not."""

    code = "NON_TANGENT"


class HypothesisViolated(GeometryError):
    """Inputs do not satisfy the hypotheses of the requested check."""

    code = "HYPOTHESIS_VIOLATED"


class TRVanishes(GeometryError):
    """Tangential part of the vertical direction vanishes; dependent quantities undefined."""

    code = "T_R_VANISHES"


class ParameterSingularity(GeometryError):
    """Model parameters sit on a singular locus of the requested relation (kappa + 4 tau^2 = 0)."""

    code = "PARAMETER_SINGULARITY"


class MissingContext(GeometryError):
    """Check requires frame data or a surface that was not supplied."""

    code = "MISSING_CONTEXT"


class CurveSingular(GeometryError):
    """Base curve has vanishing speed at the requested parameter."""

    code = "CURVE_SINGULAR"


class TauNonzero(GeometryError):
    """Construction only exists in the product case tau = 0."""

    code = "TAU_NONZERO"


class ModelMismatch(GeometryError):
    """Parameters are outside the validity range of the requested model."""

    code = "MODEL_MISMATCH"


class ConfigInvalid(GeometryError):
    """Suite or CLI configuration is malformed."""

    code = "CONFIG_INVALID"


class UnsupportedFormat(GeometryError):
    """Requested export format cannot represent the object (e.g. OBJ for an R^4 model)."""

    code = "UNSUPPORTED_FORMAT"
