"""Exception hierarchy shared across the package."""


class MfpairsError(Exception):
    """Base class for all package errors."""


class InvalidTypeError(MfpairsError):
    """Inadmissible family/rank combination (incl. exceptional factors)."""


class DimensionMismatchError(MfpairsError):
    """A weight does not live on the torus it was used with."""


class NonDominantError(MfpairsError):
    """Operation requires a dominant (and integral) highest weight."""


class NotIntegralError(MfpairsError):
    """Weight is not in the integral lattice of the given type."""


class IntegrityError(MfpairsError):
    """Internal consistency violation (e.g. peeling hit a non-dominant
    maximal weight, which indicates a broken embedding map)."""


class AlignmentError(MfpairsError):
    """Chain operation used before/without a verified Xi alignment."""


class CatalogKeyError(MfpairsError):
    """Unknown catalog key or parameters outside the validity range."""


class ConfigError(MfpairsError):
    """Invalid task configuration (CLI exit code 2)."""
