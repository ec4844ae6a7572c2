"""Exception types shared across the package."""


class ZeroNoiseError(ValueError):
    """Raised when a smooth-choice operation is called with zero choice noise.

    The noiseless limit has its own tie-breaking rule; callers must use
    the noiseless operations explicitly instead of evaluating exp(-loss/0).
    """


class DegenerateInstanceError(ValueError):
    """Raised when an instance sits on an equilibrium-multiplicity boundary.

    At such points several equilibria with different social losses coexist,
    so the closed-form evaluators refuse rather than silently picking one.
    """


class CapacityError(ValueError):
    """Raised when an exact enumeration would exceed its supported size."""


class ReprFormatError(ValueError):
    """Raised for malformed representation files (bad magic, truncation,
    invalid labels, ragged CSV rows)."""


class UnsupportedReprVersion(ReprFormatError):
    """Raised when a representation file declares an unknown format version."""
