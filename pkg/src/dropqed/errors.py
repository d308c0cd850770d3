"""Exception types raised by dropqed solvers and the CLI."""


class DropQedError(Exception):
    """Base class for all dropqed errors."""


class ConfigError(DropQedError):
    """A run configuration (file or flags) could not be validated."""


class SizeMismatchError(DropQedError):
    """Two spectra of different cardinality were compared."""


class MaxIterationsError(DropQedError):
    """A pole search did not converge within its evaluation budget.

    Usually signals a bad seed; re-seed from a coarse grid or use the
    dense eigensolve path instead.
    """


class ConditioningFailure(DropQedError):
    """Determinant interpolation could not recover trustworthy poles.

    Raised when the polynomial fit on the sampling circle has a large
    residual, or when recovered low-order coefficients sit below the
    determinant-evaluation noise floor (radius rescale needed), or when
    recovered poles fail the singularity check.
    """


class ThetaOutOfRange(DropQedError):
    """The propagation phase is outside the validity window of an analysis."""
