"""Exception types shared across the package."""


class ManlabError(Exception):
    """Base class for all manlab-specific errors."""


class AlgebraError(ManlabError):
    """Invalid algebra input or construction failure."""


class DecompositionError(AlgebraError):
    """Central-block decomposition could not be computed (after retries)."""


class NonCollinearError(AlgebraError):
    """Operation requires a collinear algebra and the input is not one."""


class NumericalConsistencyError(ManlabError):
    """A value violated an exact identity by more than the rounding margin.

    Distinguishes genuine bugs from float rounding: tiny excursions are
    clamped, larger ones raise this.
    """


class IllConditionedEstimatorError(ManlabError):
    """A stochastic estimator's denominator is statistically consistent with 0."""


class SpecFileError(ManlabError):
    """Malformed or inconsistent algebra specification file."""

    def __init__(self, message, path=None, field=None):
        self.path = path
        self.field = field
        prefix = ""
        if path is not None:
            prefix += f"{path}: "
        if field is not None:
            prefix += f"field '{field}': "
        super().__init__(prefix + message)
