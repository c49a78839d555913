class GamlssBoostError(Exception):
    """Base class for errors raised by gamlssboost."""


class DimensionError(GamlssBoostError, ValueError):
    """Array shapes that should agree do not."""


class NumericError(GamlssBoostError, ArithmeticError):
    """A computation produced a non-finite value."""


class DegenerateDataError(GamlssBoostError, ValueError):
    """The data admit no meaningful fit (e.g. a constant response)."""


class DegenerateLearnerError(GamlssBoostError, ValueError):
    """A base-learner fit is identically zero, so no step can be taken."""


class UsageError(GamlssBoostError, ValueError):
    """Invalid arguments or configuration."""
