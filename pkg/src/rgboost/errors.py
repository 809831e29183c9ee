"""Exception types raised across the package."""


class SpaceMismatchError(ValueError):
    """Two function vectors (or a vector and an objective) live on different sample spaces."""


class ZeroGradientError(ValueError):
    """A weak learner was asked to fit the zero function."""


class ZeroProjectionError(ValueError):
    """The best projection onto a class is the zero function."""


class DegenerateHypothesisError(ValueError):
    """A hypothesis (or target) has zero norm where a positive norm is required."""


class UnsupportedObjectiveError(TypeError):
    """The requested operation needs a property the objective does not have."""


class SchemaError(ValueError):
    """A serialized model, config or report does not match the expected schema."""
