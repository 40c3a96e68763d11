"""Exception types raised across the package."""


class ParameterError(ValueError):
    """A parameter is outside its valid range."""


class DimensionError(ValueError):
    """Array lengths do not agree with the filter or channel length."""


class NonFiniteInputError(ValueError):
    """A regressor or observation contains NaN or Inf."""


class DivergenceError(ArithmeticError):
    """An update produced non-finite weights.

    The filter state is left as it was before the offending step.
    """

    def __init__(self, iteration, algorithm=None):
        self.iteration = iteration
        self.algorithm = algorithm
        who = f"{algorithm} " if algorithm is not None else ""
        super().__init__(f"{who}filter diverged at iteration {iteration}")


class ConfigError(ValueError):
    """A scenario document could not be turned into a valid configuration."""

    def __init__(self, message, key=None):
        self.key = key
        super().__init__(f"{key}: {message}" if key else message)
