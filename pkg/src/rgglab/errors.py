"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """An argument lies outside the documented domain of an operation."""


class RegimeError(InvalidInputError):
    """A closed-form approximation was asked for outside its validity regime."""


class UnsupportedError(InvalidInputError):
    """The operation is not defined for this combination of inputs."""


class ConvergenceError(RuntimeError):
    """A numerical routine did not reach its tolerance within its budget."""


class NotOverdispersedError(InvalidInputError):
    """Sample variance does not exceed the mean, so no negative binomial fits."""
