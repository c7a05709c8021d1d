"""Exception types shared across the package."""


class CocycleLabError(Exception):
    """Base class for all package errors."""


class RankMismatchError(CocycleLabError, ValueError):
    pass


class GeneratorRangeError(CocycleLabError, ValueError):
    pass


class TruncationError(CocycleLabError):
    """A computation would leave the finite ball it is carried on."""


class ResourceError(CocycleLabError):
    """A requested enumeration exceeds the configured size cap."""


class NumericalError(CocycleLabError):
    """An iterative or quadrature routine failed to meet its tolerance."""


class ParameterError(CocycleLabError, ValueError):
    """Inputs violate a documented precondition."""
