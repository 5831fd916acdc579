"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    pass


class InvalidDistribution(ValueError):
    pass


class InvalidInput(ValueError):
    """An oracle received an instance violating its precondition."""


class UndefinedEmpiricalError(ValueError):
    pass


class EmptyBand(ValueError):
    """No hypothesis has true error inside the requested dyadic band."""


class ConstructionInfeasible(RuntimeError):
    pass


class ConfigError(ValueError):
    pass
