"""Exception hierarchy shared by all modules."""


class PolaritonLabError(Exception):
    """Base class for every error raised by the library."""


class InvalidMatrix(PolaritonLabError, ValueError):
    pass


class InvalidSystem(PolaritonLabError, ValueError):
    pass


class IntegrationFailure(PolaritonLabError, RuntimeError):
    pass


class InvalidModel(PolaritonLabError, ValueError):
    pass


class UnstableHamiltonian(InvalidModel):
    """The position-form matrix is not positive definite.

    Physically this is a superradiant-type instability: the quadratic
    Hamiltonian has no ground state.
    """


class DegenerateSpectrum(PolaritonLabError, ValueError):
    pass


class InvalidSelection(PolaritonLabError, IndexError):
    pass


class NotConverged(PolaritonLabError, RuntimeError):
    pass


class ParityMixing(PolaritonLabError, RuntimeError):
    pass


class ExpansionBreakdown(PolaritonLabError, RuntimeError):
    pass


class ConfigError(PolaritonLabError, ValueError):
    pass


class ConfigNotFound(ConfigError, FileNotFoundError):
    pass
