"""Polariton populations of the bare vacuum in ultrastrongly coupled light-matter models."""

from .errors import (
    ConfigError,
    ConfigNotFound,
    DegenerateSpectrum,
    ExpansionBreakdown,
    IntegrationFailure,
    InvalidModel,
    InvalidSelection,
    InvalidSystem,
    NotConverged,
    ParityMixing,
    PolaritonLabError,
    UnstableHamiltonian,
)
from .quadratic import QuadraticBosonicModel, diagonalize, vacuum_report
from .two_mode import TwoModeParams, equal_population_u, polariton_frequencies, populations

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ConfigNotFound",
    "DegenerateSpectrum",
    "ExpansionBreakdown",
    "IntegrationFailure",
    "InvalidModel",
    "InvalidSelection",
    "InvalidSystem",
    "NotConverged",
    "ParityMixing",
    "PolaritonLabError",
    "QuadraticBosonicModel",
    "TwoModeParams",
    "UnstableHamiltonian",
    "diagonalize",
    "equal_population_u",
    "polariton_frequencies",
    "populations",
    "vacuum_report",
]
