"""Semiclassical Jaynes-Cummings dynamics of a moving atom in a thermal cavity.

Configurations are plain dictionaries with the same schema as the JSON
files accepted by the ``cqed`` command-line tool.
"""

from ._cqed import (
    ConfigError,
    CqedError,
    IntegrationDiverged,
    InvalidArgument,
    InvalidTemperature,
    RenormalizationError,
    StiffnessError,
    check_axioms,
    default_config,
    deriv_thermal,
    deriv_zero_t,
    energy_zero_t,
    excitation_zero_t,
    flights,
    lyapunov,
    normalize_config,
    poincare,
    simulate,
    sweep,
    thermal_factors,
)

__all__ = [
    "ConfigError",
    "CqedError",
    "IntegrationDiverged",
    "InvalidArgument",
    "InvalidTemperature",
    "RenormalizationError",
    "StiffnessError",
    "check_axioms",
    "default_config",
    "deriv_thermal",
    "deriv_zero_t",
    "energy_zero_t",
    "excitation_zero_t",
    "flights",
    "lyapunov",
    "normalize_config",
    "poincare",
    "simulate",
    "sweep",
    "thermal_factors",
]
