"""Deterministic time-series generators: discrete maps, Lorenz, Kuramoto-Sivashinsky."""

from .maps import (
    OMEGA,
    MapOrbit,
    MapSystem,
    iterate_logistic,
    iterate_sine_circle,
    logistic_orbits,
    map_derivative,
    sine_circle_orbits,
)
from .lorenz import IntegrationError, LorenzTrajectory, integrate_lorenz, lorenz_pair_flow
from .ks import InstabilityError, KSRun, etdrk4_coefficients, solve_ks, solve_ks_energies

__all__ = [
    "OMEGA",
    "MapOrbit",
    "MapSystem",
    "iterate_logistic",
    "iterate_sine_circle",
    "logistic_orbits",
    "sine_circle_orbits",
    "map_derivative",
    "IntegrationError",
    "LorenzTrajectory",
    "integrate_lorenz",
    "lorenz_pair_flow",
    "InstabilityError",
    "KSRun",
    "etdrk4_coefficients",
    "solve_ks",
    "solve_ks_energies",
]
