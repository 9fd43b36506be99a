"""Discrete maps on the unit interval: logistic and sine-circle.

Both maps are iterated in 64-bit floating point.  The batch helpers advance
many parameter values at once and produce bit-identical samples to the
single-orbit functions (same scalar operations, vectorized across rows).
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

# Fixed rotation offset of the sine-circle map.
OMEGA = 0.606661

_TWO_PI = 2.0 * np.pi


class MapSystem(Enum):
    LOGISTIC = "logistic"
    SINE_CIRCLE = "sine-circle"


@dataclass(frozen=True)
class MapOrbit:
    """An iterated orbit: samples[0] is the initial state, length n_steps+1."""

    samples: np.ndarray
    mu: float
    x0: float
    system: MapSystem

    def __len__(self) -> int:
        return self.samples.shape[0]


def logistic_orbits(mus: np.ndarray, x0: float, n_steps: int) -> np.ndarray:
    """Iterate x -> mu*x*(1-x) for each mu; returns (len(mus), n_steps+1)."""
    mus = np.asarray(mus, dtype=np.float64)
    if mus.size and (mus.min() < 0.0 or mus.max() > 4.0):
        raise ValueError(f"logistic map requires mu in [0, 4], got range "
                         f"[{mus.min()}, {mus.max()}] (orbits diverge outside)")
    if not 0.0 <= x0 <= 1.0:
        raise ValueError(f"logistic map requires x0 in [0, 1], got {x0}")
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    out = np.empty((mus.shape[0], n_steps + 1), dtype=np.float64)
    out[:, 0] = x0
    x = np.full(mus.shape[0], x0, dtype=np.float64)
    for k in range(n_steps):
        x = mus * x * (1.0 - x)
        out[:, k + 1] = x
    return out


def sine_circle_orbits(mus: np.ndarray, theta0: float, n_steps: int) -> np.ndarray:
    """Iterate theta -> (theta + OMEGA - mu/(2*pi)*sin(2*pi*theta)) mod 1."""
    mus = np.asarray(mus, dtype=np.float64)
    if mus.size and (mus.min() < 0.0 or mus.max() > 5.0):
        raise ValueError(f"sine-circle map requires mu in [0, 5], got range "
                         f"[{mus.min()}, {mus.max()}]")
    if not 0.0 <= theta0 < 1.0:
        raise ValueError(f"sine-circle map requires theta0 in [0, 1), got {theta0}")
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    out = np.empty((mus.shape[0], n_steps + 1), dtype=np.float64)
    out[:, 0] = theta0
    coef = mus / _TWO_PI
    th = np.full(mus.shape[0], theta0, dtype=np.float64)
    for k in range(n_steps):
        th = np.mod(th + OMEGA - coef * np.sin(_TWO_PI * th), 1.0)
        # np.mod of a tiny negative can round up to exactly 1.0
        th[th >= 1.0] = 0.0
        out[:, k + 1] = th
    return out


def iterate_logistic(mu: float, x0: float, n_steps: int) -> MapOrbit:
    samples = logistic_orbits(np.array([mu]), x0, n_steps)[0]
    return MapOrbit(samples=samples, mu=float(mu), x0=float(x0), system=MapSystem.LOGISTIC)


def iterate_sine_circle(mu: float, theta0: float, n_steps: int) -> MapOrbit:
    samples = sine_circle_orbits(np.array([mu]), theta0, n_steps)[0]
    return MapOrbit(samples=samples, mu=float(mu), x0=float(theta0), system=MapSystem.SINE_CIRCLE)


def map_derivative(system: MapSystem, mu, state):
    """Derivative of the map at `state`; accepts scalars or arrays."""
    if system is MapSystem.LOGISTIC:
        return mu * (1.0 - 2.0 * np.asarray(state, dtype=np.float64))
    if system is MapSystem.SINE_CIRCLE:
        return 1.0 - mu * np.cos(_TWO_PI * np.asarray(state, dtype=np.float64))
    raise ValueError(f"unknown map system: {system!r}")
