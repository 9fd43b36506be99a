"""Chaos quantification and labeling: Lyapunov exponents, Shannon entropy,
the chaotic/non-chaotic decision rule, and min-max normalization."""

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .dynsys.lorenz import lorenz_pair_flow
from .dynsys.maps import MapOrbit, MapSystem, map_derivative

# Entropy threshold of the discrete-map labeling rule.
ENTROPY_THRESHOLD = 0.75

# Derivative magnitudes below this are clipped before the log so superstable
# points (f' = 0) stay finite without flipping the sign decision.
DERIVATIVE_CLIP = 1e-15

LYAPUNOV_EPS0 = 1e-9
LYAPUNOV_RENORM_INTERVAL = 0.1
LYAPUNOV_T_END = 200.0


class Label(IntEnum):
    NC = 0
    C = 1


@dataclass(frozen=True)
class ChaosLabel:
    value: Label
    lyapunov: float
    entropy: float | None = None


@dataclass(frozen=True)
class NormalizedSeries:
    samples: np.ndarray
    original_min: float
    original_max: float


def discrete_lyapunov(orbit: MapOrbit, n_discard: int = 100) -> float:
    """Mean log |f'(x_i)| over the orbit after discarding the first n_discard iterates."""
    if len(orbit) - n_discard < 100:
        raise ValueError(f"orbit too short: {len(orbit)} samples with "
                         f"{n_discard} discarded leaves fewer than 100")
    pts = orbit.samples[n_discard:]
    deriv = np.abs(map_derivative(orbit.system, orbit.mu, pts))
    return float(np.mean(np.log(np.maximum(deriv, DERIVATIVE_CLIP))))


def discrete_lyapunov_batch(system: MapSystem, mus: np.ndarray, orbits: np.ndarray,
                            n_discard: int = 100) -> np.ndarray:
    """Row-wise discrete exponent for orbits (n_rows, n_samples) at parameters mus."""
    if orbits.shape[1] - n_discard < 100:
        raise ValueError("orbits too short for the requested discard")
    deriv = np.abs(map_derivative(system, mus[:, None], orbits[:, n_discard:]))
    return np.mean(np.log(np.maximum(deriv, DERIVATIVE_CLIP)), axis=1)


def renormalized_lyapunov(advance_pair, ref0, eps0: float, renorm_interval: float,
                          t_end: float, transient_fraction: float = 0.1,
                          perturb_axis: int = 0) -> float:
    """Largest Lyapunov exponent by the two-trajectory renormalization method.

    advance_pair(ref, pert, t0, t1) integrates both states jointly from t0 to
    t1.  The perturbed state starts offset by eps0 along `perturb_axis`; after
    every interval the log of the separation growth is accumulated and the
    perturbed state is pulled back to distance eps0 along the current
    separation vector.  Segments ending within the leading
    `transient_fraction` of the horizon are excluded from the average.
    """
    if not 1e-12 <= eps0 <= 1e-6:
        raise ValueError(f"eps0 must be in [1e-12, 1e-6], got {eps0}")
    ref = np.asarray(ref0, dtype=np.float64).copy()
    pert = ref.copy()
    pert[perturb_axis] += eps0
    n_seg = int(round(t_end / renorm_interval))
    n_transient = int(round(transient_fraction * n_seg))
    acc = 0.0
    for i in range(n_seg):
        t0 = i * renorm_interval
        t1 = (i + 1) * renorm_interval
        ref, pert = advance_pair(ref, pert, t0, t1)
        delta = pert - ref
        d = float(np.sqrt(np.sum(delta * delta)))
        if i >= n_transient:
            acc += np.log(d / eps0)
        pert = ref + delta * (eps0 / d)
    return acc / ((n_seg - n_transient) * renorm_interval)


def continuous_lyapunov(rho: float, sigma: float = 10.0, beta: float = 8.0 / 3.0,
                        eps0: float = LYAPUNOV_EPS0,
                        renorm_interval: float = LYAPUNOV_RENORM_INTERVAL,
                        t_end: float = LYAPUNOV_T_END,
                        ic=(1.0, 1.0, 1.0), rtol: float = 1e-6, atol: float = 1e-9) -> float:
    """Largest Lyapunov exponent of the Lorenz system at the given parameters."""
    if t_end < 50.0:
        raise ValueError(f"t_end must be >= 50 for a stable exponent, got {t_end}")
    advance = lorenz_pair_flow(sigma, rho, beta, rtol=rtol, atol=atol)
    return renormalized_lyapunov(advance, np.asarray(ic, dtype=np.float64),
                                 eps0, renorm_interval, t_end)


def shannon_entropy(series, n_bins: int) -> float:
    """Normalized occupancy entropy of a series over n_bins equal-width bins.

    Bins span the series' own [min, max]; the result is divided by log N so a
    constant signal gives 0 and N samples spread over N distinct bins give 1.
    """
    series = np.asarray(series, dtype=np.float64).ravel()
    if series.size == 0:
        raise ValueError("series must be non-empty")
    if n_bins < 2:
        raise ValueError("n_bins must be >= 2")
    lo, hi = float(series.min()), float(series.max())
    if lo == hi:
        return 0.0
    counts, _ = np.histogram(series, bins=n_bins, range=(lo, hi))
    p = counts[counts > 0] / series.size
    s = -np.sum(p * np.log(p)) / np.log(series.size)
    return float(min(max(s, 0.0), 1.0))


def label_series(lam: float, entropy: float | None = None,
                 threshold: float = ENTROPY_THRESHOLD) -> ChaosLabel:
    """Chaotic iff the exponent is strictly positive and, when an entropy is
    supplied (discrete systems), the entropy exceeds the threshold."""
    if entropy is not None and not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must be in (0, 1), got {threshold}")
    chaotic = lam > 0.0 and (entropy is None or entropy > threshold)
    return ChaosLabel(value=Label.C if chaotic else Label.NC,
                      lyapunov=float(lam),
                      entropy=None if entropy is None else float(entropy))


def normalize_minmax(series) -> NormalizedSeries:
    """Affine map of the series onto [0, 1]; a constant series maps to zeros."""
    samples = np.asarray(series, dtype=np.float64)
    if samples.size == 0:
        raise ValueError("series must be non-empty")
    lo, hi = float(samples.min()), float(samples.max())
    if lo == hi:
        return NormalizedSeries(np.zeros_like(samples), lo, hi)
    return NormalizedSeries((samples - lo) / (hi - lo), lo, hi)


def normalize_rows(series: np.ndarray) -> np.ndarray:
    """Row-wise min-max normalization of a (n_rows, length) matrix."""
    lo = series.min(axis=1, keepdims=True)
    hi = series.max(axis=1, keepdims=True)
    span = hi - lo
    flat = span[:, 0] == 0.0
    span[flat] = 1.0
    out = (series - lo) / span
    out[flat] = 0.0
    return out
