"""Labeled dataset construction for the four systems.

Series are stored row-wise, min-max normalized to [0, 1]; labeling happens
on the raw (pre-normalization) series.  Generation is deterministic given
(system, count, length, seed).
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .. import measures
from ..dynsys import lorenz as lorenz_mod
from ..dynsys.ks import solve_ks_energies
from ..dynsys.lorenz import IntegrationError
from ..dynsys.maps import MapSystem, logistic_orbits, sine_circle_orbits

log = logging.getLogger(__name__)

MAP_X0 = 0.5

# alpha intervals of the KS dataset: (lo, hi, runs, behaviour); the
# [120, 130] interval is the chaotic class, everything else non-chaotic
KS_REGIMES = (
    (18.0, 22.0, 100, "periodic"),
    (23.0, 33.0, 100, "bimodal"),
    (43.0, 45.0, 100, "periodic"),
    (56.0, 65.0, 100, "trimodal"),
    (95.0, 115.0, 100, "quadrimodal"),
    (120.0, 130.0, 500, "chaotic"),
)
KS_CHAOTIC_INTERVAL = (120.0, 130.0)

# number of iterates used to estimate the discrete exponent for labeling;
# longer than the stored series so labels near regime edges are stable
MAP_LABEL_ORBIT_LEN = 5000
MAP_LABEL_DISCARD = 100

# Resolution floor of the finite-horizon continuous exponent: a stable limit
# cycle has true lambda_max = 0, but the renormalized estimate telescopes the
# phase-speed ratio into a +-log(speed range)/horizon residual (~0.014 at the
# 200-unit default), so its sign is noise.  Estimates within the floor are
# snapped to 0 before the strict sign rule, which labels them NC.
LORENZ_LAMBDA_RESOLUTION = 0.02


@dataclass
class LabeledDataset:
    series: np.ndarray          # (count, length) float64 in [0, 1]
    labels: np.ndarray          # (count,) uint8, 0=NC 1=C
    params: np.ndarray          # (count,) bifurcation parameter per row
    system: str
    seed: int
    label_rule: str             # "lyapunov-entropy" | "lyapunov-sign" | "alpha-interval"
    regimes: np.ndarray = None  # (count,) uint8 regime tag (KS), zeros elsewhere
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.regimes is None:
            self.regimes = np.zeros(len(self.labels), dtype=np.uint8)

    def __len__(self):
        return self.series.shape[0]

    @property
    def length(self):
        return self.series.shape[1]

    @property
    def chaotic_fraction(self):
        return float(np.mean(self.labels))

    def take(self, indices):
        return LabeledDataset(
            series=self.series[indices],
            labels=self.labels[indices],
            params=self.params[indices],
            system=self.system,
            seed=self.seed,
            label_rule=self.label_rule,
            regimes=self.regimes[indices],
            meta=dict(self.meta),
        )


def label_map_orbits(system: MapSystem, mus: np.ndarray, series: np.ndarray) -> np.ndarray:
    """Labels for raw map series: exponent from a dedicated long orbit plus
    the entropy of the stored series, thresholded at 0.75."""
    label_orbits = _map_orbit_fn(system)(mus, MAP_X0, MAP_LABEL_ORBIT_LEN)
    lams = measures.discrete_lyapunov_batch(system, mus, label_orbits,
                                            n_discard=MAP_LABEL_DISCARD)
    labels = np.empty(len(mus), dtype=np.uint8)
    for i in range(len(mus)):
        ent = measures.shannon_entropy(series[i], n_bins=series.shape[1])
        labels[i] = measures.label_series(lams[i], ent).value
    return labels


def _map_orbit_fn(system: MapSystem):
    return logistic_orbits if system is MapSystem.LOGISTIC else sine_circle_orbits


def build_map_dataset(system: MapSystem, n_params: int = 5000, length: int = 1000,
                      seed: int = 0) -> LabeledDataset:
    """Uniform parameter sweep of one discrete map (logistic mu in [0,4],
    sine-circle mu in [0,5]), started from x0 = 0.5."""
    if n_params < 10:
        raise ValueError("n_params must be >= 10")
    if length < 200:
        raise ValueError("length must be >= 200")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    hi = 4.0 if system is MapSystem.LOGISTIC else 5.0
    mus = rng.uniform(0.0, hi, n_params)
    series = _map_orbit_fn(system)(mus, MAP_X0, length - 1)
    labels = label_map_orbits(system, mus, series)
    return LabeledDataset(
        series=measures.normalize_rows(series),
        labels=labels,
        params=mus,
        system=system.value,
        seed=seed,
        label_rule="lyapunov-entropy",
        meta={"x0": MAP_X0, "entropy_threshold": measures.ENTROPY_THRESHOLD,
              "label_orbit_len": MAP_LABEL_ORBIT_LEN},
    )


@dataclass(frozen=True)
class LorenzFamily:
    """One Lorenz parameter sweep: all three components plus the exponents,
    shared by the X/Y/Z datasets (one label per rho)."""

    rhos: np.ndarray
    x: np.ndarray  # (count, length), raw
    y: np.ndarray
    z: np.ndarray
    lyapunovs: np.ndarray
    seed: int
    n_resampled: int


def generate_lorenz_family(n_params: int = 5000, length: int = 1000,
                           seed: int = 0, rho_max: float = 250.0) -> LorenzFamily:
    if n_params < 10:
        raise ValueError("n_params must be >= 10")
    if length < 200:
        raise ValueError("length must be >= 200")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    rhos = np.empty(n_params)
    xs = np.empty((n_params, length))
    ys = np.empty((n_params, length))
    zs = np.empty((n_params, length))
    lams = np.empty(n_params)
    n_resampled = 0
    for i in range(n_params):
        while True:
            rho = rng.uniform(0.0, rho_max)
            try:
                traj = lorenz_mod.integrate_lorenz(10.0, rho, 8.0 / 3.0,
                                                   [1.0, 1.0, 1.0], 100.0, length)
                lam = measures.continuous_lyapunov(rho)
            except IntegrationError as exc:
                n_resampled += 1
                log.warning("resampling rho after integration failure: %s", exc)
                continue
            break
        rhos[i] = rho
        xs[i] = traj.x
        ys[i] = traj.y
        zs[i] = traj.z
        lams[i] = lam
        if (i + 1) % 500 == 0:
            log.info("lorenz family: %d/%d parameter values", i + 1, n_params)
    return LorenzFamily(rhos=rhos, x=xs, y=ys, z=zs, lyapunovs=lams,
                        seed=seed, n_resampled=n_resampled)


def build_lorenz_dataset(component: str, n_params: int = 5000, length: int = 1000,
                         seed: int = 0, family: LorenzFamily = None) -> LabeledDataset:
    """Dataset of one Lorenz component; labels come from the sign of the
    x-trajectory exponent and are shared across components."""
    if component not in ("x", "y", "z"):
        raise ValueError(f"component must be x, y or z, got {component!r}")
    if family is None:
        family = generate_lorenz_family(n_params, length, seed)
    raw = getattr(family, component)
    lams = np.where(np.abs(family.lyapunovs) <= LORENZ_LAMBDA_RESOLUTION,
                    0.0, family.lyapunovs)
    labels = (lams > 0.0).astype(np.uint8)
    return LabeledDataset(
        series=measures.normalize_rows(raw),
        labels=labels,
        params=family.rhos.copy(),
        system=f"lorenz-{component}",
        seed=family.seed,
        label_rule="lyapunov-sign",
        meta={"n_resampled": family.n_resampled,
              "lyapunov_t_end": measures.LYAPUNOV_T_END,
              "lambda_resolution": LORENZ_LAMBDA_RESOLUTION},
    )


def build_ks_dataset(seed: int = 0, n_modes: int = 512, dt: float = 2.5e-4,
                     t_end: float = 10.0, n_samples: int = 1000) -> LabeledDataset:
    """Energy series over the six alpha regimes: 100 runs in each of the five
    non-chaotic intervals and 500 in the chaotic one, labels by interval."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    alphas, regimes, labels = [], [], []
    for tag, (lo, hi, count, behaviour) in enumerate(KS_REGIMES):
        alphas.append(rng.uniform(lo, hi, count))
        regimes.append(np.full(count, tag, dtype=np.uint8))
        labels.append(np.full(count, 1 if behaviour == "chaotic" else 0, dtype=np.uint8))
    alphas = np.concatenate(alphas)
    log.info("solving KS for %d alpha values (%d modes, dt=%g)",
             len(alphas), n_modes, dt)
    _, energies = solve_ks_energies(alphas, n_modes=n_modes, dt=dt,
                                    t_end=t_end, n_samples=n_samples)
    return LabeledDataset(
        series=measures.normalize_rows(energies),
        labels=np.concatenate(labels),
        params=alphas,
        system="ks",
        seed=seed,
        label_rule="alpha-interval",
        regimes=np.concatenate(regimes),
        meta={"n_modes": n_modes, "dt": dt, "t_end": t_end,
              "regimes": [r[3] for r in KS_REGIMES]},
    )


def split_train_test(ds: LabeledDataset, train_fraction: float = 2.0 / 3.0,
                     seed: int = 0):
    """Seeded uniform shuffle, then a prefix/suffix split with the train side
    floored."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    perm = rng.permutation(len(ds))
    n_train = int(np.floor(train_fraction * len(ds)))
    return ds.take(perm[:n_train]), ds.take(perm[n_train:])
