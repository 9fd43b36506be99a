"""Dataset assembly, train/test splitting, training loop, metrics, and the
scripted experiment recipes."""

from .datasets import (
    KS_CHAOTIC_INTERVAL,
    KS_REGIMES,
    LabeledDataset,
    LorenzFamily,
    build_ks_dataset,
    build_lorenz_dataset,
    build_map_dataset,
    generate_lorenz_family,
    split_train_test,
)
from .training import MetricsReport, TrainConfig, evaluate, train

__all__ = [
    "KS_CHAOTIC_INTERVAL",
    "KS_REGIMES",
    "LabeledDataset",
    "LorenzFamily",
    "build_ks_dataset",
    "build_lorenz_dataset",
    "build_map_dataset",
    "generate_lorenz_family",
    "split_train_test",
    "MetricsReport",
    "TrainConfig",
    "evaluate",
    "train",
]
