"""Minimal differentiable-layer engine: the layers behind the five
classifier architectures, softmax cross-entropy, Adam, and a
finite-difference gradient checker.  All arithmetic is float64."""

from .layers import (
    BatchNorm1D,
    Conv1D,
    Dense,
    Dropout,
    Flatten,
    GlobalAvgPool,
    MaxPool1D,
    ReLU,
    ResidualBlock,
    Sigmoid,
    Softmax,
)
from .network import Network, softmax_xent
from .optim import Adam, adam_step
from .gradcheck import gradient_check

__all__ = [
    "BatchNorm1D",
    "Conv1D",
    "Dense",
    "Dropout",
    "Flatten",
    "GlobalAvgPool",
    "MaxPool1D",
    "ReLU",
    "ResidualBlock",
    "Sigmoid",
    "Softmax",
    "Network",
    "softmax_xent",
    "Adam",
    "adam_step",
    "gradient_check",
]
