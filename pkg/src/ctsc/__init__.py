"""Chaotic time-series classification lab.

Generates labeled chaotic/non-chaotic univariate series from four dynamical
systems (logistic map, sine-circle map, Lorenz system, Kuramoto-Sivashinsky
equation), trains five neural-network classifiers on a small built-in
differentiable-layer engine, and runs cross-system generalization
experiments and robustness sweeps.
"""

__version__ = "0.1.0"
