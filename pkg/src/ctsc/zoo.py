"""Builders for the five classifier architectures, with their published
hyperparameters baked in.  Weight initialization is Glorot uniform (biases
zero, batchnorm gamma=1/beta=0), seeded per builder call."""

import numpy as np

from .nnengine import (
    BatchNorm1D,
    Conv1D,
    Dense,
    Dropout,
    Flatten,
    GlobalAvgPool,
    MaxPool1D,
    Network,
    ReLU,
    ResidualBlock,
    Sigmoid,
    Softmax,
)

ARCHITECTURES = ("shallownet", "mlp", "fcn", "resnet", "lkcnn")

LKCNN_KERNEL = 100
LKCNN_CHANNELS = 5


def _rng(seed):
    return np.random.default_rng(np.random.PCG64(seed))


def build_shallownet(input_len: int, seed: int = 0) -> Network:
    """One hidden sigmoid layer of 100 neurons."""
    if input_len < 1:
        raise ValueError("input_len must be >= 1")
    rng = _rng(seed)
    layers = [
        Flatten(),
        Dense(input_len, 100, rng),
        Sigmoid(),
        Dense(100, 2, rng),
        Softmax(),
    ]
    return Network(layers, input_len, "shallownet")


def build_mlp(input_len: int, seed: int = 0) -> Network:
    """Three hidden ReLU layers of 500 neurons with dropout 0.1 at the input,
    0.2 between hidden layers, and 0.3 before the output layer."""
    if input_len < 1:
        raise ValueError("input_len must be >= 1")
    rng = _rng(seed)
    layers = [
        Flatten(),
        Dropout(0.1),
        Dense(input_len, 500, rng),
        ReLU(),
        Dropout(0.2),
        Dense(500, 500, rng),
        ReLU(),
        Dropout(0.2),
        Dense(500, 500, rng),
        ReLU(),
        Dropout(0.3),
        Dense(500, 2, rng),
        Softmax(),
    ]
    return Network(layers, input_len, "mlp")


def build_fcn(input_len: int, seed: int = 0) -> Network:
    """Three same-padded conv blocks (kernel 8/5/3, channels 64/128/64), each
    followed by batchnorm and ReLU, then global average pooling."""
    if input_len < 8:
        raise ValueError("input_len must be >= 8")
    rng = _rng(seed)
    layers = []
    c_in = 1
    for kernel, c_out in ((8, 64), (5, 128), (3, 64)):
        layers += [
            Conv1D(c_in, c_out, kernel, "same", rng),
            BatchNorm1D(c_out),
            ReLU(),
        ]
        c_in = c_out
    layers += [GlobalAvgPool(), Dense(64, 2, rng), Softmax()]
    return Network(layers, input_len, "fcn")


def _residual_block(c_in, c_out, rng):
    body = []
    c = c_in
    for kernel in (8, 5, 3):
        body += [Conv1D(c, c_out, kernel, "same", rng), BatchNorm1D(c_out)]
        if kernel != 3:
            body.append(ReLU())
        c = c_out
    # channel change forces a kernel-1 projection on the skip path
    projection = Conv1D(c_in, c_out, 1, "valid", rng) if c_in != c_out else None
    return ResidualBlock(body, projection)


def build_resnet(input_len: int, seed: int = 0) -> Network:
    """Three residual blocks with channels 64/128/128; each block stacks the
    FCN conv sub-layers and joins the skip before the block's final ReLU."""
    if input_len < 8:
        raise ValueError("input_len must be >= 8")
    rng = _rng(seed)
    layers = [
        _residual_block(1, 64, rng),
        _residual_block(64, 128, rng),
        _residual_block(128, 128, rng),
        GlobalAvgPool(),
        Dense(128, 2, rng),
        Softmax(),
    ]
    return Network(layers, input_len, "resnet")


def build_lkcnn(input_len: int, kernel: int = LKCNN_KERNEL,
                channels: int = LKCNN_CHANNELS, seed: int = 0) -> Network:
    """Two valid (unpadded) conv layers with a large kernel and few channels,
    max pooling, dropout 0.5, then dense layers of 100 and 2 units.

    kernel and channels are exposed for the sensitivity sweeps.
    """
    if input_len < 2 * kernel:
        raise ValueError(f"input too short for lkcnn: need >= {2 * kernel} "
                         f"samples for two valid kernel-{kernel} convolutions, "
                         f"got {input_len}")
    rng = _rng(seed)
    after_convs = input_len - 2 * (kernel - 1)
    flat = channels * (after_convs // 2)
    layers = [
        Conv1D(1, channels, kernel, "valid", rng),
        ReLU(),
        Conv1D(channels, channels, kernel, "valid", rng),
        ReLU(),
        MaxPool1D(2),
        Dropout(0.5),
        Flatten(),
        Dense(flat, 100, rng),
        ReLU(),
        Dense(100, 2, rng),
        Softmax(),
    ]
    return Network(layers, input_len, "lkcnn",
                   hyperparams={"kernel": kernel, "channels": channels})


_BUILDERS = {
    "shallownet": build_shallownet,
    "mlp": build_mlp,
    "fcn": build_fcn,
    "resnet": build_resnet,
    "lkcnn": build_lkcnn,
}


def build(architecture: str, input_len: int, seed: int = 0, **hyperparams) -> Network:
    """Dispatch on architecture name; hyperparams only apply to lkcnn."""
    if architecture not in _BUILDERS:
        raise ValueError(f"unknown architecture {architecture!r}, "
                         f"expected one of {ARCHITECTURES}")
    if hyperparams and architecture != "lkcnn":
        raise ValueError(f"{architecture} takes no hyperparameters")
    return _BUILDERS[architecture](input_len, seed=seed, **hyperparams)
