"""Differentiable layers over float64 numpy arrays.

Convolutional layers operate on (batch, channels, length) arrays, dense
layers on (batch, features).  Every layer caches what its backward pass
needs during forward; backward returns the gradient w.r.t. the layer input
and fills `self.grads` (aligned with `self.params`).

Convolutions are evaluated as im2col + GEMM; the input gradient reuses the
same machinery on a zero-padded upstream gradient with flipped kernels, so
no scatter loops appear anywhere.
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def glorot_uniform(rng, shape, fan_in, fan_out):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


class Layer:
    """Stateless base; subclasses override forward/backward."""

    def __init__(self):
        self.params: list[np.ndarray] = []
        self.grads: list[np.ndarray] = []
        self.buffers: list[np.ndarray] = []

    def forward(self, x, training=False, rng=None):
        raise NotImplementedError

    def backward(self, grad):
        raise NotImplementedError


class Dense(Layer):
    def __init__(self, n_in, n_out, rng):
        super().__init__()
        self.n_in = n_in
        self.n_out = n_out
        w = glorot_uniform(rng, (n_in, n_out), n_in, n_out)
        b = np.zeros(n_out)
        self.params = [w, b]

    def forward(self, x, training=False, rng=None):
        w, b = self.params
        if x.ndim != 2 or x.shape[1] != w.shape[0]:
            raise ValueError(f"dense layer expects (batch, {w.shape[0]}), got {x.shape}")
        self._x = x
        return x @ w + b

    def backward(self, grad):
        w, _ = self.params
        self.grads = [self._x.T @ grad, grad.sum(axis=0)]
        return grad @ w.T


class Conv1D(Layer):
    """Cross-correlation along the last axis; padding 'valid' or 'same'."""

    def __init__(self, c_in, c_out, kernel, padding, rng):
        super().__init__()
        if kernel < 1:
            raise ValueError("kernel size must be >= 1")
        if padding not in ("valid", "same"):
            raise ValueError(f"unknown padding {padding!r}")
        self.c_in = c_in
        self.c_out = c_out
        self.kernel = kernel
        self.padding = padding
        w = glorot_uniform(rng, (c_out, c_in, kernel), c_in * kernel, c_out * kernel)
        b = np.zeros(c_out)
        self.params = [w, b]

    def _pad(self):
        if self.padding == "same":
            return (self.kernel - 1) // 2, self.kernel // 2
        return 0, 0

    def forward(self, x, training=False, rng=None):
        w, b = self.params
        if x.ndim != 3 or x.shape[1] != self.c_in:
            raise ValueError(f"conv layer expects (batch, {self.c_in}, n), got {x.shape}")
        k = self.kernel
        if k > x.shape[2]:
            raise ValueError(f"kernel size {k} exceeds input length {x.shape[2]}")
        pl, pr = self._pad()
        xp = np.pad(x, ((0, 0), (0, 0), (pl, pr))) if pl or pr else x
        self._xp = xp
        b_sz, _, n_p = xp.shape
        n_out = n_p - k + 1
        cols = sliding_window_view(xp, k, axis=2).transpose(0, 2, 1, 3) \
            .reshape(b_sz * n_out, self.c_in * k)
        out = cols @ w.reshape(self.c_out, -1).T
        out += b
        return out.reshape(b_sz, n_out, self.c_out).transpose(0, 2, 1)

    def backward(self, grad):
        w, _ = self.params
        k = self.kernel
        xp = self._xp
        b_sz, _, n_p = xp.shape
        n_out = grad.shape[2]
        # weight gradient: correlate input windows with the upstream gradient
        cols = sliding_window_view(xp, k, axis=2).transpose(0, 2, 1, 3) \
            .reshape(b_sz * n_out, self.c_in * k)
        g2 = grad.transpose(1, 0, 2).reshape(self.c_out, b_sz * n_out)
        dw = (g2 @ cols).reshape(self.c_out, self.c_in, k)
        db = grad.sum(axis=(0, 2))
        self.grads = [dw, db]
        # input gradient: full correlation of grad with flipped, role-swapped kernels
        gp = np.pad(grad, ((0, 0), (0, 0), (k - 1, k - 1)))
        gcols = sliding_window_view(gp, k, axis=2).transpose(0, 2, 1, 3) \
            .reshape(b_sz * n_p, self.c_out * k)
        wf = w[:, :, ::-1].transpose(1, 0, 2).reshape(self.c_in, self.c_out * k)
        dxp = (gcols @ wf.T).reshape(b_sz, n_p, self.c_in).transpose(0, 2, 1)
        pl, _ = self._pad()
        if self.padding == "same":
            return np.ascontiguousarray(dxp[:, :, pl:pl + grad.shape[2]])
        return dxp


class ReLU(Layer):
    def forward(self, x, training=False, rng=None):
        self._mask = x > 0.0
        return np.where(self._mask, x, 0.0)

    def backward(self, grad):
        return np.where(self._mask, grad, 0.0)


class Sigmoid(Layer):
    def forward(self, x, training=False, rng=None):
        out = np.empty_like(x)
        pos = x >= 0
        out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
        ex = np.exp(x[~pos])
        out[~pos] = ex / (1.0 + ex)
        self._out = out
        return out

    def backward(self, grad):
        return grad * self._out * (1.0 - self._out)


class MaxPool1D(Layer):
    """Non-overlapping windows; a trailing window shorter than the pool size
    is dropped; ties route the gradient to the first maximal element."""

    def __init__(self, pool):
        super().__init__()
        if pool < 1:
            raise ValueError("pool size must be >= 1")
        self.pool = pool

    def forward(self, x, training=False, rng=None):
        b, c, n = x.shape
        m = n // self.pool
        xw = x[:, :, :m * self.pool].reshape(b, c, m, self.pool)
        self._argmax = xw.argmax(axis=3)  # first index on ties
        self._n_in = n
        return np.take_along_axis(xw, self._argmax[..., None], axis=3)[..., 0]

    def backward(self, grad):
        b, c, m = grad.shape
        dxw = np.zeros((b, c, m, self.pool))
        np.put_along_axis(dxw, self._argmax[..., None], grad[..., None], axis=3)
        dx = np.zeros((b, c, self._n_in))
        dx[:, :, :m * self.pool] = dxw.reshape(b, c, m * self.pool)
        return dx


class GlobalAvgPool(Layer):
    def forward(self, x, training=False, rng=None):
        self._n = x.shape[2]
        return x.mean(axis=2)

    def backward(self, grad):
        return np.broadcast_to(grad[:, :, None], grad.shape + (self._n,)) / self._n


class BatchNorm1D(Layer):
    """Per-channel normalization over (batch, length).

    Train mode uses batch statistics with the variance floored at
    `var_floor` (max, not additive, so a unit-variance output is exact) and
    updates the running statistics; eval mode applies the running ones.
    """

    def __init__(self, channels, momentum=0.9, var_floor=1e-5):
        super().__init__()
        self.channels = channels
        self.momentum = momentum
        self.var_floor = var_floor
        self.params = [np.ones(channels), np.zeros(channels)]  # gamma, beta
        self.buffers = [np.zeros(channels), np.ones(channels)]  # running mean/var

    def forward(self, x, training=False, rng=None):
        if x.ndim != 3 or x.shape[1] != self.channels:
            raise ValueError(f"batchnorm expects (batch, {self.channels}, n), got {x.shape}")
        gamma, beta = self.params
        if training:
            mean = x.mean(axis=(0, 2))
            var = x.var(axis=(0, 2))
            rm, rv = self.buffers
            rm *= self.momentum
            rm += (1.0 - self.momentum) * mean
            rv *= self.momentum
            rv += (1.0 - self.momentum) * var
        else:
            mean, var = self.buffers[0], self.buffers[1]
        clipped = var < self.var_floor
        istd = 1.0 / np.sqrt(np.maximum(var, self.var_floor))
        xhat = (x - mean[None, :, None]) * istd[None, :, None]
        self._xhat = xhat
        self._istd = istd
        self._clipped = clipped
        self._training = training
        self._n = x.shape[0] * x.shape[2]
        return gamma[None, :, None] * xhat + beta[None, :, None]

    def backward(self, grad):
        gamma, _ = self.params
        xhat, istd = self._xhat, self._istd
        dgamma = (grad * xhat).sum(axis=(0, 2))
        dbeta = grad.sum(axis=(0, 2))
        self.grads = [dgamma, dbeta]
        dxhat = grad * gamma[None, :, None]
        if not self._training:
            return dxhat * istd[None, :, None]
        n = self._n
        s1 = dxhat.sum(axis=(0, 2))
        s2 = (dxhat * xhat).sum(axis=(0, 2))
        s2[self._clipped] = 0.0  # floored variance is constant w.r.t. x
        return istd[None, :, None] * (dxhat - s1[None, :, None] / n
                                      - xhat * s2[None, :, None] / n)


class Dropout(Layer):
    """Inverted dropout: survivors are scaled by 1/(1-rate) in train mode."""

    def __init__(self, rate):
        super().__init__()
        if not 0.0 <= rate < 1.0:
            raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
        self.rate = rate

    def forward(self, x, training=False, rng=None):
        if not training or self.rate == 0.0:
            self._scale = None
            return x
        if rng is None:
            raise ValueError("dropout in train mode needs the network RNG")
        keep = rng.random(x.shape) >= self.rate
        self._scale = keep / (1.0 - self.rate)
        return x * self._scale

    def backward(self, grad):
        if self._scale is None:
            return grad
        return grad * self._scale


class Flatten(Layer):
    def forward(self, x, training=False, rng=None):
        self._shape = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, grad):
        return grad.reshape(self._shape)


class Softmax(Layer):
    def forward(self, x, training=False, rng=None):
        z = x - x.max(axis=1, keepdims=True)
        e = np.exp(z)
        self._p = e / e.sum(axis=1, keepdims=True)
        return self._p

    def backward(self, grad):
        p = self._p
        return p * (grad - (grad * p).sum(axis=1, keepdims=True))


class ResidualBlock(Layer):
    """Body layers plus an identity (or kernel-1 projection) skip connection,
    joined by addition before a final ReLU."""

    def __init__(self, body, projection=None):
        super().__init__()
        self.body = body
        self.projection = projection

    @property
    def sublayers(self):
        layers = list(self.body)
        if self.projection is not None:
            layers.append(self.projection)
        return layers

    def forward(self, x, training=False, rng=None):
        h = x
        for layer in self.body:
            h = layer.forward(h, training=training, rng=rng)
        s = x if self.projection is None else self.projection.forward(
            x, training=training, rng=rng)
        if h.shape != s.shape:
            raise ValueError(f"residual join shapes differ: body {h.shape} "
                             f"vs skip {s.shape}")
        y = h + s
        self._mask = y > 0.0
        return np.where(self._mask, y, 0.0)

    def backward(self, grad):
        g = np.where(self._mask, grad, 0.0)
        gh = g
        for layer in reversed(self.body):
            gh = layer.backward(gh)
        gs = g if self.projection is None else self.projection.backward(g)
        return gh + gs
