"""Static-graph network: an ordered layer list ending in Softmax.

Training uses `forward_logits` + `softmax_xent` + `backward_from_logits`
(the softmax gradient is fused into the loss); `forward` runs the full
stack and returns class probabilities.  The network owns the RNG that
drives dropout sampling so a single seed fixes the whole trajectory.
"""

import numpy as np

from .layers import ResidualBlock, Softmax


def softmax_xent(logits, labels):
    """Stabilized softmax + mean cross-entropy over the batch.

    Returns (loss, probs, grad) with grad = (probs - onehot)/batch, ready to
    feed backward_from_logits.
    """
    if logits.ndim != 2:
        raise ValueError(f"logits must be (batch, classes), got {logits.shape}")
    b = logits.shape[0]
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    probs = e / e.sum(axis=1, keepdims=True)
    idx = np.arange(b)
    logp = z[idx, labels] - np.log(e.sum(axis=1))
    loss = -float(logp.mean())
    grad = probs.copy()
    grad[idx, labels] -= 1.0
    grad /= b
    return loss, probs, grad


def iter_leaf_layers(layers):
    for layer in layers:
        if isinstance(layer, ResidualBlock):
            yield from layer.sublayers
        else:
            yield layer


class Network:
    def __init__(self, layers, input_len, architecture, hyperparams=None):
        if not isinstance(layers[-1], Softmax):
            raise ValueError("network must end with a Softmax layer")
        self.layers = layers
        self.input_len = input_len
        self.architecture = architecture
        self.hyperparams = dict(hyperparams or {})
        self.training = False
        self.rng = np.random.default_rng(0)

    def seed_rng(self, seed):
        self.rng = np.random.default_rng(np.random.PCG64(seed))

    def train(self):
        self.training = True

    def eval(self):
        self.training = False

    def _run(self, x, layers):
        for i, layer in enumerate(layers):
            try:
                x = layer.forward(x, training=self.training, rng=self.rng)
            except ValueError as exc:
                raise ValueError(f"layer {i} ({type(layer).__name__}): {exc}") from exc
        return x

    def forward(self, x):
        """Full forward pass; returns class probabilities."""
        return self._run(x, self.layers)

    def forward_logits(self, x):
        """Forward pass stopping before the final Softmax."""
        return self._run(x, self.layers[:-1])

    def backward_from_logits(self, grad):
        """Reverse pass from d(loss)/d(logits); fills every layer's grads."""
        for layer in reversed(self.layers[:-1]):
            grad = layer.backward(grad)
        return grad

    def parameters(self):
        out = []
        for layer in iter_leaf_layers(self.layers):
            out.extend(layer.params)
        return out

    def gradients(self):
        out = []
        for layer in iter_leaf_layers(self.layers):
            out.extend(layer.grads)
        return out

    def state_tensors(self):
        """Parameters plus buffers (batchnorm running stats), in layer order;
        this is the checkpoint payload."""
        out = []
        for layer in iter_leaf_layers(self.layers):
            out.extend(layer.params)
            out.extend(layer.buffers)
        return out

    def parameter_count(self):
        return sum(p.size for p in self.parameters())
