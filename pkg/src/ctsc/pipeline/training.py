"""Training loop, evaluation, and the metrics report."""

import logging
from dataclasses import dataclass, field

import numpy as np

from ..nnengine import Adam, softmax_xent

log = logging.getLogger(__name__)

EVAL_BATCH = 64


@dataclass
class TrainConfig:
    epochs: int = 10
    batch_size: int = 32
    seed: int = 0
    architecture: str = ""
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


@dataclass
class MetricsReport:
    """Confusion counts (chaotic = positive class) and derived metrics."""

    t_nc: int
    t_c: int
    f_nc: int  # predicted NC, actually C
    f_c: int   # predicted C, actually NC
    per_regime: dict = field(default_factory=dict)

    @property
    def total(self):
        return self.t_nc + self.t_c + self.f_nc + self.f_c

    @property
    def accuracy(self):
        return 100.0 * (self.t_nc + self.t_c) / self.total

    @property
    def precision(self):
        denom = self.t_c + self.f_c
        return self.t_c / denom if denom else 0.0

    @property
    def recall(self):
        denom = self.t_c + self.f_nc
        return self.t_c / denom if denom else 0.0

    @property
    def balanced_accuracy(self):
        recall_nc = self.t_nc / (self.t_nc + self.f_c) if (self.t_nc + self.f_c) else 0.0
        recall_c = self.recall
        return 0.5 * (recall_nc + recall_c)

    def to_dict(self):
        out = {
            "t_nc": self.t_nc,
            "t_c": self.t_c,
            "f_nc": self.f_nc,
            "f_c": self.f_c,
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "balanced_accuracy": self.balanced_accuracy,
        }
        if self.per_regime:
            out["per_regime"] = {k: v.to_dict() for k, v in self.per_regime.items()}
        return out


def _as_batches(n, batch_size, perm):
    for start in range(0, n, batch_size):
        yield perm[start:start + batch_size]  # final ragged batch included


def train(net, train_set, cfg: TrainConfig):
    """Seeded minibatch training; returns the network in eval mode plus the
    per-epoch mean loss history."""
    if train_set.length != net.input_len:
        raise ValueError(f"dataset length {train_set.length} does not match "
                         f"network input length {net.input_len}")
    x_all = train_set.series[:, None, :]  # (n, 1, length)
    y_all = train_set.labels.astype(np.int64)
    n = len(train_set)
    shuffle_ss, net_ss = np.random.SeedSequence(cfg.seed).spawn(2)
    shuffle_rng = np.random.default_rng(shuffle_ss)
    net.rng = np.random.default_rng(net_ss)
    net.train()
    opt = Adam(net.parameters(), lr=cfg.lr, beta1=cfg.beta1, beta2=cfg.beta2, eps=cfg.eps)
    history = []
    for epoch in range(cfg.epochs):
        perm = shuffle_rng.permutation(n)
        total = 0.0
        for batch in _as_batches(n, cfg.batch_size, perm):
            logits = net.forward_logits(x_all[batch])
            loss, _, grad = softmax_xent(logits, y_all[batch])
            net.backward_from_logits(grad)
            opt.step(net.gradients())
            total += loss * len(batch)
        history.append(total / n)
        log.info("epoch %d/%d: mean loss %.4f", epoch + 1, cfg.epochs, history[-1])
    net.eval()
    return net, history


def predict_nc(net, series):
    """Row-wise P(non-chaotic) >= 0.5 decisions, batched for memory."""
    net.eval()
    out = np.empty(series.shape[0], dtype=bool)
    for start in range(0, series.shape[0], EVAL_BATCH):
        chunk = series[start:start + EVAL_BATCH, None, :]
        probs = net.forward(chunk)
        out[start:start + EVAL_BATCH] = probs[:, 0] >= 0.5
    return out


def evaluate(net, test_set) -> MetricsReport:
    """Confusion counts of the network on a labeled set; adds per-regime
    sub-reports when the set carries regime tags."""
    pred_nc = predict_nc(net, test_set.series)
    actual_nc = test_set.labels == 0
    report = _confusion(pred_nc, actual_nc)
    if test_set.regimes is not None and test_set.regimes.max(initial=0) > 0:
        names = test_set.meta.get("regimes")
        for tag in np.unique(test_set.regimes):
            mask = test_set.regimes == tag
            name = names[tag] if names else str(tag)
            key = f"{tag}:{name}"
            report.per_regime[key] = _confusion(pred_nc[mask], actual_nc[mask])
    return report


def _confusion(pred_nc, actual_nc) -> MetricsReport:
    return MetricsReport(
        t_nc=int(np.sum(pred_nc & actual_nc)),
        t_c=int(np.sum(~pred_nc & ~actual_nc)),
        f_nc=int(np.sum(pred_nc & ~actual_nc)),
        f_c=int(np.sum(~pred_nc & actual_nc)),
    )
