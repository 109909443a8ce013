"""One-class-one-network (OCON) sigmoid perceptrons trained by backprop.

Each character class owns a single-hidden-layer net scoring one-vs-rest
membership; class posteriors come from normalizing all nets' outputs.
Neuron activation follows the n = w.p - b convention (bias subtracted).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class TrainingDivergedError(RuntimeError):
    def __init__(self, epoch: int):
        super().__init__(f"non-finite loss at epoch {epoch}")
        self.epoch = epoch


@dataclass
class TrainConfig:
    learning_rate: float = 0.01
    momentum: float = 0.25
    epochs: int = 4000
    hidden_size: int = 40
    seed: int = 0

    def validate(self) -> "TrainConfig":
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if not 0.0 <= self.momentum < 1.0:
            raise ValueError("momentum must be in [0, 1)")
        if self.epochs < 0 or self.hidden_size < 1:
            raise ValueError("epochs must be >= 0 and hidden_size >= 1")
        return self


def sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


@dataclass
class OconNet:
    class_id: int
    w_hidden: np.ndarray   # (hidden, inputs)
    b_hidden: np.ndarray   # (hidden,)
    w_out: np.ndarray      # (hidden,)
    b_out: float

    @property
    def hidden_size(self) -> int:
        return self.w_hidden.shape[0]


def forward(net: OconNet, inputs: np.ndarray) -> float:
    """Net score in (0, 1) for one input vector."""
    inputs = np.asarray(inputs, dtype=float)
    if inputs.shape != (net.w_hidden.shape[1],):
        raise ValueError(
            f"input dimension {inputs.shape} does not match net ({net.w_hidden.shape[1]},)"
        )
    hidden = sigmoid(net.w_hidden @ inputs - net.b_hidden)
    return float(sigmoid(net.w_out @ hidden - net.b_out))


def gradients(net: OconNet, inputs: np.ndarray, target: float):
    """Analytic gradient of E = 0.5*(a - target)^2 w.r.t. all parameters."""
    x = np.asarray(inputs, dtype=float)
    z1 = net.w_hidden @ x - net.b_hidden
    h = sigmoid(z1)
    a = sigmoid(float(net.w_out @ h - net.b_out))
    d2 = (a - target) * a * (1.0 - a)
    d1 = d2 * net.w_out * h * (1.0 - h)
    return {
        "w_hidden": np.outer(d1, x),
        "b_hidden": -d1,
        "w_out": d2 * h,
        "b_out": -d2,
    }


class OconBank:
    """All per-class nets stacked for batched forward/updates."""

    def __init__(self, n_classes: int, n_inputs: int, hidden_size: int, seed: int):
        rng = np.random.default_rng(seed)
        lim1 = 1.0 / np.sqrt(n_inputs)
        lim2 = 1.0 / np.sqrt(hidden_size)
        self.w1 = rng.uniform(-lim1, lim1, size=(n_classes, hidden_size, n_inputs))
        self.b1 = rng.uniform(-lim1, lim1, size=(n_classes, hidden_size))
        self.w2 = rng.uniform(-lim2, lim2, size=(n_classes, hidden_size))
        self.b2 = rng.uniform(-lim2, lim2, size=n_classes)
        self.n_classes = n_classes
        self.n_inputs = n_inputs

    def net(self, class_id: int) -> OconNet:
        return OconNet(
            class_id=class_id,
            w_hidden=self.w1[class_id],
            b_hidden=self.b1[class_id],
            w_out=self.w2[class_id],
            b_out=float(self.b2[class_id]),
        )

    def scores(self, inputs: np.ndarray) -> np.ndarray:
        """(n_classes,) raw OCON outputs for one input vector."""
        x = np.asarray(inputs, dtype=float)
        hidden = sigmoid(np.einsum("chd,d->ch", self.w1, x) - self.b1)
        return sigmoid(np.einsum("ch,ch->c", self.w2, hidden) - self.b2)


def train_backprop(
    bank: OconBank,
    inputs: np.ndarray,
    labels: np.ndarray,
    cfg: TrainConfig,
) -> list[float]:
    """Per-sample gradient descent with momentum on squared error.

    Targets are 1 for the sample's own class and 0 elsewhere.  Returns the
    per-epoch mean loss; deterministic for a fixed (inputs, labels, cfg).
    """
    cfg.validate()
    X = np.asarray(inputs, dtype=float)
    y = np.asarray(labels, dtype=int)
    if X.ndim != 2 or X.shape[0] != len(y):
        raise ValueError("inputs must be (n_samples, n_inputs) matching labels")
    counts = np.bincount(y, minlength=bank.n_classes)
    if np.any(counts == 0):
        missing = np.flatnonzero(counts == 0).tolist()
        raise ValueError(f"classes with no positive examples: {missing}")
    rng = np.random.default_rng(cfg.seed)
    lr, mu = cfg.learning_rate, cfg.momentum
    v1 = np.zeros_like(bank.w1)
    vb1 = np.zeros_like(bank.b1)
    v2 = np.zeros_like(bank.w2)
    vb2 = np.zeros_like(bank.b2)
    onehot = np.eye(bank.n_classes)
    losses = []
    for epoch in range(cfg.epochs):
        order = rng.permutation(len(y))
        total = 0.0
        for i in order:
            x = X[i]
            target = onehot[y[i]]
            hidden = sigmoid(np.einsum("chd,d->ch", bank.w1, x) - bank.b1)
            a = sigmoid(np.einsum("ch,ch->c", bank.w2, hidden) - bank.b2)
            err = a - target
            total += 0.5 * float(err @ err)
            d2 = err * a * (1.0 - a)
            d1 = d2[:, None] * bank.w2 * hidden * (1.0 - hidden)
            v2 = mu * v2 - lr * d2[:, None] * hidden
            vb2 = mu * vb2 - lr * -d2
            v1 = mu * v1 - lr * d1[:, :, None] * x[None, None, :]
            vb1 = mu * vb1 - lr * -d1
            bank.w2 += v2
            bank.b2 += vb2
            bank.w1 += v1
            bank.b1 += vb1
        mean_loss = total / len(y)
        if not np.isfinite(mean_loss):
            raise TrainingDivergedError(epoch)
        losses.append(mean_loss)
    return losses


@dataclass
class PosteriorVector:
    values: np.ndarray        # per-class posteriors, sum to 1
    class_priors: np.ndarray  # training-frequency priors, sum to 1

    def validate(self) -> "PosteriorVector":
        if abs(float(self.values.sum()) - 1.0) > 1e-9:
            raise ValueError("posteriors must sum to 1")
        if abs(float(self.class_priors.sum()) - 1.0) > 1e-9:
            raise ValueError("priors must sum to 1")
        return self


SCORE_FLOOR = 1e-12
PRIOR_FLOOR = 1e-6


def class_priors(labels: np.ndarray, n_classes: int) -> np.ndarray:
    """Training label frequencies, floored so nothing divides by zero."""
    counts = np.bincount(np.asarray(labels, dtype=int), minlength=n_classes).astype(float)
    priors = np.maximum(counts / max(counts.sum(), 1.0), PRIOR_FLOOR)
    return priors / priors.sum()


def posterior_vector(
    bank: OconBank, inputs: np.ndarray, priors: np.ndarray
) -> PosteriorVector:
    """Normalize raw OCON scores into a posterior distribution."""
    raw = np.maximum(bank.scores(inputs), SCORE_FLOOR)
    return PosteriorVector(values=raw / raw.sum(), class_priors=priors).validate()
