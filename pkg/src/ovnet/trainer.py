"""Plain backpropagation for dense tanh networks with a linear output layer.

Loss is half the squared error against 0/1 one-hot targets, averaged over
the batch. Training never mutates the input network; it returns a new one.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .datasets import LabeledDataset
from .errors import NonFiniteError, ValidationError
from .network import IDENTITY, STEP, TANH, Activation, FeedForwardNet, Layer


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.05
    epochs: int = 500
    batch_size: int = 16
    seed: int = 0
    beta: float = 1.0
    target_encoding: str = "zero_one"
    init_scale: float = 1.0
    momentum: float = 0.0
    # stop as soon as the whole training set is classified at this rate
    stop_at_train_accuracy: float | None = None

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValidationError("learning_rate must be > 0")
        if self.epochs < 1:
            raise ValidationError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ValidationError("batch_size must be >= 1")
        if not self.beta > 0:
            raise ValidationError("beta must be > 0")
        if self.target_encoding != "zero_one":
            raise ValidationError(f"unsupported target_encoding {self.target_encoding!r}")
        if not 0 <= self.momentum < 1:
            raise ValidationError("momentum must lie in [0, 1)")
        if self.init_scale < 0:
            raise ValidationError("init_scale must be >= 0")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class TrainReport:
    final_train_accuracy: float
    final_test_accuracy: float
    epoch_losses: list[float] = field(default_factory=list)
    epochs_run: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **extra) -> str:
        d = self.to_dict()
        d.update(extra)
        return json.dumps(d, indent=1)

    def losses_csv(self) -> str:
        lines = ["epoch,loss"]
        lines += [f"{i + 1},{loss!r}" for i, loss in enumerate(self.epoch_losses)]
        return "\n".join(lines) + "\n"


def init_weights(arch: Sequence[int], seed: int, init_scale: float = 1.0, beta: float = 1.0) -> FeedForwardNet:
    """Uniform(+-init_scale / sqrt(fan_in)) weights, zero biases.

    Hidden layers get ``tanh(beta * z)``; the output layer is linear.
    """
    arch = [int(a) for a in arch]
    if len(arch) < 2 or any(a < 1 for a in arch):
        raise ValidationError(f"invalid architecture {arch}")
    rng = np.random.default_rng(seed)
    layers = []
    for i, (fan_in, fan_out) in enumerate(zip(arch[:-1], arch[1:])):
        bound = init_scale / math.sqrt(fan_in)
        W = rng.uniform(-bound, bound, size=(fan_out, fan_in))
        last = i == len(arch) - 2
        act = Activation(IDENTITY) if last else Activation(TANH, beta)
        layers.append(Layer(W, np.zeros(fan_out), act))
    return FeedForwardNet(arch[0], tuple(layers))


def one_hot(labels: np.ndarray, k: int) -> np.ndarray:
    T = np.zeros((len(labels), k))
    T[np.arange(len(labels)), labels] = 1.0
    return T


def _check_trainable(net: FeedForwardNet):
    for i, layer in enumerate(net.layers):
        if layer.activation.kind == STEP:
            raise ValidationError(f"layer {i} uses unit_step, which has no usable gradient")


def _act_grad(act: Activation, out: np.ndarray) -> np.ndarray:
    """Derivative of the activation, written in terms of its output."""
    if act.kind == TANH:
        return act.beta * (1.0 - out * out)
    return np.ones_like(out)


def loss_and_grads(params, acts, X: np.ndarray, T: np.ndarray):
    """Mean half-squared-error and its exact gradient for every (W, b)."""
    outs = [X]
    a = X
    for (W, b), act in zip(params, acts):
        a = act(a @ W.T + b)
        outs.append(a)
    err = outs[-1] - T
    B = X.shape[0]
    loss = 0.5 * float(np.sum(err * err)) / B

    grads = [None] * len(params)
    delta = err / B * _act_grad(acts[-1], outs[-1])
    for l in range(len(params) - 1, -1, -1):
        W, _ = params[l]
        grads[l] = (delta.T @ outs[l], delta.sum(axis=0))
        if l:
            delta = (delta @ W) * _act_grad(acts[l - 1], outs[l])
    return loss, grads


def _loss(params, acts, X, T) -> float:
    a = X
    for (W, b), act in zip(params, acts):
        a = act(a @ W.T + b)
    err = a - T
    return 0.5 * float(np.sum(err * err)) / X.shape[0]


def _unpack(net: FeedForwardNet):
    params = [(layer.weights.copy(), layer.bias.copy()) for layer in net.layers]
    acts = [layer.activation for layer in net.layers]
    return params, acts


def _pack(net: FeedForwardNet, params) -> FeedForwardNet:
    layers = tuple(Layer(W, b, l.activation) for (W, b), l in zip(params, net.layers))
    return FeedForwardNet(net.input_dim, layers)


def _accuracy(params, acts, X, labels) -> float:
    if len(X) == 0:
        return float("nan")
    a = X
    for (W, b), act in zip(params, acts):
        a = act(a @ W.T + b)
    return float(np.mean(np.argmax(a, axis=1) == labels))


def train_backprop(net: FeedForwardNet, train: LabeledDataset, test: LabeledDataset,
                   cfg: TrainConfig) -> tuple[FeedForwardNet, TrainReport]:
    """Mini-batch SGD, samples reshuffled every epoch from ``cfg.seed``.

    The network keeps its own activations; ``cfg.beta`` only matters when
    the starting network is built by :func:`init_weights`.
    """
    _check_trainable(net)
    if train.dim != net.input_dim:
        raise ValidationError(f"training data has dimension {train.dim}, net expects {net.input_dim}")
    if len(train) == 0:
        raise ValidationError("training set is empty")
    if cfg.batch_size > len(train):
        raise ValidationError(f"batch_size {cfg.batch_size} exceeds training set size {len(train)}")
    k = net.output_dim
    if int(train.class_labels.max()) >= k:
        raise ValidationError(f"labels reach {int(train.class_labels.max())}, net has {k} outputs")

    params, acts = _unpack(net)
    velocity = [(np.zeros_like(W), np.zeros_like(b)) for W, b in params]
    X, y = train.points, train.class_labels
    T = one_hot(y, k)
    rng = np.random.default_rng(cfg.seed)
    losses: list[float] = []
    lr, mu, bs = cfg.learning_rate, cfg.momentum, cfg.batch_size

    epoch = 0
    # divergence is caught by the finite-loss check below
    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(1, cfg.epochs + 1):
            order = rng.permutation(len(X))
            for start in range(0, len(X), bs):
                idx = order[start:start + bs]
                _, grads = loss_and_grads(params, acts, X[idx], T[idx])
                for l, ((W, b), (gW, gb)) in enumerate(zip(params, grads)):
                    if mu:
                        vW, vb = velocity[l]
                        vW *= mu
                        vW -= lr * gW
                        vb *= mu
                        vb -= lr * gb
                        W += vW
                        b += vb
                    else:
                        W -= lr * gW
                        b -= lr * gb
            loss = _loss(params, acts, X, T)
            if not math.isfinite(loss):
                raise NonFiniteError(f"training diverged at epoch {epoch}", epoch=epoch)
            losses.append(loss)
            if cfg.stop_at_train_accuracy is not None:
                if _accuracy(params, acts, X, y) >= cfg.stop_at_train_accuracy:
                    break

    report = TrainReport(
        final_train_accuracy=_accuracy(params, acts, X, y),
        final_test_accuracy=_accuracy(params, acts, test.points, test.class_labels),
        epoch_losses=losses,
        epochs_run=epoch,
    )
    return _pack(net, params), report


def numeric_gradient_check(net: FeedForwardNet, sample, target, h: float = 1e-5) -> float:
    """Largest relative gap between backprop and central-difference gradients.

    The denominator is ``max(|analytic|, |numeric|, 1e-12)``.
    """
    if not h > 0:
        raise ValidationError("h must be positive")
    _check_trainable(net)
    X = np.atleast_2d(np.asarray(sample, dtype=np.float64))
    T = np.atleast_2d(np.asarray(target, dtype=np.float64))
    params, acts = _unpack(net)
    _, grads = loss_and_grads(params, acts, X, T)

    worst = 0.0
    for (W, b), (gW, gb) in zip(params, grads):
        for arr, g in ((W, gW), (b, gb)):
            flat, gflat = arr.reshape(-1), g.reshape(-1)
            for i in range(flat.size):
                orig = flat[i]
                flat[i] = orig + h
                up = _loss(params, acts, X, T)
                flat[i] = orig - h
                down = _loss(params, acts, X, T)
                flat[i] = orig
                num = (up - down) / (2 * h)
                denom = max(abs(gflat[i]), abs(num), 1e-12)
                worst = max(worst, abs(gflat[i] - num) / denom)
    return worst
