"""Dense feed-forward networks: evaluation, readout and JSON model files."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError, NonFiniteError, ValidationError

TANH = "tanh_beta"
STEP = "unit_step"
IDENTITY = "identity"
KINDS = (TANH, STEP, IDENTITY)


@dataclass(frozen=True)
class Activation:
    kind: str
    beta: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown activation kind {self.kind!r}")
        if self.kind == TANH and not (self.beta > 0 and math.isfinite(self.beta)):
            raise ValidationError(f"tanh_beta needs beta > 0, got {self.beta}")
        object.__setattr__(self, "beta", float(self.beta))

    def __call__(self, z: np.ndarray) -> np.ndarray:
        if self.kind == TANH:
            return np.tanh(self.beta * z)
        if self.kind == STEP:
            return (z > 0.0).astype(np.float64)
        return z

    def to_dict(self) -> dict:
        return {"kind": self.kind, "beta": self.beta}

    @classmethod
    def tanh(cls, beta: float = 1.0) -> "Activation":
        return cls(TANH, beta)


@dataclass(frozen=True, eq=False)
class Layer:
    weights: np.ndarray  # (out, in)
    bias: np.ndarray  # (out,)
    activation: Activation

    def __post_init__(self):
        W = np.array(self.weights, dtype=np.float64)
        b = np.array(self.bias, dtype=np.float64).reshape(-1)
        if W.ndim != 2 or W.shape[0] != b.size:
            raise ValidationError(f"weights {W.shape} do not match bias of length {b.size}")
        if not (np.all(np.isfinite(W)) and np.all(np.isfinite(b))):
            raise ValidationError("layer parameters must be finite")
        W.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "weights", W)
        object.__setattr__(self, "bias", b)

    @property
    def fan_in(self) -> int:
        return self.weights.shape[1]

    @property
    def fan_out(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True, eq=False)
class FeedForwardNet:
    input_dim: int
    layers: tuple[Layer, ...]

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise ValidationError("network needs at least one layer")
        width = int(self.input_dim)
        for i, layer in enumerate(layers):
            if layer.fan_in != width:
                raise ValidationError(f"layer {i} expects {layer.fan_in} inputs, gets {width}")
            width = layer.fan_out
        object.__setattr__(self, "layers", layers)
        object.__setattr__(self, "input_dim", int(self.input_dim))

    @property
    def arch(self) -> tuple[int, ...]:
        return (self.input_dim,) + tuple(l.fan_out for l in self.layers)

    @property
    def output_dim(self) -> int:
        return self.layers[-1].fan_out

    def __repr__(self):
        return f"FeedForwardNet({'-'.join(map(str, self.arch))})"

    def same_as(self, other: "FeedForwardNet") -> bool:
        """Bit-for-bit parameter and activation equality."""
        if self.arch != other.arch:
            return False
        return all(
            a.activation == b.activation
            and a.weights.tobytes() == b.weights.tobytes()
            and a.bias.tobytes() == b.bias.tobytes()
            for a, b in zip(self.layers, other.layers)
        )


@dataclass(frozen=True)
class Prediction:
    output: np.ndarray
    label: int


def forward(net: FeedForwardNet, x) -> np.ndarray:
    """Evaluate the network on one point (n,) or a batch (B, n)."""
    a = np.asarray(x, dtype=np.float64)
    if a.shape[-1:] != (net.input_dim,) or a.ndim > 2:
        raise DimensionMismatchError(f"input of shape {a.shape} for a net with {net.input_dim} inputs")
    for i, layer in enumerate(net.layers):
        with np.errstate(over="ignore", invalid="ignore"):
            a = layer.activation(a @ layer.weights.T + layer.bias)
        if not np.all(np.isfinite(a)):
            raise NonFiniteError(f"non-finite value after layer {i}", layer=i)
    return a


def predict_label(net: FeedForwardNet, x) -> Prediction:
    out = forward(net, x)
    if out.ndim != 1:
        raise DimensionMismatchError("predict_label takes a single point; use predict_labels")
    # np.argmax returns the first maximum, i.e. ties go to the lowest index
    return Prediction(out, int(np.argmax(out)))


def predict_labels(net: FeedForwardNet, X) -> np.ndarray:
    out = forward(net, np.atleast_2d(X))
    return np.argmax(out, axis=1)


def count_weights(net_or_arch) -> int:
    """Weights plus biases over all layers. Accepts a net or a layer-size list."""
    arch = net_or_arch.arch if isinstance(net_or_arch, FeedForwardNet) else tuple(net_or_arch)
    return sum((a + 1) * b for a, b in zip(arch[:-1], arch[1:]))


def net_to_dict(net: FeedForwardNet) -> dict:
    return {
        "input_dim": net.input_dim,
        "layers": [
            {
                "weights": layer.weights.tolist(),
                "bias": layer.bias.tolist(),
                "activation": layer.activation.to_dict(),
            }
            for layer in net.layers
        ],
    }


def net_from_dict(d: dict) -> FeedForwardNet:
    try:
        layers = []
        for rec in d["layers"]:
            act = rec["activation"]
            layers.append(
                Layer(
                    np.array(rec["weights"], dtype=np.float64).reshape(len(rec["bias"]), -1),
                    rec["bias"],
                    Activation(act["kind"], act.get("beta", 1.0)),
                )
            )
        return FeedForwardNet(d["input_dim"], tuple(layers))
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed model file: {exc}") from exc


def dump_net(net: FeedForwardNet, **extra) -> str:
    """Model JSON. Floats go through repr(), so save/load is bit-exact."""
    d = net_to_dict(net)
    d.update(extra)
    return json.dumps(d)


def load_net(text: str) -> FeedForwardNet:
    return net_from_dict(json.loads(text))


def build_net(arch: Sequence[int], params: Sequence[tuple[np.ndarray, np.ndarray]],
              activations: Sequence[Activation]) -> FeedForwardNet:
    layers = tuple(Layer(W, b, act) for (W, b), act in zip(params, activations))
    return FeedForwardNet(arch[0], layers)
