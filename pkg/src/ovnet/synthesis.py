"""Write down the weights of a plane / collection / class network directly.

Given q planes that leave every one of m clusters uncut and on a distinct
orientation code, the classifier is built without any training:

* layer 1 (q units) evaluates the planes, ``tanh(beta * y)``;
* layer 2 (m units) fires for one cluster each: weights are the cluster's
  code and the bias is ``1/2 - q``, so the pre-activation is ``1/2`` on the
  cluster's own code and at most ``-3/2`` on any other code;
* layer 3 (k units) sums the collection units belonging to each class.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CutClusterError, DuplicateCodeError, ValidationError
from .geometry import ClusterSummary, Hyperplane, planes_matrix
from .network import IDENTITY, STEP, TANH, Activation, FeedForwardNet, Layer
from .orientation import verify_separation

DEFAULT_BETA = 5.0


@dataclass(frozen=True)
class SynthesisInput:
    planes: tuple[Hyperplane, ...]
    clusters: tuple[ClusterSummary, ...]
    class_count: int
    beta: float = DEFAULT_BETA

    def __post_init__(self):
        object.__setattr__(self, "planes", tuple(self.planes))
        object.__setattr__(self, "clusters", tuple(self.clusters))
        if not self.planes:
            raise ValidationError("synthesis needs at least one plane")
        if not self.clusters:
            raise ValidationError("synthesis needs at least one cluster")
        if self.class_count < 1:
            raise ValidationError("class_count must be >= 1")
        if not self.beta > 0:
            raise ValidationError("beta must be positive")
        for c in self.clusters:
            if c.class_label >= self.class_count:
                raise ValidationError(
                    f"cluster {c.id} has class {c.class_label}, but class_count is {self.class_count}"
                )

    @classmethod
    def infer(cls, planes, clusters, beta: float = DEFAULT_BETA) -> "SynthesisInput":
        k = max(c.class_label for c in clusters) + 1
        return cls(tuple(planes), tuple(clusters), k, beta)


def synthesize_three_layer(inp: SynthesisInput, second_layer_kind: str = "tanh") -> FeedForwardNet:
    """Build the n-q-m-k classifier.

    ``second_layer_kind`` is ``"tanh"`` or ``"unit_step"``. With the unit
    step the collection outputs are exactly 0/1 and the class layer is the
    plain 0/1 membership matrix. With tanh the collection outputs sit near
    +/-1, so the class layer applies ``(u + 1) / 2`` first by halving the
    membership weights and adding half the cluster count of each class to
    its bias; the class outputs are then near 0/1 whatever the number of
    clusters per class.
    """
    if second_layer_kind not in ("tanh", STEP):
        raise ValidationError(f"second_layer_kind must be 'tanh' or 'unit_step', got {second_layer_kind!r}")

    report = verify_separation(inp.planes, inp.clusters)
    if report.cut_clusters:
        raise CutClusterError(*report.cut_clusters[0])
    if report.duplicate_groups:
        raise DuplicateCodeError(report.duplicate_groups)

    W1, b1 = planes_matrix(inp.planes)
    q, n = W1.shape
    m, k = len(inp.clusters), inp.class_count

    W2 = np.array([report.codes[c.id] for c in inp.clusters], dtype=np.float64)
    b2 = np.full(m, 0.5 - q)

    membership = np.zeros((k, m))
    for i, c in enumerate(inp.clusters):
        membership[c.class_label, i] = 1.0

    tanh = Activation(TANH, inp.beta)
    if second_layer_kind == STEP:
        act2 = Activation(STEP)
        W3, b3 = membership, np.zeros(k)
    else:
        act2 = tanh
        W3, b3 = 0.5 * membership, 0.5 * membership.sum(axis=1)

    layers = (
        Layer(W1, b1, tanh),
        Layer(W2, b2, act2),
        Layer(W3, b3, Activation(IDENTITY)),
    )
    return FeedForwardNet(n, layers)


def synthesize(planes: Sequence[Hyperplane], clusters: Sequence[ClusterSummary],
               class_count: int | None = None, beta: float = DEFAULT_BETA,
               second_layer_kind: str = "tanh") -> FeedForwardNet:
    if class_count is None:
        inp = SynthesisInput.infer(planes, clusters, beta)
    else:
        inp = SynthesisInput(tuple(planes), tuple(clusters), class_count, beta)
    return synthesize_three_layer(inp, second_layer_kind)
