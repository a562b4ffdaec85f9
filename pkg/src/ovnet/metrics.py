"""Accuracy, KCR/PEW architecture scores and operation counts.

KCR here divides the training-equation count by *twice* the weight count,
the convention under which the usual nested-4D reference scores are
reproduced to within 1%. The plain equations-per-weight ratio is reported
alongside as ``kcr_raw``.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .datasets import LabeledDataset
from .errors import DimensionMismatchError, ValidationError
from .geometry import ClusterSummary, as_point
from .network import FeedForwardNet, count_weights, predict_labels

KCR_WEIGHT_FACTOR = 2


def evaluate_accuracy(net: FeedForwardNet, dataset: LabeledDataset) -> float:
    if len(dataset) == 0:
        raise ValidationError("accuracy of an empty dataset is undefined")
    if dataset.dim != net.input_dim:
        raise DimensionMismatchError(f"dataset dimension {dataset.dim}, net input {net.input_dim}")
    if net.output_dim < dataset.class_count:
        raise DimensionMismatchError(
            f"net has {net.output_dim} outputs for {dataset.class_count} classes"
        )
    return float(np.mean(predict_labels(net, dataset.points) == dataset.class_labels))


def equation_count(train_samples: int, output_units: int) -> int:
    return train_samples * output_units


def kcr_raw(net_or_arch, train_samples: int, output_units: int) -> float:
    """Training equations per weight, without the factor-2 convention."""
    weights = count_weights(net_or_arch)
    if weights == 0:
        raise ValidationError("network has no weights")
    return equation_count(train_samples, output_units) / weights


def kcr_pew(net_or_arch, train_samples: int, output_units: int,
            test_fraction_correct: float) -> tuple[float, float]:
    if train_samples < 1 or output_units < 1:
        raise ValidationError("train_samples and output_units must be >= 1")
    if not 0.0 <= test_fraction_correct <= 1.0:
        raise ValidationError("test fraction correct must lie in [0, 1]")
    kcr = kcr_raw(net_or_arch, train_samples, output_units) / KCR_WEIGHT_FACTOR
    return kcr, kcr * test_fraction_correct


@dataclass(frozen=True)
class ArchitectureScore:
    architecture: tuple[int, ...]
    train_accuracy: float
    test_accuracy: float
    kcr: float
    pew: float
    kcr_raw: float
    weight_count: int
    equation_count: int

    @property
    def label(self) -> str:
        return "-".join(map(str, self.architecture))


def score_architecture(arch: Sequence[int], train_samples: int, train_accuracy: float,
                       test_accuracy: float, output_units: int | None = None) -> ArchitectureScore:
    arch = tuple(int(a) for a in arch)
    k = output_units or arch[-1]
    kcr, pew = kcr_pew(arch, train_samples, k, test_accuracy)
    return ArchitectureScore(
        architecture=arch,
        train_accuracy=train_accuracy,
        test_accuracy=test_accuracy,
        kcr=kcr,
        pew=pew,
        kcr_raw=kcr_raw(arch, train_samples, k),
        weight_count=count_weights(arch),
        equation_count=equation_count(train_samples, k),
    )


SCORE_COLUMNS = ["architecture", "train_pct", "test_pct", "kcr", "pew",
                 "kcr_raw", "weight_count", "equation_count"]


def scores_to_csv(scores: Sequence[ArchitectureScore]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SCORE_COLUMNS)
    for s in scores:
        w.writerow([s.label, repr(100 * s.train_accuracy), repr(100 * s.test_accuracy),
                    repr(s.kcr), repr(s.pew), repr(s.kcr_raw), s.weight_count, s.equation_count])
    return buf.getvalue()


@dataclass(frozen=True)
class OpCountReport:
    linear_ops: int
    distance_ops: int
    ratio: float
    planes: int
    dim: int
    clusters: int

    def to_dict(self) -> dict:
        return {
            "linear_ops": self.linear_ops,
            "distance_ops": self.distance_ops,
            "ratio": self.ratio,
            "planes": self.planes,
            "dim": self.dim,
            "clusters": self.clusters,
        }


def op_count_report(q: int, n: int, N: int) -> OpCountReport:
    """Multiply-adds per sample: q plane evaluations vs N squared distances."""
    if q < 1 or n < 1 or N < 1:
        raise ValidationError("q, n and N must all be positive")
    linear = q * (n + 1)
    distance = N * n
    return OpCountReport(linear, distance, distance / linear, q, n, N)


def level_r_op_counts(n: int, r: int) -> OpCountReport:
    return op_count_report((2**r - 1) * n, n, 2 ** (r * n))


def centroid_predict(clusters: Sequence[ClusterSummary], p) -> int:
    """Class of the nearest centroid; equal distances go to the lowest cluster id."""
    if not clusters:
        raise ValidationError("need at least one cluster")
    x = as_point(p, clusters[0].dim)
    best = min(clusters, key=lambda c: (float(np.sum((c.center - x) ** 2)), c.id))
    return best.class_label


def centroid_predict_batch(clusters: Sequence[ClusterSummary], X: np.ndarray) -> np.ndarray:
    if not clusters:
        raise ValidationError("need at least one cluster")
    ordered = sorted(clusters, key=lambda c: c.id)
    C = np.array([c.centroid for c in ordered])
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != C.shape[1]:
        raise DimensionMismatchError(f"points of dimension {X.shape[1]}, centroids {C.shape[1]}")
    d2 = (X * X).sum(axis=1)[:, None] - 2 * X @ C.T + (C * C).sum(axis=1)[None, :]
    labels = np.array([c.class_label for c in ordered])
    return labels[np.argmin(d2, axis=1)]


def centroid_accuracy(dataset: LabeledDataset) -> float:
    if len(dataset) == 0:
        raise ValidationError("accuracy of an empty dataset is undefined")
    return float(np.mean(centroid_predict_batch(dataset.clusters, dataset.points) == dataset.class_labels))
