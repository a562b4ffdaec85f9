"""Figures written next to the CSV/JSON reports.

Everything renders off-screen with the Agg backend. Every PNG carries the
run's seed and config hash in its text metadata.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

RC = {
    "figure.figsize": (6.0, 3.8),
    "figure.dpi": 100,
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "svg.hashsalt": "ovnet",
}


def _save(fig, path, provenance: dict | None):
    meta = {"Software": "ovnet"}
    if provenance:
        meta["Description"] = " ".join(f"{k}={v}" for k, v in sorted(provenance.items()))
    fig.savefig(path, metadata=meta)
    plt.close(fig)


def loss_curve(losses, path, title="training loss", provenance=None):
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        epochs = np.arange(1, len(losses) + 1)
        ax.semilogy(epochs, losses, lw=1.2)
        ax.set_xlabel("epoch")
        ax.set_ylabel("mean half squared error")
        ax.set_title(title)
        fig.tight_layout()
        _save(fig, path, provenance)


def score_bars(scores, path, provenance=None):
    """KCR and PEW per architecture, side by side."""
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        x = np.arange(len(scores))
        ax.bar(x - 0.2, [s.kcr for s in scores], 0.4, label="KCR")
        ax.bar(x + 0.2, [s.pew for s in scores], 0.4, label="PEW")
        ax.set_xticks(x, [s.label for s in scores], rotation=20)
        ax.set_ylabel("equations per weight")
        ax.legend(frameon=False)
        fig.tight_layout()
        _save(fig, path, provenance)


def op_count_scaling(rows, path, provenance=None):
    """Per-sample multiply-adds of plane codes vs nearest-centroid distances.

    ``rows`` are (r, linear_ops, distance_ops) triples for one dimension.
    """
    r, lin, dist = (np.array(col) for col in zip(*rows))
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        ax.semilogy(r, dist, "o-", label="centroid distances")
        ax.semilogy(r, lin, "s-", label="plane evaluations")
        ax.set_xlabel("nesting level r")
        ax.set_ylabel("multiply-adds per sample")
        ax.set_xticks(r)
        ax.legend(frameon=False)
        fig.tight_layout()
        _save(fig, path, provenance)


def dataset_projection(dataset, path, provenance=None, max_points=5000):
    """Scatter of the first two coordinates, coloured by class."""
    X, y = dataset.points, dataset.class_labels
    if len(X) > max_points:
        idx = np.linspace(0, len(X) - 1, max_points).astype(int)
        X, y = X[idx], y[idx]
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(4.5, 4.5))
        second = X[:, 1] if X.shape[1] > 1 else np.zeros(len(X))
        ax.scatter(X[:, 0], second, c=y, s=2, cmap="tab10")
        ax.set_xlabel("x1")
        ax.set_ylabel("x2")
        ax.set_aspect("equal", adjustable="datalim")
        fig.tight_layout()
        _save(fig, path, provenance)
