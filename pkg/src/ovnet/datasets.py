"""Nested-hypercube benchmark families and their canonical separating planes.

Level 1 puts one ball at every vertex of the cube ``{-1, 1}^n``. Level r
places a level r-1 structure at every vertex of a cube twice as large, so a
cluster centre is ``sum_l 2**(r-l) * v_l`` for sign vectors ``v_1 .. v_r``.
Every coordinate of every centre is then an odd integer and neighbouring
centres along an axis are exactly 2 apart.

Clusters whose innermost sign vectors are negatives of each other share a
class, giving ``2**(n-1)`` classes for any r.
"""
from __future__ import annotations

import csv
import io
import itertools
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ValidationError
from .geometry import ClusterSummary, Hyperplane


@dataclass(frozen=True)
class NestedCubeSpec:
    n: int
    r: int = 1
    radius: float | None = None
    train_per_cluster: int = 100
    test_per_cluster: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.radius is None:
            object.__setattr__(self, "radius", 0.3 if self.r == 1 else 0.7)
        if self.n < 1 or self.r < 1:
            raise ValidationError(f"need n >= 1 and r >= 1, got n={self.n}, r={self.r}")
        if not 0 < self.radius < 1:
            raise ValidationError(f"radius must lie in (0, 1), got {self.radius}")
        if self.train_per_cluster < 0 or self.test_per_cluster < 0:
            raise ValidationError("per-cluster sample counts must be non-negative")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must be an unsigned 64-bit integer")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    points: np.ndarray  # (N, n)
    cluster_ids: np.ndarray  # (N,)
    class_labels: np.ndarray  # (N,)
    clusters: tuple[ClusterSummary, ...]

    def __post_init__(self):
        X = np.asarray(self.points, dtype=np.float64)
        if X.ndim != 2:
            raise ValidationError(f"points must be 2-d, got shape {X.shape}")
        cid = np.asarray(self.cluster_ids, dtype=np.int64)
        lab = np.asarray(self.class_labels, dtype=np.int64)
        if not (len(cid) == len(lab) == len(X)):
            raise ValidationError("points, cluster_ids and class_labels differ in length")
        for arr in (X, cid, lab):
            arr.setflags(write=False)
        object.__setattr__(self, "points", X)
        object.__setattr__(self, "cluster_ids", cid)
        object.__setattr__(self, "class_labels", lab)
        object.__setattr__(self, "clusters", tuple(self.clusters))

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def class_count(self) -> int:
        labels = [c.class_label for c in self.clusters] or self.class_labels.tolist()
        return int(max(labels)) + 1

    def __len__(self) -> int:
        return len(self.points)


def class_index(inner: np.ndarray) -> int:
    """Index of the class of sign vector ``inner`` identified with ``-inner``."""
    v = inner if inner[0] > 0 else -inner
    idx = 0
    for s in v[1:]:
        idx = 2 * idx + (1 if s < 0 else 0)
    return idx


def level_r_clusters(n: int, r: int, radius: float) -> list[ClusterSummary]:
    scales = np.array([2 ** (r - l) for l in range(1, r + 1)], dtype=np.float64)
    clusters = []
    for cid, signs in enumerate(itertools.product((-1, 1), repeat=r * n)):
        levels = np.array(signs, dtype=np.float64).reshape(r, n)
        center = scales @ levels
        clusters.append(ClusterSummary(cid, tuple(center), radius, class_index(levels[-1])))
    return clusters


def sample_balls(clusters, per_cluster: int, rng: np.random.Generator) -> LabeledDataset:
    """Points uniform in each ball: Gaussian direction, radius * U**(1/n)."""
    m = len(clusters)
    n = clusters[0].dim
    centers = np.array([c.centroid for c in clusters])
    radii = np.array([c.radius for c in clusters])
    total = m * per_cluster
    dirs = rng.standard_normal((total, n))
    norms = np.linalg.norm(dirs, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    dirs /= norms
    owner = np.repeat(np.arange(m), per_cluster)
    scale = radii[owner] * rng.random(total) ** (1.0 / n)
    X = centers[owner] + dirs * scale[:, None]
    labels = np.array([c.class_label for c in clusters])[owner]
    ids = np.array([c.id for c in clusters])[owner]
    return LabeledDataset(X, ids, labels, tuple(clusters))


def generate_level_r(spec: NestedCubeSpec) -> tuple[LabeledDataset, LabeledDataset]:
    clusters = level_r_clusters(spec.n, spec.r, spec.radius)
    train_seq, test_seq = np.random.SeedSequence(spec.seed).spawn(2)
    train = sample_balls(clusters, spec.train_per_cluster, np.random.Generator(np.random.PCG64(train_seq)))
    test = sample_balls(clusters, spec.test_per_cluster, np.random.Generator(np.random.PCG64(test_seq)))
    return train, test


def canonical_planes(n: int, r: int) -> list[Hyperplane]:
    """Axis planes halfway between consecutive centre coordinates, axis by axis."""
    if n < 1 or r < 1:
        raise ValidationError(f"need n >= 1 and r >= 1, got n={n}, r={r}")
    top = 2**r - 2
    offsets = range(-top, top + 1, 2)
    return [Hyperplane.axis(n, a, c) for a in range(n) for c in offsets]


def dataset_to_csv(ds: LabeledDataset) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"x{i + 1}" for i in range(ds.dim)] + ["cluster_id", "class_id"])
    for x, cid, lab in zip(ds.points.tolist(), ds.cluster_ids.tolist(), ds.class_labels.tolist()):
        w.writerow([repr(v) for v in x] + [cid, lab])
    return buf.getvalue()


def dataset_from_csv(text: str, clusters=None) -> LabeledDataset:
    """Parse a dataset CSV.

    When ``clusters`` is omitted the summaries are rebuilt from the samples:
    mean centroid and the largest sample distance as radius.
    """
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise ValidationError("empty dataset CSV")
    header, body = rows[0], rows[1:]
    if header[-2:] != ["cluster_id", "class_id"] or len(header) < 3:
        raise ValidationError(f"unexpected dataset header {header}")
    dim = len(header) - 2
    try:
        X = np.array([[float(v) for v in row[:dim]] for row in body], dtype=np.float64).reshape(-1, dim)
        cid = np.array([int(row[dim]) for row in body], dtype=np.int64)
        lab = np.array([int(row[dim + 1]) for row in body], dtype=np.int64)
    except (ValueError, IndexError) as exc:
        raise ValidationError(f"bad dataset row: {exc}") from exc
    if clusters is None:
        clusters = []
        for i in np.unique(cid):
            pts = X[cid == i]
            center = pts.mean(axis=0)
            radius = float(np.max(np.linalg.norm(pts - center, axis=1))) or 1e-9
            clusters.append(ClusterSummary(int(i), tuple(center), radius * (1 + 1e-12), int(lab[cid == i][0])))
    return LabeledDataset(X, cid, lab, tuple(clusters))


def random_sparse_clusters(count: int, dim: int, radius: float, box: float = 1.0,
                           classes: int = 2, seed: int = 0) -> list[ClusterSummary]:
    """Ball clusters with centres i.i.d. uniform in ``[-box, box]^dim``.

    Centres are redrawn until no two balls touch. Class labels cycle through
    ``range(classes)``.
    """
    if count < 1 or dim < 1 or classes < 1:
        raise ValidationError("count, dim and classes must be >= 1")
    if not radius > 0 or not box > 0:
        raise ValidationError("radius and box must be positive")
    rng = np.random.default_rng(seed)
    centers: list[np.ndarray] = []
    attempts = 0
    while len(centers) < count:
        attempts += 1
        if attempts > 1000 * count:
            raise ValidationError(f"could not place {count} disjoint balls of radius {radius}")
        c = rng.uniform(-box, box, dim)
        if all(np.linalg.norm(c - o) > 2 * radius for o in centers):
            centers.append(c)
    return [ClusterSummary(i, tuple(c), radius, i % classes) for i, c in enumerate(centers)]
