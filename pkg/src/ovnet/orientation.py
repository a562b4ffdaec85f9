"""Orientation codes: the +/-1 pattern of a point or cluster across a plane list."""
from __future__ import annotations

import hashlib
import json
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import CutClusterError, DimensionMismatchError, ValidationError
from .geometry import ClusterSummary, Hyperplane, as_point, dump_planes, planes_matrix

OrientationCode = tuple[int, ...]


def plane_set_hash(planes: Sequence[Hyperplane]) -> str:
    return hashlib.sha256(dump_planes(planes).encode()).hexdigest()


def orientation_of_point(planes: Sequence[Hyperplane], p) -> OrientationCode:
    W, b = planes_matrix(planes)
    x = as_point(p, W.shape[1])
    return tuple(int(s) for s in np.where(W @ x + b > 0.0, 1, -1))


def orientation_codes(planes: Sequence[Hyperplane], points: np.ndarray) -> np.ndarray:
    """Vectorised codes for a batch of points, shape (len(points), q), dtype int8."""
    W, b = planes_matrix(planes)
    X = np.asarray(points, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != W.shape[1]:
        raise DimensionMismatchError(f"points of shape {X.shape} vs planes of dimension {W.shape[1]}")
    return np.where(X @ W.T + b > 0.0, 1, -1).astype(np.int8)


def clearances(planes: Sequence[Hyperplane], clusters: Sequence[ClusterSummary]) -> np.ndarray:
    """Clearance of every (cluster, plane) pair, shape (m, q)."""
    W, b = planes_matrix(planes)
    C = np.array([c.centroid for c in clusters], dtype=np.float64)
    if C.shape[1] != W.shape[1]:
        raise DimensionMismatchError(f"clusters have dimension {C.shape[1]}, planes {W.shape[1]}")
    radii = np.array([c.radius for c in clusters])
    dist = np.abs(C @ W.T + b) / np.linalg.norm(W, axis=1)
    return dist - radii[:, None]


def orientation_of_cluster(planes: Sequence[Hyperplane], c: ClusterSummary) -> OrientationCode:
    gaps = clearances(planes, [c])[0]
    bad = np.flatnonzero(gaps < 0)
    if bad.size:
        j = int(bad[0])
        raise CutClusterError(c.id, j, float(gaps[j]))
    return orientation_of_point(planes, c.centroid)


def code_dot(a: Sequence[int], b: Sequence[int]) -> int:
    if len(a) != len(b):
        raise ValidationError(f"code lengths differ: {len(a)} vs {len(b)}")
    return int(sum(x * y for x, y in zip(a, b)))


@dataclass
class SeparationReport:
    codes: dict[int, OrientationCode]
    duplicate_groups: list[list[int]]
    cut_clusters: list[tuple[int, int, float]]
    plane_hash: str
    plane_count: int = field(default=0)

    @property
    def separated(self) -> bool:
        return not self.duplicate_groups and not self.cut_clusters

    def to_dict(self) -> dict:
        return {
            "separated": self.separated,
            "plane_count": self.plane_count,
            "plane_hash": self.plane_hash,
            "codes": {str(k): list(v) for k, v in self.codes.items()},
            "duplicate_groups": self.duplicate_groups,
            "cut_clusters": [
                {"cluster_id": cid, "plane_index": j, "clearance": g}
                for cid, j, g in self.cut_clusters
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


def verify_separation(
    planes: Sequence[Hyperplane], clusters: Sequence[ClusterSummary]
) -> SeparationReport:
    """Check that no plane cuts a cluster and that no two clusters share a code.

    Problems are collected into the report rather than raised.
    """
    if not clusters:
        raise ValidationError("verify_separation needs at least one cluster")
    if not planes:
        # every cluster shares the empty code
        ids = [c.id for c in clusters]
        groups = [sorted(ids)] if len(ids) > 1 else []
        return SeparationReport({i: () for i in ids}, groups, [], plane_set_hash([]), 0)

    centers = np.array([c.centroid for c in clusters], dtype=np.float64)
    code_rows = orientation_codes(planes, centers)
    gaps = clearances(planes, clusters)

    codes: dict[int, OrientationCode] = {}
    by_code: dict[OrientationCode, list[int]] = defaultdict(list)
    for c, row in zip(clusters, code_rows):
        code = tuple(int(s) for s in row)
        codes[c.id] = code
        by_code[code].append(c.id)
    duplicates = [sorted(ids) for ids in by_code.values() if len(ids) > 1]

    cuts = [
        (clusters[i].id, int(j), float(gaps[i, j]))
        for i, j in zip(*np.nonzero(gaps < 0))
    ]
    return SeparationReport(codes, duplicates, cuts, plane_set_hash(planes), len(planes))
