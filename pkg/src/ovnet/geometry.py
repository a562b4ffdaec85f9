"""Points, hyperplanes and clusters in n-dimensional feature space.

A hyperplane is stored as ``bias + normal . x = 0``. The positive side is the
half-space where that expression is strictly positive; points exactly on the
plane count as negative so that the side function is total.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    NotSeparatingError,
    SingularSystemError,
    ValidationError,
)

# Damping for the minimum-norm midpoint solve and the condition threshold
# above which the system is declared singular.
TIKHONOV = 1e-12
MAX_CONDITION = 1e12
RESIDUAL_TOL = 1e-9


def as_point(p, dim: int | None = None) -> np.ndarray:
    arr = np.asarray(p, dtype=np.float64)
    if arr.ndim != 1 or arr.size < 1:
        raise ValidationError(f"point must be a non-empty 1-d vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("point has non-finite coordinates")
    if dim is not None and arr.size != dim:
        raise DimensionMismatchError(f"point has dimension {arr.size}, expected {dim}")
    return arr


@dataclass(frozen=True)
class Hyperplane:
    bias: float
    normal: tuple[float, ...]

    def __post_init__(self):
        normal = tuple(float(v) for v in self.normal)
        bias = float(self.bias)
        if not normal:
            raise ValidationError("hyperplane normal must have at least one entry")
        if not all(math.isfinite(v) for v in normal) or not math.isfinite(bias):
            raise ValidationError("hyperplane coefficients must be finite")
        if not any(v != 0.0 for v in normal):
            raise ValidationError("hyperplane normal must have a nonzero entry")
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "bias", bias)

    @property
    def dim(self) -> int:
        return len(self.normal)

    @property
    def w(self) -> np.ndarray:
        return np.array(self.normal, dtype=np.float64)

    def value(self, p) -> float:
        """Affine value ``bias + normal . p``."""
        x = as_point(p, self.dim)
        return self.bias + float(np.dot(self.w, x))

    def scaled(self, factor: float) -> "Hyperplane":
        return Hyperplane(self.bias * factor, tuple(v * factor for v in self.normal))

    def to_dict(self) -> dict:
        return {"bias": self.bias, "normal": list(self.normal)}

    @classmethod
    def from_dict(cls, d: dict) -> "Hyperplane":
        try:
            return cls(d["bias"], tuple(d["normal"]))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed plane record {d!r}: {exc}") from exc

    @classmethod
    def axis(cls, dim: int, axis: int, offset: float) -> "Hyperplane":
        """The plane ``x[axis] = offset`` with normal along +axis."""
        normal = [0.0] * dim
        normal[axis] = 1.0
        return cls(-float(offset), tuple(normal))


@dataclass(frozen=True)
class ClusterSummary:
    id: int
    centroid: tuple[float, ...]
    radius: float
    class_label: int

    def __post_init__(self):
        centroid = tuple(float(v) for v in self.centroid)
        if not centroid or not all(math.isfinite(v) for v in centroid):
            raise ValidationError(f"cluster {self.id}: centroid must be finite and non-empty")
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ValidationError(f"cluster {self.id}: radius must be positive, got {self.radius}")
        if int(self.class_label) < 0:
            raise ValidationError(f"cluster {self.id}: class_label must be >= 0")
        object.__setattr__(self, "centroid", centroid)
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "id", int(self.id))
        object.__setattr__(self, "class_label", int(self.class_label))

    @property
    def dim(self) -> int:
        return len(self.centroid)

    @property
    def center(self) -> np.ndarray:
        return np.array(self.centroid, dtype=np.float64)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "centroid": list(self.centroid),
            "radius": self.radius,
            "class_label": self.class_label,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ClusterSummary":
        try:
            return cls(d["id"], tuple(d["centroid"]), d["radius"], d["class_label"])
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed cluster record {d!r}: {exc}") from exc


def plane_side(plane: Hyperplane, p) -> int:
    return 1 if plane.value(p) > 0.0 else -1


def cluster_margin(plane: Hyperplane, c: ClusterSummary) -> tuple[int, float]:
    """Side of the centroid and the gap between the plane and the cluster ball.

    A negative clearance means the plane passes through the ball.
    """
    if c.dim != plane.dim:
        raise DimensionMismatchError(
            f"cluster {c.id} has dimension {c.dim}, plane has {plane.dim}"
        )
    v = plane.value(c.centroid)
    clearance = abs(v) / float(np.linalg.norm(plane.w)) - c.radius
    return (1 if v > 0.0 else -1), clearance


def perpendicular_bisector(a, b) -> Hyperplane:
    a = as_point(a)
    b = as_point(b, a.size)
    normal = b - a
    if not np.any(normal):
        raise ValidationError("perpendicular bisector needs two distinct points")
    mid = 0.5 * (a + b)
    return Hyperplane(-float(np.dot(normal, mid)), tuple(normal))


def _alpha_min_norm(mids: np.ndarray) -> np.ndarray:
    k = mids.shape[0]
    gram = mids @ mids.T
    if np.linalg.cond(gram) > MAX_CONDITION:
        raise SingularSystemError("midpoint system is singular or ill-conditioned")
    coeffs = np.linalg.solve(gram + TIKHONOV * np.eye(k), -np.ones(k))
    return mids.T @ coeffs


def _alpha_near(mids: np.ndarray, reference: Hyperplane) -> np.ndarray:
    # normal of the reference with the components along the midpoint
    # differences removed; the offset then follows from any one midpoint
    w = reference.w / np.linalg.norm(reference.w)
    diffs = mids[1:] - mids[0]
    if len(diffs):
        q, rdiag = np.linalg.qr(diffs.T)
        keep = np.abs(np.diag(rdiag)) > 1e-12 * max(1.0, np.abs(rdiag).max())
        q = q[:, keep]
        w = w - q @ (q.T @ w)
    if np.linalg.norm(w) < 1e-9:
        raise SingularSystemError("reference direction lies in the span of the midpoint differences")
    c = -float(mids[0] @ w)
    scale = np.linalg.norm(w) * max(1.0, float(np.abs(mids).max()))
    if abs(c) < scale / MAX_CONDITION:
        raise SingularSystemError("plane through the midpoints passes through the origin")
    return w / c


def fit_plane_through_midpoints(pairs: Sequence[tuple], reference: Hyperplane | None = None) -> Hyperplane:
    """Plane ``1 + alpha . x = 0`` through the midpoints of the given segments.

    With fewer pairs than dimensions ``alpha`` is underdetermined. By default
    the minimum-norm solution is returned; given a ``reference`` plane, the
    solution whose normal is closest in direction to the reference is
    returned instead (the smallest tilt of the reference that reaches every
    midpoint).

    Raises :class:`SingularSystemError` when the midpoints admit no plane of
    this form (for instance a plane through the origin would be needed) and
    :class:`NotSeparatingError` when some pair ends up on one side.
    """
    if not pairs:
        raise ValidationError("need at least one pair of points")
    n = as_point(pairs[0][0]).size
    ends_a = np.array([as_point(a, n) for a, _ in pairs])
    ends_b = np.array([as_point(b, n) for _, b in pairs])
    k = len(pairs)
    if k > n:
        raise ValidationError(f"{k} pairs cannot all be fitted by one plane in {n} dimensions")
    if reference is not None and reference.dim != n:
        raise DimensionMismatchError(f"reference plane has dimension {reference.dim}, points {n}")

    mids = 0.5 * (ends_a + ends_b)
    alpha = _alpha_min_norm(mids) if reference is None else _alpha_near(mids, reference)
    residual = np.max(np.abs(1.0 + mids @ alpha))
    if not np.isfinite(residual) or residual > RESIDUAL_TOL:
        raise SingularSystemError(f"midpoint system inconsistent (residual {residual:.3g})")
    if not np.any(alpha):
        raise SingularSystemError("midpoint fit produced a zero normal")

    plane = Hyperplane(1.0, tuple(alpha))
    for i, (a, b) in enumerate(zip(ends_a, ends_b)):
        if plane_side(plane, a) == plane_side(plane, b):
            raise NotSeparatingError(f"fitted plane leaves pair {i} on one side")
    return plane


def planes_matrix(planes: Sequence[Hyperplane]) -> tuple[np.ndarray, np.ndarray]:
    """Stack planes into a normal matrix (q x n) and a bias vector (q,)."""
    if not planes:
        raise ValidationError("plane list is empty")
    dims = {p.dim for p in planes}
    if len(dims) != 1:
        raise DimensionMismatchError(f"planes have mixed dimensions {sorted(dims)}")
    W = np.array([p.normal for p in planes], dtype=np.float64)
    b = np.array([p.bias for p in planes], dtype=np.float64)
    return W, b


def dump_planes(planes: Iterable[Hyperplane]) -> str:
    # json uses repr() for floats, which is the shortest round-trip form
    return json.dumps([p.to_dict() for p in planes], indent=1)


def load_planes(text: str) -> list[Hyperplane]:
    data = json.loads(text)
    if not isinstance(data, list):
        raise ValidationError("planes file must hold a JSON array")
    return [Hyperplane.from_dict(d) for d in data]


def dump_clusters(clusters: Iterable[ClusterSummary]) -> str:
    return json.dumps([c.to_dict() for c in clusters], indent=1)


def load_clusters(text: str) -> list[ClusterSummary]:
    data = json.loads(text)
    if not isinstance(data, list):
        raise ValidationError("clusters file must hold a JSON array")
    return [ClusterSummary.from_dict(d) for d in data]
