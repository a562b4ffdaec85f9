"""Plane-count estimates and incremental construction of a separating plane set.

Clusters are admitted one at a time in the order given. A newcomer whose
orientation code is not yet taken needs nothing. When it lands on a
resident's code, the most recently added ("open") plane is refitted so that
it passes through the midpoints of every colliding pair it serves, which
keeps the plane count growing only when a refit is impossible. A refit is
kept only if it still separates every admitted cluster and cuts no ball;
otherwise a new plane perpendicular to the colliding pair is added.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .errors import NotSeparatingError, PlannerError, SingularSystemError, ValidationError
from .geometry import ClusterSummary, Hyperplane, fit_plane_through_midpoints, perpendicular_bisector
from .orientation import verify_separation

# tilted directions tried when the bisector of a colliding pair cuts a ball
DIRECTION_RETRIES = 32
TILT = 0.5


def estimate_plane_count(N: int, margin_fraction: float = 0.0) -> int:
    if N < 1:
        raise ValidationError("cluster count must be >= 1")
    if margin_fraction < 0:
        raise ValidationError("margin_fraction must be >= 0")
    return math.ceil(math.log2(max(N, 2)) * (1.0 + margin_fraction))


@dataclass(frozen=True)
class PlannerConfig:
    margin_fraction: float = 0.4
    max_planes: int = 256
    seed: int = 0
    pending_capacity: int | None = None  # None means the dimension n

    def __post_init__(self):
        if self.max_planes < 1:
            raise ValidationError("max_planes must be >= 1")
        if self.margin_fraction < 0:
            raise ValidationError("margin_fraction must be >= 0")
        if self.pending_capacity is not None and self.pending_capacity < 1:
            raise ValidationError("pending_capacity must be >= 1")


@dataclass
class PlannerStep:
    cluster_id: int
    action: str  # "fresh_code" | "refit" | "new_plane"
    partner_id: int | None = None
    plane_index: int | None = None
    code_table_size: int = 0
    plane_count: int = 0


@dataclass
class PlannerTrace:
    steps: list[PlannerStep] = field(default_factory=list)
    planes: list[Hyperplane] = field(default_factory=list)
    initial_plane_count: int = 0
    estimate: int = 0
    success: bool = False
    failure: str | None = None

    @property
    def insertions(self) -> int:
        return sum(s.action == "new_plane" for s in self.steps)

    @property
    def refits(self) -> int:
        return sum(s.action == "refit" for s in self.steps)

    def to_dict(self) -> dict:
        return {
            "success": self.success,
            "failure": self.failure,
            "initial_plane_count": self.initial_plane_count,
            "final_plane_count": len(self.planes),
            "estimate": self.estimate,
            "insertions": self.insertions,
            "refits": self.refits,
            "steps": [asdict(s) for s in self.steps],
            "planes": [p.to_dict() for p in self.planes],
        }

    def to_json(self, **extra) -> str:
        d = self.to_dict()
        d.update(extra)
        return json.dumps(d, indent=1)


class _State:
    """Mutable bookkeeping for one planner run."""

    def __init__(self, clusters, planes):
        self.clusters = clusters
        self.C = np.array([c.centroid for c in clusters], dtype=np.float64)
        self.R = np.array([c.radius for c in clusters], dtype=np.float64)
        self.planes = list(planes)
        self.residents: list[int] = []
        self.table: dict[bytes, int] = {}

    def codes(self, planes, idx) -> np.ndarray:
        if not planes:
            return np.zeros((len(idx), 0), dtype=np.int8)
        W = np.array([p.normal for p in planes])
        b = np.array([p.bias for p in planes])
        return np.where(self.C[idx] @ W.T + b > 0.0, 1, -1).astype(np.int8)

    def code_key(self, i) -> bytes:
        return self.codes(self.planes, [i])[0].tobytes()

    def cuts_nothing(self, plane: Hyperplane) -> bool:
        w = plane.w
        gaps = np.abs(self.C @ w + plane.bias) / np.linalg.norm(w) - self.R
        return bool(np.all(gaps >= 0.0))

    def injective(self, planes, idx) -> bool:
        rows = self.codes(planes, idx)
        return len({r.tobytes() for r in rows}) == len(idx)

    def rebuild(self):
        rows = self.codes(self.planes, self.residents)
        self.table = {r.tobytes(): i for r, i in zip(rows, self.residents)}

    def admit(self, i):
        self.residents.append(i)
        self.table[self.code_key(i)] = i


def _validate(clusters: Sequence[ClusterSummary]):
    if not clusters:
        raise ValidationError("planner needs at least one cluster")
    dims = {c.dim for c in clusters}
    if len(dims) != 1:
        raise ValidationError(f"clusters have mixed dimensions {sorted(dims)}")
    ids = [c.id for c in clusters]
    if len(set(ids)) != len(ids):
        raise ValidationError("cluster ids must be unique")
    C = np.array([c.centroid for c in clusters])
    R = np.array([c.radius for c in clusters])
    d = np.linalg.norm(C[:, None, :] - C[None, :, :], axis=2)
    overlap = d <= R[:, None] + R[None, :]
    np.fill_diagonal(overlap, False)
    if overlap.any():
        i, j = np.argwhere(overlap)[0]
        raise ValidationError(f"clusters {ids[i]} and {ids[j]} overlap")


def _gap_plane(st: _State, a: int, b: int, direction: np.ndarray) -> Hyperplane | None:
    """Plane normal to ``direction`` between balls a and b, clear of every ball.

    Picks the centre of the free stretch of the a-b axis nearest their midpoint.
    """
    u = direction / np.linalg.norm(direction)
    proj = st.C @ u
    lo_end, hi_end = proj[a] + st.R[a], proj[b] - st.R[b]
    if hi_end <= lo_end:
        return None
    mask = (proj + st.R > lo_end) & (proj - st.R < hi_end)
    mask[[a, b]] = False
    order = np.argsort(proj[mask] - st.R[mask])
    lows = np.append((proj[mask] - st.R[mask])[order], hi_end)
    highs = np.append((proj[mask] + st.R[mask])[order], hi_end)
    # cursor[i] is the furthest point covered before interval i starts
    cursor = np.maximum.accumulate(np.concatenate(([lo_end], highs[:-1])))
    free = lows > cursor
    gaps = list(zip(cursor[free], lows[free]))
    if not gaps:
        return None
    # the gap nearest the pair's midpoint keeps the plane in the bulk of the data
    mid = 0.5 * (proj[a] + proj[b])
    lo, hi = min(gaps, key=lambda g: abs(0.5 * (g[0] + g[1]) - mid))
    t = 0.5 * (lo + hi)
    return Hyperplane(-t, tuple(u))


def _balance(st: _State, plane: Hyperplane) -> int:
    pos = int(np.sum(st.C @ plane.w + plane.bias > 0.0))
    return min(pos, len(st.C) - pos)


def _separating_plane(st: _State, a: int, b: int, rng: np.random.Generator) -> Hyperplane:
    """Perpendicular bisector of the pair, slid or tilted if it would cut a ball.

    When the bisector is blocked, candidates along the pair axis and along
    randomly tilted axes are compared and the one splitting the cluster set
    most evenly wins, since lopsided planes barely refine the codes.
    """
    plane = perpendicular_bisector(st.C[a], st.C[b])
    if st.cuts_nothing(plane):
        return plane
    axis = st.C[b] - st.C[a]
    length = np.linalg.norm(axis)
    candidates = []
    for attempt in range(DIRECTION_RETRIES + 1):
        direction = axis
        if attempt:
            noise = rng.standard_normal(axis.size)
            direction = axis + noise * (TILT * length / np.linalg.norm(noise))
        plane = _gap_plane(st, a, b, direction)
        if plane is not None and st.cuts_nothing(plane):
            candidates.append(plane)
    if not candidates:
        ids = (st.clusters[a].id, st.clusters[b].id)
        raise PlannerError(
            f"no plane separates clusters {ids[0]} and {ids[1]} without cutting another cluster"
        )
    return max(candidates, key=lambda p: _balance(st, p))


def incremental_separate(
    clusters: Sequence[ClusterSummary],
    initial_planes: Sequence[Hyperplane] = (),
    cfg: PlannerConfig | None = None,
) -> tuple[list[Hyperplane], PlannerTrace]:
    cfg = cfg or PlannerConfig()
    clusters = list(clusters)
    _validate(clusters)
    n = clusters[0].dim
    capacity = min(cfg.pending_capacity or n, n)
    st = _State(clusters, initial_planes)
    for k, p in enumerate(st.planes):
        if p.dim != n:
            raise ValidationError(f"initial plane {k} has dimension {p.dim}, clusters have {n}")
        if not st.cuts_nothing(p):
            raise ValidationError(f"initial plane {k} cuts a cluster")

    trace = PlannerTrace(
        initial_plane_count=len(st.planes),
        estimate=estimate_plane_count(len(clusters), cfg.margin_fraction),
    )
    rng = np.random.default_rng(cfg.seed)
    open_idx: int | None = None
    served: list[tuple[int, int]] = []

    def record(i, action, partner=None, plane_index=None):
        trace.steps.append(PlannerStep(
            cluster_id=clusters[i].id,
            action=action,
            partner_id=None if partner is None else clusters[partner].id,
            plane_index=plane_index,
            code_table_size=len(st.table),
            plane_count=len(st.planes),
        ))

    try:
        for j in range(len(clusters)):
            owner = st.table.get(st.code_key(j))
            if owner is None:
                st.admit(j)
                record(j, "fresh_code")
                continue

            if open_idx is not None and len(served) < capacity:
                pairs = served + [(owner, j)]
                try:
                    candidate = fit_plane_through_midpoints(
                        [(st.C[a], st.C[b]) for a, b in pairs], reference=st.planes[open_idx]
                    )
                except (SingularSystemError, NotSeparatingError):
                    candidate = None
                if candidate is not None and st.cuts_nothing(candidate):
                    trial = list(st.planes)
                    trial[open_idx] = candidate
                    if st.injective(trial, st.residents + [j]):
                        st.planes = trial
                        served = pairs
                        st.residents.append(j)
                        st.rebuild()
                        record(j, "refit", owner, open_idx)
                        continue

            if len(st.planes) >= cfg.max_planes:
                raise PlannerError(
                    f"max_planes={cfg.max_planes} reached while separating clusters "
                    f"{clusters[owner].id} and {clusters[j].id}"
                )
            st.planes.append(_separating_plane(st, owner, j, rng))
            open_idx = len(st.planes) - 1
            served = [(owner, j)]
            st.residents.append(j)
            st.rebuild()
            record(j, "new_plane", owner, open_idx)
    except PlannerError as exc:
        trace.planes = list(st.planes)
        trace.failure = str(exc)
        exc.trace = trace
        raise

    trace.planes = list(st.planes)
    if not verify_separation(st.planes, clusters).separated:
        trace.failure = "final plane set does not separate the clusters"
        exc = PlannerError(trace.failure)
        exc.trace = trace
        raise exc
    trace.success = True
    return list(st.planes), trace
