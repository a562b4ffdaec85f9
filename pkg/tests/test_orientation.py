import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ovnet.datasets import canonical_planes, level_r_clusters
from ovnet.errors import CutClusterError, DimensionMismatchError, ValidationError
from ovnet.geometry import ClusterSummary, Hyperplane
from ovnet.orientation import (
    code_dot,
    orientation_codes,
    orientation_of_cluster,
    orientation_of_point,
    plane_set_hash,
    verify_separation,
)


def five_lines():
    # two vertical, two horizontal and one diagonal line in the plane
    return [
        Hyperplane.axis(2, 0, 0.0),
        Hyperplane.axis(2, 0, 2.0),
        Hyperplane.axis(2, 1, 0.0),
        Hyperplane.axis(2, 1, 2.0),
        Hyperplane(-1.0, (1.0, -1.0)),  # x - y = 1
    ]


def test_five_plane_code_by_hand():
    # (1, 3): right of x=0, left of x=2, above y=0, above y=2, x-y=-2<1
    c = ClusterSummary(0, (1.0, 3.0), 0.4, 0)
    assert orientation_of_cluster(five_lines(), c) == (1, -1, 1, 1, -1)
    c = ClusterSummary(1, (3.0, 1.0), 0.4, 0)
    assert orientation_of_cluster(five_lines(), c) == (1, 1, 1, -1, 1)


def test_code_with_single_negative_entry():
    planes = [
        Hyperplane.axis(2, 0, 0.0),
        Hyperplane.axis(2, 1, 0.0),
        Hyperplane.axis(2, 0, 5.0).scaled(-1.0),  # positive side is x < 5
        Hyperplane(-1.0, (1.0, 1.0)),
        Hyperplane(-1.0, (0.0, 1.0)),
    ]
    # positive on planes 1, 2, 4, 5 and negative on plane 3 (x < 5 fails)
    c = ClusterSummary(0, (6.0, 2.0), 0.5, 0)
    assert orientation_of_cluster(planes, c) == (1, 1, -1, 1, 1)


def test_cut_cluster_is_reported():
    c = ClusterSummary(5, (0.1, 0.0, 0.0, 0.0), 0.3, 0)
    with pytest.raises(CutClusterError) as info:
        orientation_of_cluster(canonical_planes(4, 1), c)
    assert info.value.cluster_id == 5
    assert info.value.plane_index == 0
    assert info.value.clearance == pytest.approx(-0.2)


def test_nested_corner_cluster_is_all_positive():
    c = ClusterSummary(0, (3.0, 3.0, 3.0, 3.0), 0.7, 0)
    assert orientation_of_cluster(canonical_planes(4, 2), c) == (1,) * 12


def test_point_and_batch_codes_agree(rng):
    planes = [Hyperplane(float(b), tuple(w)) for b, w in zip(rng.normal(size=7), rng.normal(size=(7, 3)))]
    X = rng.normal(size=(50, 3))
    batch = orientation_codes(planes, X)
    assert batch.dtype == np.int8
    for x, row in zip(X, batch):
        assert tuple(row) == orientation_of_point(planes, x)
    with pytest.raises(DimensionMismatchError):
        orientation_codes(planes, X[:, :2])


def hamming_oracle(a, b):
    return len(a) - 2 * sum(x != y for x, y in zip(a, b))


@pytest.mark.parametrize("q", range(1, 11))
def test_code_dot_exhaustive(q):
    codes = np.array(list(itertools.product((-1, 1), repeat=q)), dtype=np.int64)
    gram = codes @ codes.T
    assert np.all(np.diag(gram) == q)
    off = gram[~np.eye(len(codes), dtype=bool)]
    if off.size:
        assert off.max() == q - 2
    assert np.all((gram - q) % 2 == 0)
    # spot check the scalar function against the disagreement count
    for i, j in [(0, 0), (0, len(codes) - 1), (1, 2)]:
        if j < len(codes):
            a, b = tuple(codes[i]), tuple(codes[j])
            assert code_dot(a, b) == hamming_oracle(a, b) == gram[i, j]


sign = st.sampled_from((-1, 1))


@given(st.integers(1, 64).flatmap(lambda q: st.tuples(st.lists(sign, min_size=q, max_size=q),
                                                       st.lists(sign, min_size=q, max_size=q))))
def test_code_dot_sampled(pair):
    a, b = pair
    q = len(a)
    assert code_dot(a, a) == q
    d = code_dot(a, b)
    assert d == hamming_oracle(a, b)
    assert (d - q) % 2 == 0
    if a != b:
        assert d <= q - 2


def test_code_dot_length_mismatch():
    with pytest.raises(ValidationError):
        code_dot((1, -1), (1,))


@pytest.mark.parametrize("n,r", [(1, 1), (2, 1), (3, 1), (4, 1), (2, 2), (3, 2), (4, 2), (2, 3), (3, 3)])
def test_canonical_planes_separate_benchmarks(n, r):
    for radius in (0.3, 0.7, 0.99):
        report = verify_separation(canonical_planes(n, r), level_r_clusters(n, r, radius))
        assert report.separated
        assert report.plane_count == (2**r - 1) * n


def test_verify_reports_duplicates_and_cuts():
    clusters = [
        ClusterSummary(0, (1.0, 1.0), 0.3, 0),
        ClusterSummary(1, (1.0, -1.0), 0.3, 1),
        ClusterSummary(2, (2.0, 1.0), 0.3, 0),
        ClusterSummary(3, (0.1, 0.5), 0.3, 1),
    ]
    report = verify_separation([Hyperplane.axis(2, 0, 0.0)], clusters)
    assert not report.separated
    assert report.duplicate_groups == [[0, 1, 2, 3]]
    assert [(cid, j) for cid, j, _ in report.cut_clusters] == [(3, 0)]
    d = report.to_dict()
    assert d["separated"] is False and d["plane_count"] == 1


def test_verify_without_planes():
    clusters = level_r_clusters(2, 1, 0.3)
    report = verify_separation([], clusters)
    assert report.duplicate_groups == [[0, 1, 2, 3]]
    assert verify_separation([], clusters[:1]).separated
    with pytest.raises(ValidationError):
        verify_separation([], [])


def test_plane_hash_tracks_content():
    a = canonical_planes(3, 1)
    assert plane_set_hash(a) == plane_set_hash(canonical_planes(3, 1))
    assert plane_set_hash(a) != plane_set_hash(a[::-1])
