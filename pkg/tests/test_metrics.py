import numpy as np
import pytest

from ovnet.datasets import LabeledDataset, NestedCubeSpec, generate_level_r, level_r_clusters
from ovnet.errors import DimensionMismatchError, ValidationError
from ovnet.geometry import ClusterSummary
from ovnet.metrics import (
    centroid_accuracy,
    centroid_predict,
    centroid_predict_batch,
    evaluate_accuracy,
    kcr_pew,
    kcr_raw,
    level_r_op_counts,
    op_count_report,
    score_architecture,
    scores_to_csv,
)
from ovnet.network import IDENTITY, Activation, FeedForwardNet, Layer

# (architecture, reference KCR, reference PEW) for nested-4D classifiers
REFERENCE_SCORES = [
    ((4, 12, 256, 8), 18.81, 18.74),
    ((4, 13, 256, 8), 17.95, 17.79),
    ((4, 14, 256, 8), 17.16, 17.10),
    ((4, 18, 256, 8), 14.52, 14.51),
    ((4, 256, 256, 8), 1.48, 1.48),
]


@pytest.mark.parametrize("arch,kcr_ref,pew_ref", REFERENCE_SCORES)
def test_kcr_matches_reference_scores(arch, kcr_ref, pew_ref):
    kcr, pew = kcr_pew(arch, 25600, 8, 1.0)
    assert abs(kcr - kcr_ref) / kcr_ref < 0.01
    # the reference PEW implies test fractions at or just below 1
    fcp = pew_ref / kcr_ref
    assert 0.98 < fcp <= 1.0
    assert kcr_pew(arch, 25600, 8, fcp)[1] == pytest.approx(kcr * fcp)


def test_kcr_exact_values():
    assert kcr_raw((4, 12, 256, 8), 25600, 8) == 25600 * 8 / 5444
    kcr, pew = kcr_pew((4, 12, 256, 8), 25600, 8, 0.5)
    assert kcr == 25600 * 8 / (2 * 5444)
    assert pew == kcr * 0.5


def test_kcr_validation():
    with pytest.raises(ValidationError):
        kcr_pew((2, 2), 0, 1, 1.0)
    with pytest.raises(ValidationError):
        kcr_pew((2, 2), 10, 1, 1.5)


def test_score_rows_and_csv():
    s = score_architecture((4, 16, 16, 8), 6400, 1.0, 0.995)
    assert s.label == "4-16-16-8"
    assert s.weight_count == 488 and s.equation_count == 6400 * 8
    assert s.pew == pytest.approx(s.kcr * 0.995)
    lines = scores_to_csv([s]).splitlines()
    assert lines[0] == "architecture,train_pct,test_pct,kcr,pew,kcr_raw,weight_count,equation_count"
    assert lines[1].startswith("4-16-16-8,100.0,99.5")


def test_op_counts():
    r = level_r_op_counts(4, 2)
    assert (r.linear_ops, r.distance_ops, r.planes, r.clusters) == (60, 1024, 12, 256)
    r = level_r_op_counts(3, 3)
    assert (r.linear_ops, r.distance_ops, r.planes, r.clusters) == (84, 1536, 21, 512)
    assert r.ratio == 1536 / 84
    assert op_count_report(3, 3, 8).to_dict()["linear_ops"] == 12
    with pytest.raises(ValidationError):
        op_count_report(0, 3, 8)


def test_centroid_baseline():
    clusters = [ClusterSummary(2, (1.0, 0.0), 0.1, 0), ClusterSummary(1, (-1.0, 0.0), 0.1, 1)]
    assert centroid_predict(clusters, (0.5, 3.0)) == 0
    # equidistant: lowest cluster id wins
    assert centroid_predict(clusters, (0.0, 0.0)) == 1
    assert centroid_predict_batch(clusters, [[0.0, 0.0], [2.0, 0.0]]).tolist() == [1, 0]
    with pytest.raises(DimensionMismatchError):
        centroid_predict_batch(clusters, [[0.0]])
    with pytest.raises(ValidationError):
        centroid_predict([], (0.0,))


def test_centroid_baseline_on_benchmark():
    train, test = generate_level_r(NestedCubeSpec(n=3, r=2, train_per_cluster=10, test_per_cluster=5))
    assert centroid_accuracy(train) == 1.0
    assert centroid_accuracy(test) == 1.0
    for x, lab in zip(train.points[:30], train.class_labels[:30]):
        assert centroid_predict(train.clusters, x) == lab


def test_constant_net_scores_its_class_share():
    # all outputs equal: argmax picks class 0, which holds a quarter of the 3-d benchmark
    train, _ = generate_level_r(NestedCubeSpec(n=3, train_per_cluster=10, test_per_cluster=1))
    net = FeedForwardNet(3, (Layer(np.zeros((4, 3)), np.zeros(4), Activation(IDENTITY)),))
    assert evaluate_accuracy(net, train) == 0.25


def test_accuracy_errors():
    clusters = tuple(level_r_clusters(2, 1, 0.3))
    empty = LabeledDataset(np.zeros((0, 2)), [], [], clusters)
    net = FeedForwardNet(2, (Layer(np.zeros((2, 2)), np.zeros(2), Activation(IDENTITY)),))
    with pytest.raises(ValidationError):
        evaluate_accuracy(net, empty)
    with pytest.raises(ValidationError):
        centroid_accuracy(empty)
    small = FeedForwardNet(2, (Layer(np.zeros((1, 2)), np.zeros(1), Activation(IDENTITY)),))
    data = LabeledDataset(np.zeros((1, 2)), [0], [1], clusters)
    with pytest.raises(DimensionMismatchError):
        evaluate_accuracy(small, data)
