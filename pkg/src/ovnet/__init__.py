"""Feed-forward classifiers built from separating hyperplanes.

The planes split feature space into sign regions; a cluster's sign pattern
(its orientation code) identifies it, and a three-layer network can be
written down directly from the planes, the codes and the class labels.
"""
from .datasets import (
    LabeledDataset,
    NestedCubeSpec,
    canonical_planes,
    generate_level_r,
    random_sparse_clusters,
)
from .errors import (
    CutClusterError,
    DimensionMismatchError,
    DuplicateCodeError,
    NonFiniteError,
    OvnetError,
    PlannerError,
    ValidationError,
)
from .geometry import (
    ClusterSummary,
    Hyperplane,
    cluster_margin,
    fit_plane_through_midpoints,
    perpendicular_bisector,
    plane_side,
)
from .metrics import (
    ArchitectureScore,
    OpCountReport,
    centroid_predict,
    evaluate_accuracy,
    kcr_pew,
    op_count_report,
)
from .network import (
    Activation,
    FeedForwardNet,
    Layer,
    Prediction,
    count_weights,
    forward,
    predict_label,
)
from .orientation import (
    SeparationReport,
    code_dot,
    orientation_of_cluster,
    orientation_of_point,
    verify_separation,
)
from .planner import PlannerConfig, PlannerTrace, estimate_plane_count, incremental_separate
from .synthesis import SynthesisInput, synthesize, synthesize_three_layer
from .trainer import TrainConfig, TrainReport, init_weights, numeric_gradient_check, train_backprop

__version__ = "0.1.0"
