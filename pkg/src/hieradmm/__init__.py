"""Two-layer hierarchical federated learning with ADMM-based aggregation."""

from .config import (
    Algorithm,
    ExperimentConfig,
    HierConfig,
    TauSchedule,
    tau_for_round,
)
from .data import (
    ADULT_SPEC,
    FeatureSpec,
    PartitionPlan,
    build_cloud_state,
    dataset_fingerprint,
    load_adult_csv,
    partition_iid,
    partition_single_class,
    synthesize_dataset,
)
from .estimator import HierarchicalFLClassifier
from .harness import run_experiment, run_sweep
from .metrics import MetricsFile, compare_runs
from .objective import (
    Dataset,
    RegParams,
    client_grad,
    client_loss,
    finite_diff_grad,
    global_objective,
    set_objective,
    surrogate_grad,
)
from .oracle import OracleResult, centralized_oracle
from .state import ClientShard, CloudState, EdgeGroup
from .trainers import RoundTrace, run_global_round, run_intra_set_round
from .vectors import linear_combine, weighted_average

__version__ = "0.1.0"

__all__ = [
    "ADULT_SPEC",
    "Algorithm",
    "ClientShard",
    "CloudState",
    "Dataset",
    "EdgeGroup",
    "ExperimentConfig",
    "FeatureSpec",
    "HierConfig",
    "HierarchicalFLClassifier",
    "MetricsFile",
    "OracleResult",
    "PartitionPlan",
    "RegParams",
    "RoundTrace",
    "TauSchedule",
    "build_cloud_state",
    "centralized_oracle",
    "client_grad",
    "client_loss",
    "compare_runs",
    "dataset_fingerprint",
    "finite_diff_grad",
    "global_objective",
    "linear_combine",
    "load_adult_csv",
    "partition_iid",
    "partition_single_class",
    "run_experiment",
    "run_global_round",
    "run_intra_set_round",
    "run_sweep",
    "set_objective",
    "surrogate_grad",
    "synthesize_dataset",
    "tau_for_round",
    "weighted_average",
]
