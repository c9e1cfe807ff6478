import numpy as np
import pytest

from hieradmm.config import HierConfig, TauSchedule
from hieradmm.data import build_cloud_state, partition_iid, synthesize_dataset
from hieradmm.objective import Dataset


@pytest.fixture
def tiny_dataset():
    feats = np.array([[1.0, 0.5, 1.0], [-0.3, 1.2, 1.0], [0.7, -0.8, 1.0], [0.1, 0.9, 1.0]])
    labels = np.array([1.0, 0.0, 1.0, 0.0])
    return Dataset(feats, labels)


@pytest.fixture
def small_config():
    return HierConfig(
        algorithm="hierfadmm",
        n_sets=3,
        clients_per_set=5,
        local_steps=4,
        tau=TauSchedule("fixed", 3),
        mu=0.01,
        sigma_c=0.1,
        sigma_kc=0.1,
        lam=0.001,
        rounds=10,
        seed=0,
    )


@pytest.fixture
def small_state(small_config):
    data = synthesize_dataset(seed=0, n=20 * small_config.n_clients, d_features=8, separation=1.0)
    plan = partition_iid(data, small_config.n_clients, small_config.seed)
    return build_cloud_state(data, plan, small_config)


def random_dataset(rng, n, d):
    feats = np.hstack([rng.standard_normal((n, d - 1)), np.ones((n, 1))])
    labels = (rng.random(n) < 0.5).astype(np.float64)
    return Dataset(feats, labels)
