import math

import numpy as np
import pytest

from hieradmm.config import HierConfig
from hieradmm.data import build_cloud_state, partition_iid
from hieradmm.exceptions import DimensionMismatch, EmptyDataset
from hieradmm.objective import (
    Dataset,
    RegParams,
    client_grad,
    client_loss,
    finite_diff_grad,
    global_objective,
    set_objective,
    surrogate_grad,
)
from hieradmm.state import ClientShard, CloudState, EdgeGroup

from conftest import random_dataset

NO_REG = RegParams(0.0)


def single_sample(features, label):
    return Dataset(np.array([features], dtype=float), np.array([label], dtype=float))


class TestClientLoss:
    def test_zero_weights_gives_ln2(self, tiny_dataset):
        w = np.zeros(3)
        assert client_loss(w, tiny_dataset, NO_REG) == pytest.approx(math.log(2), abs=1e-12)

    def test_regularizer_vanishes_at_zero(self, tiny_dataset):
        w = np.zeros(3)
        assert client_loss(w, tiny_dataset, RegParams(0.001)) == pytest.approx(
            math.log(2), abs=1e-12
        )

    def test_closed_form_single_sample(self):
        data = single_sample([1.0], 1.0)
        expected = math.log(1 + math.e) - 1.0
        assert client_loss(np.array([1.0]), data, NO_REG) == pytest.approx(expected, abs=1e-12)

    def test_large_margin_is_stable(self):
        data = single_sample([1.0], 0.0)
        val = client_loss(np.array([1000.0]), data, NO_REG)
        assert math.isfinite(val) and val == pytest.approx(1000.0, rel=1e-12)

    def test_empty_dataset_rejected(self, tiny_dataset):
        empty = Dataset(np.zeros((0, 3)), np.zeros(0))
        with pytest.raises(EmptyDataset):
            client_loss(np.zeros(3), empty, NO_REG)

    def test_dimension_mismatch(self, tiny_dataset):
        with pytest.raises(DimensionMismatch):
            client_loss(np.zeros(5), tiny_dataset, NO_REG)


class TestClientGrad:
    def test_zero_weights_half_residual(self):
        data = single_sample([1.0, 0.0], 1.0)
        np.testing.assert_allclose(client_grad(np.zeros(2), data, NO_REG), [-0.5, 0.0])

    def test_symmetric_labels_cancel(self):
        data = Dataset(np.array([[1.0], [1.0]]), np.array([1.0, 0.0]))
        np.testing.assert_allclose(client_grad(np.zeros(1), data, NO_REG), [0.0])

    def test_derived_value_with_regularizer(self):
        data = single_sample([1.0], 0.0)
        grad = client_grad(np.array([1.0]), data, RegParams(0.001))
        sigmoid_1 = 1.0 / (1.0 + math.exp(-1.0))
        np.testing.assert_allclose(grad, [sigmoid_1 + 0.001], atol=1e-12)

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            d = int(rng.integers(2, 21))
            data = random_dataset(rng, 12, d)
            reg = RegParams(float(rng.uniform(0, 0.01)))
            w = rng.standard_normal(d)
            analytic = client_grad(w, data, reg)
            numeric = finite_diff_grad(lambda v: client_loss(v, data, reg), w)
            np.testing.assert_allclose(analytic, numeric, rtol=1e-5, atol=1e-8)


class TestSurrogateGrad:
    def test_reduces_to_client_grad(self, tiny_dataset):
        w = np.array([0.2, -0.1, 0.4])
        out = surrogate_grad(
            w, np.zeros(3), np.zeros(3), 0.0, 10, 4, 2, tiny_dataset, NO_REG
        )
        np.testing.assert_array_equal(out, client_grad(w, tiny_dataset, NO_REG))

    def test_proximal_term_vanishes_at_consensus(self, tiny_dataset):
        w = np.array([0.2, -0.1, 0.4])
        out = surrogate_grad(w, w, np.zeros(3), 5.0, 10, 4, 2, tiny_dataset, NO_REG)
        np.testing.assert_array_equal(out, client_grad(w, tiny_dataset, NO_REG))

    def test_direct_formula_with_flat_loss(self):
        # zero features make grad f identically zero at lambda = 0
        data = Dataset(np.array([[0.0], [0.0]]), np.array([0.0, 0.0]))
        out = surrogate_grad(
            np.array([1.0]), np.array([0.0]), np.array([1.0]),
            1.0, 4, 2, 2, data, NO_REG,
        )
        np.testing.assert_allclose(out, [2.0], atol=1e-15)

    def test_matches_scalar_surrogate_finite_diff(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            d = int(rng.integers(2, 12))
            data = random_dataset(rng, 10, d)
            w_kc = rng.standard_normal(d)
            w_g = rng.standard_normal(d)
            pi = rng.standard_normal(d)
            sigma = float(rng.uniform(0.01, 2.0))
            d_total, d_kc, n_c = 40, 10, 4
            ratio = d_total / (d_kc * n_c)
            reg = RegParams(0.001)

            def scalar(v):
                return (
                    client_loss(v, data, reg)
                    + ratio * float((v - w_g) @ pi)
                    + 0.5 * sigma * ratio * float((v - w_g) @ (v - w_g))
                )

            analytic = surrogate_grad(w_kc, w_g, pi, sigma, d_total, d_kc, n_c, data, reg)
            numeric = finite_diff_grad(scalar, w_kc)
            np.testing.assert_allclose(analytic, numeric, rtol=1e-5, atol=1e-7)


def _make_state(shard_data, grouping, w):
    d = shard_data[0].dim
    groups = []
    cid = 0
    for set_id, members in enumerate(grouping):
        clients = []
        for m in members:
            clients.append(
                ClientShard(
                    client_id=cid, set_id=set_id, samples=shard_data[m],
                    w_local=np.zeros(d), pi_local=np.zeros(d), sigma_kc=0.1,
                )
            )
            cid += 1
        groups.append(
            EdgeGroup(set_id=set_id, clients=tuple(clients), w_set=w,
                      pi_set=np.zeros(d), sigma_c=0.1)
        )
    return CloudState(w_global=w, groups=tuple(groups))


class TestHierarchyObjectives:
    def test_single_client_set_equals_client_loss(self, tiny_dataset):
        w = np.array([0.1, 0.2, -0.3])
        state = _make_state([tiny_dataset], [[0]], w)
        group = state.groups[0]
        reg = RegParams(0.001)
        assert set_objective(w, group, reg) == pytest.approx(
            client_loss(w, tiny_dataset, reg), abs=1e-15
        )

    def test_set_objective_weighted_by_data_size(self):
        rng = np.random.default_rng(5)
        small = random_dataset(rng, 1, 4)
        large = random_dataset(rng, 3, 4)
        w = rng.standard_normal(4)
        state = _make_state([small, large], [[0, 1]], w)
        reg = RegParams(0.001)
        l1 = client_loss(w, small, reg)
        l2 = client_loss(w, large, reg)
        assert set_objective(w, state.groups[0], reg) == pytest.approx(
            (1 * l1 + 3 * l2) / 4, abs=1e-14
        )

    def test_global_objective_direct_formula(self):
        rng = np.random.default_rng(6)
        shards = [random_dataset(rng, 2, 4) for _ in range(2)]
        w = rng.standard_normal(4)
        state = _make_state(shards, [[0], [1]], w)
        reg = RegParams(0.001)
        f_c = [set_objective(w, g, reg) for g in state.groups]
        assert global_objective(state, reg) == pytest.approx(sum(f_c) / 2, abs=1e-14)

    def test_regrouping_invariance(self):
        rng = np.random.default_rng(7)
        shards = [random_dataset(rng, int(rng.integers(2, 6)), 5) for _ in range(6)]
        w = rng.standard_normal(5)
        reg = RegParams(0.001)
        a = global_objective(_make_state(shards, [[0, 1, 2], [3, 4, 5]], w), reg)
        b = global_objective(_make_state(shards, [[0], [1, 2, 3, 4], [5]], w), reg)
        assert a == pytest.approx(b, abs=1e-12)


def test_loss_convex_along_segments():
    rng = np.random.default_rng(9)
    data = random_dataset(rng, 15, 6)
    reg = RegParams(0.001)
    for _ in range(10):
        w1 = rng.standard_normal(6)
        w2 = rng.standard_normal(6)
        for t in (0.25, 0.5, 0.75):
            mid = client_loss(t * w1 + (1 - t) * w2, data, reg)
            bound = t * client_loss(w1, data, reg) + (1 - t) * client_loss(w2, data, reg)
            assert mid <= bound + 1e-12


class TestFiniteDiffGrad:
    def test_quadratic(self):
        grad = finite_diff_grad(lambda v: 0.5 * float(v @ v), np.array([3.0, -1.0]), h=1e-5)
        np.testing.assert_allclose(grad, [3.0, -1.0], atol=1e-8)

    def test_constant_function(self):
        grad = finite_diff_grad(lambda v: 7.0, np.array([1.0, 2.0, 3.0]))
        np.testing.assert_array_equal(grad, [0.0, 0.0, 0.0])

    def test_rejects_nonpositive_step(self):
        with pytest.raises(ValueError):
            finite_diff_grad(lambda v: 0.0, np.zeros(2), h=0.0)
