"""Scikit-learn front end for the hierarchical trainers.

Wraps dataset partitioning plus the round loop behind fit/predict so the
algorithms compose with pipelines, grid search, and the rest of the
ecosystem. The heavy lifting lives in the functional modules.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.multiclass import unique_labels
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y
from scipy.special import expit

from .config import HierConfig, TauSchedule
from .data import build_cloud_state, partition_iid, partition_single_class
from .objective import Dataset, RegParams, global_objective
from .trainers import run_global_round


class HierarchicalFLClassifier(BaseEstimator, ClassifierMixin):
    """Binary logistic regression trained by simulated hierarchical FL.

    Parameters mirror the training hyperparameters: `algorithm` selects
    the optimizer ("hierfed", "hierfadmm", or "hierf2admm"), `n_sets` and
    `clients_per_set` fix the topology, `local_steps`/`tau`/`n_rounds`
    the three loop depths, and mu/sigma_c/sigma_kc/reg_lambda the step
    size, penalty, and regularization constants. `tau_growth > 0` makes
    the intra-set iteration count grow over rounds.

    A DivergenceDetected error from fit means the configured run blew up
    (which is a documented regime for hierf2admm at local_steps=1).
    """

    def __init__(
        self,
        algorithm="hierfadmm",
        n_sets=3,
        clients_per_set=5,
        local_steps=4,
        tau=6,
        tau_growth=0.0,
        mu=0.01,
        sigma_c=0.1,
        sigma_kc=0.1,
        reg_lambda=0.001,
        n_rounds=50,
        partition="iid",
        size_range=(10, 40),
        random_state=0,
    ):
        self.algorithm = algorithm
        self.n_sets = n_sets
        self.clients_per_set = clients_per_set
        self.local_steps = local_steps
        self.tau = tau
        self.tau_growth = tau_growth
        self.mu = mu
        self.sigma_c = sigma_c
        self.sigma_kc = sigma_kc
        self.reg_lambda = reg_lambda
        self.n_rounds = n_rounds
        self.partition = partition
        self.size_range = size_range
        self.random_state = random_state

    def _hier_config(self) -> HierConfig:
        if self.tau_growth > 0:
            sched = TauSchedule(mode="growing", tau0=self.tau, growth_rate=self.tau_growth)
        else:
            sched = TauSchedule(mode="fixed", tau0=self.tau)
        return HierConfig(
            algorithm=self.algorithm,
            n_sets=self.n_sets,
            clients_per_set=self.clients_per_set,
            local_steps=self.local_steps,
            tau=sched,
            mu=self.mu,
            sigma_c=self.sigma_c,
            sigma_kc=self.sigma_kc,
            lam=self.reg_lambda,
            rounds=self.n_rounds,
            seed=self.random_state,
        )

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        self.classes_ = unique_labels(y)
        if len(self.classes_) != 2:
            raise ValueError("this classifier is binary only")
        labels = (y == self.classes_[1]).astype(np.float64)
        features = np.hstack([X, np.ones((X.shape[0], 1))])
        data = Dataset(features, labels)

        cfg = self._hier_config()
        if self.partition == "iid":
            plan = partition_iid(data, cfg.n_clients, cfg.seed)
        elif self.partition == "single-class":
            plan = partition_single_class(
                data, cfg.n_clients, cfg.seed, tuple(self.size_range)
            )
        else:
            raise ValueError(f"unknown partition {self.partition!r}")

        state = build_cloud_state(data, plan, cfg)
        reg = RegParams(cfg.lam)
        history = [global_objective(state, reg)]
        for t in range(cfg.rounds):
            state, trace = run_global_round(state, cfg, t)
            history.append(trace.objective)

        self.n_features_in_ = X.shape[1]
        self.coef_ = state.w_global[:-1].copy()
        self.intercept_ = float(state.w_global[-1])
        self.objective_history_ = np.asarray(history)
        self.n_iter_ = cfg.rounds
        return self

    def decision_function(self, X):
        check_is_fitted(self, ["coef_", "intercept_"])
        X = check_array(X)
        return X @ self.coef_ + self.intercept_

    def predict_proba(self, X):
        p1 = expit(self.decision_function(X))
        return np.column_stack([1.0 - p1, p1])

    def predict(self, X):
        scores = self.decision_function(X)
        return self.classes_[(scores > 0).astype(int)]
