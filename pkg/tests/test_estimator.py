import numpy as np
import pytest
from sklearn.base import clone
from sklearn.datasets import make_classification
from sklearn.exceptions import NotFittedError
from sklearn.linear_model import LogisticRegression
from sklearn.model_selection import cross_val_score
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import StandardScaler

from hieradmm import HierarchicalFLClassifier


def blobs(n=240, seed=0):
    return make_classification(
        n_samples=n, n_features=6, n_informative=4, n_redundant=0,
        class_sep=2.0, random_state=seed,
    )


def small_clf(**overrides):
    params = dict(
        algorithm="hierfadmm", n_sets=2, clients_per_set=3,
        local_steps=2, tau=2, n_rounds=15, random_state=0,
    )
    params.update(overrides)
    return HierarchicalFLClassifier(**params)


class TestFitPredict:
    def test_learns_separable_data(self):
        X, y = blobs()
        clf = small_clf(mu=0.1, n_rounds=40).fit(X, y)
        ceiling = LogisticRegression(C=1000).fit(X, y).score(X, y)
        assert (clf.predict(X) == y).mean() >= ceiling - 0.02

    def test_fitted_attributes(self):
        X, y = blobs()
        clf = small_clf().fit(X, y)
        assert clf.coef_.shape == (6,)
        assert isinstance(clf.intercept_, float)
        assert clf.n_features_in_ == 6
        assert clf.n_iter_ == 15
        assert len(clf.objective_history_) == 16
        assert clf.objective_history_[-1] < clf.objective_history_[0]

    def test_predict_proba_rows_sum_to_one(self):
        X, y = blobs()
        clf = small_clf().fit(X, y)
        proba = clf.predict_proba(X)
        assert proba.shape == (len(X), 2)
        np.testing.assert_allclose(proba.sum(axis=1), 1.0, atol=1e-12)

    def test_preserves_original_label_values(self):
        X, y = blobs()
        clf = small_clf().fit(X, np.where(y == 1, 7, -3))
        assert set(np.unique(clf.predict(X))) <= {-3, 7}

    def test_multiclass_rejected(self):
        X = np.random.default_rng(0).standard_normal((30, 4))
        y = np.arange(30) % 3
        with pytest.raises(ValueError, match="binary"):
            small_clf().fit(X, y)

    def test_predict_before_fit_raises(self):
        with pytest.raises(NotFittedError):
            small_clf().predict(np.zeros((3, 6)))


class TestSklearnProtocol:
    def test_get_set_params_round_trip(self):
        clf = small_clf()
        params = clf.get_params()
        assert params["algorithm"] == "hierfadmm"
        clone(clf).set_params(mu=0.02)

    def test_fit_is_deterministic(self):
        X, y = blobs()
        a = small_clf().fit(X, y)
        b = small_clf().fit(X, y)
        np.testing.assert_array_equal(a.coef_, b.coef_)
        assert a.intercept_ == b.intercept_

    def test_works_in_pipeline_and_cv(self):
        X, y = blobs()
        pipe = make_pipeline(StandardScaler(), small_clf(mu=0.1, n_rounds=20))
        scores = cross_val_score(pipe, X, y, cv=3)
        assert scores.mean() > 0.75


class TestAlgorithmChoices:
    @pytest.mark.parametrize("algorithm", ["hierfed", "hierfadmm", "hierf2admm"])
    def test_every_trainer_fits(self, algorithm):
        X, y = blobs(n=120)
        clf = small_clf(algorithm=algorithm, n_rounds=5).fit(X, y)
        assert np.isfinite(clf.objective_history_).all()

    def test_single_class_partition(self):
        X, y = blobs(n=300)
        clf = small_clf(partition="single-class", size_range=(10, 30)).fit(X, y)
        assert (clf.predict(X) == y).mean() > 0.7

    def test_growing_tau_accepted(self):
        X, y = blobs(n=120)
        clf = small_clf(tau=1, tau_growth=0.5, n_rounds=6).fit(X, y)
        assert clf.objective_history_[-1] < clf.objective_history_[0]
