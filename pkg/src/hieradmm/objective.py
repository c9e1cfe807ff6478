"""Logistic-regression objective, its gradient, and the augmented surrogate.

The local loss at a client is

    f(w) = (1/n) sum_j [ ln(1 + e^{<a_j, w>}) - b_j <a_j, w> ] + (lam/2) ||w||^2

with labels b in {0, 1} and a bias-1 coordinate folded into the features.
The ln(1+e^z) term is evaluated through logaddexp, which takes the stable
branch for |z| large.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .exceptions import (
    DimensionMismatch,
    EmptyDataset,
    NonFiniteEvaluation,
)
from .vectors import as_weights


@dataclass(frozen=True)
class Dataset:
    """An ordered, immutable block of samples.

    features: (n, d) float64, last column is the constant bias 1.
    labels:   (n,) values in {0, 1}.
    """

    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        feats = np.ascontiguousarray(self.features, dtype=np.float64)
        labs = np.ascontiguousarray(self.labels, dtype=np.float64)
        if feats.ndim != 2:
            raise DimensionMismatch(f"features must be 2-d, got {feats.shape}")
        if labs.ndim != 1 or labs.shape[0] != feats.shape[0]:
            raise DimensionMismatch("labels must be 1-d and aligned with features")
        if not np.all(np.isfinite(feats)):
            raise NonFiniteEvaluation("non-finite feature values")
        if not np.all((labs == 0.0) | (labs == 1.0)):
            raise ValueError("labels must be 0 or 1")
        feats.setflags(write=False)
        labs.setflags(write=False)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labs)

    def __len__(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    def subset(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=np.intp)
        return Dataset(self.features[idx], self.labels[idx])


@dataclass(frozen=True)
class RegParams:
    """L2 penalty strength (applied to the whole w, bias included)."""

    lam: float = 0.001

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be nonnegative")


def _margins(w: np.ndarray, data: Dataset) -> np.ndarray:
    if data.dim != w.shape[0]:
        raise DimensionMismatch(
            f"weights length {w.shape[0]} != feature dim {data.dim}"
        )
    return data.features @ w


def client_loss(w, data: Dataset, reg: RegParams) -> float:
    """Mean logistic loss over one client's samples plus the L2 term."""
    wv = as_weights(w)
    if len(data) == 0:
        raise EmptyDataset("loss of an empty dataset")
    z = _margins(wv, data)
    # ln(1 + e^z) via logaddexp(0, z): stable for both signs of z
    val = float(np.mean(np.logaddexp(0.0, z) - data.labels * z))
    val += 0.5 * reg.lam * float(wv @ wv)
    if not np.isfinite(val):
        raise NonFiniteEvaluation("loss evaluated to a non-finite value")
    return val


def client_grad(w, data: Dataset, reg: RegParams) -> np.ndarray:
    """Gradient of client_loss: (1/n) A^T (sigmoid(Aw) - b) + lam*w."""
    wv = as_weights(w)
    if len(data) == 0:
        raise EmptyDataset("gradient of an empty dataset")
    z = _margins(wv, data)
    resid = expit(z) - data.labels
    grad = data.features.T @ resid / len(data) + reg.lam * wv
    if not np.all(np.isfinite(grad)):
        raise NonFiniteEvaluation("gradient evaluated to non-finite values")
    return grad


def set_objective(w, group, reg: RegParams) -> float:
    """Data-size-weighted mean of member client losses at a common w."""
    total = 0.0
    for shard in group.clients:
        total += shard.n_samples * client_loss(w, shard.samples, reg)
    return total / group.n_samples


def global_objective(state, reg: RegParams) -> float:
    """Top-level objective at state.w_global.

    Equals the flat data-size-weighted mean of all client losses, so it is
    invariant under re-grouping of clients into different sets.
    """
    total = 0.0
    for group in state.groups:
        total += group.n_samples * set_objective(state.w_global, group, reg)
    return total / state.n_samples


def surrogate_grad(
    w_kc,
    w_global,
    pi_c,
    sigma_c: float,
    d_total: int,
    d_kc: int,
    n_c: int,
    data: Dataset,
    reg: RegParams,
) -> np.ndarray:
    """Gradient of the augmented per-client surrogate.

    grad f(w_kc) + r*pi_c + sigma_c*r*(w_kc - w_global), r = d_total/(d_kc*n_c).

    With pi_c = 0 and sigma_c = 0 this is exactly client_grad.
    """
    wv = as_weights(w_kc)
    gv = as_weights(w_global)
    pv = as_weights(pi_c)
    if wv.shape != gv.shape or wv.shape != pv.shape:
        raise DimensionMismatch("surrogate_grad inputs must share one length")
    ratio = d_total / (d_kc * n_c)
    return client_grad(wv, data, reg) + ratio * pv + sigma_c * ratio * (wv - gv)


def finite_diff_grad(f, w, h: float = 1e-6) -> np.ndarray:
    """Central-difference gradient of a scalar function, one probe per axis."""
    if h <= 0:
        raise ValueError("h must be positive")
    wv = as_weights(w).copy()
    grad = np.empty_like(wv)
    for i in range(wv.shape[0]):
        orig = wv[i]
        wv[i] = orig + h
        hi = f(wv)
        wv[i] = orig - h
        lo = f(wv)
        wv[i] = orig
        if not (np.isfinite(hi) and np.isfinite(lo)):
            raise NonFiniteEvaluation("finite differencing hit a non-finite value")
        grad[i] = (hi - lo) / (2.0 * h)
    return grad
