"""Dense weight-vector arithmetic shared by every aggregation rule.

All reductions accumulate in the order the caller supplies (callers pass
terms sorted by client/set id), so reruns with the same seed are
bit-identical regardless of how the per-client work was scheduled.
"""

from __future__ import annotations

import numpy as np

from .exceptions import DegenerateWeights, DimensionMismatch, EmptyInput


def as_weights(values) -> np.ndarray:
    """Coerce to a 1-d float64 vector."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionMismatch(f"expected a 1-d vector, got shape {arr.shape}")
    return arr


def check_same_length(*vecs: np.ndarray) -> None:
    lengths = {v.shape[0] for v in vecs}
    if len(lengths) > 1:
        raise DimensionMismatch(f"mixed vector lengths {sorted(lengths)}")


def weighted_average(terms) -> np.ndarray:
    """(sum w_i * v_i) / (sum w_i), summed in list order.

    Raises EmptyInput, DegenerateWeights, DimensionMismatch.
    """
    terms = list(terms)
    if not terms:
        raise EmptyInput("weighted_average of no terms")
    vecs = [as_weights(v) for _, v in terms]
    check_same_length(*vecs)
    acc = np.zeros_like(vecs[0])
    total = 0.0
    for (wgt, _), vec in zip(terms, vecs):
        acc += float(wgt) * vec
        total += float(wgt)
    if total == 0.0:
        raise DegenerateWeights("aggregation weights sum to zero")
    return acc / total


def linear_combine(a: float, x, b: float, y) -> np.ndarray:
    """a*x + b*y elementwise."""
    xv = as_weights(x)
    yv = as_weights(y)
    check_same_length(xv, yv)
    return float(a) * xv + float(b) * yv
