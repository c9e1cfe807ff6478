"""Centralized reference solver for the pooled objective.

Plain gradient descent with Armijo backtracking on the flat data-weighted
objective. Built only on the objective-module primitives so it stays an
independent check on the federated trainers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .objective import Dataset, RegParams, client_grad, client_loss


@dataclass(frozen=True)
class OracleResult:
    w_opt: np.ndarray
    f_opt: float
    grad_norm: float
    iterations: int
    converged: bool


def centralized_oracle(
    data: Dataset,
    reg: RegParams,
    max_iters: int = 5000,
    tol: float = 1e-8,
) -> OracleResult:
    """Minimize the pooled objective; returns best-so-far if not converged."""
    w = np.zeros(data.dim)
    f_val = client_loss(w, data, reg)
    grad = client_grad(w, data, reg)
    it = 0
    for it in range(1, max_iters + 1):
        gnorm = float(np.linalg.norm(grad))
        if gnorm < tol:
            return OracleResult(w, f_val, gnorm, it - 1, True)
        step = 1.0
        gg = float(grad @ grad)
        while step > 1e-20:
            w_try = w - step * grad
            f_try = client_loss(w_try, data, reg)
            if f_try <= f_val - 1e-4 * step * gg:
                break
            step *= 0.5
        else:
            break  # no productive step left
        w, f_val = w_try, f_try
        grad = client_grad(w, data, reg)
    gnorm = float(np.linalg.norm(grad))
    return OracleResult(w, f_val, gnorm, it, gnorm < tol)
