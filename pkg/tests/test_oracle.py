import numpy as np
from scipy.optimize import minimize

from hieradmm.data import synthesize_dataset
from hieradmm.objective import RegParams, client_grad, client_loss
from hieradmm.oracle import centralized_oracle


def test_oracle_reaches_stationarity():
    data = synthesize_dataset(seed=0, n=120, d_features=6, separation=1.5)
    result = centralized_oracle(data, RegParams(0.001), tol=1e-8)
    assert result.converged
    assert result.grad_norm < 1e-8
    assert result.f_opt == client_loss(result.w_opt, data, RegParams(0.001))


def test_oracle_matches_scipy_reference():
    data = synthesize_dataset(seed=3, n=150, d_features=5, separation=1.0)
    reg = RegParams(0.001)
    ours = centralized_oracle(data, reg, tol=1e-9)
    ref = minimize(
        lambda w: client_loss(w, data, reg),
        np.zeros(data.dim),
        jac=lambda w: client_grad(w, data, reg),
        method="L-BFGS-B",
        options={"gtol": 1e-10, "maxiter": 5000},
    )
    assert ours.f_opt <= ref.fun + 1e-9
    np.testing.assert_allclose(ours.w_opt, ref.x, atol=1e-4)


def test_oracle_no_point_beats_optimum():
    data = synthesize_dataset(seed=5, n=80, d_features=4, separation=2.0)
    reg = RegParams(0.001)
    result = centralized_oracle(data, reg, tol=1e-9)
    rng = np.random.default_rng(0)
    for _ in range(50):
        probe = result.w_opt + rng.standard_normal(data.dim) * 0.1
        assert client_loss(probe, data, reg) >= result.f_opt - 1e-12


def test_oracle_iteration_cap_reported():
    data = synthesize_dataset(seed=0, n=60, d_features=4, separation=1.0)
    result = centralized_oracle(data, RegParams(0.001), max_iters=3, tol=1e-14)
    assert not result.converged
    assert result.iterations == 3
    assert np.isfinite(result.f_opt)
