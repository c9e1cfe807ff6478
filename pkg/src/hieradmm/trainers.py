"""The three hierarchical trainers as composable step operations.

Per-round event order (shared by all three algorithms):

  1. broadcast the current global model w to every set,
  2. run tau intra-set iterations in each set (fixed set order),
  3. ADMM variants: pi_c <- pi_c + sigma_c * (w_c - w),
  4. cloud-aggregate to get the next global model.

Within one intra-set iteration of the double-ADMM trainer the cycle is:
L local steps from the current set model, per-client multiplier update,
edge aggregation, broadcast of the new set model.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .config import Algorithm, HierConfig, tau_for_round
from .exceptions import (
    DegenerateWeights,
    DimensionMismatch,
    DivergenceDetected,
    EmptyInput,
)
from .objective import RegParams, client_grad, global_objective, surrogate_grad
from .state import ClientShard, CloudState, EdgeGroup
from .vectors import weighted_average

DIVERGENCE_LIMIT = 1e12


@dataclass(frozen=True)
class RoundTrace:
    """Telemetry for one global round."""

    t: int
    w_global: np.ndarray
    objective: float
    consensus_residual: float
    stationarity_residual: float
    tau_used: int


# --- aggregation rules ------------------------------------------------------


def hierfed_cloud_aggregate(groups) -> np.ndarray:
    """w = (1/D) sum_c D_c * w_c."""
    return weighted_average([(g.n_samples, g.w_set) for g in groups])


def hierfed_edge_aggregate(group: EdgeGroup, local_models) -> np.ndarray:
    """w_c = (1/D_c) sum_k D_kc * w_kc."""
    if len(local_models) != group.n_clients:
        raise DimensionMismatch("one local model per client required")
    return weighted_average(
        [(c.n_samples, w) for c, w in zip(group.clients, local_models)]
    )


def hierfadmm_cloud_aggregate(groups) -> np.ndarray:
    """w = (1/sum sigma_c) sum_c (sigma_c * w_c + pi_c).

    Only the masked message sigma_c*w_c + pi_c crosses the edge->cloud
    boundary; the stationary point of the global augmented Lagrangian in w.
    """
    groups = list(groups)
    if not groups:
        raise EmptyInput("cloud aggregation of no groups")
    total = sum(g.sigma_c for g in groups)
    if total == 0.0:
        raise DegenerateWeights("sum of sigma_c is zero")
    acc = np.zeros_like(groups[0].w_set)
    for g in groups:
        acc = acc + (g.sigma_c * g.w_set + g.pi_set)
    return acc / total


def hierf2admm_edge_aggregate(group: EdgeGroup, local_models, multipliers) -> np.ndarray:
    """w_c = (1/sum sigma_kc) sum_k (sigma_kc * w_kc + pi_kc)."""
    if len(local_models) != group.n_clients or len(multipliers) != group.n_clients:
        raise DimensionMismatch("one model and one multiplier per client required")
    total = sum(c.sigma_kc for c in group.clients)
    if total == 0.0:
        raise DegenerateWeights("sum of sigma_kc is zero")
    acc = np.zeros_like(group.w_set)
    for shard, w_kc, pi_kc in zip(group.clients, local_models, multipliers):
        acc = acc + (shard.sigma_kc * w_kc + pi_kc)
    return acc / total


# --- local epochs -----------------------------------------------------------


def hierfed_local_epoch(shard: ClientShard, w_start, L: int, mu: float, reg: RegParams):
    """L plain gradient steps: w <- w - mu * grad f(w)."""
    w = np.asarray(w_start, dtype=np.float64)
    for _ in range(L):
        w = w - mu * client_grad(w, shard.samples, reg)
    return w


def hierfadmm_local_epoch(
    shard: ClientShard,
    w_start,
    w_global,
    pi_c,
    sigma_c: float,
    d_total: int,
    n_c: int,
    L: int,
    mu: float,
    reg: RegParams,
):
    """L gradient steps on the augmented surrogate.

    With pi_c = 0 and sigma_c = 0 this is bit-identical to
    hierfed_local_epoch.
    """
    w = np.asarray(w_start, dtype=np.float64)
    for _ in range(L):
        w = w - mu * surrogate_grad(
            w, w_global, pi_c, sigma_c, d_total, shard.n_samples, n_c, shard.samples, reg
        )
    return w


def hierf2admm_local_epoch(
    shard: ClientShard,
    w_set,
    w_global,
    pi_c,
    pi_kc,
    sigma_c: float,
    sigma_kc: float,
    d_total: int,
    d_c: int,
    n_c: int,
    L: int,
    mu: float,
    reg: RegParams,
):
    """L gradient steps on the doubly augmented per-client objective.

    Starts from the current set model w_set (clients reset to it each
    intra-set iteration). With pi_kc = 0 and sigma_kc = 0 the step
    direction equals hierfadmm_local_epoch's.
    """
    w = np.asarray(w_set, dtype=np.float64)
    anchor_set = np.asarray(w_set, dtype=np.float64)
    ratio_kc = d_c / shard.n_samples
    for _ in range(L):
        direction = surrogate_grad(
            w, w_global, pi_c, sigma_c, d_total, shard.n_samples, n_c, shard.samples, reg
        )
        direction = direction + ratio_kc * np.asarray(pi_kc, dtype=np.float64)
        direction = direction + sigma_kc * ratio_kc * (w - anchor_set)
        w = w - mu * direction
    return w


# --- multiplier updates -----------------------------------------------------


def edge_multiplier_update(group: EdgeGroup, w_set_new, w_global_new) -> np.ndarray:
    """pi_c <- pi_c + sigma_c * (w_c - w)."""
    w_c = np.asarray(w_set_new, dtype=np.float64)
    w_g = np.asarray(w_global_new, dtype=np.float64)
    if w_c.shape != w_g.shape or w_c.shape != group.pi_set.shape:
        raise DimensionMismatch("multiplier update inputs must share one length")
    return group.pi_set + group.sigma_c * (w_c - w_g)


def client_multiplier_update(shard: ClientShard, w_local_new, w_set_new) -> np.ndarray:
    """pi_kc <- pi_kc + sigma_kc * (w_kc - w_c)."""
    w_kc = np.asarray(w_local_new, dtype=np.float64)
    w_c = np.asarray(w_set_new, dtype=np.float64)
    if w_kc.shape != w_c.shape or w_kc.shape != shard.pi_local.shape:
        raise DimensionMismatch("multiplier update inputs must share one length")
    return shard.pi_local + shard.sigma_kc * (w_kc - w_c)


# --- round orchestration ----------------------------------------------------


def run_intra_set_round(
    algorithm: Algorithm,
    group: EdgeGroup,
    w_global,
    tau: int,
    L: int,
    cfg: HierConfig,
    d_total: int,
) -> EdgeGroup:
    """Run tau intra-set iterations in one set; returns the updated group."""
    if tau < 1:
        raise ValueError("tau must be >= 1")
    w_g = np.asarray(w_global, dtype=np.float64)
    w_c = w_g
    n_c = group.n_clients
    reg = RegParams(cfg.lam)

    if algorithm == Algorithm.HIERFED:
        for _ in range(tau):
            local_models = [
                hierfed_local_epoch(shard, w_c, L, cfg.mu, reg)
                for shard in group.clients
            ]
            w_c = hierfed_edge_aggregate(group, local_models)
        return replace(group, w_set=w_c)

    if algorithm == Algorithm.HIERFADMM:
        for _ in range(tau):
            local_models = [
                hierfadmm_local_epoch(
                    shard, w_c, w_g, group.pi_set, group.sigma_c,
                    d_total, n_c, L, cfg.mu, reg,
                )
                for shard in group.clients
            ]
            w_c = hierfed_edge_aggregate(group, local_models)
        return replace(group, w_set=w_c)

    # double ADMM: clients carry pi_kc state across iterations and rounds
    clients = list(group.clients)
    d_c = group.n_samples
    for _ in range(tau):
        local_models = [
            hierf2admm_local_epoch(
                shard, w_c, w_g, group.pi_set, shard.pi_local,
                group.sigma_c, shard.sigma_kc, d_total, d_c, n_c,
                L, cfg.mu, reg,
            )
            for shard in clients
        ]
        new_pis = [
            client_multiplier_update(shard, w_kc, w_c)
            for shard, w_kc in zip(clients, local_models)
        ]
        clients = [
            replace(shard, w_local=w_kc, pi_local=pi)
            for shard, w_kc, pi in zip(clients, local_models, new_pis)
        ]
        staged = replace(group, clients=tuple(clients))
        if cfg.edge_agg == "weighted":
            w_c = hierfed_edge_aggregate(staged, local_models)
        else:
            w_c = hierf2admm_edge_aggregate(staged, local_models, new_pis)
    return replace(group, clients=tuple(clients), w_set=w_c)


def _stationarity_residual(group: EdgeGroup, w_broadcast, d_total: int, reg: RegParams):
    """|| (D_c/D) grad F_c(w_c) + pi_c + sigma_c (w_c - w) ||.

    Proxy for the inexactness of the intra-set subproblem solve; the exact
    error against the true argmin is unobservable. Uses the pre-update
    pi_c of the round being scored.
    """
    grad_fc = np.zeros_like(group.w_set)
    for shard in group.clients:
        grad_fc = grad_fc + shard.n_samples * client_grad(
            group.w_set, shard.samples, reg
        )
    grad_fc /= group.n_samples
    resid = (
        (group.n_samples / d_total) * grad_fc
        + group.pi_set
        + group.sigma_c * (group.w_set - w_broadcast)
    )
    return float(np.linalg.norm(resid))


def run_global_round(state: CloudState, cfg: HierConfig, t: int):
    """One full global round; returns (new state, RoundTrace for t+1).

    Raises DivergenceDetected when the objective or any model norm
    exceeds the guard; the caller records the flag and halts the run.
    """
    reg = RegParams(cfg.lam)
    d_total = state.n_samples
    tau = tau_for_round(cfg.tau, t)
    w_broadcast = state.w_global
    is_admm = cfg.algorithm != Algorithm.HIERFED

    groups = list(state.groups)
    if is_admm and cfg.reset_multipliers:
        zero = np.zeros_like(w_broadcast)
        groups = [
            replace(
                g,
                pi_set=zero,
                clients=tuple(replace(c, pi_local=zero) for c in g.clients),
            )
            for g in groups
        ]

    groups = [
        run_intra_set_round(cfg.algorithm, g, w_broadcast, tau, cfg.local_steps, cfg, d_total)
        for g in groups
    ]

    stationarity = max(
        _stationarity_residual(g, w_broadcast, d_total, reg) for g in groups
    )

    if is_admm:
        groups = [
            replace(g, pi_set=edge_multiplier_update(g, g.w_set, w_broadcast))
            for g in groups
        ]

    if not is_admm or cfg.cloud_agg == "weighted":
        w_next = hierfed_cloud_aggregate(groups)
    else:
        w_next = hierfadmm_cloud_aggregate(groups)

    new_state = CloudState(w_global=w_next, groups=tuple(groups))
    consensus = max(float(np.linalg.norm(g.w_set - w_next)) for g in groups)
    objective = global_objective(new_state, reg)

    norms = [float(np.linalg.norm(w_next))] + [
        float(np.linalg.norm(g.w_set)) for g in groups
    ]
    if (
        not np.isfinite(objective)
        or abs(objective) > DIVERGENCE_LIMIT
        or any(not np.isfinite(n) or n > DIVERGENCE_LIMIT for n in norms)
    ):
        raise DivergenceDetected(
            f"divergence guard tripped at round {t + 1}",
            round_index=t + 1,
            objective=objective,
        )

    trace = RoundTrace(
        t=t + 1,
        w_global=w_next,
        objective=objective,
        consensus_residual=consensus,
        stationarity_residual=stationarity,
        tau_used=tau,
    )
    return new_state, trace
