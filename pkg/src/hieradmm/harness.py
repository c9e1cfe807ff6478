"""Experiment execution: topology build, round loop, metrics, sweeps."""

from __future__ import annotations

import itertools
import os
import time
from concurrent.futures import ThreadPoolExecutor

from .config import ExperimentConfig, build_experiment_config
from .data import (
    build_cloud_state,
    dataset_fingerprint,
    load_adult_csv,
    partition_iid,
    partition_single_class,
    synthesize_dataset,
)
from .exceptions import DivergenceDetected
from .metrics import MetricsFile, MetricsRow, MetricsWriter
from .objective import Dataset, RegParams, global_objective
from .trainers import run_global_round


def build_dataset(cfg: ExperimentConfig) -> Dataset:
    if cfg.data == "synthetic":
        n = cfg.samples_per_client * cfg.hier.n_clients
        return synthesize_dataset(
            seed=cfg.hier.seed,
            n=n,
            d_features=cfg.d_features,
            separation=cfg.separation,
        )
    path = cfg.data.split(":", 1)[1]
    return load_adult_csv(path)


def build_plan(data: Dataset, cfg: ExperimentConfig):
    if cfg.partition == "iid":
        return partition_iid(data, cfg.hier.n_clients, cfg.hier.seed)
    return partition_single_class(
        data, cfg.hier.n_clients, cfg.hier.seed, (cfg.size_min, cfg.size_max)
    )


def run_experiment(cfg: ExperimentConfig) -> MetricsFile:
    """Run T global rounds, writing metrics incrementally; returns the
    re-parsed metrics file."""
    data = build_dataset(cfg)
    plan = build_plan(data, cfg)
    state = build_cloud_state(data, plan, cfg.hier)
    reg = RegParams(cfg.hier.lam)

    meta = {
        "config": cfg.to_dict(),
        "fingerprint": dataset_fingerprint(data),
        "diverged": False,
        "divergence_round": None,
    }
    writer = MetricsWriter(cfg.out, cfg.metrics_format)
    try:
        start = time.perf_counter()
        writer.write_row(
            MetricsRow(
                t=0,
                objective=global_objective(state, reg),
                consensus_residual=0.0,
                stationarity_residual=0.0,
                tau_used=0,
                wall_ms=(time.perf_counter() - start) * 1000.0,
            )
        )
        for t in range(cfg.hier.rounds):
            round_start = time.perf_counter()
            try:
                state, trace = run_global_round(state, cfg.hier, t)
            except DivergenceDetected as exc:
                meta["diverged"] = True
                meta["divergence_round"] = exc.round_index
                break
            writer.write_row(
                MetricsRow(
                    t=trace.t,
                    objective=trace.objective,
                    consensus_residual=trace.consensus_residual,
                    stationarity_residual=trace.stationarity_residual,
                    tau_used=trace.tau_used,
                    wall_ms=(time.perf_counter() - round_start) * 1000.0,
                )
            )
    finally:
        writer.finalize(meta)
    return MetricsFile.load(cfg.out)


def _thread_budget() -> int:
    raw = os.environ.get("HIERADMM_THREADS")
    if raw:
        return max(1, int(raw))
    return os.cpu_count() or 1


def sweep_configs(base_values: dict, sweep_params: dict, out_dir):
    """Cartesian product of sweep_params over the base config values."""
    os.makedirs(out_dir, exist_ok=True)
    keys = sorted(sweep_params)
    configs = []
    for combo in itertools.product(*(sweep_params[k] for k in keys)):
        values = dict(base_values)
        values.update(dict(zip(keys, combo)))
        stem = "__".join(f"{k}-{v}" for k, v in zip(keys, combo)) or "run"
        fmt = values.get("metrics_format", base_values.get("metrics_format", "csv"))
        suffix = "jsonl" if fmt == "jsonl" else "csv"
        values["out"] = os.path.join(out_dir, f"{stem}.{suffix}")
        configs.append(build_experiment_config(values))
    return configs


def run_sweep(base_values: dict, sweep_params: dict, out_dir):
    """Run every combination; returns the metrics files in combo order."""
    configs = sweep_configs(base_values, sweep_params, out_dir)
    workers = min(_thread_budget(), len(configs)) or 1
    if workers == 1:
        return [run_experiment(c) for c in configs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_experiment, configs))
