"""Command-line entry point: run / sweep / compare / oracle."""

from __future__ import annotations

import argparse
import json
import sys

from .config import build_experiment_config, load_config_file
from .data import dataset_fingerprint
from .exceptions import HierAdmmError
from .harness import build_dataset, run_experiment, run_sweep
from .metrics import MetricsFile, compare_runs
from .objective import RegParams
from .oracle import centralized_oracle

# CLI flag -> config-file key (values given on the command line win)
_FLAG_KEYS = [
    ("algorithm", "algorithm"),
    ("seed", "seed"),
    ("out", "out"),
    ("rounds", "rounds"),
    ("local_steps", "local_steps"),
    ("intra_iters", "tau"),
    ("tau_growing", "tau_growing"),
    ("sets", "sets"),
    ("clients_per_set", "clients_per_set"),
    ("mu", "mu"),
    ("sigma_c", "sigma_c"),
    ("sigma_kc", "sigma_kc"),
    ("lam", "lambda"),
    ("data", "data"),
    ("partition", "partition"),
    ("samples_per_client", "samples_per_client"),
    ("d_features", "d_features"),
    ("separation", "separation"),
    ("metrics_format", "metrics_format"),
]


def _add_experiment_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument(
        "--algorithm", choices=["hierfed", "hierfadmm", "hierf2admm"]
    )
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out")
    parser.add_argument("--rounds", type=int)
    parser.add_argument("--local-steps", type=int, dest="local_steps")
    parser.add_argument("--intra-iters", type=int, dest="intra_iters")
    parser.add_argument("--tau-growing", type=float, dest="tau_growing")
    parser.add_argument("--sets", type=int)
    parser.add_argument("--clients-per-set", type=int, dest="clients_per_set")
    parser.add_argument("--mu", type=float)
    parser.add_argument("--sigma-c", type=float, dest="sigma_c")
    parser.add_argument("--sigma-kc", type=float, dest="sigma_kc")
    parser.add_argument("--lambda", type=float, dest="lam")
    parser.add_argument("--data", help="'synthetic' or 'adult:PATH'")
    parser.add_argument("--partition", choices=["iid", "single-class"])
    parser.add_argument("--samples-per-client", type=int, dest="samples_per_client")
    parser.add_argument("--d-features", type=int, dest="d_features")
    parser.add_argument("--separation", type=float)
    parser.add_argument("--metrics-format", choices=["csv", "jsonl"],
                        dest="metrics_format")


def _collect_values(args) -> dict:
    values = {}
    if args.config:
        values.update(load_config_file(args.config))
    for attr, key in _FLAG_KEYS:
        val = getattr(args, attr, None)
        if val is not None:
            values[key] = val
    return values


def _parse_sweep_param(raw: str):
    if "=" not in raw:
        raise HierAdmmError(f"--param expects KEY=V1,V2,..., got {raw!r}")
    key, vals = raw.split("=", 1)
    from .config import CONFIG_KEYS

    key = key.strip()
    if key not in CONFIG_KEYS:
        raise HierAdmmError(f"unknown sweep key {key!r}")
    _, parser = CONFIG_KEYS[key]
    return key, [parser(v.strip()) for v in vals.split(",") if v.strip()]


def cmd_run(args) -> int:
    cfg = build_experiment_config(_collect_values(args))
    result = run_experiment(cfg)
    last = result.rows[-1]
    status = "diverged" if result.diverged else "ok"
    print(
        f"{status} rounds={last.t} objective={last.objective!r} out={result.path}"
    )
    return 0


def cmd_sweep(args) -> int:
    base = _collect_values(args)
    base.pop("out", None)
    sweep_params = {}
    for raw in args.param or []:
        key, vals = _parse_sweep_param(raw)
        sweep_params[key] = vals
    results = run_sweep(base, sweep_params, args.out_dir)
    for res in results:
        last = res.rows[-1]
        status = "diverged" if res.diverged else "ok"
        print(f"{status} objective={last.objective!r} out={res.path}")
    return 0


def cmd_compare(args) -> int:
    files = [MetricsFile.load(p) for p in args.metrics]
    at_round = args.at_round
    if at_round is None:
        at_round = min(f.rows[-1].t for f in files)
    report = compare_runs(files, at_round)
    print(report.render())
    return 0


def cmd_oracle(args) -> int:
    cfg = build_experiment_config(_collect_values(args))
    data = build_dataset(cfg)
    result = centralized_oracle(
        data, RegParams(cfg.hier.lam), max_iters=args.max_iters, tol=args.tol
    )
    payload = {
        "f_opt": result.f_opt,
        "grad_norm": result.grad_norm,
        "iterations": result.iterations,
        "converged": result.converged,
        "fingerprint": dataset_fingerprint(data),
        "w_opt": result.w_opt.tolist(),
    }
    out = args.out or "oracle.json"
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    print(f"f_opt={result.f_opt!r} converged={result.converged} out={out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hieradmm",
        description="Two-layer hierarchical federated learning simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment")
    _add_experiment_flags(p_run)
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="cartesian sweep over parameters")
    _add_experiment_flags(p_sweep)
    p_sweep.add_argument(
        "--param", action="append", metavar="KEY=V1,V2", help="swept values"
    )
    p_sweep.add_argument("--out-dir", required=True, dest="out_dir")
    p_sweep.set_defaults(func=cmd_sweep)

    p_cmp = sub.add_parser("compare", help="order runs by objective")
    p_cmp.add_argument("metrics", nargs="+", help="metrics files")
    p_cmp.add_argument("--at-round", type=int, dest="at_round")
    p_cmp.set_defaults(func=cmd_compare)

    p_orc = sub.add_parser("oracle", help="centralized reference optimum")
    _add_experiment_flags(p_orc)
    p_orc.add_argument("--max-iters", type=int, default=5000, dest="max_iters")
    p_orc.add_argument("--tol", type=float, default=1e-8)
    p_orc.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except HierAdmmError as exc:
        sys.stderr.write(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n"
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
