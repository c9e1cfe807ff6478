"""Hyperparameter and experiment configuration.

The config-file format is deliberately dumb: one `key = value` per line,
`#` comments, and an exhaustive unknown-key error so a misspelled sigma or
mu fails loudly instead of silently running the default.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from enum import Enum

from .exceptions import ConfigError


class Algorithm(str, Enum):
    HIERFED = "hierfed"
    HIERFADMM = "hierfadmm"
    HIERF2ADMM = "hierf2admm"


@dataclass(frozen=True)
class TauSchedule:
    """Number of intra-set iterations per global round.

    fixed:   tau(t) = tau0
    growing: tau(t) = tau0 + floor(growth_rate * t), unbounded for rate > 0
    """

    mode: str = "fixed"
    tau0: int = 6
    growth_rate: float = 0.0

    def __post_init__(self):
        if self.mode not in ("fixed", "growing"):
            raise ConfigError(f"unknown tau mode {self.mode!r}")
        if self.tau0 < 1:
            raise ConfigError("tau0 must be >= 1")
        if self.growth_rate < 0:
            raise ConfigError("tau growth_rate must be >= 0")


def tau_for_round(sched: TauSchedule, t: int) -> int:
    if t < 0:
        raise ValueError("round index must be >= 0")
    if sched.mode == "fixed":
        return sched.tau0
    return sched.tau0 + int(math.floor(sched.growth_rate * t))


@dataclass(frozen=True)
class HierConfig:
    """All hyperparameters of one hierarchical training run.

    Defaults follow the reference setting: C=5, N_c=30, mu=0.01,
    sigma_c=sigma_kc=0.1, tau=6.

    cloud_agg / edge_agg override the algorithm's default aggregation rule
    ("weighted" substitutes the plain data-size-weighted average); they
    exist for the degenerate sigma=0 reductions and are not exposed on the
    CLI.
    """

    algorithm: Algorithm = Algorithm.HIERFADMM
    n_sets: int = 5
    clients_per_set: tuple = (30,) * 5
    local_steps: int = 4
    tau: TauSchedule = field(default_factory=TauSchedule)
    mu: float = 0.01
    sigma_c: float = 0.1
    sigma_kc: float = 0.1
    lam: float = 0.001
    rounds: int = 100
    seed: int = 0
    reset_multipliers: bool = False
    cloud_agg: str | None = None
    edge_agg: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "algorithm", Algorithm(self.algorithm))
        if isinstance(self.clients_per_set, int):
            object.__setattr__(
                self, "clients_per_set", (self.clients_per_set,) * self.n_sets
            )
        else:
            object.__setattr__(self, "clients_per_set", tuple(self.clients_per_set))
        if len(self.clients_per_set) != self.n_sets:
            raise ConfigError("clients_per_set length must equal n_sets")
        if any(n < 1 for n in self.clients_per_set):
            raise ConfigError("every set needs at least one client")
        if self.local_steps < 1 or self.rounds < 0:
            raise ConfigError("local_steps >= 1 and rounds >= 0 required")
        if self.mu <= 0:
            raise ConfigError("mu must be positive")
        if self.lam < 0:
            raise ConfigError("lambda must be nonnegative")
        if self.algorithm != Algorithm.HIERFED and self.sigma_c < 0:
            raise ConfigError("sigma_c must be nonnegative")
        if self.cloud_agg not in (None, "weighted"):
            raise ConfigError(f"unknown cloud_agg {self.cloud_agg!r}")
        if self.edge_agg not in (None, "weighted"):
            raise ConfigError(f"unknown edge_agg {self.edge_agg!r}")

    @property
    def n_clients(self) -> int:
        return sum(self.clients_per_set)


@dataclass(frozen=True)
class ExperimentConfig:
    """A fully reproducible experiment: hyperparameters plus data plumbing."""

    hier: HierConfig = field(default_factory=HierConfig)
    data: str = "synthetic"  # "synthetic" or "adult:PATH"
    partition: str = "iid"  # "iid" or "single-class"
    samples_per_client: int = 40
    d_features: int = 15
    separation: float = 2.0
    size_min: int = 50
    size_max: int = 200
    out: str = "metrics.csv"
    metrics_format: str = "csv"  # "csv" or "jsonl"

    def __post_init__(self):
        if self.partition not in ("iid", "single-class"):
            raise ConfigError(f"unknown partition {self.partition!r}")
        if self.metrics_format not in ("csv", "jsonl"):
            raise ConfigError(f"unknown metrics_format {self.metrics_format!r}")
        if not (
            self.data == "synthetic" or self.data.startswith("adult:")
        ):
            raise ConfigError("data must be 'synthetic' or 'adult:PATH'")
        if self.size_min < 1 or self.size_max < self.size_min:
            raise ConfigError("need 1 <= size_min <= size_max")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["hier"]["algorithm"] = self.hier.algorithm.value
        d["hier"]["clients_per_set"] = list(self.hier.clients_per_set)
        return d


# --- flat key=value config files -------------------------------------------

_BOOL = {"true": True, "false": False, "1": True, "0": False}


def _parse_bool(raw: str) -> bool:
    try:
        return _BOOL[raw.lower()]
    except KeyError:
        raise ConfigError(f"expected a boolean, got {raw!r}") from None


def _parse_int_tuple(raw: str):
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    vals = tuple(int(p) for p in parts)
    return vals[0] if len(vals) == 1 else vals


# key -> (attribute path, parser)
CONFIG_KEYS = {
    "algorithm": ("hier.algorithm", str),
    "sets": ("hier.n_sets", int),
    "clients_per_set": ("hier.clients_per_set", _parse_int_tuple),
    "local_steps": ("hier.local_steps", int),
    "tau": ("hier.tau0", int),
    "tau_growing": ("hier.tau_growing", float),
    "mu": ("hier.mu", float),
    "sigma_c": ("hier.sigma_c", float),
    "sigma_kc": ("hier.sigma_kc", float),
    "lambda": ("hier.lam", float),
    "rounds": ("hier.rounds", int),
    "seed": ("hier.seed", int),
    "reset_multipliers": ("hier.reset_multipliers", _parse_bool),
    "data": ("data", str),
    "partition": ("partition", str),
    "samples_per_client": ("samples_per_client", int),
    "d_features": ("d_features", int),
    "separation": ("separation", float),
    "size_min": ("size_min", int),
    "size_max": ("size_max", int),
    "out": ("out", str),
    "metrics_format": ("metrics_format", str),
}


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse a flat key=value config into a {key: typed value} dict."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        _, parser = CONFIG_KEYS[key]
        try:
            values[key] = parser(raw)
        except (ValueError, ConfigError) as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key}: {exc}")
    return values


def load_config_file(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read(), source=str(path))


def build_experiment_config(values: dict) -> ExperimentConfig:
    """Assemble an ExperimentConfig from a flat key->value dict."""
    hier_kwargs = {}
    exp_kwargs = {}
    tau0 = None
    tau_growing = None
    for key, val in values.items():
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown key {key!r}")
        target, _ = CONFIG_KEYS[key]
        if target == "hier.tau0":
            tau0 = val
        elif target == "hier.tau_growing":
            tau_growing = val
        elif target.startswith("hier."):
            hier_kwargs[target[len("hier."):]] = val
        else:
            exp_kwargs[target] = val
    if "n_sets" in hier_kwargs and "clients_per_set" not in hier_kwargs:
        hier_kwargs["clients_per_set"] = 30
    if tau0 is not None or tau_growing is not None:
        if tau_growing:
            hier_kwargs["tau"] = TauSchedule(
                mode="growing", tau0=tau0 if tau0 is not None else 1,
                growth_rate=tau_growing,
            )
        else:
            hier_kwargs["tau"] = TauSchedule(
                mode="fixed", tau0=tau0 if tau0 is not None else 6
            )
    return ExperimentConfig(hier=HierConfig(**hier_kwargs), **exp_kwargs)
