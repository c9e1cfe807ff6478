"""Dataset synthesis, Adult Census Income ingestion, and client partitioning.

The Adult pipeline is the minimal conventional one: drop rows with missing
("?") fields, standardize continuous columns over the loaded split,
one-hot encode categoricals against a frozen vocabulary (unseen values go
to a reserved "other" slot), map income ">50K" to label 1, and append a
constant-1 bias coordinate. The vocabulary is frozen in the FeatureSpec so
the model dimension is stable across runs.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .config import HierConfig
from .exceptions import (
    EmptyAfterFiltering,
    InsufficientClassSamples,
    MalformedRow,
    TooFewSamples,
)
from .objective import Dataset
from .state import ClientShard, CloudState, EdgeGroup


@dataclass(frozen=True)
class PartitionPlan:
    """client_id -> sample indices; disjoint, every client nonempty."""

    assignments: dict
    regime: str  # "iid" or "single-class"
    seed: int

    def __post_init__(self):
        seen = set()
        normalized = {}
        for cid, idx in self.assignments.items():
            arr = np.asarray(idx, dtype=np.intp)
            if arr.size < 1:
                raise ValueError(f"client {cid} received no samples")
            overlap = seen.intersection(arr.tolist())
            if overlap:
                raise ValueError(f"indices assigned twice: {sorted(overlap)[:5]}")
            seen.update(arr.tolist())
            normalized[cid] = arr
        object.__setattr__(self, "assignments", normalized)


@dataclass(frozen=True)
class FeatureSpec:
    """Column layout of a CSV source and the encoding it induces.

    columns: all field names in file order (label included).
    continuous: names standardized to zero mean / unit variance.
    categorical: (name, vocabulary) pairs; each gets len(vocab)+1 one-hot
    slots, the extra one reserved for unseen values.
    """

    columns: tuple
    continuous: tuple
    categorical: tuple  # ((name, (cat, ...)), ...)
    label_column: str
    positive_label: str = ">50K"

    @property
    def dim(self) -> int:
        one_hot = sum(len(vocab) + 1 for _, vocab in self.categorical)
        return len(self.continuous) + one_hot + 1  # +1 bias


ADULT_SPEC = FeatureSpec(
    columns=(
        "age", "workclass", "fnlwgt", "education", "education-num",
        "marital-status", "occupation", "relationship", "race", "sex",
        "capital-gain", "capital-loss", "hours-per-week", "native-country",
        "income",
    ),
    continuous=(
        "age", "fnlwgt", "education-num", "capital-gain", "capital-loss",
        "hours-per-week",
    ),
    categorical=(
        ("workclass", (
            "Private", "Self-emp-not-inc", "Self-emp-inc", "Federal-gov",
            "Local-gov", "State-gov", "Without-pay", "Never-worked",
        )),
        ("education", (
            "Bachelors", "Some-college", "11th", "HS-grad", "Prof-school",
            "Assoc-acdm", "Assoc-voc", "9th", "7th-8th", "12th", "Masters",
            "1st-4th", "10th", "Doctorate", "5th-6th", "Preschool",
        )),
        ("marital-status", (
            "Married-civ-spouse", "Divorced", "Never-married", "Separated",
            "Widowed", "Married-spouse-absent", "Married-AF-spouse",
        )),
        ("occupation", (
            "Tech-support", "Craft-repair", "Other-service", "Sales",
            "Exec-managerial", "Prof-specialty", "Handlers-cleaners",
            "Machine-op-inspct", "Adm-clerical", "Farming-fishing",
            "Transport-moving", "Priv-house-serv", "Protective-serv",
            "Armed-Forces",
        )),
        ("relationship", (
            "Wife", "Own-child", "Husband", "Not-in-family", "Other-relative",
            "Unmarried",
        )),
        ("race", (
            "White", "Asian-Pac-Islander", "Amer-Indian-Eskimo", "Other",
            "Black",
        )),
        ("sex", ("Female", "Male")),
        ("native-country", (
            "United-States", "Cambodia", "England", "Puerto-Rico", "Canada",
            "Germany", "Outlying-US(Guam-USVI-etc)", "India", "Japan",
            "Greece", "South", "China", "Cuba", "Iran", "Honduras",
            "Philippines", "Italy", "Poland", "Jamaica", "Vietnam", "Mexico",
            "Portugal", "Ireland", "France", "Dominican-Republic", "Laos",
            "Ecuador", "Taiwan", "Haiti", "Columbia", "Hungary", "Guatemala",
            "Nicaragua", "Scotland", "Thailand", "Yugoslavia", "El-Salvador",
            "Trinadad&Tobago", "Peru", "Hong", "Holand-Netherlands",
        )),
    ),
    label_column="income",
)


def load_adult_csv(path, spec: FeatureSpec = ADULT_SPEC) -> Dataset:
    """Load a UCI adult.data-layout CSV into an encoded Dataset."""
    col_index = {name: i for i, name in enumerate(spec.columns)}
    label_i = col_index[spec.label_column]
    kept_rows = []
    with open(path, "r", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            fields = [f.strip() for f in row]
            if not fields or fields == [""]:
                continue
            if fields[0].startswith("|"):  # adult.test banner line
                continue
            if len(fields) != len(spec.columns):
                raise MalformedRow(
                    f"expected {len(spec.columns)} fields, got {len(fields)}",
                    lineno,
                )
            if "?" in fields:
                continue
            for name in spec.continuous:
                try:
                    float(fields[col_index[name]])
                except ValueError:
                    raise MalformedRow(
                        f"non-numeric value in column {name!r}", lineno
                    ) from None
            kept_rows.append(fields)
    if not kept_rows:
        raise EmptyAfterFiltering(f"no usable rows in {path}")

    n = len(kept_rows)
    cont = np.array(
        [[float(r[col_index[name]]) for name in spec.continuous] for r in kept_rows]
    )
    mean = cont.mean(axis=0)
    std = cont.std(axis=0)
    std[std == 0.0] = 1.0
    cont = (cont - mean) / std

    blocks = [cont]
    for name, vocab in spec.categorical:
        slot = {cat: j for j, cat in enumerate(vocab)}
        width = len(vocab) + 1
        block = np.zeros((n, width))
        for i, r in enumerate(kept_rows):
            block[i, slot.get(r[col_index[name]], width - 1)] = 1.0
        blocks.append(block)
    blocks.append(np.ones((n, 1)))

    features = np.hstack(blocks)
    labels = np.array(
        [
            1.0 if r[label_i].rstrip(".") == spec.positive_label else 0.0
            for r in kept_rows
        ]
    )
    return Dataset(features, labels)


def synthesize_dataset(seed: int, n: int, d_features: int, separation: float) -> Dataset:
    """Seeded logistic synthetic data with a bias-1 coordinate appended.

    Labels are Bernoulli(sigmoid(separation * <a, w_true>)) with w_true
    drawn once from the seeded standard normal.
    """
    if n < 2 or d_features < 1:
        raise ValueError("need n >= 2 and d_features >= 1")
    rng = np.random.default_rng(seed)
    w_true = rng.standard_normal(d_features)
    feats = rng.standard_normal((n, d_features))
    p = expit(separation * (feats @ w_true))
    labels = (rng.random(n) < p).astype(np.float64)
    features = np.hstack([feats, np.ones((n, 1))])
    return Dataset(features, labels)


def partition_iid(data: Dataset, num_clients: int, seed: int) -> PartitionPlan:
    """Seeded shuffle, then contiguous near-equal split (sizes differ <= 1)."""
    n = len(data)
    if n < num_clients:
        raise TooFewSamples(f"{n} samples for {num_clients} clients")
    perm = np.random.default_rng(seed).permutation(n)
    base, extra = divmod(n, num_clients)
    assignments = {}
    start = 0
    for cid in range(num_clients):
        size = base + (1 if cid < extra else 0)
        assignments[cid] = perm[start:start + size]
        start += size
    return PartitionPlan(assignments=assignments, regime="iid", seed=seed)


def partition_single_class(
    data: Dataset, num_clients: int, seed: int, size_range=(50, 200)
) -> PartitionPlan:
    """Label-pure shards with seeded sizes drawn uniformly from size_range.

    Clients alternate labels by id so both classes stay covered.
    """
    lo, hi = size_range
    labels = data.labels
    pools = {
        0: np.flatnonzero(labels == 0.0),
        1: np.flatnonzero(labels == 1.0),
    }
    if pools[0].size == 0 or pools[1].size == 0:
        raise InsufficientClassSamples("both labels must be present")
    rng = np.random.default_rng(seed)
    pools = {lab: rng.permutation(idx) for lab, idx in pools.items()}
    cursor = {0: 0, 1: 0}
    assignments = {}
    for cid in range(num_clients):
        lab = cid % 2
        size = int(rng.integers(lo, hi + 1))
        start = cursor[lab]
        if start + size > pools[lab].size:
            raise InsufficientClassSamples(
                f"label {lab} pool exhausted at client {cid}"
            )
        assignments[cid] = pools[lab][start:start + size]
        cursor[lab] = start + size
    return PartitionPlan(assignments=assignments, regime="single-class", seed=seed)


def build_cloud_state(data: Dataset, plan: PartitionPlan, cfg: HierConfig) -> CloudState:
    """Assemble shards and groups; client ids fill sets in order."""
    if len(plan.assignments) != cfg.n_clients:
        raise ValueError(
            f"plan covers {len(plan.assignments)} clients, config wants {cfg.n_clients}"
        )
    d = data.dim
    zero = np.zeros(d)
    groups = []
    cid = 0
    for set_id, n_c in enumerate(cfg.clients_per_set):
        clients = []
        for _ in range(n_c):
            clients.append(
                ClientShard(
                    client_id=cid,
                    set_id=set_id,
                    samples=data.subset(plan.assignments[cid]),
                    w_local=zero,
                    pi_local=zero,
                    sigma_kc=cfg.sigma_kc,
                )
            )
            cid += 1
        groups.append(
            EdgeGroup(
                set_id=set_id,
                clients=tuple(clients),
                w_set=zero,
                pi_set=zero,
                sigma_c=cfg.sigma_c,
            )
        )
    return CloudState(w_global=zero, groups=tuple(groups))


def dataset_fingerprint(data: Dataset) -> dict:
    """Stable content hash for reproducibility audits and run comparison."""
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(data.features).tobytes())
    h.update(np.ascontiguousarray(data.labels).tobytes())
    return {"n": len(data), "d": data.dim, "sha256": h.hexdigest()}
