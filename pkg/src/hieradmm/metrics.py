"""Metrics emission, re-parsing, and run comparison.

One record per global round (record 0 is the initial state). CSV is the
default; JSON-lines is the alternative. A sidecar JSON next to the
metrics file echoes the full experiment config and the dataset
fingerprint, so a run is reproducible from the pair of files alone.

wall_ms is environment noise and is excluded from the determinism digest.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .exceptions import IncomparableRuns

HEADER = "t,objective,consensus_residual,stationarity_residual,tau_used,wall_ms"
COLUMNS = HEADER.split(",")


def _fmt(value) -> str:
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def sidecar_path(path) -> str:
    return str(path) + ".meta.json"


@dataclass
class MetricsRow:
    t: int
    objective: float
    consensus_residual: float
    stationarity_residual: float
    tau_used: int
    wall_ms: float

    def as_dict(self) -> dict:
        return {
            "t": self.t,
            "objective": self.objective,
            "consensus_residual": self.consensus_residual,
            "stationarity_residual": self.stationarity_residual,
            "tau_used": self.tau_used,
            "wall_ms": self.wall_ms,
        }


class MetricsWriter:
    """Incremental writer; a crash loses at most the in-flight round."""

    def __init__(self, path, fmt: str = "csv"):
        if fmt not in ("csv", "jsonl"):
            raise ValueError(f"unknown metrics format {fmt!r}")
        self.path = str(path)
        self.fmt = fmt
        self._fh = open(self.path, "w", encoding="utf-8", newline="\n")
        if fmt == "csv":
            self._fh.write(HEADER + "\n")
            self._fh.flush()

    def write_row(self, row: MetricsRow) -> None:
        if self.fmt == "csv":
            line = ",".join(
                [
                    str(row.t),
                    _fmt(row.objective),
                    _fmt(row.consensus_residual),
                    _fmt(row.stationarity_residual),
                    str(row.tau_used),
                    "%.3f" % row.wall_ms,
                ]
            )
        else:
            line = json.dumps(row.as_dict())
        self._fh.write(line + "\n")
        self._fh.flush()

    def finalize(self, meta: dict) -> None:
        self._fh.close()
        with open(sidecar_path(self.path), "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")

    def close(self) -> None:
        if not self._fh.closed:
            self._fh.close()


@dataclass
class MetricsFile:
    """A parsed metrics file plus its sidecar metadata."""

    path: str
    rows: list
    meta: dict

    @classmethod
    def load(cls, path) -> "MetricsFile":
        path = str(path)
        with open(sidecar_path(path), "r", encoding="utf-8") as fh:
            meta = json.load(fh)
        rows = []
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln for ln in fh.read().splitlines() if ln]
        if path.endswith(".jsonl") or (lines and lines[0].startswith("{")):
            for ln in lines:
                rec = json.loads(ln)
                rows.append(MetricsRow(**rec))
        else:
            if not lines or lines[0] != HEADER:
                raise ValueError(f"{path}: unexpected metrics header")
            for ln in lines[1:]:
                parts = ln.split(",")
                rows.append(
                    MetricsRow(
                        t=int(parts[0]),
                        objective=float(parts[1]),
                        consensus_residual=float(parts[2]),
                        stationarity_residual=float(parts[3]),
                        tau_used=int(parts[4]),
                        wall_ms=float(parts[5]),
                    )
                )
        return cls(path=path, rows=rows, meta=meta)

    @property
    def diverged(self) -> bool:
        return bool(self.meta.get("diverged", False))

    def objective_at(self, t: int):
        for row in self.rows:
            if row.t == t:
                return row.objective
        return None

    def determinism_payload(self) -> bytes:
        """Row data with wall_ms dropped, plus config/fingerprint meta.

        The output path is excluded too, so reruns writing to different
        files still compare equal when the runs themselves agree.
        """
        stripped = [
            {k: v for k, v in row.as_dict().items() if k != "wall_ms"}
            for row in self.rows
        ]
        meta = {k: v for k, v in self.meta.items() if k != "wall_total_ms"}
        if isinstance(meta.get("config"), dict):
            meta["config"] = {
                k: v for k, v in meta["config"].items() if k != "out"
            }
        return json.dumps({"rows": stripped, "meta": meta}, sort_keys=True).encode()


@dataclass
class RunComparison:
    at_round: int
    entries: list  # (path, objective or None, diverged) sorted ascending
    gaps: list  # pairwise gaps between consecutive sorted entries

    def render(self) -> str:
        lines = [f"comparison at round {self.at_round}:"]
        for path, obj, diverged in self.entries:
            tag = " [DIVERGED]" if diverged else ""
            shown = "inf" if obj is None else repr(obj)
            lines.append(f"  {shown}{tag}  {path}")
        for (a, _, _), (b, _, _), gap in zip(
            self.entries, self.entries[1:], self.gaps
        ):
            lines.append(f"  gap({b} - {a}) = {gap!r}")
        return "\n".join(lines)


def compare_runs(files, at_round: int) -> RunComparison:
    """Order runs by objective at a round; fingerprints must match."""
    files = list(files)
    if not files:
        raise ValueError("nothing to compare")
    fingerprints = {
        json.dumps(f.meta.get("fingerprint"), sort_keys=True) for f in files
    }
    if len(fingerprints) > 1:
        raise IncomparableRuns("dataset fingerprints differ across runs")
    entries = []
    for f in files:
        obj = f.objective_at(at_round)
        if obj is None and not f.diverged:
            raise IncomparableRuns(f"{f.path} has no record at round {at_round}")
        entries.append((f.path, obj, f.diverged))
    entries.sort(key=lambda e: float("inf") if e[1] is None else e[1])
    gaps = []
    for (_, a, _), (_, b, _) in zip(entries, entries[1:]):
        if a is None or b is None:
            gaps.append(float("inf"))
        else:
            gaps.append(b - a)
    return RunComparison(at_round=at_round, entries=entries, gaps=gaps)
