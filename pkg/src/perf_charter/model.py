"""Domain types and dataset ingestion (CSV/JSON) shared by all analyses.

File schemas:
  profiles.csv  header ``name,suite,<metric names>``; JSON mirror is a list of
                flat objects with the same field names.
  jobs.csv      header ``name,t1_minutes,s2,s4,...`` (any ``s<k>`` columns).
  kernels.csv   header ``class,time_ms,calls,unique,flops,transactions``.

All parsers take decoded text; UTF-8 decoding and path handling live in the
CLI.  Everything here is pure over immutable inputs.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    DuplicateJobName,
    DuplicateWorkloadName,
    EmptyInput,
    MalformedRow,
    NonNumericCell,
    NonPositiveSpeedup,
    NonPositiveTime,
    TooFewWorkloads,
)

# The closed, ordered metric set; extras (e.g. nvlink_mbps) sort after these
# in first-appearance order.
CANONICAL_METRICS = (
    "pcie_util_pct",
    "gpu_util_pct",
    "cpu_util_pct",
    "ddr_footprint_mb",
    "hbm2_footprint_mb",
    "flop_throughput_gflops",
    "mem_throughput_gbps",
    "epochs",
)

_CANONICAL_INDEX = {name: i for i, name in enumerate(CANONICAL_METRICS)}


def is_canonical_metric(name: str) -> bool:
    return name in _CANONICAL_INDEX


def metric_order_key(name: str, appearance: int = 0) -> tuple[int, int]:
    """Sort key: the canonical eight first (fixed order), extras after."""
    if name in _CANONICAL_INDEX:
        return (0, _CANONICAL_INDEX[name])
    return (1, appearance)


class Suite(str, enum.Enum):
    MLPERF = "MLPerf"
    DAWNBENCH = "DAWNBench"
    DEEPBENCH = "DeepBench"
    OTHER = "Other"

    @classmethod
    def from_label(cls, label: str) -> "Suite":
        for member in cls:
            if member.value.lower() == label.strip().lower():
                return member
        return cls.OTHER


@dataclass(frozen=True)
class WorkloadProfile:
    """One benchmark's named metric vector (units vary per metric name)."""

    name: str
    suite: Suite
    metrics: dict[str, float]

    def __post_init__(self):
        for metric, value in self.metrics.items():
            if not math.isfinite(value):
                raise ValueError(f"{self.name}: metric {metric!r} is not finite")
            if value < 0:
                raise ValueError(f"{self.name}: metric {metric!r} is negative")


@dataclass
class MetricMatrix:
    """Row-per-workload, column-per-metric matrix with no missing cells."""

    workload_names: list[str]
    metric_names: list[str]
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (len(self.workload_names), len(self.metric_names)):
            raise ValueError(
                f"values shape {self.values.shape} does not match "
                f"{len(self.workload_names)} workloads x {len(self.metric_names)} metrics"
            )

    def __eq__(self, other):
        if not isinstance(other, MetricMatrix):
            return NotImplemented
        return (
            self.workload_names == other.workload_names
            and self.metric_names == other.metric_names
            and np.array_equal(self.values, other.values)
        )

    def row(self, workload: str) -> np.ndarray:
        return self.values[self.workload_names.index(workload)]

    def column(self, metric: str) -> np.ndarray:
        return self.values[:, self.metric_names.index(metric)]


@dataclass(frozen=True)
class KernelRecord:
    """Aggregated profiler statistics for one kernel class."""

    class_name: str
    time_ms: float
    calls: int
    unique_kernels: int
    flops: int
    transactions: int

    def __post_init__(self):
        if self.time_ms < 0:
            raise ValueError(f"{self.class_name}: negative time")
        if self.flops < 0 or self.transactions < 0:
            raise ValueError(f"{self.class_name}: negative counters")


@dataclass(frozen=True)
class Job:
    """Moldable training job: single-device minutes plus speedup per width."""

    name: str
    t1_minutes: float
    speedup: dict[int, float]

    def __post_init__(self):
        if not self.t1_minutes > 0:
            raise NonPositiveTime(f"{self.name}: t1_minutes must be > 0")
        if 1 in self.speedup and self.speedup[1] != 1.0:
            raise ValueError(f"{self.name}: width-1 speedup must be 1.0")
        for width, value in self.speedup.items():
            if not (isinstance(width, int) and width >= 1):
                raise ValueError(f"{self.name}: bad width {width!r}")
            if not value > 0:
                raise NonPositiveSpeedup(f"{self.name}: speedup at width {width} must be > 0")
        normalized = {1: 1.0}
        normalized.update(sorted(self.speedup.items()))
        normalized[1] = 1.0
        object.__setattr__(self, "speedup", normalized)


# --- profiles ---------------------------------------------------------------


def _parse_value(cell: str, line: int, column: str) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise NonNumericCell(line, column, cell) from None
    if not math.isfinite(value):
        raise MalformedRow(line, f"column {column!r}: non-finite value {cell!r}")
    return value


def parse_workload_profiles(text: str, format: str = "csv") -> list[WorkloadProfile]:
    """Ingest per-workload metric rows; missing cells stay absent per profile."""
    if format == "csv":
        return _profiles_from_csv(text)
    if format == "json":
        return _profiles_from_json(text)
    raise ValueError(f"unknown format {format!r}")


def _profiles_from_csv(text: str) -> list[WorkloadProfile]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedRow(1, "empty input") from None
    header = [h.strip() for h in header]
    if len(header) < 2 or header[0] != "name" or header[1] != "suite":
        raise MalformedRow(1, "header must start with 'name,suite'")
    metric_cols = header[2:]
    if len(set(metric_cols)) != len(metric_cols):
        raise MalformedRow(1, "duplicate metric column")
    profiles: list[WorkloadProfile] = []
    seen: set[str] = set()
    for line_no, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise MalformedRow(line_no, f"expected {len(header)} fields, got {len(row)}")
        name = row[0].strip()
        if not name:
            raise MalformedRow(line_no, "empty workload name")
        if name in seen:
            raise DuplicateWorkloadName(name)
        seen.add(name)
        metrics: dict[str, float] = {}
        for col, cell in zip(metric_cols, row[2:]):
            cell = cell.strip()
            if cell == "":
                continue  # missing -> column dropped later
            metrics[col] = _parse_value(cell, line_no, col)
        try:
            profiles.append(WorkloadProfile(name, Suite.from_label(row[1]), metrics))
        except ValueError as exc:
            raise MalformedRow(line_no, str(exc)) from None
    return profiles


def _profiles_from_json(text: str) -> list[WorkloadProfile]:
    entries = json.loads(text)
    if not isinstance(entries, list):
        raise MalformedRow(1, "JSON profiles must be a list of objects")
    profiles: list[WorkloadProfile] = []
    seen: set[str] = set()
    for idx, entry in enumerate(entries, start=1):
        if not isinstance(entry, dict) or "name" not in entry:
            raise MalformedRow(idx, "entry must be an object with a 'name'")
        name = str(entry["name"])
        if name in seen:
            raise DuplicateWorkloadName(name)
        seen.add(name)
        suite = Suite.from_label(str(entry.get("suite", "Other")))
        metrics: dict[str, float] = {}
        for key, value in entry.items():
            if key in ("name", "suite") or value is None:
                continue
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise NonNumericCell(idx, key, repr(value))
            metrics[key] = float(value)
        try:
            profiles.append(WorkloadProfile(name, suite, metrics))
        except ValueError as exc:
            raise MalformedRow(idx, str(exc)) from None
    return profiles


def matrix_from_profiles(profiles: list[WorkloadProfile]) -> MetricMatrix:
    """Tabulate profiles; drops (with a warning) any metric absent somewhere."""
    if len(profiles) < 2:
        raise TooFewWorkloads(f"need at least 2 workloads, got {len(profiles)}")
    appearance: dict[str, int] = {}
    for profile in profiles:
        for metric in profile.metrics:
            appearance.setdefault(metric, len(appearance))
    ordered = sorted(appearance, key=lambda m: metric_order_key(m, appearance[m]))
    kept, dropped = [], []
    for metric in ordered:
        if all(metric in p.metrics for p in profiles):
            kept.append(metric)
        else:
            dropped.append(metric)
    if dropped:
        warnings.warn(
            f"dropped metric column(s) missing for >=1 workload: {', '.join(dropped)}",
            stacklevel=2,
        )
    values = np.array(
        [[p.metrics[m] for m in kept] for p in profiles], dtype=np.float64
    ).reshape(len(profiles), len(kept))
    return MetricMatrix([p.name for p in profiles], kept, values)


def parse_profiles(text: str, format: str = "csv") -> MetricMatrix:
    return matrix_from_profiles(parse_workload_profiles(text, format))


def serialize_profiles(
    matrix: MetricMatrix, format: str = "csv", suites: dict[str, Suite] | None = None
) -> str:
    suites = suites or {}
    if format == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["name", "suite", *matrix.metric_names])
        for i, name in enumerate(matrix.workload_names):
            suite = suites.get(name, Suite.OTHER).value
            writer.writerow([name, suite, *[repr(float(v)) for v in matrix.values[i]]])
        return out.getvalue()
    if format == "json":
        entries = []
        for i, name in enumerate(matrix.workload_names):
            entry: dict = {"name": name, "suite": suites.get(name, Suite.OTHER).value}
            for j, metric in enumerate(matrix.metric_names):
                entry[metric] = float(matrix.values[i, j])
            entries.append(entry)
        return json.dumps(entries, indent=2) + "\n"
    raise ValueError(f"unknown format {format!r}")


# --- jobs --------------------------------------------------------------------


def parse_jobs(text: str, format: str = "csv") -> list[Job]:
    """Ingest the scalability table; width-1 speedup 1.0 is implied."""
    if format == "csv":
        return _jobs_from_csv(text)
    if format == "json":
        return _jobs_from_json(text)
    raise ValueError(f"unknown format {format!r}")


def _width_from_column(col: str, line: int) -> int:
    if not (col.startswith("s") and col[1:].isdigit() and int(col[1:]) >= 1):
        raise MalformedRow(line, f"speedup column must look like 's<k>', got {col!r}")
    return int(col[1:])


def _jobs_from_csv(text: str) -> list[Job]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise MalformedRow(1, "empty input") from None
    if len(header) < 2 or header[0] != "name" or header[1] != "t1_minutes":
        raise MalformedRow(1, "header must start with 'name,t1_minutes'")
    widths = [_width_from_column(col, 1) for col in header[2:]]
    if len(set(widths)) != len(widths):
        raise MalformedRow(1, "duplicate speedup column")
    jobs: list[Job] = []
    seen: set[str] = set()
    for line_no, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise MalformedRow(line_no, f"expected {len(header)} fields, got {len(row)}")
        name = row[0].strip()
        if not name:
            raise MalformedRow(line_no, "empty job name")
        if name in seen:
            raise DuplicateJobName(name)
        seen.add(name)
        t1 = _parse_value(row[1].strip(), line_no, "t1_minutes")
        if not t1 > 0:
            raise NonPositiveTime(f"line {line_no}: t1_minutes must be > 0")
        speedup: dict[int, float] = {}
        for width, cell in zip(widths, row[2:]):
            cell = cell.strip()
            if cell == "":
                continue
            value = _parse_value(cell, line_no, f"s{width}")
            if not value > 0:
                raise NonPositiveSpeedup(f"line {line_no}: s{width} must be > 0")
            if width == 1 and value != 1.0:
                raise MalformedRow(line_no, "width-1 speedup must be 1.0")
            speedup[width] = value
        jobs.append(Job(name, t1, speedup))
    return jobs


def _jobs_from_json(text: str) -> list[Job]:
    entries = json.loads(text)
    if not isinstance(entries, list):
        raise MalformedRow(1, "JSON jobs must be a list of objects")
    jobs: list[Job] = []
    seen: set[str] = set()
    for idx, entry in enumerate(entries, start=1):
        if not isinstance(entry, dict) or "name" not in entry or "t1_minutes" not in entry:
            raise MalformedRow(idx, "entry must carry 'name' and 't1_minutes'")
        name = str(entry["name"])
        if name in seen:
            raise DuplicateJobName(name)
        seen.add(name)
        t1 = float(entry["t1_minutes"])
        if not t1 > 0:
            raise NonPositiveTime(f"entry {idx}: t1_minutes must be > 0")
        speedup: dict[int, float] = {}
        for key, value in entry.items():
            if key in ("name", "t1_minutes") or value is None:
                continue
            width = _width_from_column(key, idx)
            value = float(value)
            if not value > 0:
                raise NonPositiveSpeedup(f"entry {idx}: {key} must be > 0")
            if width == 1 and value != 1.0:
                raise MalformedRow(idx, "width-1 speedup must be 1.0")
            speedup[width] = value
        jobs.append(Job(name, t1, speedup))
    return jobs


def serialize_jobs(jobs: list[Job], format: str = "csv") -> str:
    widths = sorted({w for job in jobs for w in job.speedup} - {1})
    if format == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["name", "t1_minutes", *[f"s{w}" for w in widths]])
        for job in jobs:
            cells = [repr(float(job.speedup[w])) if w in job.speedup else "" for w in widths]
            writer.writerow([job.name, repr(float(job.t1_minutes)), *cells])
        return out.getvalue()
    if format == "json":
        entries = []
        for job in jobs:
            entry: dict = {"name": job.name, "t1_minutes": float(job.t1_minutes)}
            for w in sorted(job.speedup):
                if w != 1:
                    entry[f"s{w}"] = float(job.speedup[w])
            entries.append(entry)
        return json.dumps(entries, indent=2) + "\n"
    raise ValueError(f"unknown format {format!r}")


# --- kernels -----------------------------------------------------------------

_KERNEL_FIELDS = ("class", "time_ms", "calls", "unique", "flops", "transactions")


def parse_kernels(text: str, format: str = "csv") -> list[KernelRecord]:
    if format == "csv":
        return _kernels_from_csv(text)
    if format == "json":
        return _kernels_from_json(text)
    raise ValueError(f"unknown format {format!r}")


def _parse_count(cell: str, line: int, column: str) -> int:
    try:
        return int(cell)
    except ValueError:
        raise NonNumericCell(line, column, cell) from None


def _kernels_from_csv(text: str) -> list[KernelRecord]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = tuple(h.strip() for h in next(reader))
    except StopIteration:
        raise MalformedRow(1, "empty input") from None
    if header != _KERNEL_FIELDS:
        raise MalformedRow(1, f"header must be {','.join(_KERNEL_FIELDS)}")
    records: list[KernelRecord] = []
    for line_no, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(_KERNEL_FIELDS):
            raise MalformedRow(line_no, f"expected {len(_KERNEL_FIELDS)} fields, got {len(row)}")
        try:
            records.append(
                KernelRecord(
                    class_name=row[0].strip(),
                    time_ms=_parse_value(row[1].strip(), line_no, "time_ms"),
                    calls=_parse_count(row[2].strip(), line_no, "calls"),
                    unique_kernels=_parse_count(row[3].strip(), line_no, "unique"),
                    flops=_parse_count(row[4].strip(), line_no, "flops"),
                    transactions=_parse_count(row[5].strip(), line_no, "transactions"),
                )
            )
        except ValueError as exc:
            raise MalformedRow(line_no, str(exc)) from None
    return records


def _kernels_from_json(text: str) -> list[KernelRecord]:
    entries = json.loads(text)
    if not isinstance(entries, list):
        raise MalformedRow(1, "JSON kernels must be a list of objects")
    records: list[KernelRecord] = []
    for idx, entry in enumerate(entries, start=1):
        if not isinstance(entry, dict) or "class" not in entry:
            raise MalformedRow(idx, "entry must be an object with a 'class'")
        try:
            records.append(
                KernelRecord(
                    class_name=str(entry["class"]),
                    time_ms=float(entry["time_ms"]),
                    calls=int(entry["calls"]),
                    unique_kernels=int(entry["unique"]),
                    flops=int(entry["flops"]),
                    transactions=int(entry["transactions"]),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedRow(idx, str(exc)) from None
    return records


def serialize_kernels(records: list[KernelRecord], format: str = "csv") -> str:
    if format == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(_KERNEL_FIELDS)
        for r in records:
            writer.writerow(
                [r.class_name, repr(float(r.time_ms)), r.calls, r.unique_kernels, r.flops, r.transactions]
            )
        return out.getvalue()
    if format == "json":
        entries = [
            {
                "class": r.class_name,
                "time_ms": float(r.time_ms),
                "calls": r.calls,
                "unique": r.unique_kernels,
                "flops": r.flops,
                "transactions": r.transactions,
            }
            for r in records
        ]
        return json.dumps(entries, indent=2) + "\n"
    raise ValueError(f"unknown format {format!r}")


def kernel_summary(
    records: list[KernelRecord], transaction_bytes: int = 32
) -> tuple[int, int, float]:
    """Totals over kernel classes: (flops, bytes, seconds).

    Bytes are transactions x transaction_bytes (32 B default).  The time sum
    uses fsum, so the result is invariant under row permutation.
    """
    if not records:
        raise EmptyInput("kernel_summary needs at least one record")
    total_flops = sum(r.flops for r in records)
    total_bytes = sum(r.transactions for r in records) * transaction_bytes
    total_time_s = math.fsum(r.time_ms for r in records) / 1e3
    return total_flops, total_bytes, total_time_s
