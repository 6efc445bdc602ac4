"""Machine ceilings, arithmetic intensity, and boundedness classification.

Attainable performance is min(compute peak, memory bandwidth x intensity);
the ridge point peak/bandwidth separates memory- from compute-bound.  The
bundled machine config carries V100-class numbers as editable inputs, not
measured claims.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

from .errors import EmptyInput, NonPositiveTime, UnknownPrecision, ZeroTotalTime
from .model import KernelRecord

PRECISIONS = ("double", "single", "half")

MEMORY_BOUND = "memory_bound"
COMPUTE_BOUND = "compute_bound"
AT_RIDGE = "at_ridge"

DEFAULT_TRANSACTION_BYTES = 32


@dataclass(frozen=True)
class MachineModel:
    name: str
    peaks: dict[str, float]            # precision -> GFLOP/s
    mem_bandwidth_gbps: float
    extra_bandwidths: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for precision, peak in self.peaks.items():
            if not peak > 0:
                raise ValueError(f"peak({precision}) must be > 0")
        if not self.mem_bandwidth_gbps > 0:
            raise ValueError("mem_bandwidth_gbps must be > 0")
        for label, bw in self.extra_bandwidths.items():
            if not bw > 0:
                raise ValueError(f"bandwidth {label!r} must be > 0")
        ladder = [self.peaks.get(p) for p in ("double", "single", "half")]
        known = [p for p in ladder if p is not None]
        if known != sorted(known):
            warnings.warn(
                f"{self.name}: expected peak(half) >= peak(single) >= peak(double)",
                stacklevel=2,
            )

    def ridge(self, precision: str) -> float:
        return self.peak(precision) / self.mem_bandwidth_gbps

    def peak(self, precision: str) -> float:
        if precision not in self.peaks:
            raise UnknownPrecision(f"{self.name} has no {precision!r} peak")
        return self.peaks[precision]


def machine_from_dict(data: dict) -> MachineModel:
    return MachineModel(
        name=str(data["name"]),
        peaks={k: float(v) for k, v in data["peaks"].items()},
        mem_bandwidth_gbps=float(data["mem_bandwidth_gbps"]),
        extra_bandwidths={
            k: float(v) for k, v in data.get("extra_bandwidths", {}).items()
        },
    )


@dataclass(frozen=True)
class RooflinePoint:
    name: str
    intensity: float       # FLOPs/byte
    throughput: float      # GFLOP/s
    precision: str = "single"


def intensity(flops: int, transactions: int, transaction_bytes: int = DEFAULT_TRANSACTION_BYTES) -> float:
    """FLOPs per byte of memory traffic; zero traffic with work is +inf."""
    if not transaction_bytes > 0:
        raise ValueError("transaction_bytes must be > 0")
    if transactions == 0:
        if flops == 0:
            return 0.0
        warnings.warn("nonzero FLOPs over zero transactions: infinite intensity", stacklevel=2)
        return math.inf
    return flops / (transactions * transaction_bytes)


def throughput(flops: int, time_s: float) -> float:
    """GFLOP/s over the measured interval."""
    if not time_s > 0:
        raise NonPositiveTime(f"time_s must be > 0, got {time_s}")
    return flops / time_s / 1e9


def attainable(machine: MachineModel, precision: str, intensity: float) -> float:
    """Roofline ceiling at the given intensity."""
    if intensity < 0:
        raise ValueError("intensity must be >= 0")
    peak = machine.peak(precision)
    return min(peak, machine.mem_bandwidth_gbps * intensity)


def classify(machine: MachineModel, precision: str, point: RooflinePoint) -> str:
    """memory_bound / compute_bound split at the ridge (relative 1e-9 band)."""
    ridge = machine.ridge(precision)
    if abs(point.intensity - ridge) <= 1e-9 * ridge:
        return AT_RIDGE
    return MEMORY_BOUND if point.intensity < ridge else COMPUTE_BOUND


def workload_point(
    records: Sequence[KernelRecord],
    transaction_bytes: int = DEFAULT_TRANSACTION_BYTES,
    name: str = "workload",
    precision: str = "single",
) -> RooflinePoint:
    """Aggregate one workload's kernel classes into a single roofline point."""
    if not records:
        raise EmptyInput("workload_point needs at least one record")
    total_flops = sum(r.flops for r in records)
    total_transactions = sum(r.transactions for r in records)
    total_time_s = math.fsum(r.time_ms for r in records) / 1e3
    if total_time_s == 0:
        raise ZeroTotalTime(f"{name}: zero total kernel time")
    return RooflinePoint(
        name=name,
        intensity=intensity(total_flops, total_transactions, transaction_bytes),
        throughput=throughput(total_flops, total_time_s),
        precision=precision,
    )
