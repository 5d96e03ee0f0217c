"""Workload description and run reports for the caller simulation."""

from __future__ import annotations

import dataclasses
import io
import json
import math
from dataclasses import dataclass, field


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class WorkloadSpec:
    """One experiment: N callers issuing task requests in a closed loop.

    Each caller runs `requests_per_caller` tasks back to back, always
    waiting for the response (parked connection when sync, callback
    when async) before issuing the next. A delayed request models slow
    human turnaround: the result arrives `delay_s` after the service
    window instead of at its end.

    `memory_pressure_s` is the contention model: every response is
    slowed by `memory_pressure_s * S**2` seconds, where S counts live
    instances that finished their service window but still await the
    user. Passivation evicts exactly those, which is the effect the
    experiment measures.
    """

    n: int = 100
    requests_per_caller: int = 10
    sync_fraction: float = 0.0
    service_time_s: float = 2.0
    delayed_fraction: float = 0.2
    delay_s: float = 60.0
    passivation: bool = True
    worker_bound: int = 1000
    idle_threshold_s: float = 4.0
    sweep_interval_s: float = 1.0
    memory_pressure_s: float = 6e-5
    seed: int = 1206

    @classmethod
    def from_mapping(cls, raw: dict) -> "WorkloadSpec":
        """Build a validated spec from parsed TOML; unknown keys fault."""
        fields = {f.name for f in dataclasses.fields(cls)}
        unknown = set(raw) - fields
        if unknown:
            raise SpecError(f"unknown key(s): {', '.join(sorted(unknown))}")
        coerced = {}
        for name, value in raw.items():
            kind = cls.__dataclass_fields__[name].type
            if kind == "int":
                coerced[name] = int(value)
            elif kind == "float":
                coerced[name] = float(value)
            elif kind == "bool":
                if not isinstance(value, bool):
                    raise SpecError(f"{name} must be true or false")
                coerced[name] = value
            else:
                coerced[name] = value
        return cls(**coerced).validate()

    def validate(self) -> "WorkloadSpec":
        if self.n < 1:
            raise SpecError("n must be at least 1")
        if self.requests_per_caller < 1:
            raise SpecError("requests_per_caller must be at least 1")
        for name in ("sync_fraction", "delayed_fraction"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise SpecError(f"{name} must be within [0, 1], got {value}")
        if self.service_time_s <= 0 or self.delay_s < 0:
            raise SpecError("service_time_s must be positive, delay_s non-negative")
        if self.worker_bound < 1:
            raise SpecError("worker_bound must be at least 1")
        if self.idle_threshold_s <= self.service_time_s:
            raise SpecError(
                "idle_threshold_s must exceed service_time_s or every "
                "request would passivate mid-service"
            )
        return self

    @property
    def total_requests(self) -> int:
        return self.n * self.requests_per_caller

    @property
    def mode_label(self) -> str:
        if self.sync_fraction == 0.0:
            return "async"
        if self.sync_fraction == 1.0:
            return "sync"
        return f"mixed-{self.sync_fraction:g}"


CSV_HEADER = "N,mode,passivation,ART_s,p95_s,peak_live"


@dataclass
class RunReport:
    n: int
    mode: str
    passivation: bool
    issued: int
    completed: int
    faulted: int
    backpressured: int
    art_s: float
    p95_s: float
    peak_live: int
    live_instance_seconds: float
    passivations: int
    restores: int
    # Caller-observed latency per request, in issue order; delayed
    # requests are included here but excluded from art_s and p95_s.
    latencies: list[float] = field(default_factory=list)
    delayed_indices: list[int] = field(default_factory=list)

    def csv_row(self) -> str:
        return (
            f"{self.n},{self.mode},{'on' if self.passivation else 'off'},"
            f"{self.art_s:.6f},{self.p95_s:.6f},{self.peak_live}"
        )

    def to_json(self) -> bytes:
        record = {
            "n": self.n,
            "mode": self.mode,
            "passivation": self.passivation,
            "issued": self.issued,
            "completed": self.completed,
            "faulted": self.faulted,
            "backpressured": self.backpressured,
            "art_s": self.art_s,
            "p95_s": self.p95_s,
            "peak_live": self.peak_live,
            "live_instance_seconds": self.live_instance_seconds,
            "passivations": self.passivations,
            "restores": self.restores,
            "latencies": self.latencies,
            "delayed_indices": self.delayed_indices,
        }
        return json.dumps(record, sort_keys=True, separators=(",", ":")).encode("utf-8")


def summarize(latencies: list[float], delayed: set[int]) -> tuple[float, float]:
    """(mean, p95) over the non-delayed latencies."""
    sample = [lat for i, lat in enumerate(latencies) if i not in delayed]
    if not sample:
        return 0.0, 0.0
    ordered = sorted(sample)
    mean = sum(ordered) / len(ordered)
    p95 = ordered[max(0, math.ceil(0.95 * len(ordered)) - 1)]
    return mean, p95


def write_csv(reports: list[RunReport], out) -> None:
    """Write the sweep table; `out` is a text stream or a path."""
    if not hasattr(out, "write"):
        with open(out, "w", encoding="utf-8", newline="") as fh:
            write_csv(reports, fh)
        return
    out.write(CSV_HEADER + "\n")
    for report in reports:
        out.write(report.csv_row() + "\n")


def render_csv(reports: list[RunReport]) -> str:
    buffer = io.StringIO()
    write_csv(reports, buffer)
    return buffer.getvalue()
