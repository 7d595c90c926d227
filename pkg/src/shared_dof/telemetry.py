"""Session recording, per-run metrics, and benchmark reports.

Tick records serialize to JSON Lines with a fixed key order and default
float repr, so identical sessions produce byte-identical logs.  Metrics
are accumulated online (no record buffering needed for long runs) and
aggregated per variant into a small CSV plus a human-readable report.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import ReportError
from .geometry import Pose, Twist

TICK_FIELDS = (
    "tick",
    "sim_time_s",
    "gripper",
    "twist",
    "mapping_source",
    "suggestion_epoch",
    "suggestion_confidence",
    "events",
    "phase",
)

METRIC_FIELDS = (
    "variant",
    "scenario",
    "seed",
    "policy",
    "success",
    "completion_time_s",
    "ticks",
    "user_switches",
    "auto_switches",
    "path_length_m",
    "idle_time_s",
)

AGGREGATE_HEADER = ("variant", "completion_time_s", "user_switches",
                    "auto_switches", "path_length_m", "success_rate")


@dataclass(frozen=True)
class TickRecord:
    tick: int
    sim_time_s: float
    gripper: Pose
    twist: Twist
    mapping_source: dict
    suggestion_epoch: int | None
    suggestion_confidence: float | None
    events: tuple
    phase: str

    def to_dict(self) -> dict:
        return {
            "tick": self.tick,
            "sim_time_s": self.sim_time_s,
            "gripper": self.gripper.to_dict(),
            "twist": self.twist.to_dict(),
            "mapping_source": dict(self.mapping_source),
            "suggestion_epoch": self.suggestion_epoch,
            "suggestion_confidence": self.suggestion_confidence,
            "events": [dict(e) for e in self.events],
            "phase": self.phase,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))


def write_jsonl(path, records) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(rec.to_json())
            fh.write("\n")


def read_jsonl(path) -> list:
    out = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out


@dataclass(frozen=True)
class Metrics:
    variant: str
    scenario: str
    seed: int
    policy: str
    success: bool
    completion_time_s: float  # nan when the task did not finish
    ticks: int
    user_switches: int
    auto_switches: int
    path_length_m: float
    idle_time_s: float

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in METRIC_FIELDS}


class RunningMetrics:
    """Online accumulator fed one tick at a time by the runner."""

    def __init__(self, variant: str, scenario: str, seed: int, policy: str):
        self.variant = variant
        self.scenario = scenario
        self.seed = seed
        self.policy = policy
        self._ticks = 0
        self._user_switches = 0
        self._auto_switches = 0
        self._path_length = 0.0
        self._idle_time = 0.0
        self._completion_time = math.nan
        self._success = False
        self._last_position = None

    def observe(self, record: TickRecord, dt: float) -> None:
        self._ticks = record.tick + 1
        pos = record.gripper.position
        if self._last_position is not None:
            delta = pos - self._last_position
            self._path_length += float(math.sqrt(float(delta @ delta)))
        self._last_position = pos
        if record.twist.is_zero():
            self._idle_time += dt
        for event in record.events:
            if event.get("type") == "MappingAdopted":
                if event.get("by") == "auto":
                    self._auto_switches += 1
                else:
                    self._user_switches += 1
            elif event.get("type") == "TaskDone":
                self._success = True
                self._completion_time = record.sim_time_s

    def finish(self) -> Metrics:
        return Metrics(
            variant=self.variant,
            scenario=self.scenario,
            seed=self.seed,
            policy=self.policy,
            success=self._success,
            completion_time_s=self._completion_time,
            ticks=self._ticks,
            user_switches=self._user_switches,
            auto_switches=self._auto_switches,
            path_length_m=self._path_length,
            idle_time_s=self._idle_time,
        )


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return repr(value)
    return str(value)


def metrics_csv(runs) -> str:
    """Per-run CSV, one row per session."""
    lines = [",".join(METRIC_FIELDS)]
    for m in runs:
        lines.append(",".join(_fmt(getattr(m, name))
                              for name in METRIC_FIELDS))
    return "\n".join(lines) + "\n"


def _mean(values) -> float:
    values = list(values)
    if not values:
        return math.nan
    return sum(values) / len(values)


@dataclass(frozen=True)
class VariantSummary:
    variant: str
    runs: int
    success_rate: float
    completion_time_s: float  # mean over successful runs
    user_switches: float
    auto_switches: float
    path_length_m: float
    idle_time_s: float


def summarize(runs) -> dict:
    """Group per-run metrics by variant and average them."""
    by_variant: dict = {}
    for m in runs:
        by_variant.setdefault(m.variant, []).append(m)
    out = {}
    for variant in sorted(by_variant):
        group = by_variant[variant]
        done = [m for m in group if m.success]
        out[variant] = VariantSummary(
            variant=variant,
            runs=len(group),
            success_rate=len(done) / len(group),
            completion_time_s=_mean(m.completion_time_s for m in done),
            user_switches=_mean(m.user_switches for m in group),
            auto_switches=_mean(m.auto_switches for m in group),
            path_length_m=_mean(m.path_length_m for m in group),
            idle_time_s=_mean(m.idle_time_s for m in group),
        )
    return out


def aggregate_csv(summaries: dict) -> str:
    lines = [",".join(AGGREGATE_HEADER)]
    for variant in sorted(summaries):
        s = summaries[variant]
        lines.append(",".join([
            s.variant,
            _fmt(s.completion_time_s),
            _fmt(s.user_switches),
            _fmt(s.auto_switches),
            _fmt(s.path_length_m),
            _fmt(s.success_rate),
        ]))
    return "\n".join(lines) + "\n"


def compare(summaries: dict) -> dict:
    """Ratios of each variant against the classic baseline."""
    if "classic" not in summaries:
        raise ReportError("comparison needs a classic baseline run")
    base = summaries["classic"]
    out = {}
    for variant in sorted(summaries):
        if variant == "classic":
            continue
        s = summaries[variant]
        time_ratio = (s.completion_time_s / base.completion_time_s
                      if base.completion_time_s and
                      not math.isnan(base.completion_time_s) else math.nan)
        out[variant] = {
            "time_ratio": time_ratio,
            "user_switches": s.user_switches,
            "baseline_user_switches": base.user_switches,
            "success_rate": s.success_rate,
        }
    return out


def text_report(summaries: dict) -> str:
    """Plain-text benchmark summary with baseline ratios."""
    lines = ["benchmark summary", "================="]
    for variant in sorted(summaries):
        s = summaries[variant]
        lines.append(
            f"{s.variant}: runs={s.runs} success={s.success_rate:.2f} "
            f"time={s.completion_time_s:.2f}s switches="
            f"{s.user_switches:.1f}+{s.auto_switches:.1f}auto "
            f"path={s.path_length_m:.3f}m idle={s.idle_time_s:.2f}s")
    if "classic" in summaries:
        lines.append("")
        lines.append("vs classic")
        lines.append("----------")
        for variant, row in compare(summaries).items():
            lines.append(
                f"{variant}: time_ratio={row['time_ratio']:.3f} "
                f"switches {row['user_switches']:.1f} vs "
                f"{row['baseline_user_switches']:.1f}")
    lines.append("")
    lines.append("perceived_workload: n/a")
    return "\n".join(lines) + "\n"
