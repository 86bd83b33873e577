"""End-to-end frame timing against the motion-to-photon budget.

One frame passes through seven serial stages (sense, encode, uplink,
compute, render, downlink, display); their durations come from the device
spec, the payload sizes, and the link rate (fixed override or Shannon
capacity of the configured channel).  A sensing mask shrinks the sense
stage, a ray budget shrinks the render stage.  The module also produces the
required-rate table: what data rate each payload/window pair demands and
whether today's 0.1-2.0 Gbps network peak band can carry it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .channel import shannon_capacity, required_rate
from .errors import ValidationError
from .rendering import RayBudget
from .scenario import LatencyBudget, PayloadSpec, RateCase, ScenarioConfig, payload_bits
from .sensing import MaskGrid

STAGES = ("sense", "encode", "uplink", "compute", "render", "downlink", "display")

#: Peak throughput range of deployed networks, bits/second.
NETWORK_PEAK_LOW = 0.1e9
NETWORK_PEAK_HIGH = 2.0e9


@dataclass(frozen=True)
class StageTiming:
    stage: str
    duration: float

    def __post_init__(self):
        if self.stage not in STAGES:
            raise ValidationError("stage", f"unknown stage {self.stage!r}")
        if not math.isfinite(self.duration) or self.duration < 0:
            raise ValidationError(f"stage.{self.stage}", "duration must be finite and >= 0")


@dataclass(frozen=True)
class PipelineTrace:
    stages: tuple[StageTiming, ...]

    def __post_init__(self):
        names = tuple(s.stage for s in self.stages)
        if names != STAGES:
            raise ValidationError("trace.stages", f"must appear in pipeline order {STAGES}")

    @property
    def total(self) -> float:
        # fixed left-to-right summation so the total is bit-reproducible
        total = 0.0
        for s in self.stages:
            total += s.duration
        return total

    def duration_of(self, stage: str) -> float:
        for s in self.stages:
            if s.stage == stage:
                return s.duration
        raise ValidationError("stage", f"unknown stage {stage!r}")


@dataclass(frozen=True)
class BudgetReport:
    trace: PipelineTrace
    budget: float
    passed: bool
    slack: float

    def __post_init__(self):
        if self.passed != (self.trace.total <= self.budget):
            raise ValidationError("passed", "must equal (total <= budget)")


def link_rate_of(cfg: ScenarioConfig) -> float:
    """Fixed link-rate override when configured, else channel capacity."""
    if cfg.link_rate is not None:
        return cfg.link_rate
    return shannon_capacity(cfg.channel.bandwidth_hz, cfg.channel.snr_db)


def simulate_frame(cfg: ScenarioConfig, mask: MaskGrid | None = None,
                   budget: RayBudget | None = None) -> PipelineTrace:
    """Time one frame through all seven stages.

    A mask replaces the frame's sensor sample count with its active-cell
    count; a ray budget replaces the render sample count with its total.
    Deterministic given the scenario (the link rate is the configured fixed
    rate or the analytic capacity; no noise is drawn here).
    """
    rate = link_rate_of(cfg)
    if rate <= 0 or not math.isfinite(rate):
        raise ValidationError("stage.uplink", f"link rate must be finite and > 0, got {rate}")

    sense_samples = mask.active_count if mask is not None else cfg.default_sense_samples()
    render_samples = budget.total if budget is not None else cfg.render_samples

    durations = {
        "sense": sense_samples / cfg.device.sensor_throughput,
        "encode": cfg.device.encode_time,
        "uplink": payload_bits(cfg.uplink_payload) / rate,
        "compute": cfg.device.compute_time,
        "render": render_samples / cfg.device.render_throughput,
        "downlink": payload_bits(cfg.downlink_payload) / rate,
        "display": cfg.device.display_time,
    }
    stages = []
    for name in STAGES:
        d = durations[name]
        if not math.isfinite(d) or d < 0:
            raise ValidationError(f"stage.{name}", f"duration must be finite and >= 0, got {d}")
        stages.append(StageTiming(stage=name, duration=d))
    return PipelineTrace(stages=tuple(stages))


def check_budget(trace: PipelineTrace, budget: LatencyBudget) -> BudgetReport:
    """Compare a trace against the motion-to-photon budget (inclusive)."""
    total = trace.total
    return BudgetReport(
        trace=trace,
        budget=budget.motion_to_photon,
        passed=total <= budget.motion_to_photon,
        slack=budget.motion_to_photon - total,
    )


def uplink_window(budget: LatencyBudget, other_stage_total: float) -> float:
    """Time left for the uplink once every other stage has taken its share."""
    window = budget.motion_to_photon - other_stage_total
    if window <= 0:
        raise ValidationError(
            "other_stage_total", "leaves no uplink window inside the latency budget"
        )
    return window


@dataclass(frozen=True)
class RateRow:
    label: str
    payload_bits: float
    window_s: float
    required_rate_bps: float
    feasible: bool  # within the deployed network's peak band


def rate_requirements_table(cases) -> list[RateRow]:
    """Required data rate per (payload, window), flagged against the peak band.

    ``cases`` yields :class:`semxr.scenario.RateCase` entries or
    (label, payload, window) triples.  A row is feasible when its rate does
    not exceed the top of the 0.1-2.0 Gbps peak band.
    """
    rows = []
    for case in cases:
        if isinstance(case, RateCase):
            label, payload, window = case.label, case.payload, case.window_s
        else:
            label, payload, window = case
        bits = payload_bits(payload)
        rate = required_rate(bits, window)
        rows.append(
            RateRow(
                label=label,
                payload_bits=bits,
                window_s=window,
                required_rate_bps=rate,
                feasible=rate <= NETWORK_PEAK_HIGH,
            )
        )
    return rows
