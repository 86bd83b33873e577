import json
import math

import numpy as np
import pytest

from semxr.errors import ValidationError
from semxr.pipeline import (
    BudgetReport,
    PipelineTrace,
    StageTiming,
    check_budget,
    link_rate_of,
    rate_requirements_table,
    simulate_frame,
    uplink_window,
)
from semxr.scenario import (
    BlobPayload,
    FeaturesPayload,
    ImagePayload,
    LatencyBudget,
    load_scenario,
)
from semxr.sensing import MaskGrid, SensorGrid


def scenario_all_stages_1ms():
    return load_scenario(
        json.dumps(
            {
                "device": {
                    "sensor_throughput": 1e6,
                    "render_throughput": 1e9,
                    "compute_time": 0.001,
                    "display_time": 0.001,
                    "encode_time": 0.001,
                },
                "uplink_payload": {"kind": "blob", "bits": 1e6},
                "downlink_payload": {"kind": "blob", "bits": 1e6},
                "channel": {"bandwidth_hz": 1000, "snr_db": 10},
                "link_rate": 1e9,
                "sense_samples": 1000,
                "render_samples": 1e6,
            }
        )
    )


def test_trace_all_stages_one_ms():
    trace = simulate_frame(scenario_all_stages_1ms())
    assert [s.duration for s in trace.stages] == [0.001] * 7
    assert trace.total == 0.001 * 7
    report = check_budget(trace, LatencyBudget(0.010))
    assert report.passed
    assert report.slack == pytest.approx(0.003)


def test_trace_total_is_exact_left_to_right_sum():
    trace = simulate_frame(scenario_all_stages_1ms())
    total = 0.0
    for s in trace.stages:
        total += s.duration
    assert trace.total == total


def test_mask_scales_sense_stage_linearly():
    cfg = load_scenario(
        json.dumps(
            {
                "device": {"sensor_throughput": 1e6, "render_throughput": 1e9},
                "uplink_payload": {"kind": "blob", "bits": 1e6},
                "downlink_payload": {"kind": "blob", "bits": 1e6},
                "channel": {"bandwidth_hz": 1000, "snr_db": 10},
                "link_rate": 1e9,
                "sense_samples": 16,
            }
        )
    )
    unmasked = simulate_frame(cfg)
    grid = SensorGrid(1, 4, 4)
    active = np.zeros((1, 4, 4), dtype=bool)
    active[0, 0, :] = True  # 4 of 16 cells -> 75% sparsity
    masked = simulate_frame(cfg, mask=MaskGrid(grid, active))
    assert masked.duration_of("sense") == 0.25 * unmasked.duration_of("sense")


def test_fixed_rate_uplink_reproduces_paper_window(casestudy1):
    trace = simulate_frame(casestudy1)
    assert link_rate_of(casestudy1) == 1.28e9
    assert trace.duration_of("uplink") == 1.6e6 / 1.28e9  # 1.25 ms
    assert trace.duration_of("uplink") == pytest.approx(1.25e-3, rel=1e-12)


def test_semantic_uplink_dominates_traditional(casestudy1):
    from dataclasses import replace

    traditional = simulate_frame(casestudy1)
    semantic = simulate_frame(
        replace(casestudy1, uplink_payload=FeaturesPayload(85, 32))
    )
    for t_stage, s_stage in zip(traditional.stages, semantic.stages):
        assert s_stage.duration <= t_stage.duration
    assert semantic.duration_of("uplink") < traditional.duration_of("uplink")


def test_simulate_frame_deterministic(casestudy1):
    a = simulate_frame(casestudy1)
    b = simulate_frame(casestudy1)
    assert [s.duration for s in a.stages] == [s.duration for s in b.stages]


def test_check_budget_boundary_inclusive():
    stages = [StageTiming("sense", 0.010)] + [
        StageTiming(name, 0.0)
        for name in ("encode", "uplink", "compute", "render", "downlink", "display")
    ]
    trace = PipelineTrace(tuple(stages))
    report = check_budget(trace, LatencyBudget(0.010))
    assert report.passed
    assert report.slack == 0.0


def test_check_budget_overrun():
    stages = [StageTiming("sense", 0.012)] + [
        StageTiming(name, 0.0)
        for name in ("encode", "uplink", "compute", "render", "downlink", "display")
    ]
    report = check_budget(PipelineTrace(tuple(stages)), LatencyBudget(0.010))
    assert not report.passed
    assert report.slack == pytest.approx(-0.002)


def test_trace_rejects_wrong_order_and_negative_durations():
    with pytest.raises(ValidationError):
        StageTiming("sense", -1.0)
    with pytest.raises(ValidationError):
        StageTiming("sense", math.nan)
    with pytest.raises(ValidationError):
        PipelineTrace((StageTiming("display", 0.0),))


def test_budget_report_invariant():
    stages = tuple(StageTiming(name, 0.001) for name in
                   ("sense", "encode", "uplink", "compute", "render", "downlink", "display"))
    trace = PipelineTrace(stages)
    with pytest.raises(ValidationError):
        BudgetReport(trace=trace, budget=0.010, passed=False, slack=0.003)


def test_uplink_window_arithmetic():
    assert uplink_window(LatencyBudget(0.010), 0.00875) == pytest.approx(1.25e-3, rel=1e-9)
    assert uplink_window(LatencyBudget(0.010), 0.0) == 0.010
    with pytest.raises(ValidationError):
        uplink_window(LatencyBudget(0.010), 0.010)
    with pytest.raises(ValidationError):
        uplink_window(LatencyBudget(0.010), 0.011)


def test_rate_requirements_table_paper_rows(casestudy1):
    rows = rate_requirements_table(casestudy1.rate_cases)
    by_label = {r.label: r for r in rows}

    image = by_label["uplink_2k_image_bpg"]
    assert image.payload_bits == 1_600_000.0
    assert image.required_rate_bps == 1.28e9
    assert image.feasible  # just inside the 2 Gbps peak

    features = by_label["uplink_semantic_features"]
    assert features.payload_bits == 2720.0
    assert features.required_rate_bps == pytest.approx(2.176e6)
    assert features.feasible
    assert image.payload_bits / features.payload_bits >= 580

    model = by_label["downlink_3d_model_ply"]
    assert model.required_rate_bps == pytest.approx(3.0e10, rel=0.02)
    assert not model.feasible

    frame = by_label["downlink_24k_frame"]
    assert frame.required_rate_bps == 5.0e10
    assert not frame.feasible


def test_rate_requirements_accepts_tuples():
    rows = rate_requirements_table(
        [("img", ImagePayload(2_000_000, 0.8), 1.25e-3), ("blob", BlobPayload(1e6), 1e-3)]
    )
    assert rows[0].required_rate_bps == 1.28e9
    assert rows[1].required_rate_bps == 1e9


def test_simulate_frame_uses_capacity_without_override():
    cfg = load_scenario(
        json.dumps(
            {
                "device": {"sensor_throughput": 1e6, "render_throughput": 1e9},
                "uplink_payload": {"kind": "blob", "bits": 1000},
                "downlink_payload": {"kind": "blob", "bits": 1000},
                "channel": {"bandwidth_hz": 1000, "snr_db": 0},
            }
        )
    )
    trace = simulate_frame(cfg)
    assert trace.duration_of("uplink") == 1.0  # 1000 bits over 1000 bits/s
