import json

import pytest

from semxr.cli import run
from semxr.sensing import mask_from_rle_json

from conftest import parse_report_csv, parse_report_json

SUBCOMMANDS = ["budget", "sweep", "sense", "render", "simulate", "broadcast"]


def scenario_for(command: str) -> str:
    # casestudy2 carries the broadcast section; casestudy1 everything else
    return "casestudy2" if command == "broadcast" else "casestudy1"


def test_budget_contains_the_key_rate_row(tmp_path):
    out = tmp_path / "rates.csv"
    assert run(["budget", "--scenario", "casestudy1", "--out", str(out), "--quiet"]) == 0
    rows = parse_report_csv(out.read_text())
    by_label = {r["label"]: r for r in rows}
    assert by_label["uplink_2k_image_bpg"]["payload_bits"] == 1_600_000.0
    assert by_label["uplink_2k_image_bpg"]["required_rate_bps"] == 1.28e9
    assert by_label["downlink_24k_frame"]["feasible"] is False


@pytest.mark.parametrize("command", SUBCOMMANDS)
def test_runs_twice_byte_identical(command, tmp_path):
    paths = []
    for i in (1, 2):
        out = tmp_path / f"{command}_{i}.csv"
        status = run(
            [
                command,
                "--scenario",
                scenario_for(command),
                "--seed",
                "7",
                "--out",
                str(out),
                "--quiet",
            ]
        )
        assert status == 0
        paths.append(out)
    assert paths[0].read_bytes() == paths[1].read_bytes()


@pytest.mark.parametrize("command", SUBCOMMANDS)
def test_csv_and_json_reports_carry_the_same_rows(command, tmp_path):
    outputs = {}
    for fmt in ("csv", "json"):
        out = tmp_path / f"r.{fmt}"
        assert run(
            [
                command,
                "--scenario",
                scenario_for(command),
                "--seed",
                "3",
                "--format",
                fmt,
                "--out",
                str(out),
                "--quiet",
            ]
        ) == 0
        outputs[fmt] = out.read_text()
    csv_rows = parse_report_csv(outputs["csv"])
    json_rows = parse_report_json(outputs["json"])
    assert len(csv_rows) == len(json_rows)
    for c, j in zip(csv_rows, json_rows):
        assert set(c) == set(j)
        for key in c:
            assert c[key] == j[key], f"{command}: field {key} differs"


def test_missing_scenario_file_is_a_usage_error(tmp_path, capsys):
    out = tmp_path / "never.csv"
    status = run(["simulate", "--scenario", str(tmp_path / "nope.json"), "--out", str(out)])
    assert status == 2
    assert not out.exists()
    assert "not found" in capsys.readouterr().err


def test_invalid_scenario_content_is_a_validation_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(
        json.dumps(
            {
                "device": {"sensor_throughput": 0, "render_throughput": 1},
                "uplink_payload": {"kind": "blob", "bits": 1},
                "downlink_payload": {"kind": "blob", "bits": 1},
                "channel": {"bandwidth_hz": 1000, "snr_db": 0},
            }
        )
    )
    out = tmp_path / "never.csv"
    status = run(["simulate", "--scenario", str(bad), "--out", str(out)])
    assert status == 1
    assert not out.exists()  # no partial output on failure
    assert "sensor_throughput" in capsys.readouterr().err


def test_malformed_json_is_a_validation_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["budget", "--scenario", str(bad)]) == 1
    assert "line" in capsys.readouterr().err


def test_usage_errors_exit_2(capsys):
    assert run([]) == 2
    assert run(["warp", "--scenario", "casestudy1"]) == 2
    capsys.readouterr()


def test_stdout_output_when_no_out(capsys):
    assert run(["broadcast", "--scenario", "casestudy2", "--quiet"]) == 0
    rows = parse_report_csv(capsys.readouterr().out)
    assert rows[0]["savings_bits"] == 3_000_000.0
    assert rows[0]["broadcast_s"] == 0.0014


def test_sense_mask_export_round_trips(tmp_path):
    out = tmp_path / "sense.csv"
    mask_out = tmp_path / "mask.json"
    assert run(
        [
            "sense",
            "--scenario",
            "casestudy1",
            "--out",
            str(out),
            "--mask-out",
            str(mask_out),
            "--quiet",
        ]
    ) == 0
    mask = mask_from_rle_json(mask_out.read_text())
    rows = parse_report_csv(out.read_text())
    prior = next(r for r in rows if r["policy"] == "prior")
    assert mask.active_count == prior["active_samples"]
    assert prior["coverage"] >= 0.9


def test_render_budget_export(tmp_path):
    out = tmp_path / "render.csv"
    budget_out = tmp_path / "budget.csv"
    assert run(
        [
            "render",
            "--scenario",
            "casestudy1",
            "--out",
            str(out),
            "--budget-out",
            str(budget_out),
            "--quiet",
        ]
    ) == 0
    lines = budget_out.read_text().strip().split("\n")
    assert lines[0] == "y,x,samples"
    report = parse_report_csv(out.read_text())[0]
    assert report["allocated_samples"] == report["total_budget"]
    assert report["speedup"] == 4.0


def test_sweep_monte_carlo_seeded(tmp_path):
    scenario = tmp_path / "mc.json"
    scenario.write_text(
        json.dumps(
            {
                "device": {"sensor_throughput": 1e9, "render_throughput": 1e11},
                "uplink_payload": {"kind": "image", "pixel_count": 2000000, "bpp": 0.8},
                "downlink_payload": {"kind": "blob", "bits": 1e6},
                "channel": {
                    "bandwidth_hz": 1000,
                    "snr_db": 0,
                    "mode": "monte_carlo",
                    "trials": 5000,
                },
                "seed": 11,
                "sweep": {"start_db": -20, "stop_db": 30, "step_db": 10},
            }
        )
    )
    outs = []
    for i in (1, 2):
        out = tmp_path / f"sweep{i}.csv"
        assert run(["sweep", "--scenario", str(scenario), "--out", str(out), "--quiet"]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    rows = parse_report_csv(outs[0].decode())
    assert len(rows) == 18  # 3 schemes x 6 points
    deepsc = [r for r in rows if r["scheme"] == "deepsc"]
    mses = [r["feature_mse"] for r in deepsc]
    assert mses == sorted(mses, reverse=True)  # degrades gracefully toward low SNR
