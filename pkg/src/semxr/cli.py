"""Command-line entry point.

Six subcommands, each reading one scenario document and emitting one report
table (CSV or JSON, stdout or an atomically written file):

* ``budget``    -- required-rate table against the network peak band
* ``sweep``     -- SNR sweep of the transmission schemes
* ``sense``     -- sensing-mask sparsity/coverage report (mask export optional)
* ``render``    -- ray-budget allocation report (per-pixel export optional)
* ``simulate``  -- per-stage frame trace against the latency budget
* ``broadcast`` -- multi-user downlink totals, savings, airtime

Exit status: 0 success, 1 scenario parse/validation error, 2 usage error
(bad flags, missing files).  Identical inputs and seed give byte-identical
reports.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import broadcast as bc
from . import pipeline, rendering, semcodec, sensing
from .errors import ScenarioParseError, SemXRError, ValidationError
from .reports import Table, encode, write_atomic
from .scenario import (
    MapSpec,
    RateCase,
    ScenarioConfig,
    bundled_scenario_path,
    load_scenario_file,
    payload_bits,
)

USAGE_ERROR = 2
VALIDATION_ERROR = 1


def build_relevance(spec: MapSpec, grid: sensing.SensorGrid,
                    base_dir: Path) -> sensing.RelevanceMap:
    if spec.kind == "uniform":
        return sensing.RelevanceMap.uniform(grid)
    if spec.kind == "gaussian":
        return sensing.RelevanceMap.gaussian(grid, sigma=spec.sigma)
    if spec.kind == "inline":
        return sensing.RelevanceMap.from_weights(grid, spec.weights, normalize=True)
    text = (base_dir / spec.path).read_text(encoding="utf-8")
    return sensing.relevance_from_csv(text, grid)


def build_importance(spec: MapSpec, h: int, w: int, base_dir: Path) -> rendering.ImportanceMap:
    if spec.kind == "uniform":
        return rendering.ImportanceMap.uniform(h, w)
    if spec.kind == "gaussian":
        return rendering.ImportanceMap.gaussian(h, w, sigma=spec.sigma)
    if spec.kind == "inline":
        import numpy as np

        arr = np.asarray(spec.weights, dtype=float).reshape(h, w)
        return rendering.ImportanceMap.from_weights(arr, normalize=True)
    text = (base_dir / spec.path).read_text(encoding="utf-8")
    return rendering.importance_from_csv(text, h, w)


# ---------------------------------------------------------------------------
# subcommand implementations (each returns a Table)

def _budget_table(cfg: ScenarioConfig) -> Table:
    cases: list[RateCase] = list(cfg.rate_cases)
    if not cases:
        # no configured cases: derive the uplink/downlink windows from the
        # budget minus every other stage of the simulated trace
        trace = pipeline.simulate_frame(cfg)
        other_up = trace.total - trace.duration_of("uplink")
        other_down = trace.total - trace.duration_of("downlink")
        cases = [
            RateCase("uplink", cfg.uplink_payload,
                     pipeline.uplink_window(cfg.budget, other_up)),
            RateCase("downlink", cfg.downlink_payload,
                     pipeline.uplink_window(cfg.budget, other_down)),
        ]
    rows = pipeline.rate_requirements_table(cases)
    return Table(
        columns=["label", "payload_bits", "window_s", "required_rate_bps", "feasible"],
        rows=[
            {
                "label": r.label,
                "payload_bits": r.payload_bits,
                "window_s": r.window_s,
                "required_rate_bps": r.required_rate_bps,
                "feasible": r.feasible,
            }
            for r in rows
        ],
    )


def _sweep_table(cfg: ScenarioConfig) -> Table:
    section = cfg.sweep
    spec = replace(cfg.channel, seed=cfg.effective_seed())
    image_bits = 1_600_000.0
    if cfg.uplink_payload.kind == "image":
        image_bits = payload_bits(cfg.uplink_payload)
    result = semcodec.run_sweep(
        section.schemes,
        section.grid(),
        spec,
        image_bits=image_bits,
        bits_per_dim=section.bits_per_dim,
        feature_bits=section.feature_bits,
    )
    return Table(
        columns=["scheme", "snr_db", "feature_mse", "task_proxy", "payload_bits", "outage"],
        rows=[
            {
                "scheme": r.scheme,
                "snr_db": r.snr_db,
                "feature_mse": r.feature_mse,
                "task_proxy": r.task_proxy,
                "payload_bits": r.payload_bits,
                "outage": r.outage,
            }
            for r in result.rows
        ],
    )


def _sensing_parts(cfg: ScenarioConfig, base_dir: Path):
    section = cfg.sensing
    if section is None:
        raise ValidationError("sensing", "scenario has no sensing section")
    grid = sensing.SensorGrid(t=section.t, h=section.h, w=section.w)
    rel = build_relevance(section.relevance, grid, base_dir)
    masks = {"prior": sensing.prior_mask(rel, section.coverage_target)}
    if section.feedback is not None:
        fb = sensing.FeedbackState(
            prev_box=sensing.BoundingBox(*section.feedback.box),
            max_speed=section.feedback.max_speed,
        )
        masks["feedback"] = sensing.feedback_mask(fb, grid, dt=section.feedback.dt)
    return grid, rel, masks


def _sense_table(cfg: ScenarioConfig, base_dir: Path) -> Table:
    section = cfg.sensing
    grid, rel, masks = _sensing_parts(cfg, base_dir)
    rows = []
    for policy, mask in masks.items():
        report = sensing.sensing_report(mask, section.per_sample_cost)
        rows.append(
            {
                "policy": policy,
                "cells": grid.cells,
                "active_samples": report.samples,
                "sparsity": report.sparsity,
                "coverage": sensing.coverage(mask, rel),
                "cost": report.cost,
            }
        )
    return Table(
        columns=["policy", "cells", "active_samples", "sparsity", "coverage", "cost"],
        rows=rows,
    )


def _render_parts(cfg: ScenarioConfig, base_dir: Path):
    section = cfg.rendering
    if section is None:
        raise ValidationError("rendering", "scenario has no rendering section")
    rcfg = rendering.RenderConfig(h=section.h, w=section.w, n_full=section.n_full)
    imp = build_importance(section.importance, section.h, section.w, base_dir)
    total_budget = section.total_budget
    if total_budget is None:
        total_budget = max(rcfg.pixels * section.n_min, rendering.full_sample_count(rcfg) // 2)
    budget = rendering.allocate_budget(imp, total_budget, section.n_min, rcfg)
    return rcfg, imp, total_budget, budget


def _render_table(cfg: ScenarioConfig, base_dir: Path) -> Table:
    section = cfg.rendering
    rcfg, imp, total_budget, budget = _render_parts(cfg, base_dir)
    return Table(
        columns=[
            "h", "w", "n_full", "n_min", "total_budget",
            "allocated_samples", "full_samples", "speedup", "quality_proxy",
        ],
        rows=[
            {
                "h": rcfg.h,
                "w": rcfg.w,
                "n_full": rcfg.n_full,
                "n_min": section.n_min,
                "total_budget": total_budget,
                "allocated_samples": budget.total,
                "full_samples": rendering.full_sample_count(rcfg),
                "speedup": rendering.speedup(budget, rcfg),
                "quality_proxy": rendering.quality_proxy(budget, imp),
            }
        ],
    )


def _simulate_table(cfg: ScenarioConfig, base_dir: Path) -> Table:
    mask = None
    if cfg.sensing is not None:
        _, _, masks = _sensing_parts(cfg, base_dir)
        mask = masks["prior"]
    ray_budget = None
    if cfg.rendering is not None:
        _, _, _, ray_budget = _render_parts(cfg, base_dir)
    trace = pipeline.simulate_frame(cfg, mask=mask, budget=ray_budget)
    report = pipeline.check_budget(trace, cfg.budget)
    rows = [
        {"stage": s.stage, "seconds": s.duration, "budget_s": None, "passed": None,
         "slack_s": None}
        for s in trace.stages
    ]
    rows.append(
        {
            "stage": "total",
            "seconds": trace.total,
            "budget_s": report.budget,
            "passed": report.passed,
            "slack_s": report.slack,
        }
    )
    return Table(columns=["stage", "seconds", "budget_s", "passed", "slack_s"], rows=rows)


def _broadcast_table(cfg: ScenarioConfig) -> Table:
    section = cfg.broadcast
    if section is None:
        raise ValidationError("broadcast", "scenario has no broadcast section")
    group = bc.BroadcastGroup(
        users=section.users,
        shared_bits=section.shared_bits,
        residual_bits=section.residual_bits,
    )
    rate = section.rate_bps if section.rate_bps is not None else cfg.link_rate
    air = bc.airtime(
        group,
        spec=cfg.channel,
        rate_bps=rate,
        per_user_snr_db=section.per_user_snr_db if rate is None else None,
    )
    return Table(
        columns=[
            "users", "shared_bits", "residual_bits_total", "unicast_bits",
            "broadcast_bits", "savings_bits", "broadcast_s", "unicast_s", "airtime_ratio",
        ],
        rows=[
            {
                "users": group.users,
                "shared_bits": group.shared_bits,
                "residual_bits_total": sum(group.residual_bits),
                "unicast_bits": bc.unicast_total(group),
                "broadcast_bits": bc.broadcast_total(group),
                "savings_bits": bc.savings(group),
                "broadcast_s": air.broadcast_s,
                "unicast_s": air.unicast_s,
                "airtime_ratio": air.ratio,
            }
        ],
    )


# ---------------------------------------------------------------------------
# argument handling

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semxr",
        description="Desk-scale simulator of a semantic XR sensing/rendering/communication pipeline.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("budget", "required-rate table for the scenario's payload/window cases"),
        ("sweep", "SNR sweep of the transmission schemes"),
        ("sense", "sensing-mask sparsity and coverage report"),
        ("render", "ray-budget allocation report"),
        ("simulate", "per-stage frame trace against the latency budget"),
        ("broadcast", "multi-user downlink totals and savings"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--scenario", required=True,
                       help="scenario JSON path, or the name of a bundled scenario")
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--seed", type=int, default=None,
                       help="override the scenario seed")
        p.add_argument("--quiet", action="store_true", help="suppress status messages")
        if name == "sense":
            p.add_argument("--mask-out", default=None,
                           help="also write the mask as run-length-encoded JSON")
            p.add_argument("--mask-policy", choices=("prior", "feedback"), default="prior")
        if name == "render":
            p.add_argument("--budget-out", default=None,
                           help="also write the per-pixel sample counts as CSV")
    return parser


def _resolve_scenario(arg: str) -> Path:
    path = Path(arg)
    if path.is_file():
        return path
    if "/" not in arg and "\\" not in arg:
        try:
            return bundled_scenario_path(arg)
        except FileNotFoundError:
            pass
    raise FileNotFoundError(f"scenario file not found: {arg}")


def run(argv: list[str]) -> int:
    """Execute one subcommand; returns the process exit status."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        scenario_path = _resolve_scenario(args.scenario)
    except FileNotFoundError as exc:
        print(f"semxr {args.command}: cli.run: {exc}", file=sys.stderr)
        return USAGE_ERROR

    try:
        cfg = load_scenario_file(scenario_path)
        if args.seed is not None:
            cfg = replace(
                cfg, seed=args.seed, channel=replace(cfg.channel, seed=None)
            )
        base_dir = scenario_path.parent

        extra_outputs: list[tuple[str, str]] = []
        if args.command == "budget":
            table = _budget_table(cfg)
        elif args.command == "sweep":
            table = _sweep_table(cfg)
        elif args.command == "sense":
            table = _sense_table(cfg, base_dir)
            if args.mask_out:
                _, _, masks = _sensing_parts(cfg, base_dir)
                if args.mask_policy not in masks:
                    raise ValidationError(
                        "sensing.feedback", "scenario configures no feedback mask"
                    )
                extra_outputs.append(
                    (args.mask_out, sensing.mask_to_rle_json(masks[args.mask_policy]))
                )
        elif args.command == "render":
            table = _render_table(cfg, base_dir)
            if args.budget_out:
                _, _, _, ray_budget = _render_parts(cfg, base_dir)
                extra_outputs.append((args.budget_out, rendering.budget_to_csv(ray_budget)))
        elif args.command == "simulate":
            table = _simulate_table(cfg, base_dir)
        else:
            table = _broadcast_table(cfg)

        text = encode(table, args.format)
    except ScenarioParseError as exc:
        print(f"semxr {args.command}: scenario.load_scenario: {exc}", file=sys.stderr)
        return VALIDATION_ERROR
    except ValidationError as exc:
        print(f"semxr {args.command}: validation: {exc}", file=sys.stderr)
        return VALIDATION_ERROR
    except FileNotFoundError as exc:
        print(f"semxr {args.command}: cli.run: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except SemXRError as exc:
        print(f"semxr {args.command}: {exc}", file=sys.stderr)
        return VALIDATION_ERROR

    if args.out:
        write_atomic(args.out, text)
        if not args.quiet:
            print(f"wrote {args.out} ({len(table.rows)} rows)", file=sys.stderr)
    else:
        sys.stdout.write(text)
    for path, payload in extra_outputs:
        write_atomic(path, payload)
        if not args.quiet:
            print(f"wrote {path}", file=sys.stderr)
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
