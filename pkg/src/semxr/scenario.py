"""Experiment descriptions: parsing, validation, payload sizing.

A scenario is a JSON document (UTF-8) that fully describes one experiment:
the device's per-stage costs, the uplink/downlink payloads, the channel, the
motion-to-photon budget, and optional sections consumed by individual
subcommands (rate cases, sensing, rendering, broadcast, sweep).  All sizes
are in bits, all times in seconds, SNR in dB.

Two reference scenarios ship with the package (see :func:`bundled_scenario_path`):

* ``casestudy1.json`` -- single-user uplink; reproduces the 2K-image /
  1.6 Mb / 1.28 Gbps arithmetic and hosts the SNR sweep configuration.
* ``casestudy2.json`` -- multi-user downlink broadcast group.

The "2K resolution" reference image is fixed at 2,000,000 pixels: at the
documented 0.8 bits/pixel this is the only pixel count that yields the
1.6 Mb compressed frame all the rate arithmetic is built on.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict
from importlib import resources
from pathlib import Path

from .channel import ChannelSpec, MONTE_CARLO, SnrSweep
from .errors import ScenarioParseError, ValidationError

DEFAULT_MOTION_TO_PHOTON_S = 0.010
DEFAULT_BITS_PER_FEATURE = 32
DEFAULT_DISPLAY_TIME_S = 0.001
DEFAULT_ENCODE_TIME_S = 0.0


# ---------------------------------------------------------------------------
# payload specs

@dataclass(frozen=True)
class ImagePayload:
    kind = "image"
    pixel_count: float
    bpp: float
    panoramic: bool = False

    def __post_init__(self):
        if self.pixel_count <= 0:
            raise ValidationError("payload.pixel_count", "must be > 0")
        if self.bpp <= 0:
            raise ValidationError("payload.bpp", "must be > 0")


@dataclass(frozen=True)
class FeaturesPayload:
    kind = "features"
    count: int
    bits_per_feature: float = DEFAULT_BITS_PER_FEATURE

    def __post_init__(self):
        if self.count <= 0:
            raise ValidationError("payload.count", "must be > 0")
        if self.bits_per_feature <= 0:
            raise ValidationError("payload.bits_per_feature", "must be > 0")


@dataclass(frozen=True)
class LatentPayload:
    kind = "latent"
    dims: int
    bits_per_dim: float

    def __post_init__(self):
        if self.dims <= 0:
            raise ValidationError("payload.dims", "must be > 0")
        if self.bits_per_dim <= 0:
            raise ValidationError("payload.bits_per_dim", "must be > 0")


@dataclass(frozen=True)
class BlobPayload:
    kind = "blob"
    bits: float

    def __post_init__(self):
        if self.bits <= 0:
            raise ValidationError("payload.bits", "must be > 0")


PayloadSpec = ImagePayload | FeaturesPayload | LatentPayload | BlobPayload


def payload_bits(spec: PayloadSpec) -> float:
    """Size of a payload in bits.

    Images are pixel_count * bpp, tripled when panoramic (a full surround
    view costs three times the data of a perspective view).  Feature, latent
    and blob payloads are straight products; no entropy coding is modeled,
    so latent bits are counted at fixed width.
    """
    if isinstance(spec, ImagePayload):
        bits = spec.pixel_count * spec.bpp
        return bits * 3 if spec.panoramic else bits
    if isinstance(spec, FeaturesPayload):
        return spec.count * spec.bits_per_feature
    if isinstance(spec, LatentPayload):
        return spec.dims * spec.bits_per_dim
    if isinstance(spec, BlobPayload):
        return spec.bits
    raise ValidationError("payload", f"unknown payload type {type(spec).__name__}")


# ---------------------------------------------------------------------------
# device / budget

@dataclass(frozen=True)
class DeviceSpec:
    """Per-stage costs of the HMD + server pair.

    Throughputs are samples/second; times are the fixed per-frame costs of
    stages the simulator does not itemize further.
    """

    sensor_throughput: float
    render_throughput: float
    compute_time: float = 0.0
    display_time: float = DEFAULT_DISPLAY_TIME_S
    encode_time: float = DEFAULT_ENCODE_TIME_S

    def __post_init__(self):
        if self.sensor_throughput <= 0:
            raise ValidationError("device.sensor_throughput", "must be > 0")
        if self.render_throughput <= 0:
            raise ValidationError("device.render_throughput", "must be > 0")
        for name in ("compute_time", "display_time", "encode_time"):
            if getattr(self, name) < 0:
                raise ValidationError(f"device.{name}", "must be >= 0")


@dataclass(frozen=True)
class LatencyBudget:
    motion_to_photon: float = DEFAULT_MOTION_TO_PHOTON_S

    def __post_init__(self):
        if self.motion_to_photon <= 0:
            raise ValidationError("budget.motion_to_photon", "must be > 0")


# ---------------------------------------------------------------------------
# optional sections (plain configuration; materialized by their consumers)

@dataclass(frozen=True)
class RateCase:
    """One row of the rate-requirements table: a payload and its time window."""

    label: str
    payload: PayloadSpec
    window_s: float

    def __post_init__(self):
        if self.window_s <= 0:
            raise ValidationError(f"rate_cases[{self.label}].window_s", "must be > 0")


@dataclass(frozen=True)
class MapSpec:
    """How to build a relevance/importance map: a named generator or a file."""

    kind: str  # uniform | gaussian | inline | csv
    sigma: float | None = None          # gaussian
    weights: tuple[float, ...] | None = None  # inline, row-major over the grid
    path: str | None = None             # csv

    def __post_init__(self):
        if self.kind not in ("uniform", "gaussian", "inline", "csv"):
            raise ValidationError("map.kind", f"unknown kind {self.kind!r}")
        if self.kind == "gaussian" and (self.sigma is None or self.sigma <= 0):
            raise ValidationError("map.sigma", "must be > 0 for gaussian maps")
        if self.kind == "inline" and not self.weights:
            raise ValidationError("map.weights", "required for inline maps")
        if self.kind == "csv" and not self.path:
            raise ValidationError("map.path", "required for csv maps")


@dataclass(frozen=True)
class FeedbackSection:
    box: tuple[int, int, int, int]  # y0, x0, y1, x1 inclusive
    max_speed: float
    dt: int = 1

    def __post_init__(self):
        if self.max_speed < 0:
            raise ValidationError("sensing.feedback.max_speed", "must be >= 0")
        if self.dt < 1:
            raise ValidationError("sensing.feedback.dt", "must be >= 1")


@dataclass(frozen=True)
class SensingSection:
    t: int
    h: int
    w: int
    relevance: MapSpec
    coverage_target: float = 0.9
    per_sample_cost: float = 0.0
    feedback: FeedbackSection | None = None

    def __post_init__(self):
        if min(self.t, self.h, self.w) < 1:
            raise ValidationError("sensing.grid", "t, h, w must all be >= 1")
        if not 0 < self.coverage_target <= 1:
            raise ValidationError("sensing.coverage_target", "must be in (0, 1]")
        if self.per_sample_cost < 0:
            raise ValidationError("sensing.per_sample_cost", "must be >= 0")


@dataclass(frozen=True)
class RenderSection:
    h: int
    w: int
    importance: MapSpec
    n_full: int = 192
    n_min: int = 1
    total_budget: int | None = None  # default: half the full sample count

    def __post_init__(self):
        if min(self.h, self.w) < 1:
            raise ValidationError("rendering.h/w", "must be >= 1")
        if self.n_full < 1:
            raise ValidationError("rendering.n_full", "must be >= 1")
        if not 1 <= self.n_min <= self.n_full:
            raise ValidationError("rendering.n_min", "must be in [1, n_full]")


@dataclass(frozen=True)
class BroadcastSection:
    users: int
    shared_bits: float
    residual_bits: tuple[float, ...]
    per_user_snr_db: tuple[float, ...] | None = None
    rate_bps: float | None = None  # fixed delivery rate; channel capacity otherwise

    def __post_init__(self):
        if self.users < 1:
            raise ValidationError("broadcast.users", "must be >= 1")
        if self.shared_bits < 0:
            raise ValidationError("broadcast.shared_bits", "must be >= 0")
        if len(self.residual_bits) != self.users:
            raise ValidationError("broadcast.residual_bits", "must list one value per user")
        if any(r < 0 for r in self.residual_bits):
            raise ValidationError("broadcast.residual_bits", "must all be >= 0")
        if self.per_user_snr_db is not None and len(self.per_user_snr_db) != self.users:
            raise ValidationError("broadcast.per_user_snr_db", "must list one value per user")
        if self.rate_bps is not None and self.rate_bps <= 0:
            raise ValidationError("broadcast.rate_bps", "must be > 0")


@dataclass(frozen=True)
class SweepSection:
    start_db: float = -20.0
    stop_db: float = 30.0
    step_db: float = 1.0
    schemes: tuple[str, ...] = ("traditional", "ssc", "deepsc")
    bits_per_dim: int = 32
    feature_bits: int = 32

    def __post_init__(self):
        # grid invariants are enforced by SnrSweep
        SnrSweep(self.start_db, self.stop_db, self.step_db)
        if not self.schemes:
            raise ValidationError("sweep.schemes", "must not be empty")

    def grid(self) -> SnrSweep:
        return SnrSweep(self.start_db, self.stop_db, self.step_db)


# ---------------------------------------------------------------------------
# top-level config

@dataclass(frozen=True)
class ScenarioConfig:
    device: DeviceSpec
    uplink_payload: PayloadSpec
    downlink_payload: PayloadSpec
    channel: ChannelSpec
    budget: LatencyBudget = LatencyBudget()
    seed: int | None = None
    description: str = ""
    link_rate: float | None = None      # fixed link rate override (bits/s)
    sense_samples: float | None = None  # per-frame sensor samples; None = derive
    render_samples: float = 0.0         # per-frame render samples without a RayBudget
    rate_cases: tuple[RateCase, ...] = ()
    sensing: SensingSection | None = None
    rendering: RenderSection | None = None
    broadcast: BroadcastSection | None = None
    sweep: SweepSection = SweepSection()

    def __post_init__(self):
        if self.seed is not None and self.seed < 0:
            raise ValidationError("seed", "must be a non-negative integer")
        if self.link_rate is not None and self.link_rate <= 0:
            raise ValidationError("link_rate", "must be > 0")
        if self.sense_samples is not None and self.sense_samples < 0:
            raise ValidationError("sense_samples", "must be >= 0")
        if self.render_samples < 0:
            raise ValidationError("render_samples", "must be >= 0")
        if self.channel.mode == MONTE_CARLO and self.effective_seed() is None:
            raise ValidationError("seed", "required whenever a Monte-Carlo mode is enabled")

    def effective_seed(self) -> int | None:
        """Channel seed if set, else the scenario seed."""
        return self.channel.seed if self.channel.seed is not None else self.seed

    def default_sense_samples(self) -> float:
        """Sensor samples per frame: explicit value, or the uplink pixel count."""
        if self.sense_samples is not None:
            return self.sense_samples
        if isinstance(self.uplink_payload, ImagePayload):
            return self.uplink_payload.pixel_count
        return 0.0


# ---------------------------------------------------------------------------
# JSON <-> config

class _Node:
    """A JSON object with tracked key consumption and dotted-path errors."""

    def __init__(self, obj, path: str):
        if not isinstance(obj, dict):
            raise ValidationError(path or "<root>", "must be a JSON object")
        self.obj = obj
        self.path = path
        self.seen: set[str] = set()

    def _key(self, name: str) -> str:
        return f"{self.path}.{name}" if self.path else name

    def take(self, name: str, required: bool = False, default=None):
        self.seen.add(name)
        if name not in self.obj:
            if required:
                raise ValidationError(self._key(name), "missing required field")
            return default
        return self.obj[name]

    def child(self, name: str, required: bool = False) -> "_Node | None":
        raw = self.take(name, required=required)
        if raw is None:
            return None
        return _Node(raw, self._key(name))

    def finish(self):
        extra = sorted(set(self.obj) - self.seen)
        if extra:
            where = self.path or "<root>"
            raise ValidationError(where, f"unknown field(s): {', '.join(extra)}")


def _number(node: _Node, name: str, required: bool = False, default=None) -> float | None:
    raw = node.take(name, required=required, default=default)
    if raw is None:
        return None
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ValidationError(node._key(name), "must be a number")
    return float(raw)


def _integer(node: _Node, name: str, required: bool = False, default=None) -> int | None:
    raw = node.take(name, required=required, default=default)
    if raw is None:
        return None
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise ValidationError(node._key(name), "must be an integer")
    return raw


def _parse_payload(node: _Node) -> PayloadSpec:
    kind = node.take("kind", required=True)
    if kind == "image":
        spec = ImagePayload(
            pixel_count=_number(node, "pixel_count", required=True),
            bpp=_number(node, "bpp", required=True),
            panoramic=bool(node.take("panoramic", default=False)),
        )
    elif kind == "features":
        spec = FeaturesPayload(
            count=_integer(node, "count", required=True),
            bits_per_feature=_number(node, "bits_per_feature", default=DEFAULT_BITS_PER_FEATURE),
        )
    elif kind == "latent":
        spec = LatentPayload(
            dims=_integer(node, "dims", required=True),
            bits_per_dim=_number(node, "bits_per_dim", required=True),
        )
    elif kind == "blob":
        spec = BlobPayload(bits=_number(node, "bits", required=True))
    else:
        raise ValidationError(node._key("kind"), f"unknown payload kind {kind!r}")
    node.finish()
    return spec


def _parse_map(node: _Node) -> MapSpec:
    kind = node.take("kind", required=True)
    weights = node.take("weights")
    if weights is not None:
        flat: list[float] = []
        for row in weights:
            if isinstance(row, list):
                flat.extend(float(v) for v in row)
            else:
                flat.append(float(row))
        weights = tuple(flat)
    spec = MapSpec(
        kind=kind,
        sigma=_number(node, "sigma"),
        weights=weights,
        path=node.take("path"),
    )
    node.finish()
    return spec


def _parse_channel(node: _Node) -> ChannelSpec:
    spec = ChannelSpec(
        bandwidth_hz=_number(node, "bandwidth_hz", required=True),
        snr_db=_number(node, "snr_db", required=True),
        n_symbols=_integer(node, "n_symbols", default=0),
        mode=node.take("mode", default="analytic"),
        trials=_integer(node, "trials"),
        seed=_integer(node, "seed"),
    )
    node.finish()
    return spec


def load_scenario(text: str) -> ScenarioConfig:
    """Parse and validate a scenario document.

    Raises :class:`ScenarioParseError` (with line/column) on malformed JSON
    and :class:`ValidationError` (naming the dotted field path) on any
    invariant violation, including unknown keys.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(exc.msg, exc.lineno, exc.colno) from exc

    root = _Node(raw, "")
    root.take("description", default="")

    device_node = root.child("device", required=True)
    device = DeviceSpec(
        sensor_throughput=_number(device_node, "sensor_throughput", required=True),
        render_throughput=_number(device_node, "render_throughput", required=True),
        compute_time=_number(device_node, "compute_time", default=0.0),
        display_time=_number(device_node, "display_time", default=DEFAULT_DISPLAY_TIME_S),
        encode_time=_number(device_node, "encode_time", default=DEFAULT_ENCODE_TIME_S),
    )
    device_node.finish()

    uplink = _parse_payload(root.child("uplink_payload", required=True))
    downlink = _parse_payload(root.child("downlink_payload", required=True))
    chan = _parse_channel(root.child("channel", required=True))

    budget_node = root.child("budget")
    if budget_node is None:
        budget = LatencyBudget()
    else:
        budget = LatencyBudget(
            motion_to_photon=_number(
                budget_node, "motion_to_photon", default=DEFAULT_MOTION_TO_PHOTON_S
            )
        )
        budget_node.finish()

    rate_cases: list[RateCase] = []
    for i, case_raw in enumerate(root.take("rate_cases", default=[]) or []):
        case = _Node(case_raw, f"rate_cases[{i}]")
        rate_cases.append(
            RateCase(
                label=case.take("label", required=True),
                payload=_parse_payload(case.child("payload", required=True)),
                window_s=_number(case, "window_s", required=True),
            )
        )
        case.finish()

    sensing = None
    sensing_node = root.child("sensing")
    if sensing_node is not None:
        grid_node = sensing_node.child("grid", required=True)
        t = _integer(grid_node, "t", default=1)
        h = _integer(grid_node, "h", required=True)
        w = _integer(grid_node, "w", required=True)
        grid_node.finish()
        feedback = None
        fb_node = sensing_node.child("feedback")
        if fb_node is not None:
            box_raw = fb_node.take("box", required=True)
            if not (isinstance(box_raw, list) and len(box_raw) == 4):
                raise ValidationError("sensing.feedback.box", "must be [y0, x0, y1, x1]")
            feedback = FeedbackSection(
                box=tuple(int(v) for v in box_raw),
                max_speed=_number(fb_node, "max_speed", required=True),
                dt=_integer(fb_node, "dt", default=1),
            )
            fb_node.finish()
        sensing = SensingSection(
            t=t,
            h=h,
            w=w,
            relevance=_parse_map(sensing_node.child("relevance", required=True)),
            coverage_target=_number(sensing_node, "coverage_target", default=0.9),
            per_sample_cost=_number(sensing_node, "per_sample_cost", default=0.0),
            feedback=feedback,
        )
        sensing_node.finish()

    rendering = None
    render_node = root.child("rendering")
    if render_node is not None:
        rendering = RenderSection(
            h=_integer(render_node, "h", required=True),
            w=_integer(render_node, "w", required=True),
            importance=_parse_map(render_node.child("importance", required=True)),
            n_full=_integer(render_node, "n_full", default=192),
            n_min=_integer(render_node, "n_min", default=1),
            total_budget=_integer(render_node, "total_budget"),
        )
        render_node.finish()

    broadcast = None
    bc_node = root.child("broadcast")
    if bc_node is not None:
        users = _integer(bc_node, "users", required=True)
        residual_raw = bc_node.take("residual_bits", required=True)
        if isinstance(residual_raw, (int, float)) and not isinstance(residual_raw, bool):
            residuals = tuple(float(residual_raw) for _ in range(users))
        elif isinstance(residual_raw, list):
            residuals = tuple(float(v) for v in residual_raw)
        else:
            raise ValidationError("broadcast.residual_bits", "must be a number or a list")
        snrs_raw = bc_node.take("per_user_snr_db")
        broadcast = BroadcastSection(
            users=users,
            shared_bits=_number(bc_node, "shared_bits", required=True),
            residual_bits=residuals,
            per_user_snr_db=tuple(float(v) for v in snrs_raw) if snrs_raw else None,
            rate_bps=_number(bc_node, "rate_bps"),
        )
        bc_node.finish()

    sweep_node = root.child("sweep")
    if sweep_node is None:
        sweep = SweepSection()
    else:
        schemes_raw = sweep_node.take("schemes", default=["traditional", "ssc", "deepsc"])
        sweep = SweepSection(
            start_db=_number(sweep_node, "start_db", default=-20.0),
            stop_db=_number(sweep_node, "stop_db", default=30.0),
            step_db=_number(sweep_node, "step_db", default=1.0),
            schemes=tuple(schemes_raw),
            bits_per_dim=_integer(sweep_node, "bits_per_dim", default=32),
            feature_bits=_integer(sweep_node, "feature_bits", default=32),
        )
        sweep_node.finish()

    cfg = ScenarioConfig(
        device=device,
        uplink_payload=uplink,
        downlink_payload=downlink,
        channel=chan,
        budget=budget,
        seed=_integer(root, "seed"),
        description=raw.get("description", ""),
        link_rate=_number(root, "link_rate"),
        sense_samples=_number(root, "sense_samples"),
        render_samples=_number(root, "render_samples", default=0.0),
        rate_cases=tuple(rate_cases),
        sensing=sensing,
        rendering=rendering,
        broadcast=broadcast,
        sweep=sweep,
    )
    root.finish()
    return cfg


def _payload_to_json(spec: PayloadSpec) -> dict:
    out = {"kind": spec.kind}
    out.update(asdict(spec))
    return out


def _map_to_json(spec: MapSpec) -> dict:
    out = {"kind": spec.kind}
    if spec.sigma is not None:
        out["sigma"] = spec.sigma
    if spec.weights is not None:
        out["weights"] = list(spec.weights)
    if spec.path is not None:
        out["path"] = spec.path
    return out


def serialize_scenario(cfg: ScenarioConfig) -> str:
    """Emit a scenario as JSON; ``load_scenario`` of the result round-trips."""
    doc: dict = {
        "description": cfg.description,
        "device": asdict(cfg.device),
        "uplink_payload": _payload_to_json(cfg.uplink_payload),
        "downlink_payload": _payload_to_json(cfg.downlink_payload),
        "channel": {
            "bandwidth_hz": cfg.channel.bandwidth_hz,
            "snr_db": cfg.channel.snr_db,
            "n_symbols": cfg.channel.n_symbols,
            "mode": cfg.channel.mode,
        },
        "budget": {"motion_to_photon": cfg.budget.motion_to_photon},
        "render_samples": cfg.render_samples,
        "sweep": {
            "start_db": cfg.sweep.start_db,
            "stop_db": cfg.sweep.stop_db,
            "step_db": cfg.sweep.step_db,
            "schemes": list(cfg.sweep.schemes),
            "bits_per_dim": cfg.sweep.bits_per_dim,
            "feature_bits": cfg.sweep.feature_bits,
        },
    }
    if cfg.channel.trials is not None:
        doc["channel"]["trials"] = cfg.channel.trials
    if cfg.channel.seed is not None:
        doc["channel"]["seed"] = cfg.channel.seed
    if cfg.seed is not None:
        doc["seed"] = cfg.seed
    if cfg.link_rate is not None:
        doc["link_rate"] = cfg.link_rate
    if cfg.sense_samples is not None:
        doc["sense_samples"] = cfg.sense_samples
    if cfg.rate_cases:
        doc["rate_cases"] = [
            {
                "label": c.label,
                "payload": _payload_to_json(c.payload),
                "window_s": c.window_s,
            }
            for c in cfg.rate_cases
        ]
    if cfg.sensing is not None:
        s = cfg.sensing
        sensing_doc: dict = {
            "grid": {"t": s.t, "h": s.h, "w": s.w},
            "relevance": _map_to_json(s.relevance),
            "coverage_target": s.coverage_target,
            "per_sample_cost": s.per_sample_cost,
        }
        if s.feedback is not None:
            sensing_doc["feedback"] = {
                "box": list(s.feedback.box),
                "max_speed": s.feedback.max_speed,
                "dt": s.feedback.dt,
            }
        doc["sensing"] = sensing_doc
    if cfg.rendering is not None:
        r = cfg.rendering
        render_doc: dict = {
            "h": r.h,
            "w": r.w,
            "importance": _map_to_json(r.importance),
            "n_full": r.n_full,
            "n_min": r.n_min,
        }
        if r.total_budget is not None:
            render_doc["total_budget"] = r.total_budget
        doc["rendering"] = render_doc
    if cfg.broadcast is not None:
        b = cfg.broadcast
        bc_doc: dict = {
            "users": b.users,
            "shared_bits": b.shared_bits,
            "residual_bits": list(b.residual_bits),
        }
        if b.per_user_snr_db is not None:
            bc_doc["per_user_snr_db"] = list(b.per_user_snr_db)
        if b.rate_bps is not None:
            bc_doc["rate_bps"] = b.rate_bps
        doc["broadcast"] = bc_doc
    return json.dumps(doc, indent=2) + "\n"


def load_scenario_file(path: str | Path) -> ScenarioConfig:
    return load_scenario(Path(path).read_text(encoding="utf-8"))


def bundled_scenario_names() -> list[str]:
    pkg = resources.files("semxr").joinpath("scenarios")
    return sorted(p.name for p in pkg.iterdir() if p.name.endswith(".json"))


def bundled_scenario_path(name: str) -> Path:
    """Filesystem path of a scenario shipped with the package."""
    if not name.endswith(".json"):
        name += ".json"
    path = resources.files("semxr").joinpath("scenarios", name)
    if not path.is_file():
        raise FileNotFoundError(f"no bundled scenario named {name!r}")
    return Path(str(path))
