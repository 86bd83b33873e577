"""Binary sensing masks: switch off the sensor cells a task will not miss.

Two policies produce a spatio-temporal on/off mask over the sensor grid:

* :func:`prior_mask` -- from a task-relevance distribution learned offline,
  keep the lightest set of cells whose relevance mass reaches a coverage
  target (coverage is this artifact's stand-in for task accuracy).
* :func:`feedback_mask` -- from the last detection, keep the previous
  bounding box dilated by how far the object can have moved.

Masks are plain boolean arrays; :func:`sensing_report` turns one into the
sparsity/sample/cost numbers the rest of the pipeline consumes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

WEIGHT_SUM_TOL = 1e-9


@dataclass(frozen=True)
class SensorGrid:
    t: int
    h: int
    w: int

    def __post_init__(self):
        if min(self.t, self.h, self.w) < 1:
            raise ValidationError("grid", "t, h, w must all be >= 1")

    @property
    def cells(self) -> int:
        return self.t * self.h * self.w


@dataclass(eq=False)
class RelevanceMap:
    """Per-cell task-relevance weights over a grid; non-negative, sum 1."""

    grid: SensorGrid
    weights: np.ndarray  # shape (t, h, w)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        expect = (self.grid.t, self.grid.h, self.grid.w)
        if self.weights.shape != expect:
            raise ValidationError("relevance.weights", f"must have shape {expect}")
        if np.any(self.weights < 0):
            raise ValidationError("relevance.weights", "must all be >= 0")
        if abs(float(self.weights.sum()) - 1.0) > WEIGHT_SUM_TOL:
            raise ValidationError("relevance.weights", "must sum to 1")

    @classmethod
    def from_weights(cls, grid: SensorGrid, raw, normalize: bool = False) -> "RelevanceMap":
        w = np.asarray(raw, dtype=float).reshape(grid.t, grid.h, grid.w)
        if normalize:
            total = w.sum()
            if total <= 0:
                raise ValidationError("relevance.weights", "cannot normalize an all-zero map")
            w = w / total
        return cls(grid=grid, weights=w)

    @classmethod
    def uniform(cls, grid: SensorGrid) -> "RelevanceMap":
        return cls(grid, np.full((grid.t, grid.h, grid.w), 1.0 / grid.cells))

    @classmethod
    def gaussian(cls, grid: SensorGrid, sigma: float,
                 center: tuple[float, float] | None = None) -> "RelevanceMap":
        """Centered isotropic blob, identical across frames; normalized."""
        if sigma <= 0:
            raise ValidationError("relevance.sigma", "must be > 0")
        cy, cx = center if center else ((grid.h - 1) / 2.0, (grid.w - 1) / 2.0)
        y = np.arange(grid.h)[:, None]
        x = np.arange(grid.w)[None, :]
        blob = np.exp(-((y - cy) ** 2 + (x - cx) ** 2) / (2.0 * sigma**2))
        frame = np.broadcast_to(blob, (grid.t, grid.h, grid.w)).copy()
        return cls.from_weights(grid, frame, normalize=True)


@dataclass(eq=False)
class MaskGrid:
    """On/off state of every sensor cell; True = cell samples."""

    grid: SensorGrid
    active: np.ndarray  # bool, shape (t, h, w)

    def __post_init__(self):
        self.active = np.asarray(self.active, dtype=bool)
        expect = (self.grid.t, self.grid.h, self.grid.w)
        if self.active.shape != expect:
            raise ValidationError("mask.active", f"must have shape {expect}")

    @property
    def active_count(self) -> int:
        return int(self.active.sum())

    @property
    def sparsity(self) -> float:
        return 1.0 - self.active_count / self.grid.cells


@dataclass(frozen=True)
class BoundingBox:
    """Inclusive cell coordinates (y0, x0) .. (y1, x1)."""

    y0: int
    x0: int
    y1: int
    x1: int

    def __post_init__(self):
        if self.y1 < self.y0 or self.x1 < self.x0:
            raise ValidationError("box", "corners must satisfy y0 <= y1 and x0 <= x1")


@dataclass(frozen=True)
class FeedbackState:
    prev_box: BoundingBox
    max_speed: float  # cells/frame

    def __post_init__(self):
        if self.max_speed < 0:
            raise ValidationError("feedback.max_speed", "must be >= 0")


def prior_mask(rel: RelevanceMap, coverage_target: float) -> MaskGrid:
    """Sparsest mask whose covered relevance reaches the target.

    Greedy on the sorted weights, which is exactly optimal for an additive
    coverage objective: activate cells heaviest-first (ties broken by
    (t, y, x) order for cross-platform determinism) until the running sum
    reaches the target.  Dropping the lightest active cell would fall back
    below the target.
    """
    if not 0.0 < coverage_target <= 1.0:
        raise ValidationError("coverage_target", "must be in (0, 1]")
    g = rel.grid
    flat = rel.weights.reshape(-1)
    t_idx, y_idx, x_idx = np.unravel_index(np.arange(flat.size), rel.weights.shape)
    order = np.lexsort((x_idx, y_idx, t_idx, -flat))
    running = np.cumsum(flat[order])
    hit = np.nonzero(running >= coverage_target)[0]
    n_active = int(hit[0]) + 1 if hit.size else flat.size
    active = np.zeros(flat.size, dtype=bool)
    active[order[:n_active]] = True
    return MaskGrid(grid=g, active=active.reshape(rel.weights.shape))


def feedback_mask(fb: FeedbackState, grid: SensorGrid, dt: int = 1) -> MaskGrid:
    """Mask from the last detection: the old box grown by reachable motion.

    The box is dilated by ceil(max_speed * dt) cells on every spatial side,
    clamped to the grid, and applied to all frames of the grid.
    """
    if dt < 1:
        raise ValidationError("dt", "must be >= 1")
    box = fb.prev_box
    if not (0 <= box.y0 and box.y1 < grid.h and 0 <= box.x0 and box.x1 < grid.w):
        raise ValidationError("feedback.prev_box", "must lie within the grid")
    r = math.ceil(fb.max_speed * dt)
    y0 = max(0, box.y0 - r)
    x0 = max(0, box.x0 - r)
    y1 = min(grid.h - 1, box.y1 + r)
    x1 = min(grid.w - 1, box.x1 + r)
    active = np.zeros((grid.t, grid.h, grid.w), dtype=bool)
    active[:, y0 : y1 + 1, x0 : x1 + 1] = True
    return MaskGrid(grid=grid, active=active)


def coverage(mask: MaskGrid, rel: RelevanceMap) -> float:
    """Relevance mass captured by the active cells (the accuracy proxy)."""
    if mask.grid != rel.grid:
        raise ValidationError("mask.grid", "mask and relevance map use different grids")
    return float(rel.weights[mask.active].sum())


@dataclass(frozen=True)
class SensingReport:
    sparsity: float
    samples: int
    cost: float


def sensing_report(mask: MaskGrid, per_sample_cost: float = 0.0) -> SensingReport:
    """Sparsity, sample count, and sampling cost of a mask."""
    if per_sample_cost < 0:
        raise ValidationError("per_sample_cost", "must be >= 0")
    samples = mask.active_count
    return SensingReport(
        sparsity=mask.sparsity,
        samples=samples,
        cost=samples * per_sample_cost,
    )


# ---------------------------------------------------------------------------
# file formats

def relevance_from_csv(text: str, grid: SensorGrid, normalize: bool = False) -> RelevanceMap:
    """Read ``t,y,x,weight`` rows (header required); unlisted cells weigh 0."""
    weights = np.zeros((grid.t, grid.h, grid.w))
    reader = csv.DictReader(io.StringIO(text))
    expected = ["t", "y", "x", "weight"]
    if reader.fieldnames != expected:
        raise ValidationError(
            "relevance.csv", f"header must be {','.join(expected)}, got {reader.fieldnames}"
        )
    for i, row in enumerate(reader):
        try:
            t, y, x = int(row["t"]), int(row["y"]), int(row["x"])
            weights[t, y, x] = float(row["weight"])
        except (ValueError, IndexError) as exc:
            raise ValidationError(f"relevance.csv row {i + 2}", str(exc)) from exc
    return RelevanceMap.from_weights(grid, weights, normalize=normalize)


def relevance_to_csv(rel: RelevanceMap) -> str:
    lines = ["t,y,x,weight"]
    for t in range(rel.grid.t):
        for y in range(rel.grid.h):
            for x in range(rel.grid.w):
                lines.append(f"{t},{y},{x},{float(rel.weights[t, y, x])!r}")
    return "\n".join(lines) + "\n"


def mask_to_rle_json(mask: MaskGrid) -> str:
    """Run-length encode the flattened (t, h, w) mask for inspection."""
    flat = mask.active.reshape(-1)
    runs: list[list[int]] = []
    pos = 0
    n = flat.size
    while pos < n:
        if flat[pos]:
            start = pos
            while pos < n and flat[pos]:
                pos += 1
            runs.append([start, pos - start])
        else:
            pos += 1
    doc = {"t": mask.grid.t, "h": mask.grid.h, "w": mask.grid.w, "runs": runs}
    return json.dumps(doc, indent=2) + "\n"


def mask_from_rle_json(text: str) -> MaskGrid:
    doc = json.loads(text)
    grid = SensorGrid(t=doc["t"], h=doc["h"], w=doc["w"])
    flat = np.zeros(grid.cells, dtype=bool)
    for start, length in doc["runs"]:
        flat[start : start + length] = True
    return MaskGrid(grid=grid, active=flat.reshape(grid.t, grid.h, grid.w))
