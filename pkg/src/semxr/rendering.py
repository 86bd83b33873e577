"""Per-ray sample budgets for a volumetric renderer.

A full render evaluates h*w*n_full network samples (one ray per pixel,
n_full samples per ray).  Under a total sample budget the allocator hands
every pixel a floor of n_min samples and splits the surplus proportionally
to semantic importance with the largest-remainder method, capping at n_full
and redistributing any capped overflow.  Fewer samples mean a faster render
at the price of a spatially varying quality proxy (1/samples per ray).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class RenderConfig:
    h: int
    w: int
    n_full: int = 192

    def __post_init__(self):
        if min(self.h, self.w, self.n_full) < 1:
            raise ValidationError("render", "h, w, n_full must all be >= 1")

    @property
    def pixels(self) -> int:
        return self.h * self.w


@dataclass(eq=False)
class ImportanceMap:
    """Per-pixel semantic importance; non-negative, sums to 1."""

    weights: np.ndarray  # shape (h, w)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.ndim != 2:
            raise ValidationError("importance.weights", "must be a 2-D array")
        if np.any(self.weights < 0):
            raise ValidationError("importance.weights", "must all be >= 0")
        if abs(float(self.weights.sum()) - 1.0) > 1e-9:
            raise ValidationError("importance.weights", "must sum to 1")

    @classmethod
    def from_weights(cls, raw, normalize: bool = False) -> "ImportanceMap":
        w = np.asarray(raw, dtype=float)
        if normalize:
            total = w.sum()
            if total <= 0:
                raise ValidationError("importance.weights", "cannot normalize an all-zero map")
            w = w / total
        return cls(weights=w)

    @classmethod
    def uniform(cls, h: int, w: int) -> "ImportanceMap":
        return cls(np.full((h, w), 1.0 / (h * w)))

    @classmethod
    def gaussian(cls, h: int, w: int, sigma: float,
                 center: tuple[float, float] | None = None) -> "ImportanceMap":
        if sigma <= 0:
            raise ValidationError("importance.sigma", "must be > 0")
        cy, cx = center if center else ((h - 1) / 2.0, (w - 1) / 2.0)
        y = np.arange(h)[:, None]
        x = np.arange(w)[None, :]
        blob = np.exp(-((y - cy) ** 2 + (x - cx) ** 2) / (2.0 * sigma**2))
        return cls.from_weights(blob, normalize=True)


@dataclass(eq=False)
class RayBudget:
    """Integer sample count per pixel."""

    per_pixel: np.ndarray  # int, shape (h, w)

    def __post_init__(self):
        self.per_pixel = np.asarray(self.per_pixel, dtype=int)
        if self.per_pixel.ndim != 2:
            raise ValidationError("budget.per_pixel", "must be a 2-D array")
        if np.any(self.per_pixel < 1):
            raise ValidationError("budget.per_pixel", "every ray needs at least one sample")

    @property
    def total(self) -> int:
        return int(self.per_pixel.sum())


def full_sample_count(cfg: RenderConfig) -> int:
    """Network evaluations of an unmasked render: h * w * n_full."""
    return cfg.pixels * cfg.n_full


def allocate_budget(imp: ImportanceMap, total_budget: int, n_min: int,
                    cfg: RenderConfig) -> RayBudget:
    """Split a sample budget across rays by importance.

    Every pixel keeps a floor of ``n_min`` samples.  The surplus is shared by
    the largest-remainder rule on ``surplus * importance`` quotas, capped at
    ``n_full``; whatever the caps push back out is handed one sample at a
    time down the remainder order (cycling if needed).  The result sums to
    the budget exactly and never gives a less important pixel more samples
    than a more important one.  Ties break in (y, x) order.
    """
    if imp.weights.shape != (cfg.h, cfg.w):
        raise ValidationError("importance.weights", f"must have shape ({cfg.h}, {cfg.w})")
    if not 1 <= n_min <= cfg.n_full:
        raise ValidationError("n_min", "must be in [1, n_full]")
    floor_total = cfg.pixels * n_min
    ceiling_total = cfg.pixels * cfg.n_full
    if not floor_total <= total_budget <= ceiling_total:
        raise ValidationError(
            "total_budget", f"must be in [{floor_total}, {ceiling_total}] for this grid"
        )

    surplus = total_budget - floor_total
    w = imp.weights.reshape(-1)
    quota = surplus * w
    base = np.floor(quota).astype(int)
    frac = quota - base
    alloc = n_min + np.minimum(base, cfg.n_full - n_min)

    y_idx, x_idx = np.unravel_index(np.arange(w.size), imp.weights.shape)
    order = np.lexsort((x_idx, y_idx, -frac))

    pool = total_budget - int(alloc.sum())
    while pool > 0:
        handed = 0
        for i in order:
            if pool == 0:
                break
            if alloc[i] < cfg.n_full:
                alloc[i] += 1
                pool -= 1
                handed += 1
        if handed == 0:
            raise ValidationError("total_budget", "exceeds the grid ceiling")  # unreachable
    return RayBudget(per_pixel=alloc.reshape(cfg.h, cfg.w))


def speedup(budget: RayBudget, cfg: RenderConfig) -> float:
    """Render-time ratio versus the full render: full samples / kept samples."""
    return full_sample_count(cfg) / budget.total


def quality_proxy(budget: RayBudget, imp: ImportanceMap) -> float:
    """Importance-weighted mean per-ray distortion, with distortion 1/samples.

    Lower is better; a full render scores 1/n_full everywhere.
    """
    if imp.weights.shape != budget.per_pixel.shape:
        raise ValidationError("importance.weights", "shape differs from the budget")
    return float(np.sum(imp.weights / budget.per_pixel))


def render_time(samples: float, throughput: float) -> float:
    """Seconds to push ``samples`` network evaluations at ``throughput``/s."""
    if throughput <= 0:
        raise ValidationError("throughput", "must be > 0")
    return samples / throughput


# ---------------------------------------------------------------------------
# file formats

def importance_from_csv(text: str, h: int, w: int, normalize: bool = False) -> ImportanceMap:
    """Read ``y,x,weight`` rows (header required); unlisted pixels weigh 0."""
    weights = np.zeros((h, w))
    reader = csv.DictReader(io.StringIO(text))
    expected = ["y", "x", "weight"]
    if reader.fieldnames != expected:
        raise ValidationError(
            "importance.csv", f"header must be {','.join(expected)}, got {reader.fieldnames}"
        )
    for i, row in enumerate(reader):
        try:
            weights[int(row["y"]), int(row["x"])] = float(row["weight"])
        except (ValueError, IndexError) as exc:
            raise ValidationError(f"importance.csv row {i + 2}", str(exc)) from exc
    return ImportanceMap.from_weights(weights, normalize=normalize)


def budget_to_csv(budget: RayBudget) -> str:
    """``y,x,samples`` rows; the heatmap contract of the plotting component."""
    lines = ["y,x,samples"]
    h, w = budget.per_pixel.shape
    for y in range(h):
        for x in range(w):
            lines.append(f"{y},{x},{budget.per_pixel[y, x]}")
    return "\n".join(lines) + "\n"
