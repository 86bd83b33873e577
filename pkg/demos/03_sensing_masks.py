"""
Semantic sensing masks
======================

Builds the two mask policies on a small sensor grid and shows what they keep.
The prior-based mask concentrates samples where task relevance lives; the
feedback-based mask tracks the last detection box plus reachable motion.
"""

import numpy as np

from semxr import (
    BoundingBox,
    FeedbackState,
    RelevanceMap,
    SensorGrid,
    coverage,
    feedback_mask,
    prior_mask,
    sensing_report,
)

grid = SensorGrid(t=1, h=12, w=24)

# Relevance learned offline: a hand-sized hot spot left of center.
rel = RelevanceMap.gaussian(grid, sigma=3.0, center=(6.0, 8.0))


def show(mask, title):
    print(title)
    for row in mask.active[0]:
        print("  " + "".join("#" if cell else "." for cell in row))


for target in (0.5, 0.9):
    mask = prior_mask(rel, target)
    rep = sensing_report(mask, per_sample_cost=1e-9)
    show(mask, f"\nprior mask, coverage target {target:.0%}:")
    print(f"  coverage {coverage(mask, rel):.3f}, sparsity {rep.sparsity:.1%}, "
          f"{rep.samples} of {grid.cells} cells sampled")

# Feedback: last frame's detection sat at rows 4..7, cols 14..19 and the
# object moves at most 1.5 cells/frame.
fb = FeedbackState(prev_box=BoundingBox(4, 14, 7, 19), max_speed=1.5)
mask = feedback_mask(fb, grid, dt=1)
show(mask, "\nfeedback mask (box dilated by ceil(speed*dt) = 2 cells):")
rep = sensing_report(mask)
print(f"  sparsity {rep.sparsity:.1%}, {rep.samples} cells sampled")

# Sampling cost scales with the active cells, not the sensor size.
full = grid.cells * 1e-9
print(f"\nsampling cost at 1 ns/sample: full sensor {full * 1e9:.0f} ns, "
      f"prior mask {sensing_report(prior_mask(rel, 0.9), 1e-9).cost * 1e9:.0f} ns")
