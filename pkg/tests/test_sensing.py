import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from semxr.errors import ValidationError
from semxr.sensing import (
    BoundingBox,
    FeedbackState,
    MaskGrid,
    RelevanceMap,
    SensorGrid,
    coverage,
    feedback_mask,
    mask_from_rle_json,
    mask_to_rle_json,
    prior_mask,
    relevance_from_csv,
    relevance_to_csv,
    sensing_report,
)


def brute_force_min_cells(weights: np.ndarray, target: float) -> int:
    """Smallest number of cells whose weight sum reaches the target."""
    flat = weights.reshape(-1)
    n = flat.size
    best = n
    for size in range(n + 1):
        for combo in itertools.combinations(range(n), size):
            if flat[list(combo)].sum() >= target:
                return size
    return best


def test_prior_mask_worked_example():
    grid = SensorGrid(1, 2, 2)
    rel = RelevanceMap.from_weights(grid, [0.4, 0.3, 0.2, 0.1])
    mask = prior_mask(rel, 0.7)
    assert mask.active_count == 2
    assert mask.active[0, 0, 0] and mask.active[0, 0, 1]  # the 0.4 and 0.3 cells
    assert brute_force_min_cells(rel.weights, 0.7) == 2
    assert coverage(mask, rel) >= 0.7


def test_prior_mask_full_coverage_activates_everything():
    grid = SensorGrid(1, 2, 3)
    rel = RelevanceMap.from_weights(grid, [0.25, 0.2, 0.2, 0.15, 0.15, 0.05])
    mask = prior_mask(rel, 1.0)
    assert mask.active_count == grid.cells


def test_prior_mask_uniform_symmetry():
    grid = SensorGrid(1, 2, 5)
    rel = RelevanceMap.uniform(grid)
    mask = prior_mask(rel, 0.5)
    assert mask.active_count == 5
    # deterministic tie-break: the first five cells in (t, y, x) order
    assert mask.active.reshape(-1)[:5].all()


def test_prior_mask_matches_brute_force_on_random_small_grids():
    rng = np.random.Generator(np.random.Philox(100))
    for _ in range(40):
        t, h, w = rng.integers(1, 3), rng.integers(1, 3), rng.integers(1, 3)
        grid = SensorGrid(int(t), int(h), int(w))
        raw = rng.random((grid.t, grid.h, grid.w)) + 1e-6
        rel = RelevanceMap.from_weights(grid, raw / raw.sum())
        target = float(rng.uniform(0.05, 0.99))
        mask = prior_mask(rel, target)
        assert coverage(mask, rel) >= target
        assert mask.active_count == brute_force_min_cells(rel.weights, target)


def test_prior_mask_monotone_in_target():
    grid = SensorGrid(2, 3, 3)
    rng = np.random.Generator(np.random.Philox(7))
    raw = rng.random((2, 3, 3))
    rel = RelevanceMap.from_weights(grid, raw / raw.sum())
    previous = np.zeros((2, 3, 3), dtype=bool)
    for target in (0.1, 0.3, 0.5, 0.7, 0.9, 1.0):
        mask = prior_mask(rel, target)
        assert (previous <= mask.active).all()  # greedy prefix grows
        previous = mask.active


def test_prior_mask_rejects_bad_target():
    rel = RelevanceMap.uniform(SensorGrid(1, 2, 2))
    for target in (0.0, 1.5, -0.1):
        with pytest.raises(ValidationError):
            prior_mask(rel, target)


def test_feedback_mask_dilation_example():
    grid = SensorGrid(1, 64, 64)
    fb = FeedbackState(BoundingBox(10, 10, 20, 20), max_speed=2.0)
    mask = feedback_mask(fb, grid, dt=1)
    assert mask.active_count == 225  # 15 x 15 per frame
    active_y, active_x = np.nonzero(mask.active[0])
    assert active_y.min() == 8 and active_y.max() == 22
    assert active_x.min() == 8 and active_x.max() == 22


def test_feedback_mask_zero_speed_keeps_box():
    grid = SensorGrid(1, 64, 64)
    fb = FeedbackState(BoundingBox(10, 10, 20, 20), max_speed=0.0)
    mask = feedback_mask(fb, grid, dt=3)
    assert mask.active_count == 121


def test_feedback_mask_clamps_to_grid():
    grid = SensorGrid(2, 8, 8)
    fb = FeedbackState(BoundingBox(3, 3, 4, 4), max_speed=100.0)
    mask = feedback_mask(fb, grid, dt=1)
    assert mask.active_count == grid.cells


def test_feedback_mask_nested_in_speed_and_dt():
    grid = SensorGrid(1, 32, 32)
    box = BoundingBox(12, 12, 18, 18)
    prev = np.zeros((1, 32, 32), dtype=bool)
    for speed in (0.0, 0.5, 1.0, 2.0, 4.0):
        mask = feedback_mask(FeedbackState(box, speed), grid, dt=1)
        assert (prev <= mask.active).all()
        prev = mask.active
    prev = np.zeros((1, 32, 32), dtype=bool)
    for dt in (1, 2, 3, 5):
        mask = feedback_mask(FeedbackState(box, 1.0), grid, dt=dt)
        assert (prev <= mask.active).all()
        prev = mask.active


def test_feedback_mask_rejects_out_of_grid_box():
    with pytest.raises(ValidationError):
        feedback_mask(FeedbackState(BoundingBox(0, 0, 99, 99), 1.0), SensorGrid(1, 8, 8))


def test_coverage_endpoints_and_mismatch():
    grid = SensorGrid(1, 2, 2)
    rel = RelevanceMap.uniform(grid)
    all_on = MaskGrid(grid, np.ones((1, 2, 2), dtype=bool))
    all_off = MaskGrid(grid, np.zeros((1, 2, 2), dtype=bool))
    assert coverage(all_on, rel) == pytest.approx(1.0)
    assert coverage(all_off, rel) == 0.0
    with pytest.raises(ValidationError):
        coverage(MaskGrid(SensorGrid(1, 3, 3), np.ones((1, 3, 3), bool)), rel)


def test_sensing_report_numbers():
    grid = SensorGrid(1, 4, 4)
    active = np.zeros((1, 4, 4), dtype=bool)
    active[0, :2, :2] = True  # 4 of 16 cells: 25% active
    mask = MaskGrid(grid, active)
    report = sensing_report(mask, per_sample_cost=2.0)
    assert report.sparsity == 0.75
    assert report.samples == 4
    assert report.cost == 8.0

    empty = MaskGrid(grid, np.zeros((1, 4, 4), bool))
    assert sensing_report(empty, 5.0).cost == 0.0
    with pytest.raises(ValidationError):
        sensing_report(mask, per_sample_cost=-1.0)


@settings(max_examples=30)
@given(st.integers(min_value=0, max_value=2**20))
def test_rle_round_trip(bits):
    flat = np.array([(bits >> i) & 1 for i in range(20)], dtype=bool)
    mask = MaskGrid(SensorGrid(1, 4, 5), flat.reshape(1, 4, 5))
    again = mask_from_rle_json(mask_to_rle_json(mask))
    assert np.array_equal(again.active, mask.active)
    assert again.grid == mask.grid


def test_relevance_csv_round_trip_and_header_check():
    grid = SensorGrid(1, 2, 2)
    rel = RelevanceMap.from_weights(grid, [0.4, 0.3, 0.2, 0.1])
    text = relevance_to_csv(rel)
    again = relevance_from_csv(text, grid)
    assert np.array_equal(again.weights, rel.weights)
    with pytest.raises(ValidationError):
        relevance_from_csv("a,b,c\n1,2,3\n", grid)


def test_relevance_map_validation():
    grid = SensorGrid(1, 2, 2)
    with pytest.raises(ValidationError):
        RelevanceMap.from_weights(grid, [0.5, 0.5, 0.5, 0.5])  # sums to 2
    with pytest.raises(ValidationError):
        RelevanceMap.from_weights(grid, [1.2, -0.2, 0.0, 0.0])  # negative
    normalized = RelevanceMap.from_weights(grid, [2.0, 1.0, 1.0, 0.0], normalize=True)
    assert normalized.weights[0, 0, 0] == 0.5
