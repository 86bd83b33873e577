import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from semxr.channel import (
    ChannelSpec,
    SnrSweep,
    awgn_corrupt,
    cliff_snr,
    digital_feasible,
    required_rate,
    shannon_capacity,
    snr_linear,
)
from semxr.errors import ValidationError


def test_snr_linear_decades():
    assert snr_linear(0.0) == 1.0
    assert snr_linear(30.0) == 1000.0
    assert snr_linear(-20.0) == 0.01
    assert snr_linear(math.inf) == math.inf


def test_shannon_capacity_reference_points():
    assert shannon_capacity(1000.0, 0.0) == 1000.0
    assert shannon_capacity(2000.0, 0.0) == 2000.0
    # independent high-precision oracle
    import mpmath

    expected = float(1000 * mpmath.log(1001, 2))
    assert shannon_capacity(1000.0, 30.0) == pytest.approx(expected, rel=1e-14)


def test_shannon_capacity_monotone_in_snr_linear_in_bandwidth():
    grid = np.linspace(-30, 40, 141)
    caps = [shannon_capacity(1000.0, s) for s in grid]
    assert all(b > a for a, b in zip(caps, caps[1:]))
    for s in (-10.0, 0.0, 17.3):
        assert shannon_capacity(3000.0, s) == pytest.approx(3 * shannon_capacity(1000.0, s))


def test_shannon_capacity_rejects_bad_bandwidth():
    with pytest.raises(ValidationError):
        shannon_capacity(0.0, 10.0)


def test_required_rate_paper_figures():
    assert required_rate(1.6e6, 1.25e-3) == 1.28e9
    assert required_rate(100e6, 2e-3) == 5.0e10
    assert required_rate(110e6, 3.667e-3) == pytest.approx(3.0e10, rel=0.02)


@pytest.mark.parametrize("window", [0.0, -1.0])
def test_required_rate_rejects_bad_window(window):
    with pytest.raises(ValidationError):
        required_rate(1.0, window)


def test_digital_feasible_margin():
    spec = ChannelSpec(bandwidth_hz=1000.0, snr_db=0.0)
    res = digital_feasible(320.0, spec)
    assert res.feasible
    assert res.margin_bits == pytest.approx(1680.0)

    high = ChannelSpec(bandwidth_hz=1000.0, snr_db=30.0)
    assert not digital_feasible(1.6e6, high).feasible


def test_digital_feasible_boundary_margin_vanishes():
    cliff = cliff_snr(320.0, 2000)
    spec = ChannelSpec(bandwidth_hz=1000.0, snr_db=cliff)
    assert abs(digital_feasible(320.0, spec).margin_bits) < 1e-6


def _search_threshold(payload: float, n_symbols: int) -> float:
    """Independent bisection of digital_feasible to 1e-7 dB."""
    lo, hi = -60.0, 60.0
    for _ in range(64):
        mid = (lo + hi) / 2
        spec = ChannelSpec(bandwidth_hz=n_symbols / 2.0, snr_db=mid, n_symbols=n_symbols)
        if digital_feasible(payload, spec).feasible:
            hi = mid
        else:
            lo = mid
    return hi


def test_cliff_snr_matches_bisection_and_reference_points():
    assert abs(cliff_snr(320.0, 2000) - _search_threshold(320.0, 2000)) < 1e-6
    assert cliff_snr(320.0, 2000) == pytest.approx(-9.31, abs=0.02)
    assert cliff_snr(2000.0, 2000) == 0.0
    # 2^800 is astronomically infeasible but still finite in closed form
    assert cliff_snr(1.6e6, 2000) == pytest.approx(8000 * math.log10(2.0), rel=1e-12)


def test_cliff_snr_overflow_guard():
    assert cliff_snr(1e9, 1) == math.inf


def test_cliff_snr_rejects_nonpositive():
    with pytest.raises(ValidationError):
        cliff_snr(0.0, 2000)
    with pytest.raises(ValidationError):
        cliff_snr(320.0, 0)


@given(st.floats(min_value=-30, max_value=40), st.floats(min_value=0.01, max_value=10))
def test_feasibility_monotone_in_snr(snr_db, delta_db):
    payload = 320.0
    lower = digital_feasible(payload, ChannelSpec(bandwidth_hz=1000.0, snr_db=snr_db))
    upper = digital_feasible(
        payload, ChannelSpec(bandwidth_hz=1000.0, snr_db=snr_db + delta_db)
    )
    if lower.feasible:
        assert upper.feasible


def test_awgn_infinite_snr_is_identity():
    x = np.linspace(-2, 2, 17)
    out = awgn_corrupt(x, math.inf, seed=5)
    assert np.array_equal(out, x)


def test_awgn_deterministic_per_seed():
    x = np.ones(1000)
    a = awgn_corrupt(x, 3.0, seed=99)
    b = awgn_corrupt(x, 3.0, seed=99)
    c = awgn_corrupt(x, 3.0, seed=100)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_awgn_empirical_variance():
    x = np.zeros(1_000_000)
    noise = awgn_corrupt(x, 0.0, seed=31)
    assert abs(float(np.var(noise)) - 1.0) < 0.01


def test_awgn_scales_with_snr():
    x = np.zeros(200_000)
    low = awgn_corrupt(x, -10.0, seed=8)
    assert float(np.var(low)) == pytest.approx(10.0, rel=0.02)


def test_philox_reference_draws_are_stable():
    # pinned draws so cross-platform determinism regressions surface here
    expected = {
        0: [-0.2059740286292238, -0.12884495093462758, -0.28978987549091256],
        12345: [-0.40121325396620006, -0.04850858025490094, -0.723757234083067],
        987654321: [-0.32826228057372564, -0.5132908571871129, -0.22844617668288694],
    }
    for seed, draws in expected.items():
        got = np.random.Generator(np.random.Philox(seed)).standard_normal(3)
        assert got.tolist() == draws


def test_channel_spec_defaults_and_validation():
    spec = ChannelSpec(bandwidth_hz=1000.0, snr_db=10.0)
    assert spec.n_symbols == 2000  # two real symbols per hertz over 1 s
    with pytest.raises(ValidationError):
        ChannelSpec(bandwidth_hz=0.0, snr_db=0.0)
    with pytest.raises(ValidationError):
        ChannelSpec(bandwidth_hz=1000.0, snr_db=0.0, mode="monte_carlo")
    with pytest.raises(ValidationError):
        ChannelSpec(bandwidth_hz=1000.0, snr_db=0.0, mode="warp")


def test_snr_sweep_grid():
    sweep = SnrSweep(-20.0, 30.0, 1.0)
    pts = sweep.points()
    assert len(pts) == 51
    assert pts[0] == -20.0 and pts[-1] == 30.0
    with pytest.raises(ValidationError):
        SnrSweep(0.0, 10.0, 0.0)
    with pytest.raises(ValidationError):
        SnrSweep(10.0, 0.0, 1.0)
