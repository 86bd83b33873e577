"""AWGN channel arithmetic.

Shannon capacity, required-rate bookkeeping, feasibility of a digital
(capacity-achieving) code for a given payload, the closed-form SNR threshold
where that feasibility flips (the "cliff"), and seeded Monte-Carlo symbol
corruption.  Everything here is a pure function of its inputs; randomness is
confined to :func:`awgn_corrupt` and fully determined by the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

#: Modes accepted by ChannelSpec.
ANALYTIC = "analytic"
MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class ChannelSpec:
    """One point-to-point AWGN link.

    ``n_symbols`` is the number of channel uses available per payload.  The
    default is 2 x bandwidth: two real symbols per hertz over a one-second
    framing (Nyquist rate), which is also how the 1 kHz reference link gets
    its 2000 uses.
    """

    bandwidth_hz: float
    snr_db: float
    n_symbols: int = 0  # 0 means "derive as 2 * bandwidth_hz"
    mode: str = ANALYTIC
    trials: int | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.bandwidth_hz <= 0:
            raise ValidationError("channel.bandwidth_hz", "must be > 0")
        if self.n_symbols == 0:
            object.__setattr__(self, "n_symbols", int(round(2 * self.bandwidth_hz)))
        if self.n_symbols < 1:
            raise ValidationError("channel.n_symbols", "must be >= 1")
        if self.mode not in (ANALYTIC, MONTE_CARLO):
            raise ValidationError("channel.mode", f"unknown mode {self.mode!r}")
        if self.mode == MONTE_CARLO:
            if self.trials is None or self.trials < 1:
                raise ValidationError("channel.trials", "must be >= 1 in monte_carlo mode")


@dataclass(frozen=True)
class SnrSweep:
    """Inclusive SNR grid from ``start_db`` to ``stop_db`` in ``step_db`` steps."""

    start_db: float = -20.0
    stop_db: float = 30.0
    step_db: float = 1.0

    def __post_init__(self):
        if self.step_db <= 0:
            raise ValidationError("sweep.step_db", "must be > 0")
        if self.start_db > self.stop_db:
            raise ValidationError("sweep.start_db", "must be <= stop_db")

    def points(self) -> list[float]:
        n = int(round((self.stop_db - self.start_db) / self.step_db)) + 1
        return [self.start_db + i * self.step_db for i in range(n)]


def snr_linear(snr_db: float) -> float:
    """dB -> linear power ratio."""
    if snr_db == math.inf:
        return math.inf
    return 10.0 ** (snr_db / 10.0)


def shannon_capacity(bandwidth_hz: float, snr_db: float) -> float:
    """Capacity of the AWGN link in bits/second: B * log2(1 + SNR)."""
    if bandwidth_hz <= 0:
        raise ValidationError("bandwidth_hz", "must be > 0")
    gamma = snr_linear(snr_db)
    if gamma == math.inf:
        return math.inf
    return bandwidth_hz * math.log2(1.0 + gamma)


def required_rate(payload_bits: float, window_s: float) -> float:
    """Data rate needed to move ``payload_bits`` within ``window_s`` seconds."""
    if window_s <= 0:
        raise ValidationError("window_s", "must be > 0")
    return payload_bits / window_s


@dataclass(frozen=True)
class Feasibility:
    feasible: bool
    margin_bits: float  # deliverable bits minus payload bits (negative when short)


def digital_feasible(payload_bits: float, spec: ChannelSpec) -> Feasibility:
    """Can a capacity-achieving code move the payload over this link?

    Feasible iff payload <= n_symbols * log2(1 + SNR); the margin is the
    unused (or missing) bit budget.
    """
    gamma = snr_linear(spec.snr_db)
    bound = math.inf if gamma == math.inf else spec.n_symbols * math.log2(1.0 + gamma)
    return Feasibility(feasible=payload_bits <= bound, margin_bits=bound - payload_bits)


def cliff_snr(payload_bits: float, n_symbols: int) -> float:
    """SNR (dB) at which ``digital_feasible`` flips from False to True.

    Closed-form inverse of the capacity bound: 10*log10(2^(payload/n) - 1).
    Returns +inf when the exponent would overflow a double (payload so large
    that no physical SNR reaches the bound).
    """
    if payload_bits <= 0:
        raise ValidationError("payload_bits", "must be > 0")
    if n_symbols <= 0:
        raise ValidationError("n_symbols", "must be > 0")
    ratio = payload_bits / n_symbols
    try:
        gamma = 2.0**ratio - 1.0
    except OverflowError:
        return math.inf
    if gamma == math.inf:
        return math.inf
    return 10.0 * math.log10(gamma)


def awgn_corrupt(symbols: np.ndarray, snr_db: float, seed: int) -> np.ndarray:
    """Add i.i.d. zero-mean Gaussian noise of variance 1/SNR to each symbol.

    The caller is responsible for normalizing ``symbols`` to unit average
    power so that ``snr_db`` really is the per-symbol SNR.  The draw is fully
    determined by ``seed`` (Philox counter-based generator, stable across
    platforms; reference draws are pinned in the test suite).
    """
    x = np.asarray(symbols, dtype=float)
    if snr_db == math.inf:
        return x.copy()
    sigma = math.sqrt(1.0 / snr_linear(snr_db))
    rng = np.random.Generator(np.random.Philox(seed))
    return x + sigma * rng.standard_normal(x.shape)
