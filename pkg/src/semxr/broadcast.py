"""Multi-user downlink accounting: broadcast the shared content once.

When several users watch the same scene, most of the semantic stream is
identical for all of them.  Sending the shared part once on a broadcast
channel and only the per-user residuals individually saves exactly
(users - 1) * shared_bits over per-user unicast, and the airtime shrinks by
the same ratio as the bit totals (both ride the same link rate).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .channel import ChannelSpec, shannon_capacity
from .errors import ValidationError


@dataclass(frozen=True)
class BroadcastGroup:
    """users viewers; shared_bits common to all; residual_bits per user."""

    users: int
    shared_bits: float
    residual_bits: tuple[float, ...]

    def __post_init__(self):
        if self.users < 1:
            raise ValidationError("broadcast.users", "must be >= 1")
        if self.shared_bits < 0:
            raise ValidationError("broadcast.shared_bits", "must be >= 0")
        if len(self.residual_bits) != self.users:
            raise ValidationError("broadcast.residual_bits", "must list one value per user")
        if any(r < 0 for r in self.residual_bits):
            raise ValidationError("broadcast.residual_bits", "must all be >= 0")


def unicast_total(g: BroadcastGroup) -> float:
    """Bits to serve every user individually: sum of (shared + residual)."""
    return sum(g.shared_bits + r for r in g.residual_bits)


def broadcast_total(g: BroadcastGroup) -> float:
    """Bits when the shared part goes out once: shared + sum of residuals."""
    return g.shared_bits + sum(g.residual_bits)


def savings(g: BroadcastGroup) -> float:
    """Bits saved by broadcasting: exactly (users - 1) * shared_bits."""
    return (g.users - 1) * g.shared_bits


@dataclass(frozen=True)
class Airtime:
    broadcast_s: float
    unicast_s: float
    ratio: float  # broadcast_s / unicast_s, computed from the bit totals

    def __post_init__(self):
        if self.broadcast_s > self.unicast_s:
            raise ValidationError("airtime", "broadcast airtime cannot exceed unicast airtime")


def airtime(g: BroadcastGroup, spec: ChannelSpec | None = None, *,
            rate_bps: float | None = None,
            per_user_snr_db: tuple[float, ...] | None = None) -> Airtime:
    """Seconds on air for both delivery modes over the same link.

    The link rate is either the fixed ``rate_bps`` or the Shannon capacity of
    ``spec``; with a per-user SNR list the weakest user's capacity gates the
    whole group (everyone must decode the broadcast).  Since both totals ride
    the same rate, the airtime ratio IS the bit-total ratio; ``ratio`` is
    computed from the totals so the identity is exact rather than subject to
    two float divisions.
    """
    if rate_bps is None:
        if spec is None:
            raise ValidationError("airtime", "needs a channel spec or a fixed rate")
        if per_user_snr_db is not None:
            if len(per_user_snr_db) != g.users:
                raise ValidationError(
                    "broadcast.per_user_snr_db", "must list one value per user"
                )
            rate_bps = min(
                shannon_capacity(spec.bandwidth_hz, snr) for snr in per_user_snr_db
            )
        else:
            rate_bps = shannon_capacity(spec.bandwidth_hz, spec.snr_db)
    if rate_bps <= 0 or not math.isfinite(rate_bps):
        raise ValidationError("airtime.rate_bps", f"must be finite and > 0, got {rate_bps}")
    b = broadcast_total(g)
    u = unicast_total(g)
    return Airtime(
        broadcast_s=b / rate_bps,
        unicast_s=u / rate_bps,
        ratio=b / u if u > 0 else 1.0,
    )
