"""Payload/distortion models for the three uplink transmission pipelines.

Three schemes move the same frame's worth of task content over the same
AWGN link and are compared on a common normalized distortion scale:

* ``traditional`` -- the compressed camera image (bits) over a digital
  capacity-achieving code; image quality follows a registered
  rate-quality curve of the bits actually delivered.
* ``ssc``         -- separation-based semantic coding: the 85-dim feature
  vector is projected to a 10-dim latent, uniformly quantized, and the
  resulting bits go over the digital code.  All-or-nothing: below the
  capacity cliff the receiver falls back to the prior mean.
* ``deepsc``      -- joint semantic-channel coding modeled as linear analog
  transmission: each feature is spread over m channel symbols and combined
  with a per-feature MMSE estimator, giving MSE 1/(1 + m*SNR) per feature.
  Degrades gracefully, no cliff.

Distortions are per-dimension and normalized to the unit-variance feature
prior, so 0 is perfect reconstruction and ``D_MAX`` = 1 is total outage
(receiver emits the prior mean).  The MMSE spread model and the rate-quality
curve are deliberately simple closed-form stand-ins for trained codecs; they
are proxies and every output labels them as such via the ``task_proxy``
column rather than any trained-network metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import ndtr

from .channel import (
    ANALYTIC,
    MONTE_CARLO,
    ChannelSpec,
    SnrSweep,
    cliff_snr,
    digital_feasible,
    snr_linear,
)
from .errors import ValidationError

CAMERA_DIMS = 3
SHAPE_DIMS = 10
POSE_DIMS = 72
FEATURE_DIMS = CAMERA_DIMS + SHAPE_DIMS + POSE_DIMS  # 85
LATENT_DIMS = 10

#: Distortion of a receiver that has learned nothing and emits the prior mean.
D_MAX = 1.0

#: Quantizer support for unit-variance inputs; P(|x| > 4) ~ 6e-5, clipped
#: values saturate at the outermost level.
QUANT_RANGE = 4.0

TRADITIONAL = "traditional"
SSC = "ssc"
DEEPSC = "deepsc"
SCHEMES = (DEEPSC, SSC, TRADITIONAL)

# Pinned at build time: the ssc projection is a fixed pseudo-random
# orthonormal basis, so encodings are reproducible across runs and platforms.
_PROJECTION_SEED = 1397572952

_projection_cache: np.ndarray | None = None


def projection_matrix() -> np.ndarray:
    """The fixed 10x85 row-orthonormal projection used by the ssc scheme."""
    global _projection_cache
    if _projection_cache is None:
        rng = np.random.Generator(np.random.Philox(_PROJECTION_SEED))
        raw = rng.standard_normal((FEATURE_DIMS, LATENT_DIMS))
        q, _ = np.linalg.qr(raw)  # q: 85x10 with orthonormal columns
        _projection_cache = np.ascontiguousarray(q.T)
    return _projection_cache


# ---------------------------------------------------------------------------
# payloads

@dataclass(eq=False)
class FeaturePayload:
    """The 85 task features: 3 camera + 10 body-shape + 72 pose values.

    Callers supply unit-variance normalized values; :meth:`random` draws a
    standard-normal payload for simulations.
    """

    camera: np.ndarray
    shape: np.ndarray
    pose: np.ndarray

    def __post_init__(self):
        self.camera = np.asarray(self.camera, dtype=float)
        self.shape = np.asarray(self.shape, dtype=float)
        self.pose = np.asarray(self.pose, dtype=float)
        if self.camera.shape != (CAMERA_DIMS,):
            raise ValidationError("features.camera", f"must have {CAMERA_DIMS} values")
        if self.shape.shape != (SHAPE_DIMS,):
            raise ValidationError("features.shape", f"must have {SHAPE_DIMS} values")
        if self.pose.shape != (POSE_DIMS,):
            raise ValidationError("features.pose", f"must have {POSE_DIMS} values")

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.camera, self.shape, self.pose])

    @classmethod
    def from_vector(cls, v: np.ndarray) -> "FeaturePayload":
        v = np.asarray(v, dtype=float)
        if v.shape != (FEATURE_DIMS,):
            raise ValidationError("features", f"must have {FEATURE_DIMS} values")
        return cls(v[:CAMERA_DIMS], v[CAMERA_DIMS : CAMERA_DIMS + SHAPE_DIMS],
                   v[CAMERA_DIMS + SHAPE_DIMS :])

    @classmethod
    def random(cls, seed: int) -> "FeaturePayload":
        rng = np.random.Generator(np.random.Philox(seed))
        return cls.from_vector(rng.standard_normal(FEATURE_DIMS))


@dataclass(eq=False)
class LatentCode:
    """Quantized 10-dim latent; ``dims`` holds the reconstruction values."""

    dims: np.ndarray
    bits_per_dim: int

    def __post_init__(self):
        self.dims = np.asarray(self.dims, dtype=float)
        if self.dims.shape != (LATENT_DIMS,):
            raise ValidationError("latent.dims", f"must have {LATENT_DIMS} values")
        if self.bits_per_dim < 0:
            raise ValidationError("latent.bits_per_dim", "must be >= 0")

    @property
    def payload_bits(self) -> int:
        return LATENT_DIMS * self.bits_per_dim


# ---------------------------------------------------------------------------
# results

@dataclass(frozen=True)
class SchemeResult:
    scheme: str
    snr_db: float
    feature_mse: float
    task_proxy: float
    payload_bits: float
    outage: bool

    def __post_init__(self):
        if not 0.0 <= self.feature_mse <= D_MAX:
            raise ValidationError("feature_mse", f"must be in [0, {D_MAX}]")
        if self.outage and self.feature_mse != D_MAX:
            raise ValidationError("outage", "outage rows must carry feature_mse = D_MAX")


SWEEP_CSV_HEADER = "scheme,snr_db,feature_mse,task_proxy,payload_bits,outage"


@dataclass
class SweepResult:
    rows: list[SchemeResult]

    def to_csv(self) -> str:
        lines = [SWEEP_CSV_HEADER]
        for r in self.rows:
            lines.append(
                f"{r.scheme},{r.snr_db!r},{r.feature_mse!r},{r.task_proxy!r},"
                f"{r.payload_bits!r},{'true' if r.outage else 'false'}"
            )
        return "\n".join(lines) + "\n"

    def scheme_rows(self, scheme: str) -> list[SchemeResult]:
        return [r for r in self.rows if r.scheme == scheme]


# ---------------------------------------------------------------------------
# uniform quantizer (midtread, saturating)

def quantize_uniform(values: np.ndarray, bits: int) -> np.ndarray:
    """Uniform midtread quantizer over [-QUANT_RANGE, QUANT_RANGE].

    2^bits reconstruction levels at integer multiples of the step, arranged
    like two's-complement integers so that 0 is always a level (hence a zero
    input round-trips to a zero output).  Out-of-range inputs saturate.
    ``bits`` = 0 collapses to the single level 0.
    """
    if bits < 0:
        raise ValidationError("bits", "must be >= 0")
    v = np.asarray(values, dtype=float)
    if bits == 0:
        return np.zeros_like(v)
    levels = 2**bits
    step = 2.0 * QUANT_RANGE / levels
    k = np.clip(np.round(v / step), -(levels // 2), levels // 2 - 1)
    return k * step


def quantizer_mse(bits: int) -> float:
    """Expected squared error of :func:`quantize_uniform` for N(0,1) input.

    Exact cell-by-cell integral for moderate widths; for very fine quantizers
    the interior is the standard step^2/12 granular term and only the two
    saturating cells are integrated exactly (the crossover error is below
    1e-12 and is covered by tests).
    """
    if bits < 0:
        raise ValidationError("bits", "must be >= 0")
    if bits == 0:
        return 1.0  # single level at 0: error is the full prior variance

    levels = 2**bits
    step = 2.0 * QUANT_RANGE / levels

    def _phi(x):
        return np.exp(-0.5 * np.square(x)) / math.sqrt(2.0 * math.pi)

    def _cell_mse(lo, hi, recon):
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        recon = np.asarray(recon, dtype=float)
        phi_lo, phi_hi = _phi(lo), _phi(hi)
        mass = ndtr(hi) - ndtr(lo)
        # x * phi(x) -> 0 as |x| -> inf; zero the bound first to avoid inf * 0
        lo_term = np.where(np.isfinite(lo), lo, 0.0) * phi_lo
        hi_term = np.where(np.isfinite(hi), hi, 0.0) * phi_hi
        return (1.0 + recon**2) * mass + lo_term - hi_term - 2.0 * recon * (phi_lo - phi_hi)

    if bits <= 16:
        k = np.arange(-(levels // 2), levels // 2)
        recon = k * step
        lo = (k - 0.5) * step
        hi = (k + 0.5) * step
        lo[0] = -np.inf
        hi[-1] = np.inf
        return float(np.sum(_cell_mse(lo, hi, recon)))

    top_recon = (levels // 2 - 1) * step
    bottom_recon = -(levels // 2) * step
    top_lo = top_recon - 0.5 * step
    bottom_hi = bottom_recon + 0.5 * step
    granular = (step**2 / 12.0) * float(ndtr(top_lo) - ndtr(bottom_hi))
    tails = float(_cell_mse(top_lo, np.inf, top_recon))
    tails += float(_cell_mse(-np.inf, bottom_hi, bottom_recon))
    return granular + tails


def projection_residual() -> float:
    """Mean squared orthonormality defect of the pinned projection.

    The latent is modeled as capturing the task content exactly (that is the
    premise of a trained 85->10 semantic encoder), so a perfectly orthonormal
    projection contributes zero distortion; this term surfaces any numerical
    defect in the pinned matrix instead of silently assuming it away.
    """
    p = projection_matrix()
    gram = p @ p.T
    return float(np.sum((gram - np.eye(LATENT_DIMS)) ** 2) / LATENT_DIMS)


# ---------------------------------------------------------------------------
# ssc: project + quantize + digital channel

def ssc_encode(f: FeaturePayload, bits_per_dim: int) -> LatentCode:
    """Project the 85 features to the fixed 10-dim latent and quantize."""
    z = projection_matrix() @ f.vector
    return LatentCode(dims=quantize_uniform(z, bits_per_dim), bits_per_dim=bits_per_dim)


def ssc_decode(code: LatentCode) -> np.ndarray:
    """Reconstruct the 85 features from a latent code (adjoint projection)."""
    return projection_matrix().T @ code.dims


def ssc_floor(bits_per_dim: int) -> float:
    """Distortion of the ssc scheme when the digital link succeeds."""
    return min(D_MAX, quantizer_mse(bits_per_dim) + projection_residual())


def ssc_distortion(spec: ChannelSpec, latent_bits: float, bits_per_dim: int) -> SchemeResult:
    """All-or-nothing distortion of the separation-based scheme.

    When the capacity-achieving code can carry ``latent_bits`` over the link,
    the only losses are the quantizer and the (numerically zero) projection
    defect; otherwise the receiver falls back to the prior mean (outage,
    distortion ``D_MAX``).
    """
    if latent_bits != LATENT_DIMS * bits_per_dim:
        raise ValidationError(
            "latent_bits", f"must equal {LATENT_DIMS} * bits_per_dim = {LATENT_DIMS * bits_per_dim}"
        )
    if digital_feasible(latent_bits, spec).feasible:
        mse = ssc_floor(bits_per_dim)
        outage = False
    else:
        mse = D_MAX
        outage = True
    return SchemeResult(
        scheme=SSC,
        snr_db=spec.snr_db,
        feature_mse=mse,
        task_proxy=task_proxy(mse),
        payload_bits=float(latent_bits),
        outage=outage,
    )


# ---------------------------------------------------------------------------
# deepsc: analog spreading + MMSE combining

def spread_factors(n_symbols: int) -> np.ndarray:
    """Symbols per feature when n channel uses carry 85 features.

    Every feature gets floor(n/85) symbols; the n mod 85 leftover symbols go
    round-robin to the lowest-index features (a deterministic, documented
    assignment).
    """
    if n_symbols < FEATURE_DIMS:
        raise ValidationError(
            "channel.n_symbols", f"must be >= {FEATURE_DIMS} to give every feature a symbol"
        )
    base, extra = divmod(n_symbols, FEATURE_DIMS)
    m = np.full(FEATURE_DIMS, base, dtype=int)
    m[:extra] += 1
    return m


def deepsc_feature_mse(m: int | np.ndarray, gamma: float) -> np.ndarray | float:
    """Per-feature MSE of m-fold analog spreading with MMSE combining.

    Exact for a unit-variance source over AWGN: 1 / (1 + m * SNR).
    """
    if gamma == math.inf:
        return np.zeros_like(np.asarray(m, dtype=float)) if np.ndim(m) else 0.0
    return 1.0 / (1.0 + np.asarray(m, dtype=float) * gamma)


def _deepsc_mc_mse(m: np.ndarray, gamma: float, trials: int, seed) -> np.ndarray:
    """Monte-Carlo estimate of the per-feature ensemble MSE.

    Each trial draws a fresh unit-variance feature vector and the noisy
    average of its m copies (the average of m AWGN observations is the
    sufficient statistic, so simulating it directly is distributionally
    identical to simulating every symbol), then applies the MMSE shrinkage.
    """
    rng = np.random.Generator(np.random.Philox(seed))
    sq = np.zeros(FEATURE_DIMS)
    remaining = trials
    chunk = 20000
    if gamma == math.inf:
        return sq
    shrink = (m * gamma) / (1.0 + m * gamma) if gamma > 0 else np.zeros(FEATURE_DIMS)
    noise_scale = np.where(m * gamma > 0, 1.0 / np.sqrt(np.maximum(m * gamma, 1e-300)), 0.0)
    while remaining > 0:
        n = min(chunk, remaining)
        x = rng.standard_normal((n, FEATURE_DIMS))
        if gamma > 0:
            ybar = x + rng.standard_normal((n, FEATURE_DIMS)) * noise_scale
            xhat = shrink * ybar
        else:
            xhat = np.zeros_like(x)
        sq += np.sum((xhat - x) ** 2, axis=0)
        remaining -= n
    return sq / trials


def deepsc_transmit(f: FeaturePayload, spec: ChannelSpec,
                    feature_bits: int = 32, seed=None) -> SchemeResult:
    """Distortion of the joint semantic-channel (analog) scheme.

    Analytic mode evaluates the exact ensemble MSE 1/(1 + m*SNR) per feature;
    monte_carlo mode estimates the same ensemble quantity by simulation
    (features redrawn from the unit-variance prior each trial), deterministic
    for a fixed seed.  ``payload_bits`` reports the fixed-width size of the
    feature vector for payload accounting; nothing digital is transmitted.
    """
    m = spread_factors(spec.n_symbols)
    gamma = snr_linear(spec.snr_db)
    if spec.mode == MONTE_CARLO:
        if seed is None:
            seed = spec.seed
        if seed is None:
            raise ValidationError("channel.seed", "required for monte_carlo mode")
        per_feature = _deepsc_mc_mse(m, gamma, spec.trials, seed)
    else:
        per_feature = np.asarray(deepsc_feature_mse(m, gamma))
    mse = min(D_MAX, float(np.mean(per_feature)))
    return SchemeResult(
        scheme=DEEPSC,
        snr_db=spec.snr_db,
        feature_mse=mse,
        task_proxy=task_proxy(mse),
        payload_bits=float(FEATURE_DIMS * feature_bits),
        outage=False,
    )


def deepsc_roundtrip(f: FeaturePayload, spec: ChannelSpec, seed: int) -> np.ndarray:
    """One symbol-level realization: spread, corrupt, MMSE-combine.

    Unlike :func:`deepsc_transmit` this actually pushes every channel symbol
    through :func:`semxr.channel.awgn_corrupt` and returns the reconstructed
    feature vector; useful for demos and for validating the reduced
    Monte-Carlo path against the full one.
    """
    from .channel import awgn_corrupt

    m = spread_factors(spec.n_symbols)
    x = f.vector
    symbols = np.repeat(x, m)
    received = awgn_corrupt(symbols, spec.snr_db, seed)
    gamma = snr_linear(spec.snr_db)
    bounds = np.concatenate([[0], np.cumsum(m)])
    means = np.add.reduceat(received, bounds[:-1]) / m
    if gamma == math.inf:
        return means
    shrink = (m * gamma) / (1.0 + m * gamma)
    return shrink * means


# ---------------------------------------------------------------------------
# traditional: image bits + rate-quality curve

class RateQualityCurve:
    """Registered monotone-decreasing bits -> distortion curve.

    Stands in for the trained downsample+codec stack: quality improves (and
    distortion falls) as more bits get through.  Registration probes the
    curve on a wide grid and rejects non-monotone or out-of-range curves.
    """

    _PROBE = np.concatenate([[0.0], np.logspace(0, 9, 181)])

    def __init__(self, fn, name: str = "custom"):
        self._fn = fn
        self.name = name
        probe = np.array([float(fn(b)) for b in self._PROBE])
        if np.any(probe[1:] > probe[:-1] + 1e-12):
            raise ValidationError("proxy", f"curve {name!r} is not monotone non-increasing")
        if probe.min() < 0.0 or probe.max() > D_MAX:
            raise ValidationError("proxy", f"curve {name!r} leaves [0, {D_MAX}]")

    def __call__(self, bits: float) -> float:
        return float(self._fn(bits))


def default_rate_quality_curve(b0: float = 1e5) -> RateQualityCurve:
    """1 / (1 + bits/b0): distortion 1 at zero bits, halved every b0 bits-ish."""
    return RateQualityCurve(lambda bits: 1.0 / (1.0 + bits / b0), name="reciprocal")


def traditional_distortion(image_payload_bits: float, spec: ChannelSpec,
                           proxy: RateQualityCurve,
                           mode: str = "adaptive") -> SchemeResult:
    """Distortion of the conventional image pipeline over the digital link.

    adaptive: the sender scales the image down to whatever the link can
    carry (deliverable = n * log2(1+SNR) bits), so quality degrades smoothly
    but from a much larger payload.  fixed: the full image is sent as-is and
    the result is an outage whenever the link cannot carry it.
    """
    if mode not in ("adaptive", "fixed"):
        raise ValidationError("mode", f"unknown traditional mode {mode!r}")
    feas = digital_feasible(image_payload_bits, spec)
    if mode == "adaptive":
        deliverable = feas.margin_bits + image_payload_bits  # = capacity bound
        mse = proxy(min(image_payload_bits, deliverable))
        outage = False
    else:
        if feas.feasible:
            mse = proxy(image_payload_bits)
            outage = False
        else:
            mse = D_MAX
            outage = True
    return SchemeResult(
        scheme=TRADITIONAL,
        snr_db=spec.snr_db,
        feature_mse=mse,
        task_proxy=task_proxy(mse),
        payload_bits=image_payload_bits,
        outage=outage,
    )


# ---------------------------------------------------------------------------
# task proxy + sweeps

def task_proxy(feature_mse: float) -> float:
    """Monotone map from normalized feature MSE to a task-error proxy.

    sqrt of the MSE: preserves ordering, 0 at perfect reconstruction, 1 at
    total outage.  A stand-in for task metrics produced by trained networks,
    which are out of scope here.
    """
    if not 0.0 <= feature_mse <= D_MAX:
        raise ValidationError("feature_mse", f"must be in [0, {D_MAX}]")
    return math.sqrt(feature_mse)


def run_sweep(schemes, sweep: SnrSweep, spec: ChannelSpec, *,
              image_bits: float = 1_600_000.0,
              bits_per_dim: int = 32,
              feature_bits: int = 32,
              proxy: RateQualityCurve | None = None,
              traditional_mode: str = "adaptive",
              payload: FeaturePayload | None = None) -> SweepResult:
    """Evaluate the requested schemes at every SNR point of the sweep.

    Rows come back sorted by (scheme, snr_db), one row per pair.  Analytic
    mode is fully deterministic; monte_carlo mode is deterministic for a
    fixed seed (each grid point gets an independent child seed derived by
    counter, so results do not depend on evaluation order).
    """
    schemes = sorted(set(schemes))
    if not schemes:
        raise ValidationError("schemes", "must not be empty")
    unknown = [s for s in schemes if s not in SCHEMES]
    if unknown:
        raise ValidationError("schemes", f"unknown scheme(s): {', '.join(unknown)}")
    if proxy is None:
        proxy = default_rate_quality_curve()
    if payload is None:
        payload = FeaturePayload.random(seed=spec.seed if spec.seed is not None else 0)

    latent_bits = LATENT_DIMS * bits_per_dim
    rows: list[SchemeResult] = []
    for scheme in schemes:
        for i, snr_db in enumerate(sweep.points()):
            point = replace(spec, snr_db=snr_db)
            if scheme == SSC:
                rows.append(ssc_distortion(point, latent_bits, bits_per_dim))
            elif scheme == DEEPSC:
                child = None
                if point.mode == MONTE_CARLO:
                    if spec.seed is None:
                        raise ValidationError("channel.seed", "required for monte_carlo mode")
                    child = np.random.SeedSequence([spec.seed, i])
                rows.append(
                    deepsc_transmit(payload, point, feature_bits=feature_bits, seed=child)
                )
            else:
                rows.append(traditional_distortion(image_bits, point, proxy, traditional_mode))
    rows.sort(key=lambda r: (r.scheme, r.snr_db))
    return SweepResult(rows=rows)


def ssc_cliff_location(latent_bits: float, n_symbols: int) -> float:
    """SNR (dB) where the ssc outage step sits; the digital cliff."""
    return cliff_snr(latent_bits, n_symbols)
