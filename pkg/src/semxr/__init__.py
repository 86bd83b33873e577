"""semxr: desk-scale simulator of a semantic XR pipeline.

Quantifies what semantic sensing, semantic rendering, and semantic
communication buy a wireless XR system: fewer sensor samples, fewer render
samples, and far fewer air-interface bits, all checked against the
motion-to-photon latency budget.  Everything is deterministic given a seed.
"""

from .broadcast import Airtime, BroadcastGroup, airtime, broadcast_total, savings, unicast_total
from .channel import (
    ChannelSpec,
    Feasibility,
    SnrSweep,
    awgn_corrupt,
    cliff_snr,
    digital_feasible,
    required_rate,
    shannon_capacity,
    snr_linear,
)
from .errors import ScenarioParseError, SemXRError, ValidationError
from .pipeline import (
    BudgetReport,
    PipelineTrace,
    RateRow,
    StageTiming,
    check_budget,
    rate_requirements_table,
    simulate_frame,
    uplink_window,
)
from .rendering import (
    ImportanceMap,
    RayBudget,
    RenderConfig,
    allocate_budget,
    full_sample_count,
    quality_proxy,
    render_time,
    speedup,
)
from .scenario import (
    BlobPayload,
    DeviceSpec,
    FeaturesPayload,
    ImagePayload,
    LatencyBudget,
    LatentPayload,
    ScenarioConfig,
    bundled_scenario_path,
    load_scenario,
    load_scenario_file,
    payload_bits,
    serialize_scenario,
)
from .semcodec import (
    D_MAX,
    DEEPSC,
    FEATURE_DIMS,
    LATENT_DIMS,
    SSC,
    TRADITIONAL,
    FeaturePayload,
    LatentCode,
    RateQualityCurve,
    SchemeResult,
    SweepResult,
    deepsc_feature_mse,
    deepsc_roundtrip,
    deepsc_transmit,
    default_rate_quality_curve,
    quantize_uniform,
    quantizer_mse,
    run_sweep,
    spread_factors,
    ssc_decode,
    ssc_distortion,
    ssc_encode,
    ssc_floor,
    task_proxy,
    traditional_distortion,
)
from .sensing import (
    BoundingBox,
    FeedbackState,
    MaskGrid,
    RelevanceMap,
    SensorGrid,
    coverage,
    feedback_mask,
    mask_to_rle_json,
    prior_mask,
    sensing_report,
)

__version__ = "0.1.0"
