"""
Motion-to-photon budget and required data rates
===============================================

Walks one frame of the reference uplink scenario through all seven pipeline
stages, checks the 10 ms motion-to-photon budget, and prints the data rate
each payload/window pair demands next to the 0.1-2.0 Gbps network peak band.
"""

from semxr import (
    FeaturesPayload,
    bundled_scenario_path,
    check_budget,
    load_scenario_file,
    rate_requirements_table,
    simulate_frame,
)
from semxr.pipeline import NETWORK_PEAK_HIGH, NETWORK_PEAK_LOW

cfg = load_scenario_file(bundled_scenario_path("casestudy1"))

# One frame, no masks: the traditional pipeline sends the whole 2K image.
trace = simulate_frame(cfg)
print("per-stage timing (traditional uplink):")
for stage in trace.stages:
    print(f"  {stage.stage:<9s} {stage.duration * 1e3:8.3f} ms")
report = check_budget(trace, cfg.budget)
print(f"  total     {trace.total * 1e3:8.3f} ms  "
      f"({'PASS' if report.passed else 'FAIL'} vs {report.budget * 1e3:.0f} ms, "
      f"slack {report.slack * 1e3:+.3f} ms)")

# Swapping the image payload for the 85 semantic features only shrinks stages.
from dataclasses import replace

semantic = simulate_frame(replace(cfg, uplink_payload=FeaturesPayload(85, 32)))
saved = trace.duration_of("uplink") - semantic.duration_of("uplink")
print(f"\nsemantic uplink: {semantic.duration_of('uplink') * 1e6:.2f} us "
      f"instead of {trace.duration_of('uplink') * 1e3:.2f} ms "
      f"({saved * 1e3:.3f} ms saved)")

# Required rates for the bundled payload/window cases.
print(f"\nrequired rates (network peak band {NETWORK_PEAK_LOW / 1e9:.1f}-"
      f"{NETWORK_PEAK_HIGH / 1e9:.1f} Gbps):")
for row in rate_requirements_table(cfg.rate_cases):
    flag = "within band" if row.feasible else "INFEASIBLE"
    print(f"  {row.label:<26s} {row.payload_bits / 1e6:10.3f} Mb "
          f"in {row.window_s * 1e3:6.3f} ms -> {row.required_rate_bps / 1e9:10.3f} Gbps  {flag}")
