"""Twenty minutes of wrist pulses: interval statistics and a text histogram."""

from fiberpulse.synth import ScenarioConfig, simulate_scenario
from fiberpulse.vitals import analyze_recording

cfg = ScenarioConfig(seed=3, duration=1200, ibi_sd=0.0568, noise_sd=0.03)
recording, _ = simulate_scenario(cfg)
report = analyze_recording(recording)
prv = report.prv

print(f"heart rate {report.heart_rate:.1f} bpm over {prv.n_beats} beats")
print(f"mean interval {1e3 * prv.mean_ibi:.1f} ms, SDNN {1e3 * prv.sdnn:.1f} ms")
print(f"Gaussian fit mu={prv.gaussian_fit.mu:.4f} s sigma={prv.gaussian_fit.sigma:.4f} s")
if prv.long_term_flag_caveat:
    print("(recording is shorter than 24 h; the 50 ms SDNN norm does not strictly apply)")

peak = max(b.count for b in prv.histogram)
for b in prv.histogram:
    print(f"{1e3 * b.bin_center:7.1f} ms | {'#' * round(50 * b.count / peak)} {b.count}")
