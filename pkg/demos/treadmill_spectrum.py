"""Chest channel on a treadmill: breathing and step frequency from one spectrum.

A chest-worn fiber sees two slow oscillations while running, the breath
and the bounce of each step. Both show up as lines in the power spectrum,
and the step line plus belt speed gives the stride.
"""

from fiberpulse.core import Site
from fiberpulse.dsp import power_spectrum, spectral_peaks
from fiberpulse.synth import ScenarioConfig, simulate_scenario
from fiberpulse.vitals import cadence_step_length, respiration_rate

speed_kmh = 7.0
cfg = ScenarioConfig(seed=1, duration=120, respiration_rate=0.3, cadence=2.43)
recording, truth = simulate_scenario(cfg)
chest = recording.channel(Site.CHEST)

spectrum = power_spectrum(chest, segment_seconds=30)
print(f"{spectrum.n_segments} Hann segments, bin width {spectrum.df:.4f} Hz")
for p in spectral_peaks(spectrum, max_peaks=3):
    print(f"  peak at {p.frequency:6.3f} Hz, power {p.power:.3g}")

# The two estimators search separate bands, so neither can grab the other's line.
breathing = respiration_rate(chest)
gait = cadence_step_length(chest, speed_kmh / 3.6)
print(f"breathing {breathing.rate:.1f}/min (simulated {60 * truth.respiration_rate:.1f})")
print(f"cadence   {gait.cadence:.3f} Hz (simulated {truth.cadence})")
print(f"step      {gait.step_length:.3f} m at {speed_kmh} km/h")
