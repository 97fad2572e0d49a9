"""Software model of a capillary-fiber wearable sensor and its analysis chain.

Modules
-------
core     traces, recordings, segmentation, basic statistics
synth    synthetic chest/wrist/ankle recordings with ground truth
dsp      band-pass filtering, detrending, resampling, spectra
pulse    beat feet, fiducial points, inter-site pulse time difference
vitals   heart rate, PRV, respiration, cadence, PWV, report assembly
io       CSV/JSON file formats
cli      ``fiberpulse`` command line
"""

__version__ = "0.1.0"

from .core import Recording, Site, Trace, basic_stats, make_trace, segment
from .dsp import FilterSpec, Spectrum, bandpass, power_spectrum, spectral_peaks
from .pulse import BeatAnnotation, BeatSeries, beat_series, detect_feet, pulse_time_difference
from .synth import ScenarioConfig, SensorTransfer, simulate_scenario
from .vitals import VitalsReport, analyze_recording, build_report

__all__ = [
    "Recording", "Site", "Trace", "basic_stats", "make_trace", "segment",
    "FilterSpec", "Spectrum", "bandpass", "power_spectrum", "spectral_peaks",
    "BeatAnnotation", "BeatSeries", "beat_series", "detect_feet", "pulse_time_difference",
    "ScenarioConfig", "SensorTransfer", "simulate_scenario",
    "VitalsReport", "analyze_recording", "build_report",
]
