"""Synthetic fiber-sensor recordings with ground-truth labels.

The simulator stands in for the wearable: it builds a mechanical
perturbation per body site (breathing and gait at the chest, arterial
pulses at wrist and ankle), maps it to transmitted intensity through a
sensor transfer function, and adds white noise.

Random streams come from numpy's PCG64 generator (``numpy.random.default_rng``)
seeded with ``[seed, stream_id]``; stream ids are fixed below so every
channel draws from its own reproducible stream.

Beat morphology
---------------
A beat is a sum of Gaussian lobes placed at fractions of its own period,
measured from the foot. The rising half of each lobe is rescaled so it
starts from exactly zero at the foot::

    rise(t) = (g(t) - g(0)) / (1 - g(0)),   0 <= t < center

This gives the pulse a true corner at the foot, where the intersecting
tangent construction and the waveform minimum coincide. Lobes keep their
Gaussian falling half, and each beat's tail is allowed to run on under the
next beat, so the train stays continuous.
"""

from dataclasses import dataclass, field
import math
from typing import NamedTuple, Optional

import numpy as np

from .core import DEFAULT_SAMPLE_RATE, Recording, Site, make_trace
from .errors import InvalidConfig, InvalidTemplate, InvalidWindow

IBI_MIN = 0.3
IBI_MAX = 2.0

STREAM_BEATS = 0
STREAM_NOISE = {Site.CHEST: 1, Site.WRIST: 2, Site.ANKLE: 3, Site.UNSPECIFIED: 4}

# a beat's lobes are evaluated this many periods past its foot
_TAIL_PERIODS = 2.0


@dataclass(frozen=True)
class Lobe:
    center_frac: float
    amplitude: float
    width_frac: float


@dataclass(frozen=True)
class BeatTemplate:
    """Gaussian-lobe beat shape.

    ``systolic`` and ``diastolic`` index into ``lobes``; ``diastolic`` is
    None for single-lobe shapes.
    """

    site: Site
    lobes: tuple
    systolic: int = 0
    diastolic: Optional[int] = None

    def __post_init__(self):
        lobes = tuple(self.lobes)
        object.__setattr__(self, "lobes", lobes)
        if not 1 <= len(lobes) <= 3:
            raise InvalidTemplate(f"template needs 1-3 lobes, got {len(lobes)}")
        for lobe in lobes:
            if not 0 <= lobe.center_frac < 1:
                raise InvalidTemplate(f"lobe center {lobe.center_frac} outside [0, 1)")
            if not lobe.amplitude > 0:
                raise InvalidTemplate("lobe amplitudes must be > 0")
            if not lobe.width_frac > 0:
                raise InvalidTemplate("lobe widths must be > 0")
        centers = [lobe.center_frac for lobe in lobes]
        if any(b <= a for a, b in zip(centers, centers[1:])):
            raise InvalidTemplate("lobe centers must be strictly increasing")
        if not 0 <= self.systolic < len(lobes):
            raise InvalidTemplate("systolic index out of range")
        if self.diastolic is not None:
            if not 0 <= self.diastolic < len(lobes):
                raise InvalidTemplate("diastolic index out of range")
            if self.diastolic <= self.systolic:
                raise InvalidTemplate("systolic lobe must precede the diastolic lobe")


WRIST_TEMPLATE = BeatTemplate(
    Site.WRIST, (Lobe(0.12, 1.0, 0.09), Lobe(0.42, 0.45, 0.10)), systolic=0, diastolic=1
)
ANKLE_TEMPLATE = BeatTemplate(
    Site.ANKLE, (Lobe(0.16, 1.0, 0.12), Lobe(0.60, 0.25, 0.12)), systolic=0, diastolic=1
)
# post-release beats during cuff deflation: one tall, narrow lobe
RELEASE_TEMPLATE = BeatTemplate(Site.WRIST, (Lobe(0.08, 1.6, 0.06),), systolic=0)

DEFAULT_TEMPLATES = {Site.WRIST: WRIST_TEMPLATE, Site.ANKLE: ANKLE_TEMPLATE}


def _lobe(lobe, t, period):
    c = lobe.center_frac * period
    s = lobe.width_frac * period
    g = np.exp(-0.5 * ((t - c) / s) ** 2)
    g0 = math.exp(-0.5 * (c / s) ** 2)
    if g0 < 1.0:
        rising = (t < c)
        g = np.where(rising, (g - g0) / (1.0 - g0), g)
    return lobe.amplitude * np.where(t >= 0, g, 0.0)


def beat_shape(template, t, period, drop_diastolic=False):
    """Evaluate one beat at times ``t`` (s, relative to its foot)."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    for k, lobe in enumerate(template.lobes):
        if drop_diastolic and k == template.diastolic:
            continue
        out += _lobe(lobe, t, period)
    return out


def beat_waveform(template, period, sample_rate=DEFAULT_SAMPLE_RATE):
    """One period of ``template`` sampled from the foot (value 0 at t=0)."""
    if not period > 0:
        raise InvalidTemplate(f"period must be > 0, got {period}")
    n = max(1, int(round(period * sample_rate)))
    return beat_shape(template, np.arange(n) / sample_rate, period)


@dataclass(frozen=True)
class Occlusion:
    """Cuff timeline (s): inflation ramp, full occlusion, then release."""

    inflate_start: float
    full_occlusion: float
    release: float
    suppress_frac: float = 0.6
    burst_beats: int = 5

    def check(self, duration):
        if not 0 <= self.inflate_start < self.full_occlusion < self.release < duration:
            raise InvalidWindow(
                "need 0 <= inflate_start < full_occlusion < release < duration"
            )
        if not 0 <= self.suppress_frac <= 1:
            raise InvalidWindow("suppress_frac must lie in [0, 1]")

    @property
    def suppress_start(self):
        return self.inflate_start + self.suppress_frac * (self.full_occlusion - self.inflate_start)


@dataclass(frozen=True, kw_only=True)
class ScenarioConfig:
    seed: int
    duration: float = 60.0
    sample_rate: float = DEFAULT_SAMPLE_RATE
    heart_rate_mean: float = 60.0 / 1.05
    ibi_sd: float = 0.0568
    respiration_rate: float = 0.25
    respiration_depth: float = 1.0
    cadence: float = 0.0
    cadence_depth: float = 0.4
    breath_hold_windows: tuple = ()
    occlusion: Optional[Occlusion] = None
    inter_site_delay: float = 0.092
    noise_sd: float = 0.01
    pulse_leakage: float = 0.0

    def __post_init__(self):
        object.__setattr__(
            self, "breath_hold_windows",
            tuple(tuple(map(float, w)) for w in self.breath_hold_windows),
        )
        if isinstance(self.occlusion, dict):
            object.__setattr__(self, "occlusion", Occlusion(**self.occlusion))

    def check(self):
        if not isinstance(self.seed, (int, np.integer)) or isinstance(self.seed, bool):
            raise InvalidConfig(f"seed must be an integer, got {self.seed!r}")
        if not self.duration > 0:
            raise InvalidConfig("duration must be > 0")
        if not self.sample_rate > 0:
            raise InvalidConfig("sample_rate must be > 0")
        if not self.heart_rate_mean > 0:
            raise InvalidConfig("heart_rate_mean must be > 0")
        if self.ibi_sd < 0:
            raise InvalidConfig("ibi_sd must be >= 0")
        if self.respiration_rate < 0 or self.cadence < 0:
            raise InvalidConfig("respiration_rate and cadence must be >= 0")
        if self.noise_sd < 0:
            raise InvalidConfig("noise_sd must be >= 0")
        if self.inter_site_delay < 0:
            raise InvalidConfig("inter_site_delay must be >= 0")
        for w in self.breath_hold_windows:
            _check_window(w, self.duration)
        if self.occlusion is not None:
            self.occlusion.check(self.duration)

    @property
    def mean_ibi(self):
        return 60.0 / self.heart_rate_mean


def _check_window(w, duration):
    if len(w) != 2 or not 0 <= w[0] < w[1] <= duration:
        raise InvalidWindow(f"window {w} must satisfy 0 <= t0 < t1 <= {duration}")


@dataclass(frozen=True)
class SensorTransfer:
    """Perturbation-to-intensity map of the fiber.

    ``decreasing`` polarity means more deformation transmits less light.
    With ``monotonic=False`` the perturbation is folded about
    ``fold_point`` (a tent map) before the linear response.
    """

    baseline: float = 10.0
    gain: float = 1.0
    polarity: str = "decreasing"
    monotonic: bool = True
    fold_point: float = 1.0

    def __post_init__(self):
        if not self.baseline > 0 or not self.gain > 0:
            raise InvalidConfig("transfer baseline and gain must be > 0")
        if self.polarity not in ("decreasing", "increasing"):
            raise InvalidConfig(f"unknown polarity {self.polarity!r}")


class BeatState(NamedTuple):
    scale: float
    diastolic_suppressed: bool
    release_burst: bool


@dataclass(frozen=True)
class GroundTruth:
    beat_foot_times: dict
    respiration_rate: float
    cadence: float
    inter_site_delay: float
    breath_hold_windows: tuple = ()
    occlusion: Optional[Occlusion] = None
    beat_states: dict = field(default_factory=dict)

    def feet(self, site):
        return np.asarray(self.beat_foot_times[Site(site)])


def _rng(seed, stream):
    return np.random.default_rng([int(seed), stream])


def beat_times(config):
    """Foot times of the beat process: first foot at 0, Gaussian IBIs.

    Intervals are drawn i.i.d. from N(60/HR, ibi_sd) and clipped to
    [0.3, 2.0] s. Returns feet strictly inside ``[0, duration)`` plus one
    extra foot past the end, so every beat has a period.
    """
    config.check()
    rng = _rng(config.seed, STREAM_BEATS)
    feet = [0.0]
    while feet[-1] < config.duration + config.inter_site_delay:
        chunk = rng.normal(config.mean_ibi, config.ibi_sd, size=64)
        for ibi in np.clip(chunk, IBI_MIN, IBI_MAX):
            feet.append(feet[-1] + float(ibi))
            if feet[-1] >= config.duration + config.inter_site_delay:
                break
    return np.array(feet)


def _occlusion_state(occ, t, burst_index):
    if occ is None or t < occ.inflate_start:
        return BeatState(1.0, False, False)
    if burst_index is not None and burst_index < occ.burst_beats:
        return BeatState(1.0, False, True)
    if t >= occ.release:
        return BeatState(1.0, False, False)
    scale = max(0.0, 1.0 - (t - occ.inflate_start) / (occ.full_occlusion - occ.inflate_start))
    return BeatState(scale, t >= occ.suppress_start, False)


def occlusion_envelope(occlusion, duration, sample_rate=DEFAULT_SAMPLE_RATE, beat_period=1.05):
    """Per-sample cuff state.

    Returns ``(amplitude_scale, diastolic_suppressed, release_burst)``
    arrays. The scale ramps linearly from 1 to 0 across the inflation
    phase and stays 0 until release; the release burst lasts
    ``burst_beats`` beat periods.
    """
    occlusion.check(duration)
    n = int(round(duration * sample_rate))
    t = np.arange(n) / sample_rate
    ramp = (t - occlusion.inflate_start) / (occlusion.full_occlusion - occlusion.inflate_start)
    scale = np.where(t < occlusion.inflate_start, 1.0, np.clip(1.0 - ramp, 0.0, 1.0))
    scale = np.where(t >= occlusion.release, 1.0, scale)
    suppressed = (t >= occlusion.suppress_start) & (t < occlusion.release)
    burst = (t >= occlusion.release) & (t < occlusion.release + occlusion.burst_beats * beat_period)
    return scale, suppressed, burst


def render_pulses(feet, template, duration, sample_rate, occlusion=None):
    """Sum beats with feet at ``feet`` onto a ``[0, duration)`` grid.

    The last entry of ``feet`` only closes the previous period. Returns the
    perturbation samples and one :class:`BeatState` per rendered beat.
    """
    n = int(round(duration * sample_rate))
    out = np.zeros(n)
    states = []
    released = 0
    for k in range(len(feet) - 1):
        foot, period = feet[k], feet[k + 1] - feet[k]
        if foot >= duration:
            break
        burst_index = None
        if occlusion is not None and foot >= occlusion.release:
            burst_index = released
            released += 1
        state = _occlusion_state(occlusion, foot, burst_index)
        states.append(state)
        tmpl = RELEASE_TEMPLATE if state.release_burst else template
        i0 = max(0, math.ceil(foot * sample_rate - 1e-9))
        i1 = min(n, math.ceil((foot + _TAIL_PERIODS * period) * sample_rate))
        if i1 <= i0 or state.scale == 0:
            continue
        t = np.arange(i0, i1) / sample_rate - foot
        out[i0:i1] += state.scale * beat_shape(tmpl, t, period, state.diastolic_suppressed)
    return out, states


def pulse_train(config, template=WRIST_TEMPLATE, delay=0.0, occluded=True):
    """Pulse perturbation for one site plus its ground truth.

    ``delay`` shifts every foot (inter-site transit); ``occluded`` applies
    the config's cuff timeline, if any.
    """
    feet = beat_times(config) + delay
    occ = config.occlusion if occluded else None
    samples, states = render_pulses(feet, template, config.duration, config.sample_rate, occ)
    site = template.site
    shown = feet[feet < config.duration]
    truth = GroundTruth(
        beat_foot_times={site: tuple(shown)},
        respiration_rate=config.respiration_rate,
        cadence=config.cadence,
        inter_site_delay=delay,
        breath_hold_windows=config.breath_hold_windows,
        occlusion=occ,
        beat_states={site: tuple(states)},
    )
    return make_trace(config.sample_rate, 0.0, samples, site), truth


def respiration_wave(rate, depth, duration, holds=(), sample_rate=DEFAULT_SAMPLE_RATE, ramp=1.0):
    """Breathing perturbation: ``depth * sin(2 pi rate t)``, still during holds.

    Inside each hold window the amplitude is exactly zero; it fades out
    over the ``ramp`` seconds before the window and back in over the
    ``ramp`` seconds after it with raised-cosine edges.
    """
    if rate < 0:
        raise InvalidConfig("respiration rate must be >= 0")
    n = int(round(duration * sample_rate))
    t = np.arange(n) / sample_rate
    env = np.ones(n)
    for w in holds:
        _check_window(w, duration)
        h0, h1 = w
        e = np.ones(n)
        down = (t >= h0 - ramp) & (t < h0)
        e[down] = 0.5 * (1 + np.cos(np.pi * (t[down] - (h0 - ramp)) / ramp))
        e[(t >= h0) & (t < h1)] = 0.0
        up = (t >= h1) & (t < h1 + ramp)
        e[up] = 0.5 * (1 - np.cos(np.pi * (t[up] - h1) / ramp))
        env = np.minimum(env, e)
    return depth * env * np.sin(2 * np.pi * rate * t)


def gait_wave(cadence, depth, duration, sample_rate=DEFAULT_SAMPLE_RATE):
    """Step-frequency oscillation; all zeros when standing still."""
    n = int(round(duration * sample_rate))
    if cadence == 0:
        return np.zeros(n)
    t = np.arange(n) / sample_rate
    return depth * np.sin(2 * np.pi * cadence * t)


def apply_sensor_transfer(perturbation, transfer=SensorTransfer(), noise_sd=0.0, seed=0):
    """Map a perturbation trace to transmitted intensity, plus white noise.

    ``seed`` may be an int or a sequence of ints (passed to
    ``numpy.random.default_rng``).
    """
    p = perturbation.samples
    if not transfer.monotonic:
        p = transfer.fold_point - np.abs(p - transfer.fold_point)
    sign = -1.0 if transfer.polarity == "decreasing" else 1.0
    y = transfer.baseline + sign * transfer.gain * p
    if noise_sd > 0:
        y = y + np.random.default_rng(seed).normal(0.0, noise_sd, size=y.size)
    return perturbation.replace(samples=y)


def simulate_scenario(config, templates=None, transfer=SensorTransfer()):
    """Three-channel recording (chest, wrist, ankle) and its ground truth.

    Wrist and ankle share one beat process; ankle feet trail the wrist by
    ``inter_site_delay``. The cuff timeline, when configured, acts on the
    wrist only.
    """
    config.check()
    templates = {**DEFAULT_TEMPLATES, **(templates or {})}
    fs, dur = config.sample_rate, config.duration

    wrist_p, wrist_truth = pulse_train(config, templates[Site.WRIST])
    ankle_p, ankle_truth = pulse_train(
        config, templates[Site.ANKLE], delay=config.inter_site_delay, occluded=False
    )
    chest = respiration_wave(
        config.respiration_rate, config.respiration_depth, dur,
        config.breath_hold_windows, fs,
    ) + gait_wave(config.cadence, config.cadence_depth, dur, fs)
    if config.pulse_leakage:
        leak, _ = pulse_train(config, templates[Site.WRIST], occluded=False)
        chest = chest + config.pulse_leakage * leak.samples
    chest_p = make_trace(fs, 0.0, chest, Site.CHEST)

    channels = [
        apply_sensor_transfer(p, transfer, config.noise_sd, [config.seed, STREAM_NOISE[p.site]])
        for p in (chest_p, wrist_p, ankle_p)
    ]
    truth = GroundTruth(
        beat_foot_times={**wrist_truth.beat_foot_times, **ankle_truth.beat_foot_times},
        respiration_rate=config.respiration_rate,
        cadence=config.cadence,
        inter_site_delay=config.inter_site_delay,
        breath_hold_windows=config.breath_hold_windows,
        occlusion=config.occlusion,
        beat_states={**wrist_truth.beat_states, **ankle_truth.beat_states},
    )
    return Recording(tuple(channels), label=f"scenario seed={config.seed}"), truth
