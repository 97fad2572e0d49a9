"""Beat detection, fiducial points and inter-site pulse time difference."""

from dataclasses import dataclass
import math
from typing import NamedTuple, Optional

import numpy as np
from scipy import ndimage, signal, stats

from .core import Site
from .dsp import FilterSpec, bandpass
from .errors import FiducialOrderError, NoBeatsFound, NoMatchedPairs

AS_IS = "as-is"
INVERTED = "inverted"


@dataclass(frozen=True)
class DetectorConfig:
    """Beat detector tuning.

    Everything runs on a Savitzky-Golay smoothed copy of the trace
    (``smooth_seconds`` window for detection, ``fiducial_smooth_seconds``
    for fiducial points). Candidates are maxima of the smoothed upslope that clear
    ``threshold_frac`` of the rolling ``envelope_seconds`` maximum of that
    upslope, at least ``refractory`` s apart. ``floor_frac`` of the
    median envelope is an absolute floor that keeps flat stretches (cuff
    occlusion, sensor off) from promoting noise to beats.
    """

    smooth_seconds: float = 0.12
    fiducial_smooth_seconds: float = 0.06
    envelope_seconds: float = 5.0
    threshold_frac: float = 0.4
    floor_frac: float = 0.1
    refractory: float = 0.3
    search_back: float = 0.3
    systolic_frac: float = 0.6
    notch_prominence: float = 0.02
    notch_search_frac: float = 0.85
    noise_floor_k: float = 6.0


@dataclass(frozen=True)
class BeatAnnotation:
    foot_time: float
    systolic_time: float
    systolic_amp: float
    notch_time: Optional[float] = None
    diastolic_time: Optional[float] = None
    diastolic_amp: Optional[float] = None

    def __post_init__(self):
        if not self.foot_time < self.systolic_time:
            raise FiducialOrderError(
                f"foot {self.foot_time} must precede systole {self.systolic_time}"
            )
        if (self.notch_time is None) != (self.diastolic_time is None):
            raise FiducialOrderError("notch and diastolic peak come as a pair")
        if self.notch_time is not None:
            if not self.systolic_time < self.notch_time <= self.diastolic_time:
                raise FiducialOrderError("need systolic < notch <= diastolic")
            if self.diastolic_amp is None or not math.isfinite(self.diastolic_amp):
                raise FiducialOrderError("diastolic amplitude missing or non-finite")
        if not math.isfinite(self.systolic_amp):
            raise FiducialOrderError("systolic amplitude is not finite")

    @property
    def has_diastolic(self):
        return self.diastolic_time is not None


@dataclass(frozen=True)
class BeatSeries:
    beats: tuple
    source_site: Site = Site.UNSPECIFIED
    polarity_used: str = AS_IS

    def __post_init__(self):
        object.__setattr__(self, "beats", tuple(self.beats))
        feet = self.foot_times
        if feet.size > 1 and np.any(np.diff(feet) <= 0):
            raise FiducialOrderError("beat feet must be strictly increasing")

    def __len__(self):
        return len(self.beats)

    def __iter__(self):
        return iter(self.beats)

    @property
    def foot_times(self):
        return np.array([b.foot_time for b in self.beats], dtype=float)

    def between(self, t0, t1):
        """Beats whose foot lies in ``[t0, t1)``."""
        return BeatSeries(
            tuple(b for b in self.beats if t0 <= b.foot_time < t1),
            self.source_site, self.polarity_used,
        )


def normalize_polarity(trace, tie_tol=0.05):
    """Orient the trace so beats are upward deflections.

    Pulses are skewed toward their peaks; a clearly negative sample
    skewness means they point down and the trace is negated. Skewness
    within ``tie_tol`` of zero leaves the trace untouched.
    """
    x = trace.samples
    if np.ptp(x) == 0:
        return trace, AS_IS
    if stats.skew(x) < -tie_tol:
        return trace.replace(samples=-x), INVERTED
    return trace, AS_IS


def _smoothing_window(sample_rate, seconds):
    w = max(5, int(round(seconds * sample_rate)))
    return w if w % 2 else w + 1


def _smooth(x, sample_rate, seconds, deriv=0):
    w = _smoothing_window(sample_rate, seconds)
    if x.size < w:
        w = x.size if x.size % 2 else x.size - 1
    if w < 5:
        return np.gradient(x) * sample_rate if deriv else x.copy()
    y = signal.savgol_filter(x, w, 3, deriv=deriv, mode="interp")
    return y * sample_rate if deriv else y


def _vertex(y, i):
    """Parabolic vertex through ``y[i-1:i+2]``: (fractional index, value)."""
    if i <= 0 or i >= y.size - 1:
        return float(i), float(y[i])
    a, b, c = y[i - 1], y[i], y[i + 1]
    denom = a - 2 * b + c
    if denom == 0:
        return float(i), float(b)
    off = 0.5 * (a - c) / denom
    off = min(max(off, -0.5), 0.5)
    return i + off, float(b - 0.25 * (a - c) * off)


def _at(y, pos):
    return float(np.interp(pos, np.arange(y.size), y))


def detect_feet(trace, config=DetectorConfig()):
    """Pulse foot times by the intersecting-tangents method.

    For each beat the tangent at the point of maximum upslope is extended
    back until it meets the horizontal tangent through the preceding
    minimum; their crossing is the foot. Sample positions are refined
    with parabolic interpolation.

    Expects a band-passed trace whose beats point upward (see
    :func:`normalize_polarity`).

    Raises
    ------
    NoBeatsFound
        The trace is flat or no upslope clears the detector threshold.
    """
    fs = trace.sample_rate
    x = trace.samples
    if x.size < 5 or np.ptp(x) <= 1e-12 * max(1.0, float(np.max(np.abs(x)))):
        raise NoBeatsFound("trace is flat")

    xs = _smooth(x, fs, config.smooth_seconds)
    slope = _smooth(x, fs, config.smooth_seconds, deriv=1)
    rising = np.maximum(slope, 0.0)
    win = max(1, int(round(config.envelope_seconds * fs)))
    envelope = ndimage.maximum_filter1d(rising, size=win, mode="nearest")
    floor = config.floor_frac * float(np.median(envelope))
    threshold = np.maximum(config.threshold_frac * envelope, floor)
    if not np.any(threshold > 0):
        raise NoBeatsFound("no upslope in trace")
    distance = max(1, int(round(config.refractory * fs)))
    cand, _ = signal.find_peaks(slope, height=threshold, distance=distance)
    cand = cand[slope[cand] > 0]

    back = max(2, int(round(config.search_back * fs)))
    feet = []
    for m in cand:
        pos_m, s = _vertex(slope, m)
        if s <= 0:
            continue
        lo = max(0, m - back)
        b = lo + int(np.argmin(xs[lo:m + 1]))
        _, base = _vertex(xs, b) if lo < b < m else (b, float(xs[b]))
        pos_f = pos_m + (base - _at(xs, pos_m)) * fs / s
        pos_f = max(pos_f, float(lo))
        t = trace.start_time + pos_f / fs
        if feet and t <= feet[-1]:
            continue
        feet.append(t)
    if not feet:
        raise NoBeatsFound("no beat cleared the detector threshold")
    return np.array(feet)


def locate_fiducials(trace, foot_times, config=DetectorConfig(), polarity=AS_IS):
    """Systolic peak, dicrotic notch and diastolic peak for every beat.

    Per beat: systole is the maximum between the foot and
    ``systolic_frac`` of the interval to the next foot; the notch is the
    most prominent local minimum after systole; the diastolic peak is the
    first local maximum after the notch. Notch and diastole are reported
    absent unless both the notch and the diastolic peak stand out by
    ``notch_prominence`` of the systolic amplitude, and by ``noise_floor_k``
    times the residual noise left after smoothing. The search stops at the
    next foot or ``notch_search_frac`` of the median interval, whichever is
    first. Amplitudes are measured from the foot level.
    """
    fs = trace.sample_rate
    xs = _smooth(trace.samples, fs, config.fiducial_smooth_seconds)
    resid = xs - _smooth(trace.samples, fs, config.smooth_seconds)
    noise = 1.4826 * float(np.median(np.abs(resid - np.median(resid))))
    feet = np.asarray(foot_times, dtype=float)
    if feet.size == 0:
        raise NoBeatsFound("no feet given")
    ibis = np.diff(feet)
    typical = float(np.median(ibis)) if ibis.size else trace.duration
    n = xs.size

    def index(t):
        return (t - trace.start_time) * fs

    beats = []
    for k, foot in enumerate(feet):
        nxt = feet[k + 1] if k + 1 < feet.size else foot + typical
        p_foot = index(foot)
        i_foot = max(0, int(math.floor(p_foot)))
        i_end = min(n, int(math.floor(index(min(nxt, foot + config.notch_search_frac * typical)))))
        i_sys_end = min(n, int(math.ceil(index(foot + config.systolic_frac * (nxt - foot)))) + 1)
        lo = i_foot + 1
        if i_sys_end - lo < 1 or lo >= n:
            continue
        i_sys = lo + int(np.argmax(xs[lo:i_sys_end]))
        pos_sys, v_sys = _vertex(xs, i_sys)
        foot_level = _at(xs, min(max(p_foot, 0.0), n - 1.0))
        amp = v_sys - foot_level
        t_sys = trace.start_time + pos_sys / fs
        if t_sys <= foot or amp <= 0:
            continue

        notch_t = dia_t = dia_amp = None
        seg = xs[i_sys:i_end]
        if seg.size >= 3:
            need = max(config.notch_prominence * amp, config.noise_floor_k * noise)
            mins, props = signal.find_peaks(-seg, prominence=need)
            if mins.size:
                j = int(mins[np.argmax(props["prominences"])])
                # baseline drift before the next foot is not a diastolic wave
                maxs, _ = signal.find_peaks(seg[j:], prominence=need)
                if maxs.size:
                    i_notch = i_sys + j
                    i_dia = i_notch + int(maxs[0])
                    pos_n, _ = _vertex(xs, i_notch)
                    pos_d, v_dia = _vertex(xs, i_dia)
                    notch_t = trace.start_time + pos_n / fs
                    dia_t = trace.start_time + pos_d / fs
                    dia_amp = v_dia - foot_level
                    if not t_sys < notch_t <= dia_t:
                        notch_t = dia_t = dia_amp = None
        beats.append(BeatAnnotation(float(foot), t_sys, amp, notch_t, dia_t, dia_amp))
    return BeatSeries(tuple(beats), trace.site, polarity)


def beat_series(trace, filter_spec=FilterSpec(), config=DetectorConfig()):
    """Band-pass, orient, detect feet and annotate fiducials in one call."""
    filtered = bandpass(trace, filter_spec)
    oriented, polarity = normalize_polarity(filtered)
    feet = detect_feet(oriented, config)
    return locate_fiducials(oriented, feet, config, polarity)


class PulseTimeDifference(NamedTuple):
    delta_t: float
    n_pairs: int
    dispersion: float


def _feet(series):
    if isinstance(series, BeatSeries):
        return series.foot_times
    return np.asarray(series, dtype=float)


def pulse_time_difference(series_a, series_b, window=0.5):
    """Median foot-to-foot delay of ``series_b`` relative to ``series_a``.

    Each foot in A is paired with the nearest foot in B, provided it lies
    within ``window`` seconds; ``dispersion`` is the median absolute
    deviation of the paired delays.
    """
    a, b = _feet(series_a), _feet(series_b)
    if a.size == 0 or b.size == 0:
        raise NoMatchedPairs("both series need beats")
    j = np.clip(np.searchsorted(b, a), 1, b.size - 1) if b.size > 1 else np.zeros(a.size, int)
    if b.size > 1:
        left, right = b[j - 1], b[j]
        nearest = np.where(np.abs(left - a) <= np.abs(right - a), left, right)
    else:
        nearest = b[j]
    d = nearest - a
    d = d[np.abs(d) <= window]
    if d.size == 0:
        raise NoMatchedPairs(f"no foot pairs within {window} s")
    med = float(np.median(d))
    return PulseTimeDifference(med, int(d.size), float(np.median(np.abs(d - med))))
