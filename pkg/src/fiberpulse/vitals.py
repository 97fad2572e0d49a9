"""Heart rate, pulse-rate variability, respiration, cadence and PWV.

Interval gating and low-confidence results are reported through the
standard :mod:`warnings` machinery (:class:`VitalsWarning` subclasses);
:func:`build_report` collects them into ``VitalsReport.warnings``.
"""

from dataclasses import asdict, dataclass, field
from typing import NamedTuple, Optional
import warnings

import numpy as np

from . import dsp
from .core import Site, segment
from .errors import (
    EmptyInput,
    NoCadencePeak,
    NonPositiveDelay,
    NonPositiveDistance,
    NonPositiveSpeed,
    TooFewBeats,
    TooFewIntervals,
    TraceTooShort,
)
from .pulse import BeatSeries, DetectorConfig, beat_series, pulse_time_difference

IBI_RANGE = (0.3, 2.0)
RESPIRATION_BAND = (0.08, 0.7)
CADENCE_BAND = (1.2, 4.0)
SDNN_LONG_TERM_THRESHOLD = 0.050
LONG_TERM_SECONDS = 24 * 3600.0


class VitalsWarning(UserWarning):
    pass


class DroppedIntervalWarning(VitalsWarning):
    pass


class LowConfidenceWarning(VitalsWarning):
    pass


class MissingInputWarning(VitalsWarning):
    pass


def interbeat_intervals(series, ibi_range=IBI_RANGE):
    """Successive foot-to-foot intervals (s), gated to ``ibi_range``.

    ``series`` is a :class:`BeatSeries` or a sequence of foot times.
    Out-of-range intervals (missed or spurious beats) are dropped with a
    :class:`DroppedIntervalWarning`.
    """
    feet = series.foot_times if isinstance(series, BeatSeries) else np.asarray(series, float)
    if feet.size < 2:
        raise TooFewBeats(f"need at least 2 beats, got {feet.size}")
    ibis = np.diff(feet)
    keep = (ibis >= ibi_range[0]) & (ibis <= ibi_range[1])
    dropped = int(ibis.size - keep.sum())
    if dropped:
        warnings.warn(
            f"dropped {dropped} interbeat interval(s) outside "
            f"[{ibi_range[0]}, {ibi_range[1]}] s",
            DroppedIntervalWarning, stacklevel=2,
        )
    return ibis[keep]


class HistogramBin(NamedTuple):
    bin_center: float
    count: int


class GaussianFit(NamedTuple):
    mu: float
    sigma: float


@dataclass(frozen=True)
class PrvReport:
    n_beats: int
    mean_ibi: float
    sdnn: float
    histogram: tuple
    gaussian_fit: GaussianFit
    long_term_flag_caveat: bool
    sdnn_below_long_term_threshold: bool


def prv_stats(ibis, bin_width=0.025):
    """Moment statistics and histogram of interbeat intervals.

    SDNN is the population standard deviation. The Gaussian fit is by the
    method of moments, so it repeats ``mean_ibi`` and ``sdnn``. Histogram
    bins are ``bin_width`` wide with one bin centred on the mean.

    The 50 ms SDNN threshold is a 24 h norm; ``long_term_flag_caveat`` is
    True whenever the intervals cover less than a day, in which case
    ``sdnn_below_long_term_threshold`` is informational only.
    """
    x = np.asarray(ibis, dtype=float)
    if x.size < 2:
        raise TooFewIntervals(f"need at least 2 intervals, got {x.size}")
    mean = float(np.mean(x))
    sdnn = float(np.std(x))
    k = np.round((x - mean) / bin_width).astype(int)
    ks, counts = np.unique(k, return_counts=True)
    hist = tuple(HistogramBin(mean + int(j) * bin_width, int(c)) for j, c in zip(ks, counts))
    return PrvReport(
        n_beats=x.size + 1,
        mean_ibi=mean,
        sdnn=sdnn,
        histogram=hist,
        gaussian_fit=GaussianFit(mean, sdnn),
        long_term_flag_caveat=float(np.sum(x)) < LONG_TERM_SECONDS,
        sdnn_below_long_term_threshold=sdnn < SDNN_LONG_TERM_THRESHOLD,
    )


def heart_rate(ibis):
    """Beats per minute from the mean interval."""
    x = np.asarray(ibis, dtype=float)
    if x.size == 0:
        raise EmptyInput("no intervals")
    return 60.0 / float(np.mean(x))


def pwv(delta_t, path_difference):
    """Pulse wave velocity (m/s): path-length difference over delay."""
    if not delta_t > 0:
        raise NonPositiveDelay(f"delay must be > 0, got {delta_t}")
    if not path_difference > 0:
        raise NonPositiveDistance(f"distance must be > 0, got {path_difference}")
    return path_difference / delta_t


class RespirationEstimate(NamedTuple):
    rate: float  # breaths per minute
    confidence: float


def _spectra(trace, segment_seconds, min_duration, presence_segments):
    """Fine spectrum for locating the peak, averaged one for deciding it exists.

    Short traces give a single noisy periodogram whose in-band maximum
    routinely clears any median-based threshold on noise alone, so the
    presence test uses segments no longer than ``1/presence_segments`` of
    the trace.
    """
    if trace.duration < min_duration:
        raise TraceTooShort(f"need >= {min_duration} s, got {trace.duration:.3g} s")
    flat = dsp.detrend(trace)
    fine = dsp.power_spectrum(flat, min(segment_seconds, trace.duration), 0.5)
    coarse_seg = min(segment_seconds, trace.duration / presence_segments)
    if coarse_seg * trace.sample_rate >= len(trace) - 1:
        return fine, fine
    return fine, dsp.power_spectrum(flat, coarse_seg, 0.5)


def _peak_in(spec, band):
    mask = spec.band(*band)
    if not mask.any() or spec.power[mask].max() <= 0:
        return None
    peaks = dsp.spectral_peaks(spec, max_peaks=1, floor_frac=0.01, fmin=band[0], fmax=band[1])
    return peaks[0] if peaks else None


def _strongest(fine, coarse, band, ratio):
    """Peak in ``band`` with its confidence, or ``(None, 0)``.

    Confidence is the share of in-band power within 1.5 bins of the peak.
    """
    check = _peak_in(coarse, band)
    if check is None or check.power < ratio * float(np.median(coarse.power[coarse.band(*band)])):
        return None, 0.0
    peak = _peak_in(fine, band)
    if peak is None:
        return None, 0.0
    mask = fine.band(*band)
    near = mask & (np.abs(fine.frequencies - peak.frequency) <= 1.5 * fine.df)
    return peak, float(fine.power[near].sum() / fine.power[mask].sum())


def _is_flat(trace):
    x = trace.samples
    return np.ptp(x) <= 1e-9 * max(1.0, float(np.max(np.abs(x))))


def respiration_rate(chest, band=RESPIRATION_BAND, segment_seconds=30.0,
                     min_duration=30.0, peak_ratio=3.0, presence_segments=3):
    """Breathing rate from the strongest in-band spectral peak, or None.

    None when the trace is flat or the peak power is below ``peak_ratio``
    times the median in-band power (e.g. during a breath hold). Traces
    shorter than ``segment_seconds`` fall back to a single periodogram for
    the rate itself.
    """
    fine, coarse = _spectra(chest, segment_seconds, min_duration, presence_segments)
    if _is_flat(chest):
        return None
    peak, conf = _strongest(fine, coarse, band, peak_ratio)
    if peak is None:
        return None
    return RespirationEstimate(60.0 * peak.frequency, conf)


class CadenceEstimate(NamedTuple):
    cadence: float  # Hz
    step_length: float  # m


def cadence_step_length(chest, speed, band=CADENCE_BAND, segment_seconds=30.0,
                        min_duration=30.0, peak_ratio=3.0, presence_segments=3):
    """Step frequency from the chest spectrum and step length = speed / cadence.

    ``speed`` is the treadmill belt speed in m/s.
    """
    if not speed > 0:
        raise NonPositiveSpeed(f"speed must be > 0, got {speed}")
    fine, coarse = _spectra(chest, segment_seconds, min_duration, presence_segments)
    if _is_flat(chest):
        raise NoCadencePeak("chest trace is flat")
    peak, _ = _strongest(fine, coarse, band, peak_ratio)
    if peak is None:
        raise NoCadencePeak(f"no spectral peak in {band[0]}-{band[1]} Hz")
    return CadenceEstimate(peak.frequency, speed / peak.frequency)


@dataclass
class VitalsReport:
    heart_rate: Optional[float] = None
    prv: Optional[PrvReport] = None
    respiration_rate: Optional[float] = None
    respiration_confidence: Optional[float] = None
    cadence: Optional[float] = None
    step_length: Optional[float] = None
    pulse_time_difference: Optional[float] = None
    pwv: Optional[float] = None
    warnings: list = field(default_factory=list)

    def to_dict(self):
        d = asdict(self)
        if self.prv is not None:
            d["prv"]["histogram"] = [h._asdict() for h in self.prv.histogram]
            d["prv"]["gaussian_fit"] = self.prv.gaussian_fit._asdict()
        return d


def build_report(wrist=None, ankle=None, chest=None, path_difference=None, speed=None,
                 bin_width=0.025):
    """Assemble every quantity the given inputs support.

    ``wrist`` and ``ankle`` are :class:`BeatSeries`; ``chest`` is a raw
    chest :class:`~fiberpulse.core.Trace`. ``speed`` is in m/s and only
    cadence/step length depend on it. Heart rate and PRV come from the
    wrist beats, or the ankle beats when there is no wrist series. Fields
    whose inputs are missing stay None.
    """
    report = VitalsReport()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", VitalsWarning)
        primary = wrist if wrist is not None else ankle
        if primary is not None:
            ibis = interbeat_intervals(primary)
            report.heart_rate = heart_rate(ibis)
            report.prv = prv_stats(ibis, bin_width)
        if wrist is not None and ankle is not None:
            report.pulse_time_difference = pulse_time_difference(wrist, ankle).delta_t
            if path_difference is None:
                warnings.warn("no path difference given; PWV not computed",
                              MissingInputWarning)
            elif report.pulse_time_difference > 0:
                report.pwv = pwv(report.pulse_time_difference, path_difference)
            else:
                warnings.warn("non-positive pulse time difference; PWV not computed",
                              LowConfidenceWarning)
        elif path_difference is not None:
            warnings.warn("PWV needs both wrist and ankle beats", MissingInputWarning)
        if chest is not None and chest.duration < 30.0:
            warnings.warn("chest trace shorter than 30 s; respiration and cadence omitted",
                          LowConfidenceWarning)
        elif chest is not None:
            resp = respiration_rate(chest)
            if resp is None:
                warnings.warn("no clear breathing peak; respiration rate omitted",
                              LowConfidenceWarning)
            else:
                report.respiration_rate, report.respiration_confidence = resp
            if speed is not None:
                try:
                    cad = cadence_step_length(chest, speed)
                except NoCadencePeak as exc:
                    warnings.warn(str(exc), LowConfidenceWarning)
                else:
                    report.cadence, report.step_length = cad
        elif speed is not None:
            warnings.warn("cadence needs a chest channel", MissingInputWarning)
    report.warnings = [str(w.message) for w in caught if issubclass(w.category, VitalsWarning)]
    return report


def respiration_over(chest, t0, t1, **kwargs):
    """:func:`respiration_rate` on the ``[t0, t1)`` window of ``chest``."""
    return respiration_rate(segment(chest, t0, t1), **kwargs)


def analyze_recording(recording, path_difference=None, speed=None,
                      filter_spec=dsp.FilterSpec(), detector=DetectorConfig(),
                      exclude_edges=True):
    """Full pipeline from a :class:`~fiberpulse.core.Recording` to a report.

    Pulse channels (wrist, ankle) are band-passed, oriented and annotated;
    beats inside the filter's edge transient are dropped when
    ``exclude_edges`` is set. The chest channel, if any, goes straight to
    the spectral estimators.
    """
    series = {}
    for site in (Site.WRIST, Site.ANKLE):
        trace = recording.get(site)
        if trace is None:
            continue
        beats = beat_series(trace, filter_spec, detector)
        if exclude_edges:
            edge = filter_spec.edge_seconds
            trimmed = beats.between(trace.start_time + edge, trace.end_time - edge)
            if len(trimmed) >= 3:
                beats = trimmed
        series[site] = beats
    return build_report(
        wrist=series.get(Site.WRIST),
        ankle=series.get(Site.ANKLE),
        chest=recording.get(Site.CHEST),
        path_difference=path_difference,
        speed=speed,
    )
