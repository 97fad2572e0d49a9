"""Filtering, detrending, resampling and spectral estimation.

The band-pass defaults (0.2-45 Hz) follow the acquisition chain of the
fiber sensor: the low edge removes movement drift, the high edge removes
mains pickup. Realization is a Butterworth design in second-order
sections, run either causally with explicit state (streaming) or
forward-backward (offline, zero phase).
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import signal

from .core import make_trace
from .errors import BandOutOfRange, SegmentTooLong

CAUSAL = "causal-streaming"
ZERO_PHASE = "zero-phase-offline"


@dataclass(frozen=True)
class FilterSpec:
    low_cut: float = 0.2
    high_cut: float = 45.0
    order: int = 4
    mode: str = ZERO_PHASE

    def check(self, sample_rate):
        if not 0 < self.low_cut < self.high_cut < sample_rate / 2:
            raise BandOutOfRange(
                f"need 0 < {self.low_cut} < {self.high_cut} < {sample_rate / 2} Hz"
            )
        if self.order < 2 or self.order % 2:
            raise BandOutOfRange(f"order must be an even integer >= 2, got {self.order}")
        if self.mode not in (CAUSAL, ZERO_PHASE):
            raise BandOutOfRange(f"unknown filter mode {self.mode!r}")

    @property
    def edge_seconds(self):
        """Length of the start/end transient excluded from statistics."""
        return max(5.0, 3.0 / self.low_cut)


def design_bandpass(spec, sample_rate):
    """Second-order sections of the Butterworth band-pass for ``spec``.

    ``spec.order`` is the prototype order, applied to each band edge.
    """
    spec.check(sample_rate)
    return signal.butter(
        spec.order, [spec.low_cut, spec.high_cut], btype="bandpass",
        output="sos", fs=sample_rate,
    )


def magnitude_response(spec, sample_rate, freqs):
    """Single-pass |H(f)| of the designed filter at ``freqs`` (Hz)."""
    sos = design_bandpass(spec, sample_rate)
    _, h = signal.sosfreqz(sos, worN=np.atleast_1d(freqs), fs=sample_rate)
    return np.abs(h)


def stream_filter(sos, chunk, state=None):
    """Causally filter one chunk, returning ``(output, new_state)``.

    Feed the returned state into the next call. A state belongs to exactly
    one stream of chunks; sharing it between streams corrupts both.
    """
    if state is None:
        state = np.zeros((sos.shape[0], 2))
    out, state = signal.sosfilt(sos, np.asarray(chunk, dtype=float), zi=state)
    return out, state


def bandpass(trace, spec=FilterSpec()):
    sos = design_bandpass(spec, trace.sample_rate)
    x = trace.samples
    if spec.mode == CAUSAL:
        y, _ = stream_filter(sos, x)
    else:
        # sosfiltfilt needs more samples than its default pad length
        padlen = min(3 * (2 * sos.shape[0] + 1), x.size - 1)
        y = signal.sosfiltfilt(sos, x, padlen=max(padlen, 0))
    return trace.replace(samples=y)


def detrend(trace):
    """Subtract the least-squares straight line."""
    if len(trace) < 2:
        return trace.replace(samples=np.zeros(1))
    return trace.replace(samples=signal.detrend(trace.samples, type="linear"))


def resample(trace, new_rate):
    """Linear-interpolation resampling onto a ``new_rate`` grid.

    The new grid starts at the same time and never extends past the last
    original sample, so no value is extrapolated.
    """
    new_rate = float(new_rate)
    if new_rate == trace.sample_rate:
        return trace
    n_new = int(np.floor((len(trace) - 1) * new_rate / trace.sample_rate + 1e-9)) + 1
    old_idx = np.arange(len(trace))
    new_pos = np.arange(n_new) * (trace.sample_rate / new_rate)
    y = np.interp(new_pos, old_idx, trace.samples)
    return make_trace(new_rate, trace.start_time, y, trace.site)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """One-sided power spectral density on the grid ``k * df``."""

    df: float
    power: np.ndarray
    window_descriptor: str
    n_segments: int

    @property
    def frequencies(self):
        return np.arange(self.power.size) * self.df

    def band(self, fmin, fmax):
        """Boolean mask of bins with ``fmin <= f <= fmax``."""
        f = self.frequencies
        return (f >= fmin) & (f <= fmax)


def power_spectrum(trace, segment_seconds=30.0, overlap_frac=0.5, window="hann"):
    """Welch-averaged one-sided PSD (a.u.^2/Hz), bin width ``1/segment_seconds``.

    Each segment has its mean removed before windowing.
    """
    if not 0 <= overlap_frac < 1:
        raise ValueError(f"overlap_frac must be in [0, 1), got {overlap_frac}")
    nperseg = int(round(segment_seconds * trace.sample_rate))
    if nperseg > len(trace):
        raise SegmentTooLong(
            f"segment of {segment_seconds} s exceeds trace duration {trace.duration} s"
        )
    if nperseg < 2:
        raise SegmentTooLong(f"segment of {segment_seconds} s has fewer than 2 samples")
    noverlap = int(round(overlap_frac * nperseg))
    freqs, psd = signal.welch(
        trace.samples, fs=trace.sample_rate, window=window, nperseg=nperseg,
        noverlap=noverlap, detrend="constant", scaling="density",
    )
    step = nperseg - noverlap
    n_segments = 1 + (len(trace) - nperseg) // step
    psd = np.maximum(psd, 0.0)
    psd.setflags(write=False)
    desc = f"{window}, {nperseg} samples/segment, {noverlap} overlap"
    return Spectrum(float(freqs[1] - freqs[0]), psd, desc, n_segments)


class Peak(NamedTuple):
    frequency: float
    power: float


def spectral_peaks(spectrum, max_peaks=5, min_separation=0.0, floor_frac=0.05,
                   fmin=None, fmax=None):
    """Greedy pick of the strongest local maxima, strongest first.

    A bin qualifies when it exceeds its left neighbour, is at least its
    right neighbour, and clears ``floor_frac`` times the global maximum of
    the whole spectrum. Picked frequencies are refined by fitting a
    parabola through the peak bin and its two neighbours. ``fmin``/``fmax``
    restrict the search after the floor is set.
    """
    p = spectrum.power
    if p.size < 3:
        return []
    top = p.max()
    if top <= 0:
        return []
    i = np.arange(1, p.size - 1)
    is_max = (p[i] > p[i - 1]) & (p[i] >= p[i + 1]) & (p[i] >= floor_frac * top)
    cand = i[is_max]
    f = spectrum.frequencies
    if fmin is not None:
        cand = cand[f[cand] >= fmin]
    if fmax is not None:
        cand = cand[f[cand] <= fmax]
    cand = cand[np.argsort(-p[cand], kind="stable")]

    peaks = []
    for k in cand:
        a, b, c = p[k - 1], p[k], p[k + 1]
        denom = a - 2 * b + c
        offset = 0.5 * (a - c) / denom if denom != 0 else 0.0
        freq = (k + offset) * spectrum.df
        power = b - 0.25 * (a - c) * offset
        if any(abs(freq - q.frequency) < min_separation for q in peaks):
            continue
        peaks.append(Peak(float(freq), float(power)))
        if len(peaks) >= max_peaks:
            break
    return peaks


def xcorr_lag(a, b, sample_rate, max_lag):
    """Lag (s) maximizing the cross-correlation of ``b`` against ``a``.

    Positive when ``b`` lags ``a``. Diagnostic only; the pulse module's
    foot-to-foot estimator is the primary delay measurement.
    """
    a = np.asarray(a, dtype=float) - np.mean(a)
    b = np.asarray(b, dtype=float) - np.mean(b)
    n = min(a.size, b.size)
    a, b = a[:n], b[:n]
    max_k = int(round(max_lag * sample_rate))
    full = signal.correlate(b, a, mode="full", method="fft")
    lags = np.arange(-n + 1, n)
    keep = np.abs(lags) <= max_k
    k = int(np.argmax(full[keep]))
    return lags[keep][k] / sample_rate
