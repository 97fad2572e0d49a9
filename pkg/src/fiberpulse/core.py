"""Uniformly sampled intensity traces and multi-site recordings.

Sample indices are the authoritative time grid: sample ``i`` sits at
``start_time + i / sample_rate``. Times are never accumulated sample by
sample, so long recordings do not drift.
"""

from dataclasses import dataclass
from enum import Enum
import math
from typing import NamedTuple

import numpy as np

from .errors import (
    EmptySamples,
    EmptyWindow,
    MisalignedChannels,
    NonFiniteSample,
    NonPositiveRate,
    OutOfRange,
)

DEFAULT_SAMPLE_RATE = 250.0

# grid-snapping slack, in samples; absorbs float error in t * fs
_SNAP_EPS = 1e-7


class Site(str, Enum):
    CHEST = "chest"
    WRIST = "wrist"
    ANKLE = "ankle"
    UNSPECIFIED = "unspecified"


@dataclass(frozen=True, eq=False)
class Trace:
    """Single-channel intensity time series (arbitrary units).

    Build through :func:`make_trace`, which validates and freezes the
    sample buffer.
    """

    sample_rate: float
    start_time: float
    samples: np.ndarray
    site: Site = Site.UNSPECIFIED

    def __len__(self):
        return self.samples.size

    @property
    def duration(self):
        return self.samples.size / self.sample_rate

    @property
    def end_time(self):
        """Time just past the last sample (half-open end of the trace)."""
        return self.start_time + self.duration

    @property
    def times(self):
        return self.start_time + np.arange(self.samples.size) / self.sample_rate

    def time_of(self, index):
        return self.start_time + index / self.sample_rate

    def replace(self, samples=None, start_time=None, site=None):
        """Copy with some fields swapped; the result is validated again."""
        return make_trace(
            self.sample_rate,
            self.start_time if start_time is None else start_time,
            self.samples if samples is None else samples,
            self.site if site is None else site,
        )


def make_trace(sample_rate, start_time, samples, site=Site.UNSPECIFIED):
    """Validate inputs and return an immutable :class:`Trace`.

    Raises
    ------
    NonPositiveRate
        ``sample_rate`` is not a positive finite number.
    EmptySamples
        No samples were given.
    NonFiniteSample
        A sample is NaN or infinite; ``.index`` holds the first offender.
    """
    sample_rate = float(sample_rate)
    if not (sample_rate > 0 and math.isfinite(sample_rate)):
        raise NonPositiveRate(f"sample rate must be > 0, got {sample_rate}")
    data = np.array(samples, dtype=float).ravel()
    if data.size == 0:
        raise EmptySamples("trace needs at least one sample")
    bad = np.flatnonzero(~np.isfinite(data))
    if bad.size:
        raise NonFiniteSample(int(bad[0]))
    data.setflags(write=False)
    return Trace(sample_rate, float(start_time), data, Site(site))


def _snap(trace, t):
    return math.ceil((t - trace.start_time) * trace.sample_rate - _SNAP_EPS)


def segment(trace, t0, t1):
    """Return the sub-trace covering the half-open window ``[t0, t1)``.

    The window snaps to the first sample at or after ``t0`` and stops at
    the last sample strictly before ``t1``, so adjacent windows tile the
    trace without overlap or gaps.
    """
    slack = _SNAP_EPS / trace.sample_rate
    if t0 < trace.start_time - slack or t1 > trace.end_time + slack or t0 >= t1:
        raise OutOfRange(
            f"window [{t0}, {t1}) outside trace "
            f"[{trace.start_time}, {trace.end_time})"
        )
    i0 = max(_snap(trace, t0), 0)
    i1 = min(_snap(trace, t1), len(trace))
    if i1 <= i0:
        raise EmptyWindow(f"window [{t0}, {t1}) contains no samples")
    return make_trace(
        trace.sample_rate, trace.time_of(i0), trace.samples[i0:i1], trace.site
    )


class BasicStats(NamedTuple):
    mean: float
    sd: float
    min: float
    max: float


def basic_stats(trace):
    """Mean, population standard deviation, min and max of the samples."""
    x = trace.samples
    return BasicStats(float(np.mean(x)), float(np.std(x)), float(x.min()), float(x.max()))


@dataclass(frozen=True, eq=False)
class Recording:
    """Aligned multi-site recording: every channel shares rate, start and length."""

    channels: tuple
    label: str = ""

    def __post_init__(self):
        chans = tuple(self.channels)
        if not chans:
            raise MisalignedChannels("recording needs at least one channel")
        ref = chans[0]
        for ch in chans[1:]:
            if (
                ch.sample_rate != ref.sample_rate
                or ch.start_time != ref.start_time
                or len(ch) != len(ref)
            ):
                raise MisalignedChannels(
                    f"channel {ch.site.value} is not aligned with {ref.site.value}"
                )
        object.__setattr__(self, "channels", chans)

    @property
    def sample_rate(self):
        return self.channels[0].sample_rate

    @property
    def start_time(self):
        return self.channels[0].start_time

    @property
    def sites(self):
        return [ch.site for ch in self.channels]

    def channel(self, site):
        site = Site(site)
        for ch in self.channels:
            if ch.site is site:
                return ch
        raise KeyError(site.value)

    def get(self, site):
        try:
            return self.channel(site)
        except KeyError:
            return None
