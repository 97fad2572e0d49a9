import numpy as np
import pytest
from hypothesis import given, strategies as st

from fiberpulse.core import make_trace, segment
from fiberpulse.dsp import (
    CAUSAL, FilterSpec, Spectrum, bandpass, design_bandpass, detrend, magnitude_response,
    power_spectrum, resample, spectral_peaks, stream_filter, xcorr_lag,
)
from fiberpulse.errors import BandOutOfRange, SegmentTooLong

FS = 250.0


def steady_amplitude(tr, edge=5.0):
    core = segment(tr, edge, tr.duration - edge).samples
    return np.sqrt(2) * np.std(core)


class TestBandpass:
    def test_dc_removed(self):
        out = bandpass(make_trace(FS, 0, np.ones(int(30 * FS))))
        assert np.max(np.abs(segment(out, 5, 25).samples)) < 1e-3

    @pytest.mark.parametrize("freq", [1.0, 60.0])
    def test_matches_analytic_response(self, sine, freq):
        # long trace: the 0.2 Hz section rings for tens of seconds
        out = bandpass(sine(freq, duration=120))
        expected = magnitude_response(FilterSpec(), FS, freq)[0] ** 2  # two passes
        assert steady_amplitude(out, edge=30) == pytest.approx(expected, rel=1e-3)

    def test_passband(self, sine):
        assert 0.95 <= steady_amplitude(bandpass(sine(1.0, duration=30))) <= 1.05

    def test_mains_rejected(self, sine):
        assert steady_amplitude(bandpass(sine(60.0, duration=30))) < 0.3

    def test_single_pass_response(self):
        h = magnitude_response(FilterSpec(), FS, [1.0, 60.0])
        assert 0.95 <= h[0] <= 1.05 and h[1] < 0.3

    @pytest.mark.parametrize("spec", [
        FilterSpec(low_cut=0), FilterSpec(low_cut=50, high_cut=45),
        FilterSpec(high_cut=130), FilterSpec(order=3), FilterSpec(mode="bogus"),
    ])
    def test_band_checked(self, sine, spec):
        with pytest.raises(BandOutOfRange):
            bandpass(sine(1.0), spec)

    def test_stream_chunks_match_whole(self):
        x = np.random.default_rng(0).standard_normal(5000)
        sos = design_bandpass(FilterSpec(mode=CAUSAL), FS)
        whole, _ = stream_filter(sos, x)
        state, parts = None, []
        for chunk in np.array_split(x, 7):
            y, state = stream_filter(sos, chunk, state)
            parts.append(y)
        assert np.allclose(np.concatenate(parts), whole, rtol=0, atol=1e-12)
        causal = bandpass(make_trace(FS, 0, x), FilterSpec(mode=CAUSAL))
        assert np.array_equal(causal.samples, whole)

    def test_causal_vs_zero_phase_impulse(self):
        x = np.zeros(5000)
        x[2500] = 1.0
        causal = bandpass(make_trace(FS, 0, x), FilterSpec(mode=CAUSAL)).samples
        offline = bandpass(make_trace(FS, 0, x)).samples
        assert np.all(causal[:2500] == 0)
        assert np.argmax(causal) > 2500
        assert np.argmax(offline) == 2500
        assert np.allclose(offline[2500 - 200:2500], offline[2501:2701][::-1], atol=1e-5)

    @given(st.floats(-10, 10), st.floats(-10, 10), st.integers(0, 1000),
           st.sampled_from(["causal-streaming", "zero-phase-offline"]))
    def test_linearity(self, a, b, seed, mode):
        rng = np.random.default_rng(seed)
        x, y = rng.standard_normal((2, 2000))
        spec = FilterSpec(mode=mode)

        def f(v):
            return bandpass(make_trace(FS, 0, v), spec).samples

        lhs = f(a * x + b * y)
        rhs = a * f(x) + b * f(y)
        scale = max(1.0, np.max(np.abs(rhs)))
        assert np.max(np.abs(lhs - rhs)) <= 1e-9 * scale

    @given(st.floats(0.5, 30.0), st.floats(0, 2 * np.pi))
    def test_zero_phase_lag(self, freq, phase):
        x = make_trace(FS, 0, np.sin(2 * np.pi * freq * np.arange(int(20 * FS)) / FS + phase))
        y = bandpass(x)
        core = slice(int(5 * FS), int(15 * FS))
        assert xcorr_lag(x.samples[core], y.samples[core], FS, 0.1) == 0


class TestDetrend:
    t = np.arange(2500) / FS
    # whole cycles, even about the midpoint: zero mean and zero trend
    wave = np.cos(2 * np.pi * (t - t[-1] / 2))

    def test_ramp(self):
        out = detrend(make_trace(FS, 0, 3.0 * self.t + 2.0)).samples
        assert np.max(np.abs(out)) <= 1e-9 * 32

    def test_sinusoid_unchanged(self):
        x = self.wave
        assert np.allclose(detrend(make_trace(FS, 0, x)).samples, x, rtol=0, atol=1e-6)

    def test_superposition(self):
        s = self.wave
        out = detrend(make_trace(FS, 0, s + 0.5 * self.t - 4)).samples
        assert np.allclose(out, s, rtol=0, atol=1e-6)


class TestResample:
    def test_identity(self, sine):
        x = sine(1.0)
        assert np.array_equal(resample(x, FS).samples, x.samples)

    def test_upsampled_sinusoid(self, sine):
        y = resample(sine(1.0), 500.0)
        assert np.max(np.abs(y.samples - np.sin(2 * np.pi * y.times))) < 1e-3

    @given(st.floats(1.0, 2000.0))
    def test_constant(self, rate):
        y = resample(make_trace(FS, 0, np.full(500, 3.5)), rate)
        assert np.allclose(y.samples, 3.5)

    @given(st.floats(5.0, 2000.0))
    def test_span_preserved(self, rate):
        x = make_trace(FS, 0, np.zeros(2500))
        y = resample(x, rate)
        span_x, span_y = x.times[-1], y.times[-1]
        assert 0 <= span_x - span_y < 1 / rate + 1e-9


class TestSpectrum:
    def test_sinusoid_bin(self, sine):
        spec = power_spectrum(sine(2.43, duration=60), 30)
        assert spec.df == pytest.approx(1 / 30)
        assert abs(spec.frequencies[np.argmax(spec.power)] - 2.43) <= spec.df

    def test_zero(self):
        spec = power_spectrum(make_trace(FS, 0, np.zeros(int(60 * FS))), 30)
        assert np.all(spec.power == 0)

    def test_too_long(self, sine):
        with pytest.raises(SegmentTooLong):
            power_spectrum(sine(1.0, duration=10), 30)

    @given(st.integers(0, 10**6), st.integers(500, 6000))
    def test_parseval(self, seed, n):
        x = np.random.default_rng(seed).standard_normal(n)
        spec = power_spectrum(make_trace(FS, 0, x), n / FS, 0.0, window="boxcar")
        assert spec.n_segments == 1
        assert np.sum(spec.power) * spec.df == pytest.approx(np.var(x), rel=0.02)


class TestPeaks:
    def test_breathing_and_cadence(self):
        t = np.arange(int(120 * FS)) / FS
        x = make_trace(FS, 0, np.sin(2 * np.pi * 0.3 * t) + 0.5 * np.sin(2 * np.pi * 2.43 * t))
        spec = power_spectrum(x, 30)
        peaks = spectral_peaks(spec, max_peaks=2)
        assert [p.frequency for p in peaks] == [
            pytest.approx(0.3, abs=spec.df / 2), pytest.approx(2.43, abs=spec.df / 2)
        ]

    def test_single_sinusoid(self, sine):
        assert len(spectral_peaks(power_spectrum(sine(5.0, duration=60), 30))) == 1

    def test_flat(self):
        assert spectral_peaks(Spectrum(0.1, np.ones(100), "flat", 1)) == []

    def test_min_separation(self):
        p = np.zeros(50)
        p[[10, 12]] = [2.0, 1.0]
        peaks = spectral_peaks(Spectrum(1.0, p, "", 1), min_separation=3)
        assert len(peaks) == 1 and peaks[0].frequency == pytest.approx(10, abs=0.5)

    @given(st.floats(0.0, 1.0), st.integers(3, 300))
    def test_refined_within_half_bin(self, offset, k):
        df = 1 / 30
        f = (k + offset) * df
        t = np.arange(int(60 * FS)) / FS
        spec = power_spectrum(make_trace(FS, 0, np.sin(2 * np.pi * f * t)), 30)
        peak = spectral_peaks(spec, max_peaks=1)[0]
        assert abs(peak.frequency - f) <= df / 2
