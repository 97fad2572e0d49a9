import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fiberpulse.core import Site, make_trace
from fiberpulse.errors import (
    EmptyInput, NoCadencePeak, NonPositiveDelay, NonPositiveDistance, NonPositiveSpeed,
    TooFewBeats, TooFewIntervals, TraceTooShort,
)
from fiberpulse.pulse import beat_series
from fiberpulse.synth import ScenarioConfig, beat_times, simulate_scenario
from fiberpulse.vitals import (
    DroppedIntervalWarning, analyze_recording, build_report, cadence_step_length,
    heart_rate, interbeat_intervals, prv_stats, pwv, respiration_over, respiration_rate,
)

FS = 250.0
KMH = 1 / 3.6


def tone(*parts, duration=60.0, noise=0.0, seed=0):
    t = np.arange(int(duration * FS)) / FS
    x = sum(a * np.sin(2 * np.pi * f * t) for f, a in parts)
    x = x + noise * np.random.default_rng(seed).standard_normal(t.size)
    return make_trace(FS, 0, x, Site.CHEST)


class TestIntervals:
    def test_steady(self):
        assert np.allclose(interbeat_intervals([0, 1.05, 2.10]), [1.05, 1.05])

    def test_single_beat(self):
        with pytest.raises(TooFewBeats):
            interbeat_intervals([0.0])

    def test_gap_dropped(self):
        with pytest.warns(DroppedIntervalWarning, match="dropped 1"):
            out = interbeat_intervals([0, 1.0, 6.0, 7.0])
        assert np.allclose(out, [1.0, 1.0])


class TestPrv:
    def test_generator_recovery(self):
        feet = beat_times(ScenarioConfig(seed=17, duration=1200))
        rep = prv_stats(np.diff(feet))
        assert abs(rep.mean_ibi - 1.05) <= 0.005
        assert abs(rep.sdnn - 0.0568) <= 0.005

    def test_constant(self):
        assert prv_stats([1.0] * 10).sdnn == 0

    def test_alternating(self):
        rep = prv_stats([0.9, 1.1] * 20)
        assert rep.mean_ibi == pytest.approx(1.0)
        assert rep.sdnn == pytest.approx(0.1)

    def test_too_few(self):
        with pytest.raises(TooFewIntervals):
            prv_stats([1.0])

    def test_short_recording_caveat(self):
        rep = prv_stats([1.0, 1.1, 0.9])
        assert rep.long_term_flag_caveat
        assert not prv_stats([3600.0] * 25).long_term_flag_caveat

    @given(st.lists(st.floats(0.3, 2.0), min_size=2, max_size=300),
           st.floats(0.001, 0.2))
    def test_moment_fit_and_histogram(self, ibis, bw):
        rep = prv_stats(ibis, bw)
        assert rep.gaussian_fit.mu == rep.mean_ibi
        assert rep.gaussian_fit.sigma == rep.sdnn
        assert sum(h.count for h in rep.histogram) == rep.n_beats - 1 == len(ibis)
        centers = np.array([h.bin_center for h in rep.histogram])
        assert np.all(np.diff(centers) > 0)
        # occupied bins sit on the lattice mean + k * bin_width
        k = (centers - rep.mean_ibi) / bw
        assert np.allclose(k, np.round(k), atol=1e-6)


class TestRateAndVelocity:
    def test_heart_rate(self):
        assert heart_rate([1.05]) == pytest.approx(57.14, abs=0.01)
        assert heart_rate([1.0]) == 60
        with pytest.raises(EmptyInput):
            heart_rate([])

    @given(st.lists(st.floats(0.3, 2.0), min_size=1, max_size=50))
    def test_heart_rate_times_mean(self, ibis):
        # one rounding in the division and one in the product
        assert heart_rate(ibis) * np.mean(ibis) == pytest.approx(60, rel=4e-16)

    def test_pwv(self):
        assert pwv(0.092, 0.77) == pytest.approx(8.37, abs=0.005)
        assert pwv(0.184, 1.54) == pwv(0.092, 0.77)
        with pytest.raises(NonPositiveDelay):
            pwv(0, 0.77)
        with pytest.raises(NonPositiveDistance):
            pwv(0.092, -1)

    @given(st.floats(1e-3, 1.0), st.floats(1e-2, 3.0), st.integers(-20, 20))
    def test_pwv_power_of_two_scaling_exact(self, t, d, e):
        k = 2.0 ** e
        assert pwv(k * t, k * d) == pwv(t, d)

    @given(st.floats(1e-3, 1.0), st.floats(1e-2, 3.0), st.floats(1e-3, 1e3))
    def test_pwv_scaling(self, t, d, k):
        assert pwv(k * t, k * d) == pytest.approx(pwv(t, d), rel=5e-16)


class TestRespiration:
    def test_breathing(self):
        est = respiration_rate(tone((0.25, 1.0), noise=0.01))
        assert abs(est.rate - 15) <= 60 / 30
        assert 0 < est.confidence <= 1

    def test_hold_only(self):
        assert respiration_rate(tone(duration=30, noise=0.01)) is None
        assert respiration_rate(make_trace(FS, 0, np.full(int(30 * FS), 10.0))) is None

    def test_with_cadence(self):
        est = respiration_rate(tone((0.3, 1.0), (2.43, 0.5), noise=0.01))
        assert abs(est.rate - 18) <= 60 / 30

    def test_too_short(self):
        with pytest.raises(TraceTooShort):
            respiration_rate(tone((0.25, 1.0), duration=20))

    def test_over_window(self):
        rec, _ = simulate_scenario(ScenarioConfig(seed=1, duration=90,
                                                  breath_hold_windows=[(30, 60)]))
        chest = rec.channel(Site.CHEST)
        assert respiration_over(chest, 30, 60) is None
        assert respiration_over(chest, 60, 90).rate == pytest.approx(15, abs=2)


class TestCadence:
    def test_treadmill(self):
        est = cadence_step_length(tone((0.3, 1.0), (2.43, 0.4), duration=120, noise=0.01), 7 * KMH)
        assert abs(est.cadence - 2.43) <= 1 / 30
        assert est.step_length == pytest.approx(0.800, abs=0.01)

    def test_arithmetic(self):
        est = cadence_step_length(tone((2.0, 1.0), noise=0.01), 5.4 * KMH)
        assert est.step_length == pytest.approx(0.75, abs=0.005)

    def test_stationary(self):
        with pytest.raises(NoCadencePeak):
            cadence_step_length(tone((0.25, 1.0), noise=0.01), 1.5)

    def test_speed(self):
        with pytest.raises(NonPositiveSpeed):
            cadence_step_length(tone((2.0, 1.0)), 0)


@pytest.fixture(scope="module")
def full():
    cfg = ScenarioConfig(seed=2, duration=90, cadence=2.43, respiration_rate=0.3)
    rec, truth = simulate_scenario(cfg)
    return rec, truth, beat_series(rec.channel(Site.WRIST)), beat_series(rec.channel(Site.ANKLE))


class TestReport:
    def test_everything(self, full):
        rec, _, wrist, ankle = full
        rep = build_report(wrist, ankle, rec.channel(Site.CHEST), 0.77, 7 * KMH)
        for name in ("heart_rate", "prv", "respiration_rate", "cadence", "step_length",
                     "pulse_time_difference", "pwv"):
            assert getattr(rep, name) is not None, name

    def test_wrist_only(self, full):
        rep = build_report(full[2])
        assert rep.heart_rate and rep.prv
        assert all(v is None for v in (rep.respiration_rate, rep.cadence, rep.step_length,
                                       rep.pulse_time_difference, rep.pwv))

    def test_missing_distance(self, full):
        rep = build_report(full[2], full[3])
        assert rep.pulse_time_difference is not None and rep.pwv is None
        assert any("path difference" in w for w in rep.warnings)

    def test_no_speed_no_cadence(self, full):
        rep = build_report(chest=full[0].channel(Site.CHEST))
        assert rep.respiration_rate is not None and rep.cadence is None

    def test_short_chest_warns(self, full):
        from fiberpulse.core import segment
        rep = build_report(full[2], chest=segment(full[0].channel(Site.CHEST), 0, 10))
        assert rep.respiration_rate is None and rep.warnings

    def test_dropped_interval_recorded(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rep = build_report([0, 1.0, 6.0, 7.0, 8.0])
        assert rep.prv.n_beats == 4 - 1 + 1
        assert any("dropped" in w for w in rep.warnings)


@settings(max_examples=8)
@given(st.integers(0, 2**31 - 1))
def test_end_to_end_noise_free(seed):
    cfg = ScenarioConfig(seed=seed, duration=90, noise_sd=0.0, cadence=2.2, respiration_rate=0.3)
    rec, truth = simulate_scenario(cfg)
    rep = analyze_recording(rec, path_difference=0.77, speed=1.5)
    feet = truth.feet(Site.WRIST)
    inner = feet[(feet >= 15) & (feet <= 75)]
    assert abs(rep.heart_rate - 60 / np.mean(np.diff(inner))) <= 1
    assert abs(rep.respiration_rate - 60 * truth.respiration_rate) <= 0.5
    assert abs(rep.cadence - truth.cadence) <= 1 / 30
    assert abs(rep.pulse_time_difference - truth.inter_site_delay) <= 1 / FS
