"""Reference flows, boundedness verdicts and empirical frequencies.

Closed forms used here:
  constant a:   u(t) = a e^{-2i a^2 t},  |u - w| = 2a |sin(a^2 t)|, u - v = 0;
  plane wave:   u(t) = a e^{2 pi i x - i(4 pi^2 + 2a^2)t}, same |u - w| law;
  mode rotation rates: 2a^2 (constant) and 4 pi^2 + 2a^2 (plane wave).
"""

import dataclasses
import logging

import numpy as np
import pytest

from nlslab.approx_compare import (
    BoundednessVerdict,
    NormSeries,
    boundedness_verdict,
    build_v,
    build_w,
    difference_series,
    extract_frequencies,
    highfreq_experiment,
    highfreq_scan,
    mode_frequency_array,
    shift_profile,
    write_norm_series_csv,
)
from nlslab.dnls_flow import Trajectory, evolve
from nlslab.errors import ConfigError
from nlslab.field import Potential, SpectralGrid, StateField, l2_norm, sobolev_norm
from nlslab.frequencies import FOUR_PI_SQ, frequency_pipeline

GRID = SpectralGrid(64)
A = 0.3
U_CONST = StateField.from_mode_dict(GRID, {0: A})
U_PLANE = StateField.from_mode_dict(GRID, {1: A})


@pytest.fixture(scope="module")
def const_table():
    return frequency_pipeline(Potential.from_state(U_CONST), K=8, cells=96)[2]


@pytest.fixture(scope="module")
def plane_table():
    return frequency_pipeline(Potential.from_state(U_PLANE), K=8, cells=256,
                              n_list=[-1])[2]


@pytest.fixture(scope="module")
def const_traj():
    return evolve(U_CONST, 2.0, 1e-3, stride=20)


@pytest.fixture(scope="module")
def plane_traj():
    return evolve(U_PLANE, 2.0, 1e-3, stride=20)


class TestReferenceFlows:
    def test_v_at_time_zero_is_initial_data(self, plane_table):
        v = build_v(U_PLANE, plane_table, 0.0)
        np.testing.assert_array_equal(v.modes, U_PLANE.modes)

    def test_v_unitary_in_every_sobolev_norm(self, plane_table):
        v = build_v(U_PLANE, plane_table, 0.77)
        for s in (0.0, 1.0, 2.5):
            assert abs(sobolev_norm(v, s) - sobolev_norm(U_PLANE, s)) < 1e-12

    def test_w_preserves_l2(self):
        w = build_w(U_PLANE, 1.23)
        assert abs(l2_norm(w) - l2_norm(U_PLANE)) < 1e-12

    def test_uncovered_mode_falls_back_with_warning(self, plane_table, caplog):
        u = StateField.from_mode_dict(GRID, {3: 0.1})
        with caplog.at_level(logging.WARNING, logger="nlslab"):
            rates = mode_frequency_array(u, plane_table)
        assert "lacks indices" in caplog.text
        c = 4 * l2_norm(u) ** 2
        half = GRID.point_count // 2
        assert rates[3 + half] == FOUR_PI_SQ * 9 + c

    def test_covered_mode_reads_reflected_index(self, plane_table):
        rates = mode_frequency_array(U_PLANE, plane_table)
        half = GRID.point_count // 2
        assert rates[1 + half] == plane_table.omega_of(-1)


class TestDifferenceSeries:
    def test_constant_u_minus_v_vanishes(self, const_traj, const_table):
        dv = difference_series(const_traj, "v", 0.0, const_table)
        assert dv.label == "u-v"
        assert dv.sup() < 1e-11

    def test_constant_u_minus_w_closed_form(self, const_traj):
        dw = difference_series(const_traj, "w", 0.0)
        exact = 2 * A * np.abs(np.sin(A * A * const_traj.times))
        assert np.max(np.abs(dw.values - exact)) < 1e-12

    def test_plane_wave_u_minus_w_closed_form_any_s(self, plane_traj):
        for s in (0.0, 1.5, 3.0):
            dw = difference_series(plane_traj, "w", s)
            exact = 2 * A * np.abs(np.sin(A * A * plane_traj.times))
            assert np.max(np.abs(dw.values - exact)) < 1e-12

    def test_plane_wave_u_minus_v_is_resolution_limited(self, plane_traj, plane_table):
        dv = difference_series(plane_traj, "v", 2.0, plane_table)
        assert dv.sup() < 5e-5

    def test_backward_run_matches_closed_form(self):
        traj = evolve(U_PLANE, -1.0, 1e-3, stride=20)
        dw = difference_series(traj, "w", 1.0)
        exact = 2 * A * np.abs(np.sin(A * A * traj.times))
        assert np.max(np.abs(dw.values - exact)) < 1e-12

    def test_norm_of_u_itself(self, const_traj):
        series = difference_series(const_traj, "none", 0.0)
        assert series.label == "u"
        np.testing.assert_allclose(series.values, A, atol=1e-12)

    def test_v_requires_table(self, const_traj):
        with pytest.raises(ConfigError):
            difference_series(const_traj, "v", 0.0)

    def test_unknown_reference_rejected(self, const_traj):
        with pytest.raises(ConfigError):
            difference_series(const_traj, "x", 0.0)

    def test_matches_per_time_rebuild(self, plane_traj):
        dw = difference_series(plane_traj, "w", 2.0)
        u0 = plane_traj.initial_state
        for i in (0, len(plane_traj) // 2, len(plane_traj) - 1):
            w = build_w(u0, float(plane_traj.times[i]))
            diff = StateField(GRID, plane_traj.mode_history[i] - w.modes)
            assert abs(dw.values[i] - sobolev_norm(diff, 2.0)) < 1e-13


class TestBoundednessVerdict:
    def test_roundoff_series_is_bounded(self, const_traj, const_table):
        dv = difference_series(const_traj, "v", 0.0, const_table)
        verdict = boundedness_verdict(dv)
        assert verdict.verdict == "bounded"
        assert verdict.bounded

    def test_oscillating_series_is_bounded(self):
        t = np.linspace(0.0, 70.0, 1400)
        series = NormSeries(t, np.abs(np.sin(0.09 * t)), 0.0, "u-w")
        assert boundedness_verdict(series).bounded

    def test_linear_growth_is_flagged(self):
        t = np.linspace(0.0, 10.0, 200)
        series = NormSeries(t, 0.1 * t, 0.0, "u-w")
        v = boundedness_verdict(series)
        assert v.verdict == "growing"
        assert abs(v.slope - 0.1) < 1e-12

    def test_short_series_defaults_to_bounded(self):
        series = NormSeries(np.array([0.0]), np.array([1.0]), 0.0, "u")
        assert boundedness_verdict(series).bounded


class TestExtractFrequencies:
    def test_constant_rate(self):
        traj = evolve(U_CONST, 70.0, 1e-3, stride=50)
        est = extract_frequencies(traj, 0.05)
        assert abs(est[0] - 2 * A * A) / (2 * A * A) < 1e-8

    def test_plane_wave_rate(self):
        traj = evolve(U_PLANE, 70.0, 1e-3, stride=50)
        est = extract_frequencies(traj, 0.05)
        truth = FOUR_PI_SQ + 2 * A * A
        assert abs(est[1] - truth) / truth < 1e-8

    def test_step_halving_leaves_rate_fixed(self):
        e1 = extract_frequencies(evolve(U_PLANE, 30.0, 1e-3, stride=50), 0.05)[1]
        e2 = extract_frequencies(evolve(U_PLANE, 30.0, 5e-4, stride=100), 0.05)[1]
        assert abs(e1 - e2) / abs(e1) < 1e-9

    def test_two_mode_rates_match_spectral_pipeline(self):
        u = StateField.from_mode_dict(GRID, {1: 0.5, -2: 0.2})
        _, _, table = frequency_pipeline(Potential.from_state(u), K=10,
                                         cells=512, n_list=[-1, 2])
        traj = evolve(u, 30.0, 5e-4, stride=30)
        est = extract_frequencies(traj, 0.05)
        assert abs(est[1] - table.omega_of(-1)) / est[1] < 1e-5
        assert abs(est[-2] - table.omega_of(2)) / est[-2] < 1e-5

    def test_stride_guard(self):
        u = StateField.from_mode_dict(GRID, {5: 0.2})
        traj = evolve(u, 20.0, 1e-3, stride=2000)
        with pytest.raises(ConfigError, match="stride too coarse"):
            extract_frequencies(traj, 0.05)

    def test_floor_must_be_positive(self, const_traj):
        with pytest.raises(ConfigError):
            extract_frequencies(const_traj, 0.0)

    def test_too_few_samples_rejected(self):
        traj = evolve(U_CONST, 2.0, 1e-3, stride=2000)
        with pytest.raises(ConfigError, match="too short"):
            extract_frequencies(traj, 0.05)

    def test_collapsing_mode_skipped_with_warning(self, caplog):
        t = np.linspace(0.0, 50.0, 1200)
        half = GRID.point_count // 2
        hist = np.zeros((len(t), GRID.point_count), dtype=complex)
        hist[:, half] = A * np.exp(-2j * A * A * t)
        hist[:, half + 1] = 0.2 * np.exp(-0.1 * t) * np.exp(-1j * FOUR_PI_SQ * t)
        traj = Trajectory(GRID, t, hist, dt=1e-3, stride=42)
        with caplog.at_level(logging.WARNING, logger="nlslab"):
            est = extract_frequencies(traj, 0.05)
        assert 1 not in est
        assert "dips below" in caplog.text
        assert abs(est[0] - 2 * A * A) < 1e-10


class TestSmoothing:
    def test_two_mode_difference_gains_no_derivative_growth(self):
        u = StateField.from_mode_dict(GRID, {1: 0.5, -2: 0.2})
        _, _, table = frequency_pipeline(Potential.from_state(u), K=10,
                                         cells=512, n_list=[-1, 2])
        traj = evolve(u, 5.0, 5e-4, stride=30)
        d2 = difference_series(traj, "v", 2.0, table)
        d3 = difference_series(traj, "v", 3.0, table)
        ratio = d3.values[1:] / d2.values[1:]
        assert np.all(ratio < 10.0)
        assert np.all(ratio > 0.5)


class TestHighFreq:
    PROFILE = StateField.from_mode_dict(SpectralGrid(16), {1: 1.0, -2: 0.5})

    def test_shift_moves_modes_and_rescales(self):
        out = shift_profile(self.PROFILE, 4, 0.5, 2.0, 64)
        carried = [int(n) for n in out.grid.mode_numbers
                   if abs(out.mode(int(n))) > 1e-15]
        assert carried == [-8, 4]
        assert abs(sobolev_norm(out, 2.0) - 0.5) < 1e-12

    def test_shift_rejects_bad_arguments(self):
        with pytest.raises(ConfigError):
            shift_profile(self.PROFILE, 0, 0.5, 2.0, 64)
        with pytest.raises(ConfigError):
            shift_profile(self.PROFILE, 40, 0.5, 2.0, 64)
        empty = StateField.from_mode_dict(SpectralGrid(16), {})
        with pytest.raises(ConfigError):
            shift_profile(empty, 4, 0.5, 2.0, 64)

    def test_doubling_l_tightens_both_sups(self):
        reports, smallest = highfreq_scan(self.PROFILE, [4, 8], epsilon=1.0,
                                          M=0.5, T=0.5, s=2.0, dt=1e-3,
                                          stride=25)
        r4, r8 = reports
        assert r4.v_within and r4.w_within
        assert smallest == 4
        assert r8.sup_u_minus_v < r4.sup_u_minus_v
        assert r8.sup_u_minus_w < r4.sup_u_minus_w
        # the shifted data is weakly nonlinear: v beats w at fixed L
        assert r4.sup_u_minus_v < r4.sup_u_minus_w

    def test_tight_epsilon_reported_as_miss(self):
        report = highfreq_experiment(self.PROFILE, 4, epsilon=1e-9, M=0.5,
                                     T=0.5, s=2.0, dt=1e-3, stride=25)
        assert not report.v_within


class TestSeriesCsv:
    def test_layout_and_determinism(self, tmp_path, const_traj):
        dw = difference_series(const_traj, "w", 1.0)
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_norm_series_csv(dw, p1)
        write_norm_series_csv(dw, p2)
        assert p1.read_bytes() == p2.read_bytes()
        lines = p1.read_text().splitlines()
        assert lines[0] == "# label = u-w"
        assert lines[1] == "# s = 1"
        assert lines[2] == "t,value"
        assert len(lines) == 3 + len(const_traj)
