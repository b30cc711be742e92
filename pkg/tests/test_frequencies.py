"""Frequency assembly tests against exact spectral data.

Constant potential a: the single open gap gives
    omega_0 = 2a^2,  rho_0 = -2a^2,  rho_n = -2 (sigma_0^n)^2 for n != 0
with sigma_0^n = sign(n)(sqrt(n^2 pi^2 + a^2) - |n| pi).
Single mode a e^{2 pi i x}: the open gap carries index -1, so
    omega_{-1} = 4 pi^2 + 2 a^2            (the plane-wave phase velocity)
    omega_{+1} = 2 a^2 - 12 pi^2 + 8 pi sqrt(a^2 + 4 pi^2)
               = 4 pi^2 + 4 a^2 + O(a^4).
"""

import numpy as np
import pytest

from nlslab.errors import ConfigError
from nlslab.field import Potential, SpectralGrid, StateField
from nlslab.frequencies import (
    FOUR_PI_SQ,
    frequency,
    frequency_pipeline,
    frequency_residuals,
    omega_sup_check,
    sum_rule_check,
    thread_count,
    write_frequency_csv,
)
from nlslab.psi_normalization import SigmaSet, solve_sigma
from nlslab.zs_spectral import periodic_spectrum

GRID = SpectralGrid(32)
A = 0.3
CONST_POT = Potential.from_state(StateField.from_mode_dict(GRID, {0: A}))


def const_sigma0(n):
    return np.sign(n) * (np.sqrt((n * np.pi) ** 2 + A * A) - abs(n) * np.pi)


@pytest.fixture(scope="module")
def const_pipeline():
    return frequency_pipeline(CONST_POT, K=8, cells=96)


@pytest.fixture(scope="module")
def zero_pipeline():
    phi = Potential.from_state(StateField.from_mode_dict(GRID, {}))
    return frequency_pipeline(phi, K=16, cells=128) + (phi,)


class TestFrequency:
    def test_zero_potential_is_free(self, zero_pipeline):
        _, _, table, _ = zero_pipeline
        assert np.max(np.abs(table.omega_renorm)) < 1e-9
        assert np.max(np.abs(table.rho)) < 1e-9

    def test_constant_zero_mode(self, const_pipeline):
        _, _, table = const_pipeline
        assert abs(table.omega_of(0) - 2 * A * A) < 1e-10
        assert abs(table.row(0)["rho"] + 2 * A * A) < 1e-10

    def test_constant_rho_closed_form(self, const_pipeline):
        _, _, table = const_pipeline
        for n in (1, 2, 4, 8, -3):
            assert abs(table.row(n)["rho"] + 2 * const_sigma0(n) ** 2) < 1e-9

    def test_single_mode_closed_forms(self):
        a = 0.2
        phi = Potential.from_state(StateField.from_mode_dict(GRID, {1: a}))
        _, _, table = frequency_pipeline(phi, K=6, cells=2048)
        s = np.sqrt(a * a + 4 * np.pi**2)
        assert abs(table.omega_of(-1) - (FOUR_PI_SQ + 2 * a * a)) < 1e-6
        assert abs(table.omega_of(1) - (2 * a * a - 12 * np.pi**2 + 8 * np.pi * s)) < 1e-6

    def test_even_data_symmetric_frequencies(self):
        phi = Potential.from_state(StateField.from_mode_dict(GRID, {1: 0.2, -1: 0.2}))
        _, _, table = frequency_pipeline(phi, K=6, cells=1024)
        for n in (1, 2, 3):
            assert abs(table.omega_of(n) - table.omega_of(-n)) < 1e-8

    def test_unconverged_sigma_rejected(self, const_pipeline):
        gaps, _, _ = const_pipeline
        stale = SigmaSet(n=1, sigma={0: 0.0}, multiplier=-2 / np.pi, tau={0: 0.0},
                         converged=False)
        with pytest.raises(ConfigError):
            frequency(gaps, stale, 1)

    def test_mismatched_index_rejected(self, const_pipeline):
        gaps, sigmas, _ = const_pipeline
        with pytest.raises(ConfigError):
            frequency(gaps, sigmas[1], 2)


class TestTable:
    def test_column_identities_exact(self, const_pipeline):
        gaps, sigmas, table = const_pipeline
        ns = table.index.astype(float)
        np.testing.assert_array_equal(table.omega_renorm,
                                      table.omega_nls - FOUR_PI_SQ * ns**2)
        np.testing.assert_array_equal(table.rho,
                                      table.omega_renorm - 4 * table.pair_integral)
        np.testing.assert_array_equal(table.weighted_rho,
                                      (1 + np.abs(ns)) * table.rho)
        assert abs(table.pair_integral - A * A) < 1e-12

    def test_omega_sup_tracks_pair_integral(self, const_pipeline):
        _, _, table = const_pipeline
        # |omega_renorm| = |4a^2 - 2 sigma_0^2|, largest where sigma_0 is
        # smallest, so the table edge n = +-8 attains the sup
        expected = 4 * A * A - 2 * const_sigma0(8) ** 2
        assert abs(omega_sup_check(table) - expected) < 1e-9

    def test_subset_of_indices(self, const_pipeline):
        gaps, sigmas, _ = const_pipeline
        sub = {n: sigmas[n] for n in (0, 2, 5)}
        table = frequency_residuals(gaps, sub, CONST_POT)
        assert list(table.index) == [0, 2, 5]

    def test_csv_layout_and_determinism(self, const_pipeline, tmp_path):
        _, _, table = const_pipeline
        p1, p2 = tmp_path / "f1.csv", tmp_path / "f2.csv"
        write_frequency_csv(table, p1)
        write_frequency_csv(table, p2)
        assert p1.read_bytes() == p2.read_bytes()
        lines = p1.read_text().splitlines()
        assert lines[0].startswith("# pair_integral = ")
        assert lines[1].startswith("# gamma_sq_tail_bound = ")
        assert lines[2] == "n,omega_nls,omega_renorm,rho,weighted_rho"
        assert len(lines) == 3 + 17


class TestSumRule:
    def test_zero_potential_vanishes(self, zero_pipeline):
        gaps, sigmas, _, phi = zero_pipeline
        for n in (4, 9):
            assert sum_rule_check(gaps, sigmas[n], n, phi) < 1e-10

    def test_constant_matches_one_gap_algebra(self, const_pipeline):
        gaps, sigmas, _ = const_pipeline
        for n in (2, 4, 8):
            val = sum_rule_check(gaps, sigmas[n], n, CONST_POT)
            assert abs(val - abs(n) * const_sigma0(n) ** 2) < 1e-8

    def test_bounded_in_n(self, const_pipeline):
        gaps, sigmas, _ = const_pipeline
        vals = [sum_rule_check(gaps, sigmas[n], n, CONST_POT) for n in range(2, 9)]
        assert max(vals) == vals[0]  # decreasing like 1/n


class TestThreads:
    def test_default_single_worker(self, monkeypatch):
        monkeypatch.delenv("NLSLAB_THREADS", raising=False)
        assert thread_count() == 1

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("NLSLAB_THREADS", "4")
        assert thread_count() == 4

    def test_invalid_env_rejected(self, monkeypatch):
        monkeypatch.setenv("NLSLAB_THREADS", "many")
        with pytest.raises(ConfigError):
            thread_count()

    def test_parallel_matches_serial(self, const_pipeline):
        gaps, sigmas, table = const_pipeline
        _, _, table4 = frequency_pipeline(CONST_POT, K=8, cells=96, workers=4)
        np.testing.assert_array_equal(table.omega_nls, table4.omega_nls)
