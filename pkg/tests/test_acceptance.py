"""Acceptance battery at full depth: one test and one report line per criterion.

The battery is run once for the module; each test asserts its criterion and
prints the recorded value against its bound.  tests/../acceptance_report.txt
keeps the eleven pass/fail lines from the latest run.
"""

from pathlib import Path

import pytest

from nlslab.checks import check_names, run_battery

CRITERIA = check_names()


@pytest.fixture(scope="module")
def battery():
    results = {r.name: r for r in run_battery("full")}
    lines = []
    for i, name in enumerate(CRITERIA, start=1):
        r = results[name]
        lines.append(f"criterion {i:2d} {'PASS' if r.passed else 'FAIL'} "
                     f"{name}: value={r.value:.6g} bound={r.bound:.6g}")
    report = Path(__file__).resolve().parent.parent / "acceptance_report.txt"
    report.write_text("\n".join(lines) + "\n", encoding="utf-8")
    for line in lines:
        print(line)
    return results


def _criterion(battery, index):
    r = battery[CRITERIA[index - 1]]
    print(f"criterion {index:2d} {'PASS' if r.passed else 'FAIL'} "
          f"{r.name}: value={r.value:.6g} bound={r.bound:.6g}")
    assert r.passed, r.detail


def test_01_zero_potential_exactness(battery):
    _criterion(battery, 1)


def test_02_constant_closed_forms(battery):
    _criterion(battery, 2)


def test_03_plane_wave_frequency(battery):
    _criterion(battery, 3)


def test_04_solver_structure(battery):
    _criterion(battery, 4)


def test_05_normalization_certificate(battery):
    _criterion(battery, 5)


def test_06_frequency_decay(battery):
    _criterion(battery, 6)


def test_07_nearly_linear_bounded(battery):
    _criterion(battery, 7)


def test_08_modified_free_linear(battery):
    _criterion(battery, 8)


def test_09_fractional_norm_bounded(battery):
    _criterion(battery, 9)


def test_10_highfreq_shift(battery):
    _criterion(battery, 10)


def test_11_half_window_sum_rule(battery):
    _criterion(battery, 11)
