import numpy as np
import pytest

from nlslab.errors import ConfigError
from nlslab.field import (
    Potential,
    SpectralGrid,
    StateField,
    evaluate_on_shifted_grid,
    forward_transform,
    hamiltonian,
    inverse_transform,
    l2_norm,
    momentum,
    read_field_csv,
    sobolev_norm,
    write_field_csv,
)


def onemode(npts, n, amp=1.0):
    return StateField.from_mode_dict(SpectralGrid(npts), {n: amp})


def test_grid_validation():
    with pytest.raises(ConfigError):
        SpectralGrid(7)
    with pytest.raises(ConfigError):
        SpectralGrid(6)
    g = SpectralGrid(16)
    assert g.nodes[1] == 1.0 / 16.0
    assert g.mode_numbers[0] == -8 and g.mode_numbers[-1] == 7


def test_forward_transform_pure_mode():
    g = SpectralGrid(16)
    samples = np.exp(2j * np.pi * g.nodes)
    modes = forward_transform(samples)
    f = StateField(g, modes)
    assert abs(f.mode(1) - 1.0) < 1e-12
    others = [f.mode(n) for n in g.mode_numbers if n != 1]
    assert max(abs(c) for c in others) < 1e-12


def test_forward_transform_cosine():
    g = SpectralGrid(32)
    f = StateField.from_samples(g, np.cos(2 * np.pi * g.nodes))
    assert abs(f.mode(1) - 0.5) < 1e-14
    assert abs(f.mode(-1) - 0.5) < 1e-14


def test_zero_field_all_modes_zero():
    g = SpectralGrid(16)
    f = StateField.from_samples(g, np.zeros(16))
    assert np.all(f.modes == 0)


def test_round_trip_random():
    rng = np.random.default_rng(7)
    g = SpectralGrid(64)
    samples = rng.normal(size=64) + 1j * rng.normal(size=64)
    back = inverse_transform(forward_transform(samples))
    np.testing.assert_allclose(back, samples, rtol=1e-12, atol=1e-12)


def test_parseval_random():
    rng = np.random.default_rng(11)
    g = SpectralGrid(64)
    samples = rng.normal(size=64) + 1j * rng.normal(size=64)
    f = StateField.from_samples(g, samples)
    lhs = np.sum(np.abs(f.modes) ** 2)
    rhs = np.mean(np.abs(samples) ** 2)
    assert abs(lhs - rhs) < 1e-12 * rhs
    # H^0 agrees with the sample-side L2 norm
    assert abs(sobolev_norm(f, 0.0) - np.sqrt(rhs)) < 1e-12 * np.sqrt(rhs)


@pytest.mark.parametrize("s", [0.0, 0.5, 1.0, 2.5])
def test_sobolev_norm_first_mode_is_amplitude(s):
    f = onemode(16, 1, 1.0)
    assert abs(sobolev_norm(f, s) - 1.0) < 1e-14


def test_sobolev_norm_weights():
    # <2> = 2, so the H^2 norm of e^{4 pi i x} is 2^2
    f = onemode(16, 2, 1.0)
    assert abs(sobolev_norm(f, 2.0) - 4.0) < 1e-14
    g = StateField.from_mode_dict(SpectralGrid(16), {0: 0.7})
    assert abs(sobolev_norm(g, 3.0) - 0.7) < 1e-14


def test_sobolev_norm_rejects_negative_s():
    with pytest.raises(ValueError):
        sobolev_norm(onemode(16, 1), -0.5)


def test_hamiltonian_zero_and_constant():
    g = SpectralGrid(16)
    assert hamiltonian(StateField.from_samples(g, np.zeros(16))) == 0.0
    a = 0.37
    f = StateField.from_mode_dict(g, {0: a})
    assert abs(hamiltonian(f) - a**4) < 1e-14


def test_hamiltonian_single_mode():
    a = 0.42
    f = onemode(64, 1, a)
    expected = 4 * np.pi**2 * a**2 + a**4
    assert abs(hamiltonian(f) - expected) < 1e-12 * expected


def test_momentum_single_mode():
    a = 0.5
    f = onemode(32, 3, a)
    assert abs(momentum(f) - 2 * np.pi * 3 * a**2) < 1e-13


def test_l2_norm_matches_sobolev_zero():
    rng = np.random.default_rng(3)
    f = StateField.from_samples(SpectralGrid(32), rng.normal(size=32))
    assert abs(l2_norm(f) - sobolev_norm(f, 0.0)) < 1e-15


def test_shifted_grid_evaluation_matches_series():
    # compare against a direct Fourier-series evaluation at midpoints
    g = SpectralGrid(16)
    rng = np.random.default_rng(5)
    modes = rng.normal(size=16) + 1j * rng.normal(size=16)
    modes[0] = 0.0
    f = StateField(g, modes)
    cells = 40
    got = evaluate_on_shifted_grid(f, cells, 0.5)
    x = (np.arange(cells) + 0.5) / cells
    direct = np.zeros(cells, dtype=complex)
    for n, c in zip(g.mode_numbers, modes):
        direct += c * np.exp(2j * np.pi * n * x)
    np.testing.assert_allclose(got, direct, rtol=1e-12, atol=1e-12)


def test_shifted_grid_rejects_truncation():
    f = onemode(32, 1)
    with pytest.raises(ConfigError):
        evaluate_on_shifted_grid(f, 16, 0.0)


def test_potential_real_type_and_pair_integral():
    g = SpectralGrid(64)
    u = StateField.from_mode_dict(g, {1: 0.5, -2: 0.2j})
    pot = Potential.from_state(u)
    np.testing.assert_allclose(pot.phi2.samples, np.conj(u.samples), atol=1e-14)
    # integral phi1 phi2 = integral |u|^2 = sum |uhat|^2
    assert abs(pot.pair_integral() - (0.25 + 0.04)) < 1e-13


def test_potential_midpoint_values():
    g = SpectralGrid(16)
    u = StateField.from_mode_dict(g, {1: 0.3})
    pot = Potential.from_state(u)
    v1, v2 = pot.midpoint_values(64)
    x = (np.arange(64) + 0.5) / 64
    np.testing.assert_allclose(v1, 0.3 * np.exp(2j * np.pi * x), atol=1e-13)
    np.testing.assert_allclose(v2, 0.3 * np.exp(-2j * np.pi * x), atol=1e-13)


def test_field_csv_round_trip(tmp_path):
    rng = np.random.default_rng(9)
    f = StateField(SpectralGrid(32), rng.normal(size=32) + 1j * rng.normal(size=32))
    path = tmp_path / "field.csv"
    write_field_csv(f, path)
    g = read_field_csv(path)
    np.testing.assert_array_equal(g.modes, f.modes)  # 17 digits round-trips doubles
    # byte-determinism of the writer
    path2 = tmp_path / "field2.csv"
    write_field_csv(f, path2)
    assert path.read_bytes() == path2.read_bytes()
