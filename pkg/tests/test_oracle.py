import math

import numpy as np
import pytest

from expwell import BoxTooSmallError, DomainError, OracleConfig, default_x_max, find_zeros, solve_fd
from expwell.oracle import convergence_ratio, fd_eigenvalues


def harmonic(x):
    return x * x


def test_harmonic_self_test():
    cfg = OracleConfig(x_max=9.0, h=1e-3, parity="both", n_levels=4)
    levels = solve_fd(1.0, cfg, potential=harmonic)
    energies = np.array([e for _, e in levels])
    np.testing.assert_allclose(energies, 2 * np.arange(8) + 1, rtol=1e-7)
    assert [p for p, _ in levels] == ["even", "odd"] * 4


def test_extrapolation_helps():
    cfg = OracleConfig(x_max=9.0, h=1e-3, parity="even", n_levels=3)
    raw = np.array([e for _, e in solve_fd(1.0, cfg, harmonic, extrapolate=False)])
    rich = np.array([e for _, e in solve_fd(1.0, cfg, harmonic)])
    exact = np.array([1.0, 5.0, 9.0])
    assert np.all(np.abs(rich - exact) < 0.01 * np.abs(raw - exact))


def test_ground_state_above_g_squared():
    cfg = OracleConfig(default_x_max(1.0, 5.0), parity="both", n_levels=3)
    levels = solve_fd(1.0, cfg)
    assert levels[0][0] == "even" and levels[0][1] > 1.0
    assert [p for p, _ in levels] == ["even", "odd"] * 3


def test_matches_zero_table():
    t = find_zeros(1.0, 10)
    cfg = OracleConfig(default_x_max(1.0, t.nus[-1]), parity="both", n_levels=5)
    fd = solve_fd(1.0, cfg)
    for (parity, e), entry in zip(fd, t.entries):
        assert parity == entry.kind.parity
        assert abs(math.sqrt(e) - entry.nu) / entry.nu < 1e-6


def test_second_order_convergence():
    cfg = OracleConfig(default_x_max(1.0, 6.0), h=1e-3, parity="both", n_levels=2)
    for r in convergence_ratio(1.0, cfg):
        assert 3.8 < r < 4.2


def test_box_too_small():
    with pytest.raises(BoxTooSmallError):
        solve_fd(1.0, OracleConfig(x_max=1.5, parity="even", n_levels=3))


def test_config_validation():
    with pytest.raises(DomainError):
        OracleConfig(x_max=5.0, h=2e-3)
    with pytest.raises(DomainError):
        OracleConfig(x_max=5.0, parity="neither")
    with pytest.raises(DomainError):
        OracleConfig(x_max=-1.0)
    with pytest.raises(DomainError):
        solve_fd(0.0, OracleConfig(x_max=5.0))


def test_single_grid_levels_are_sorted():
    ev = fd_eigenvalues(harmonic, 8.0, 1e-3, "odd", 4)
    assert np.all(np.diff(ev) > 0)
    np.testing.assert_allclose(ev, [3, 7, 11, 15], rtol=1e-5)


def test_default_box():
    assert default_x_max(1.0, math.e) == pytest.approx(7.0)
