import math

import numpy as np
import pytest

from expwell import (
    DomainError,
    QuadratureSpec,
    SpectralLine,
    eigenfunction,
    matching_coefficients,
    norm_constant,
    rho_map,
)
from expwell.quadrature import tanh_sinh
from expwell.spectrum import (
    count_nodes,
    eigenfunction_derivatives,
    far_point,
    norm_integral,
    schrodinger_residual,
)


def test_rho_map():
    assert rho_map(0.0, 1.0) == 1.0
    assert rho_map(-2.0, 1.0) == pytest.approx(math.e**2, rel=1e-15)
    assert rho_map(1.0, 2.0) == pytest.approx(2 * math.e, rel=1e-15)
    with pytest.raises(DomainError):
        rho_map(701.0, 1.0)
    with pytest.raises(DomainError):
        rho_map(1.0, 0.0)


def test_matching_at_eigenvalues(table_g1):
    lam0, mu0 = table_g1.nus[0], table_g1.nus[1]
    assert matching_coefficients(lam0, 1.0).even_defect < 1e-9
    assert matching_coefficients(mu0, 1.0).odd_defect < 1e-9
    mid = matching_coefficients(0.5 * (lam0 + mu0), 1.0)
    assert mid.even_defect > 1e-3 and mid.odd_defect > 1e-3


def test_line_invariants(lines_g1):
    energies = [ln.energy for ln in lines_g1]
    assert all(a < b for a, b in zip(energies, energies[1:]))
    assert energies[0] > 1.0
    for ln in lines_g1:
        assert ln.energy == ln.nu**2
        assert ln.norm > 0 and ln.norm_scaled > 0
        assert ln.norm == pytest.approx(ln.norm_scaled * math.exp(-math.pi * ln.nu), rel=1e-14)


def test_line_validation():
    with pytest.raises(DomainError):
        SpectralLine(1, "even", 2.0, 4.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        SpectralLine(0, "even", 2.0, 4.0, 1.0, -1.0)


@pytest.mark.parametrize("n", range(8))
def test_parity(lines_g1, n):
    xs = np.array([0.3, 1.0, 2.5])
    plus = eigenfunction(lines_g1[n], xs, 1.0)
    minus = eigenfunction(lines_g1[n], -xs, 1.0)
    np.testing.assert_allclose(minus, (-1) ** n * plus, rtol=1e-12)


def test_node_count(lines_g1):
    # psi_2n and psi_2n+1 both have n nodes on x > 0
    assert [count_nodes(ln, 1.0) for ln in lines_g1[:10]] == [n // 2 for n in range(10)]


@pytest.mark.parametrize("n", [0, 3, 7])
def test_decay(lines_g1, n):
    ln = lines_g1[n]
    for x in far_point(ln, 1.0) + np.array([0.01, 0.3, 1.0]):
        rho = rho_map(x, 1.0)
        bound = 2 * math.sqrt(math.pi / (2 * rho)) * math.exp(-rho)
        # eigenfunction is in K-hat scaling; undo it before comparing
        raw = eigenfunction(ln, x, 1.0) * math.exp(-0.5 * math.pi * ln.nu)
        assert abs(raw) <= bound


def test_boundary_conditions(lines_g1):
    for ln in lines_g1[:10]:
        psi, d1, _ = eigenfunction_derivatives(ln, 1e-300, 1.0)
        scale = max(abs(psi), abs(d1))
        if ln.parity == "even":
            assert abs(d1) < 1e-8 * scale
        else:
            assert abs(eigenfunction(ln, 0.0, 1.0)) == 0.0
            # sign(x) makes the slope continuous through the origin
            _, dm, _ = eigenfunction_derivatives(ln, -1e-300, 1.0)
            assert dm == pytest.approx(d1, rel=1e-12)


def test_schrodinger_residual(lines_g1):
    for ln in lines_g1[:10]:
        xs = np.linspace(0.05, far_point(ln, 1.0), 50)
        assert schrodinger_residual(ln, 1.0, xs) < 1e-7


def test_norm_whole_line(lines_g1):
    ln = lines_g1[2]
    xf = far_point(ln, 1.0) + 1.0

    def f(x):
        return eigenfunction(ln, x, 1.0) ** 2

    total = tanh_sinh(f, -xf, 0.0)[0] + tanh_sinh(f, 0.0, xf)[0]
    assert total == pytest.approx(2 * ln.norm_scaled, rel=1e-10)


def test_norm_stability(lines_g1):
    ln = lines_g1[0]
    coarse, _ = norm_integral(ln.nu, 1.0, QuadratureSpec(rel_tol=1e-10))
    fine, _ = norm_integral(ln.nu, 1.0, QuadratureSpec(rel_tol=1e-14, abs_tol=1e-17))
    assert coarse == pytest.approx(fine, rel=1e-9)
    gauss, _ = norm_integral(ln.nu, 1.0, QuadratureSpec(rule="adaptive-gauss"))
    assert gauss == pytest.approx(fine, rel=1e-10)


def test_norm_constant_raw(lines_g1):
    ln = lines_g1[1]
    assert norm_constant(ln, 1.0) == pytest.approx(ln.norm, rel=1e-13)
