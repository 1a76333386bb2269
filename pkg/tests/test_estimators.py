import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from expwell import DomainError
from expwell.estimators import AssociatedHamiltonian, ExponentialWellSpectrum
from expwell.quadrature import tanh_sinh


def test_params_round_trip():
    est = ExponentialWellSpectrum(g=0.7, n_levels=4, normalize=True)
    p = est.get_params()
    assert p["g"] == 0.7 and p["n_levels"] == 4 and p["normalize"] is True
    twin = clone(est)
    assert twin.get_params() == p
    est.set_params(n_levels=6)
    assert est.n_levels == 6


def test_fit_transform_shapes(table_g1):
    est = ExponentialWellSpectrum(g=1.0, n_levels=6).fit()
    np.testing.assert_allclose(est.nu_, table_g1.nus[:6], rtol=1e-14)
    np.testing.assert_allclose(est.energies_, est.nu_**2)
    assert list(est.parity_) == ["even", "odd"] * 3
    X = np.linspace(-2, 2, 9).reshape(-1, 1)
    out = est.transform(X)
    assert out.shape == (9, 6)
    np.testing.assert_allclose(out[::-1, 1], -out[:, 1], rtol=1e-12)


def test_normalized_states_have_unit_norm():
    est = ExponentialWellSpectrum(g=1.0, n_levels=3, normalize=True).fit()

    def f(x):
        return est.transform(x.reshape(-1, 1)) ** 2

    total = tanh_sinh(f, -6.0, 0.0)[0] + tanh_sinh(f, 0.0, 6.0)[0]
    np.testing.assert_allclose(total, 1.0, rtol=1e-9)


def test_input_validation():
    est = ExponentialWellSpectrum(n_levels=2)
    with pytest.raises(NotFittedError):
        est.transform([[0.0]])
    est.fit()
    with pytest.raises(ValueError):
        est.transform(np.zeros((3, 2)))
    with pytest.raises(ValueError):
        est.transform([[math.nan]])
    with pytest.raises(DomainError):
        ExponentialWellSpectrum(g=-1.0).fit()


def test_associated_hamiltonian():
    est = AssociatedHamiltonian(g=1.0, L=1, n_levels=3).fit()
    X = np.array([[-1.2], [0.4], [1.2]])
    v = est.predict(X)
    assert v[0] == pytest.approx(v[2], rel=1e-10)
    psi = est.transform(X)
    assert psi.shape == (3, 3)
    assert list(est.levels_) == [1, 2, 3]
    # level n in the L = 1 tower has parity (-1)^(1 + n)
    assert psi[0, 0] == pytest.approx(psi[2, 0], rel=1e-10)
    assert psi[0, 1] == pytest.approx(-psi[2, 1], rel=1e-10)


def test_associated_fit_transform():
    est = AssociatedHamiltonian(L=2, n_levels=2)
    out = est.fit_transform(np.array([[0.3], [0.9]]))
    assert out.shape == (2, 2)
