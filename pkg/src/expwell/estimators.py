"""scikit-learn style wrappers.

``fit`` solves for the spectrum (no training data is involved, ``X`` and
``y`` are accepted and ignored there); ``transform`` tabulates
eigenfunctions on the positions in the single column of ``X``.
"""
from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .config import EvalConfig, QuadratureSpec
from .crum import CrumTower
from .errors import DomainError
from .spectrum import build_spectrum, eigenfunction
from .zeros import find_zeros


def _positions(X):
    X = check_array(X, ensure_2d=True, dtype=np.float64)
    if X.shape[1] != 1:
        raise ValueError(f"expected a single column of positions x, got {X.shape[1]}")
    return X[:, 0]


class ExponentialWellSpectrum(TransformerMixin, BaseEstimator):
    """Bound states of ``-d^2/dx^2 + g^2 exp(2|x|)``.

    Parameters
    ----------
    g : float
        Coupling, ``g > 0``.
    n_levels : int
        Number of levels kept (combined even/odd sequence).
    normalize : bool
        Scale each eigenfunction to unit norm on the whole line instead of
        the raw K-hat scaling.
    quad_tol, ode_tol : float
        Evaluator tolerances, see :class:`~expwell.config.EvalConfig`.

    Attributes
    ----------
    zero_table_ : ZeroTable
    lines_ : list of SpectralLine
    nu_, energies_, norms_ : ndarray of shape (n_levels,)
        ``norms_`` holds the K-hat half-line norms.
    parity_ : ndarray of str
    """

    def __init__(self, g=1.0, n_levels=10, normalize=False, quad_tol=1e-14, ode_tol=1e-12):
        self.g = g
        self.n_levels = n_levels
        self.normalize = normalize
        self.quad_tol = quad_tol
        self.ode_tol = ode_tol

    def _cfg(self):
        return EvalConfig(quad_tol=self.quad_tol, ode_tol=self.ode_tol)

    def fit(self, X=None, y=None):
        if not (math.isfinite(self.g) and self.g > 0):
            raise DomainError("g must be positive")
        cfg = self._cfg()
        self.zero_table_ = find_zeros(self.g, int(self.n_levels), cfg)
        self.lines_ = build_spectrum(self.zero_table_, QuadratureSpec(), cfg)
        self.nu_ = np.array([ln.nu for ln in self.lines_])
        self.energies_ = self.nu_**2
        self.norms_ = np.array([ln.norm_scaled for ln in self.lines_])
        self.parity_ = np.array([ln.parity for ln in self.lines_])
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        """``out[i, n] = psi_n(X[i, 0])``."""
        check_is_fitted(self, "lines_")
        x = _positions(X)
        cfg = self._cfg()
        cols = []
        for line in self.lines_:
            psi = eigenfunction(line, x, self.g, cfg)
            if self.normalize:
                psi = psi / math.sqrt(2.0 * line.norm_scaled)
            cols.append(psi)
        return np.stack(cols, axis=1)


class AssociatedHamiltonian(RegressorMixin, BaseEstimator):
    """Level-``L`` Crum partner of the exponential well.

    ``predict`` returns ``V^[L](x)``; ``transform`` returns the surviving
    eigenfunctions ``psi_n^[L]`` for ``n = L .. L + n_levels - 1``.
    """

    def __init__(self, g=1.0, L=1, n_levels=4, quad_tol=1e-14, ode_tol=1e-12):
        self.g = g
        self.L = L
        self.n_levels = n_levels
        self.quad_tol = quad_tol
        self.ode_tol = ode_tol

    def fit(self, X=None, y=None):
        if not (math.isfinite(self.g) and self.g > 0):
            raise DomainError("g must be positive")
        cfg = EvalConfig(quad_tol=self.quad_tol, ode_tol=self.ode_tol)
        table = find_zeros(self.g, int(self.L) + int(self.n_levels), cfg)
        self.tower_ = CrumTower.from_table(table, int(self.L), cfg)
        self.levels_ = np.arange(self.L, self.L + self.n_levels)
        self.energies_ = np.array([self.tower_.energy(n) for n in self.levels_])
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "tower_")
        return self.tower_.potential(_positions(X))

    def transform(self, X):
        check_is_fitted(self, "tower_")
        x = _positions(X)
        return np.stack([self.tower_.eigenfunction(int(n), x) for n in self.levels_], axis=1)

    def fit_transform(self, X, y=None):
        return self.fit(X, y).transform(X)
