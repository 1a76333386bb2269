import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from expwell import DomainError, ZeroKind, ZeroTable, eval_K_scaled, find_zeros, wkb_predict
from expwell.errors import BracketError
from expwell.zeros import ZeroEntry, index_to_kind, wkb_residual


def test_first_six_at_g1():
    t = find_zeros(1.0, 6)
    assert len(t) == 6
    nus = t.nus
    assert 1.0 < nus[0] and all(a < b for a, b in zip(nus, nus[1:]))
    assert [e.kind for e in t.entries] == [ZeroKind.DERIVATIVE, ZeroKind.FUNCTION] * 3
    assert max(e.residual for e in t.entries) < 1e-10


def test_first_zero_values(table_g1):
    # the combined sequence starts lambda_0 < mu_0 < lambda_1 < mu_1
    np.testing.assert_allclose(table_g1.nus[:4], [1.917287, 2.962549, 3.785563, 4.534491], atol=2e-6)


def test_residuals_are_true_zeros(table_g1):
    for e in table_g1.entries[:12]:
        k, kp = eval_K_scaled(e.nu, 1.0)
        assert abs(kp if e.kind is ZeroKind.DERIVATIVE else k) < 1e-10


def test_simplicity(table_g1):
    for e in table_g1.entries[:12]:
        idx = 1 if e.kind is ZeroKind.DERIVATIVE else 0
        lo = eval_K_scaled(e.nu - 1e-6, 1.0)[idx]
        hi = eval_K_scaled(e.nu + 1e-6, 1.0)[idx]
        assert lo * hi < 0


@pytest.mark.parametrize("g", [0.5, 2.0])
def test_above_g(g):
    t = find_zeros(g, 8)
    assert all(nu > g for nu in t.nus)
    t.check_interlacing()


def test_not_a_rescaling():
    a = np.array(find_zeros(1.0, 10).nus)
    b = np.array(find_zeros(2.0, 10).nus)
    ratio = b / a
    assert ratio.max() - ratio.min() > 1e-6


def test_deterministic():
    assert find_zeros(1.3, 9) == find_zeros(1.3, 9)


def test_wkb_count_consistency(table_g1):
    # number of zeros below a threshold vs the WKB count, within one
    for thresh in [3.0, 6.0, 10.0, 15.0]:
        found = sum(nu < thresh for nu in table_g1.nus)
        predicted = sum(wkb_predict(n, 1.0) < thresh for n in range(60))
        assert abs(found - predicted) <= 1


def test_index_bookkeeping():
    assert index_to_kind(0) == (ZeroKind.DERIVATIVE, 0)
    assert index_to_kind(5) == (ZeroKind.FUNCTION, 2)
    with pytest.raises(DomainError):
        index_to_kind(-1)


def test_bad_inputs():
    with pytest.raises(DomainError):
        find_zeros(0.0, 3)
    with pytest.raises(DomainError):
        find_zeros(1.0, 0)


def test_interlacing_check_detects_disorder():
    e = [ZeroEntry(ZeroKind.FUNCTION, 0, 2.0, 0.0), ZeroEntry(ZeroKind.DERIVATIVE, 0, 3.0, 0.0)]
    with pytest.raises(BracketError):
        ZeroTable(1.0, tuple(e)).check_interlacing()


def test_records_round_trip(table_g1):
    t = ZeroTable(1.0, table_g1.entries[:5])
    assert ZeroTable.from_records(1.0, t.to_records()) == t


def test_wkb_residual_and_monotone():
    nus = [wkb_predict(n, 1.0) for n in range(30)]
    assert all(a < b for a, b in zip(nus, nus[1:]))
    assert abs(wkb_residual(nus[0], 1.0, 0)) < 1e-12
    assert nus[0] > 1.0


def test_wkb_error_decreasing(table_g1):
    err = [abs(wkb_predict(n, 1.0) - nu) / nu for n, nu in enumerate(table_g1.nus)]
    assert all(e < 0.01 for e in err[10:])
    assert np.polyfit(np.arange(10, 41), np.log(err[10:41]), 1)[0] < 0
    assert np.mean(err[10:20]) > np.mean(err[30:41])


def test_wkb_per_kind_indexing(table_g1):
    # derivative zeros lambda_j follow m = 2j; function zeros mu_j need m = 2j + 1
    lam = table_g1.lambdas[5:15]
    mu = table_g1.mus[5:15]
    for j, nu in enumerate(lam, start=5):
        assert abs(wkb_predict(j, 1.0, "derivative_only") - nu) / nu < 1e-3
    for j, nu in enumerate(mu, start=5):
        good = abs(wkb_predict(j, 1.0, "function_only") - nu) / nu
        # the literal m = 2j rule lands on lambda_j instead of mu_j
        literal = abs(wkb_predict(j, 1.0, "derivative_only") - nu) / nu
        assert good < 1e-3 < literal


def test_wkb_bad_mode():
    with pytest.raises(DomainError):
        wkb_predict(1, 1.0, "both")


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 500), st.floats(0.05, 20.0))
def test_wkb_residual_property(n, x):
    nu = wkb_predict(n, x)
    rhs = (n + 0.5) * math.pi / 2
    assert nu > x
    assert abs(wkb_residual(nu, x, n)) <= 1e-12 * max(1.0, rhs)
    assert wkb_predict(n + 1, x) > nu
