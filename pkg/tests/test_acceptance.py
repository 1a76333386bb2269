"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py`` (the lines are printed
even when output is captured) or ``python tests/test_acceptance.py``.
The WKB error curve is written to ``$EXPWELL_ARTIFACTS`` (default
``artifacts/`` at the repository root).
"""
import csv
import math
import os
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from expwell import (
    CrumTower,
    OracleConfig,
    default_x_max,
    eval_K_ode,
    eval_K_quadrature,
    eval_K_scaled,
    find_zeros,
    isospectral_residual,
    reduction_identity_check,
    shape_invariance_residual,
    solve_fd,
    wkb_predict,
)
from expwell.orthogonality import (
    cross_integral_closed_form_scaled,
    cross_integral_scaled,
    crum_orthogonality_check,
    gram_matrix,
    normalized_off_diagonal,
)

ARTIFACTS = Path(os.environ.get("EXPWELL_ARTIFACTS", Path(__file__).resolve().parents[1] / "artifacts"))


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} -- {detail}")
        assert ok, detail

    return emit


def test_c1_oracle_equivalence(report):
    t0 = time.perf_counter()
    worst = 0.0
    parity_ok = True
    for g in (0.5, 1.0, 2.0):
        table = find_zeros(g, 10)
        cfg = OracleConfig(default_x_max(g, table.nus[-1]), h=1e-3, parity="both", n_levels=5)
        fd = solve_fd(g, cfg)
        for (parity, e), entry in zip(fd, table.entries):
            parity_ok &= parity == entry.kind.parity
            worst = max(worst, abs(math.sqrt(e) - entry.nu) / entry.nu)
    wall = time.perf_counter() - t0
    ok = worst < 1e-6 and parity_ok and wall < 60.0
    report(1, "finite-difference oracle vs zeros, g in {0.5, 1, 2}, 10 levels", ok,
           f"max rel err {worst:.2e} (< 1e-6), parities match {parity_ok}, {wall:.1f} s (< 60 s)")


def test_c2_interlacing_and_bounds(report):
    table = find_zeros(1.0, 20)
    g = 1.0
    chain = [g] + table.nus
    strict = all(a < b for a, b in zip(chain, chain[1:]))
    kinds = all(e.kind.parity == ("even" if n % 2 == 0 else "odd") for n, e in enumerate(table.entries))
    res = max(e.residual for e in table.entries)
    e0 = table.entries[0].energy
    ok = strict and kinds and res < 1e-10 and e0 > g * g
    report(2, "interlacing g < lambda_0 < mu_0 < ..., E_0 > g^2, residuals", ok,
           f"strict chain {strict}, alternating kinds {kinds}, E_0 = {e0:.6f}, max residual {res:.1e} (< 1e-10)")


def test_c3_same_parity_orthogonality(report):
    table = find_zeros(1.0, 16)
    worst = 0.0
    for nus in (table.nus[0::2], table.nus[1::2]):
        worst = max(worst, float(normalized_off_diagonal(gram_matrix(nus, 1.0)).max()))
    rng = np.random.default_rng(20240601)
    rel = 0.0
    for _ in range(20):
        a, b = rng.uniform(1.0, 16.0, size=2)
        q = cross_integral_scaled(a, b, 1.0)
        c = cross_integral_closed_form_scaled(a, b, 1.0)
        rel = max(rel, abs(q - c) / abs(q))
    ok = worst < 1e-8 and rel < 1e-9
    report(3, "Gram matrices of 8 even and 8 odd states; closed form vs quadrature", ok,
           f"max normalized off-diagonal {worst:.1e} (< 1e-8), closed form max rel {rel:.1e} (< 1e-9)")


def test_c4_crum_orthogonality(report):
    table = find_zeros(1.0, 12)
    worst = 0.0
    for L in (1, 2):
        tower = CrumTower.from_table(table, L)
        for n, m in [(L, L + 2), (L + 1, L + 3), (L + 2, L + 4)]:
            worst = max(worst, crum_orthogonality_check(tower, n, m))
    report(4, "level-L orthogonality, L in {1, 2}, first 3 same-parity pairs", worst < 1e-6,
           f"max normalized off-diagonal {worst:.1e} (< 1e-6)")


def test_c5_crum_tower(report):
    table = find_zeros(1.0, 12)
    xs = np.array([0.2, 0.5, 1.0, 1.5, 2.0, 2.5])
    iso = par = red = 0.0
    for L in (1, 2):
        tower = CrumTower.from_table(table, L)
        v = tower.potential(xs)
        par = max(par, float(np.max(np.abs(tower.potential(-xs) - v) / np.abs(v))))
        for n in range(L, L + 4):
            iso = max(iso, isospectral_residual(tower, n, xs), isospectral_residual(tower, n, -xs))
            plus, minus = tower.eigenfunction(n, xs), tower.eigenfunction(n, -xs)
            par = max(par, float(np.max(np.abs(minus - (-1) ** (L + n) * plus) / np.abs(plus))))
            red = max(red, *(reduction_identity_check(tower, n, x) for x in (0.7, -0.7, 1.9)))
    ok = iso < 1e-5 and par < 1e-10 and red < 1e-9
    report(5, "iso-spectrality, parity identities, Wronskian reduction", ok,
           f"iso residual {iso:.1e} (< 1e-5), parity {par:.1e} (< 1e-10), reduction {red:.1e} (< 1e-9)")


def test_c6_wkb(report):
    table = find_zeros(1.0, 41)
    rows = []
    for n, nu in enumerate(table.nus):
        pred = wkb_predict(n, 1.0)
        rows.append((n, pred, nu, abs(pred - nu) / nu))
    ARTIFACTS.mkdir(parents=True, exist_ok=True)
    path = ARTIFACTS / "wkb_error_curve.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "nu_wkb", "nu_exact", "rel_err"])
        w.writerows([(n, repr(p), repr(v), repr(e)) for n, p, v, e in rows])
    err = np.array([r[3] for r in rows])
    window = err[10:41]
    below = bool(np.all(err[10:] < 0.01))
    slope = float(np.polyfit(np.arange(10, 41), np.log(window), 1)[0])
    halves = float(window[:15].mean()) > float(window[16:].mean())
    ok = below and slope < 0 and halves
    report(6, "WKB prediction of the zeros at g = 1", ok,
           f"max rel err n>=10 {err[10:].max():.1e} (< 1e-2), log-error slope {slope:.3f} (< 0), "
           f"first-half mean > second-half mean {halves}; curve written to {path}")


def test_c7_not_shape_invariant(report):
    tower = CrumTower.from_table(find_zeros(1.0, 4), 1)
    res, a, c = shape_invariance_residual(tower, np.linspace(0.0, 3.0, 301))
    report(7, "V^[1] is not f^2 e^{2|x|} + c on [0, 3]", res > 1e-3,
           f"relative fit residual {res:.3e} (> 1e-3), best a = {a:.4f}, c = {c:.4f}")


def test_c8_evaluator_cross_validation(report):
    worst = 0.0
    for nu in range(16):
        for x in (0.5, 1.0, 2.0, 5.0):
            q = eval_K_quadrature(float(nu), x) * math.exp(0.5 * math.pi * nu)
            o = eval_K_ode(float(nu), x).shifted(0.5 * math.pi * nu)[0]
            worst = max(worst, abs(q - o) / abs(q))
    finite = True
    for nu in (50.0, 100.0, 150.0, 200.0):
        for x in (0.05, 0.5, 1.0, 5.0, 20.0, 50.0):
            sv = eval_K_ode(nu, x)
            k, kp = eval_K_scaled(nu, x)
            finite &= all(math.isfinite(v) for v in (sv.f, sv.fp, k, kp)) and sv.f != 0.0 and k != 0.0
    ok = worst < 1e-9 and finite
    report(8, "quadrature vs ODE on nu in 0..15 x {0.5, 1, 2, 5}; ODE up to nu = 200", ok,
           f"max rel diff {worst:.1e} (< 1e-9), finite nonzero up to nu = 200 {finite}")


def test_c9_oracle_self_test(report):
    cfg = OracleConfig(x_max=10.0, h=1e-3, parity="both", n_levels=5)
    levels = solve_fd(1.0, cfg, potential=lambda x: x * x)
    e = np.array([v for _, v in levels])
    rel = float(np.max(np.abs(e - (2 * np.arange(e.size) + 1)) / (2 * np.arange(e.size) + 1)))
    report(9, "finite-difference oracle on V = x^2 gives E_n = 2n + 1", rel < 1e-7,
           f"max rel err over {e.size} levels {rel:.1e} (< 1e-7)")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
