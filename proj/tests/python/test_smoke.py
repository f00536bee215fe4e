import math

import numpy as np
import pytest

import gridkr


def test_closed_form_laplace_dc():
    expect = (1 - math.exp(-math.pi)) / math.pi
    assert gridkr.closed_form_coeff("laplace", 1.0, 0) == pytest.approx(expect, abs=1e-14)


def test_dirichlet_spectrum_and_hops():
    s = gridkr.spectrum("dirichlet", 3, d=1, cutoff=10)
    assert s.coeff([2]) == 1.0
    assert s.coeff([5]) == 0.0
    h = s.hop_stats(4, [1])
    assert h["l1"] == pytest.approx(2.0)


def test_eigenvalues_match_dense():
    lam = np.sort(gridkr.eigenvalues("dirichlet", 3, 1, 4))
    assert lam == pytest.approx([4.0, 8.0, 8.0, 8.0])


def test_mse_report_exact_point():
    rep = gridkr.mse_report("dirichlet", 3, 1, 4, {}, 1.0)
    assert rep["noisy_total"] == pytest.approx(0.625, abs=1e-12)
    oracle = gridkr.noisy_error_deterministic("dirichlet", 3, 1, 4, 1.0)
    assert rep["noisy_total"] == pytest.approx(oracle, abs=1e-10)


def test_solve_roundtrip():
    rng = np.random.default_rng(3)
    y = rng.normal(size=8)
    a_fft = gridkr.solve("laplace", 1.0, 1, 8, y, method="fft")
    a_dense = gridkr.solve("laplace", 1.0, 1, 8, y, method="dense")
    assert np.max(np.abs(a_fft - a_dense)) < 1e-10


def test_monte_carlo_close_to_closed_form():
    target = {(1,): 0.5, (-1,): 0.5}
    rep = gridkr.mse_report("gaussian", 2.0, 1, 8, target, 1.0)
    mean, se = gridkr.monte_carlo("gaussian", 2.0, 1, 8, target, 1.0, trials=2000, seed=11)
    assert abs(mean - rep["total"]) < 3 * se


def test_certify_satisfied():
    rep = gridkr.certify("gaussian", M=2.0, d=1)
    assert rep["all_satisfied"]
    assert rep["c1"] <= 1.0


def test_degenerate_class_raises():
    with pytest.raises(gridkr.DegenerateClassError):
        gridkr.mse_report("dirichlet", 1, 1, 8, {}, 1.0)
