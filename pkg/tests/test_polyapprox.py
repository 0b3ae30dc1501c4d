import math

import numpy as np
import pytest

from mixsmooth.corpus import corpus_entries, get_function
from mixsmooth.domain import Box, GridFunction, lp_quasinorm, sample_on_grid
from mixsmooth.polyapprox import (
    DerivativeBundle,
    TensorPolynomial,
    best_approx,
    best_constant,
    eval_poly,
    piecewise_constant_approx,
    taylor_polynomial,
    taylor_remainder_bound,
)


def test_eval_poly_examples():
    zero = TensorPolynomial(np.zeros((2, 2)))
    assert eval_poly(zero, np.array([0.3, 0.4])) == 0.0
    line = TensorPolynomial(np.array([1.0, 2.0]))
    assert eval_poly(line, np.array([0.25])) == pytest.approx(1.5)
    xy = TensorPolynomial(np.array([[0.0, 0.0], [0.0, 1.0]]))
    pts = np.array([[2.0, 3.0], [0.5, 0.5]])
    assert np.allclose(eval_poly(xy, pts), [6.0, 0.25])


def test_polynomial_derivative_exact():
    # d/dx^2 of x^3 is 6x; mixed derivative of x^2 y is 2y at order (2, 0)
    cubic = TensorPolynomial(np.array([0.0, 0.0, 0.0, 1.0]))
    d2 = cubic.derivative((2,))
    assert np.allclose(d2.coeffs, [0.0, 6.0])
    assert cubic.derivative((4,)).coeffs.max() == 0.0
    f = TensorPolynomial(np.array([[0.0, 0.0], [0.0, 0.0], [0.0, 1.0]]))
    dxx = f.derivative((2, 0))
    assert np.allclose(dxx.coeffs, [[0.0, 2.0]])


def test_best_approx_recovers_space_member():
    rng = np.random.default_rng(2)
    phi = TensorPolynomial.random((2, 2), rng)
    g = sample_on_grid(phi, Box.unit(2), 16)
    scale = float(np.abs(g.values).max())
    for p in (0.5, 1.0, 2.0, math.inf):
        res = best_approx(g, (2, 2), p, seed=1)
        assert res.error <= 1e-9 * max(1.0, scale)
        fitted = res.polynomial(g.midpoints())
        assert np.abs(fitted - g.values).max() <= 1e-7 * max(1.0, scale)


def test_best_approx_projection_oracle_p2():
    g = sample_on_grid(lambda X: X[..., 0] ** 2, Box.unit(1), 256)
    res = best_approx(g, (2,), 2.0)
    assert res.error == pytest.approx(1.0 / (6.0 * math.sqrt(5.0)), abs=1e-3)
    assert res.converged


def test_best_approx_matches_dense_lstsq_oracle():
    # same discrete problem solved by one global SVD least-squares call
    for name in [e.name for e in corpus_entries(dim=2)][:10]:
        fn = get_function(name)
        g = sample_on_grid(fn, Box.unit(2), 24)
        res = best_approx(g, (2, 2), 2.0)
        pts = g.midpoints().reshape(-1, 2)
        cols = []
        for sx in range(2):
            for sy in range(2):
                cols.append(pts[:, 0] ** sx * pts[:, 1] ** sy)
        A = np.stack(cols, axis=1)
        sol, *_ = np.linalg.lstsq(A, g.values.reshape(-1), rcond=None)
        resid = g.values.reshape(-1) - A @ sol
        oracle = math.sqrt(float((resid**2).sum() * g.cell_volume))
        assert res.error == pytest.approx(oracle, rel=1e-10, abs=1e-12)


def test_best_approx_minimax_constant_is_midrange():
    g = sample_on_grid(lambda X: X[..., 0], Box.unit(1), 128)
    res = best_approx(g, (1,), math.inf)
    assert res.polynomial.coeffs[0] == pytest.approx(0.5, abs=1.0 / 128)
    assert res.error == pytest.approx(0.5, abs=1.0 / 128)


def test_best_approx_l1_constant_is_median_like():
    g = sample_on_grid(lambda X: X[..., 0], Box.unit(1), 256)
    res = best_approx(g, (1,), 1.0)
    assert res.error == pytest.approx(0.25, abs=2e-3)


def test_best_approx_invariance_and_scaling():
    f = lambda X: np.sin(2 * np.pi * X[..., 0])
    box = Box.unit(1)
    g = sample_on_grid(f, box, 64)
    rng = np.random.default_rng(4)
    phi = TensorPolynomial.random((2,), rng)
    shifted = GridFunction(box, g.values + phi(g.midpoints()))
    scaled = GridFunction(box, -2.5 * g.values)
    for p, tol in ((2.0, 1e-10), (1.0, 1e-5), (math.inf, 1e-6)):
        base = best_approx(g, (2,), p).error
        assert best_approx(shifted, (2,), p).error == pytest.approx(base, rel=1e-4, abs=tol)
        assert best_approx(scaled, (2,), p).error == pytest.approx(2.5 * base, rel=1e-4, abs=tol)


def test_best_approx_small_p_internal_consistency():
    f = lambda X: np.abs(X[..., 0] - 0.37) ** 0.5
    g = sample_on_grid(f, Box.unit(1), 64)
    res = best_approx(g, (2,), 0.5, seed=9)
    diag = res.diagnostics
    assert diag["method"] == "smoothed-multistart"
    assert diag["starts"] == 9
    # returned error never exceeds any tried start
    assert res.error <= min(diag["start_errors"]) + 1e-12
    # and never exceeds the p = 2 solution evaluated in the p quasi-norm
    proj = best_approx(g, (2,), 2.0).polynomial
    resid = GridFunction(g.box, g.values - proj(g.midpoints()))
    assert res.error <= lp_quasinorm(resid, 0.5) + 1e-12


def test_best_approx_rejects_underdetermined_grid():
    g = sample_on_grid(lambda X: X[..., 0], Box.unit(1), 3)
    with pytest.raises(ValueError):
        best_approx(g, (2,), 2.0)


def test_taylor_polynomial_examples():
    # linear function reproduced exactly at order 2
    lin = TensorPolynomial(np.array([0.5, 2.0]))
    bundle = DerivativeBundle.from_polynomial(lin, (0.3,), (2,))
    assert np.allclose(taylor_polynomial(bundle, (2,)).coeffs, lin.coeffs, atol=1e-12)

    exp_bundle = DerivativeBundle.from_factory(
        lambda s: (lambda X: np.exp(X[..., 0])), (0.0,), (2,)
    )
    assert np.allclose(taylor_polynomial(exp_bundle, (2,)).coeffs, [1.0, 1.0])

    exp2 = DerivativeBundle.from_factory(
        lambda s: (lambda X: np.exp(X[..., 0] + X[..., 1])), (0.0, 0.0), (2, 2)
    )
    assert np.allclose(
        taylor_polynomial(exp2, (2, 2)).coeffs, [[1.0, 1.0], [1.0, 1.0]]
    )


def test_taylor_polynomial_reproduces_members_coefficientwise():
    rng = np.random.default_rng(6)
    phi = TensorPolynomial.random((3, 2), rng)
    bundle = DerivativeBundle.from_polynomial(phi, (0.4, 0.7), (3, 2))
    got = taylor_polynomial(bundle, (3, 2))
    assert np.allclose(got.coeffs, phi.coeffs, atol=1e-12)


def test_taylor_remainder_bracket_oracles():
    rng = np.random.default_rng(7)
    phi = TensorPolynomial.random((2, 2), rng)
    bundle = DerivativeBundle.from_polynomial(phi, (0.0, 0.0), (2, 2))
    assert taylor_remainder_bound(bundle, (2, 2), 1.0, Box.unit(2), 16) <= 1e-12

    delta = 0.5
    exp1 = DerivativeBundle.from_factory(
        lambda s: (lambda X: np.exp(X[..., 0])), (0.0,), (2,)
    )
    got = taylor_remainder_bound(exp1, (2,), math.inf, Box((0.0,), (delta,)), 512)
    assert got == pytest.approx(delta**2 * math.exp(delta), rel=1e-2)

    exp2 = DerivativeBundle.from_factory(
        lambda s: (lambda X: np.exp(X[..., 0] + X[..., 1])), (0.0, 0.0), (1, 1)
    )
    got = taylor_remainder_bound(exp2, (1, 1), math.inf, Box.cube(0.0, delta, 2), 256)
    expect = (2 * delta + delta**2) * math.exp(2 * delta)
    assert got == pytest.approx(expect, rel=1e-2)


def test_taylor_remainder_rejects_small_p():
    bundle = DerivativeBundle.from_factory(
        lambda s: (lambda X: np.exp(X[..., 0])), (0.0,), (2,)
    )
    with pytest.raises(ValueError, match="p >= 1"):
        taylor_remainder_bound(bundle, (2,), 0.5, Box.unit(1))


def test_best_constant_examples():
    g = sample_on_grid(lambda X: np.full(X.shape[:-1], 1.3), Box.unit(1), 32)
    beta, err = best_constant(g, 1.0)
    assert beta == 1.3 and err == 0.0

    g = sample_on_grid(lambda X: X[..., 0], Box.unit(1), 1024)
    beta, err = best_constant(g, 1.0)
    assert beta == pytest.approx(0.5, abs=1e-3)
    assert err == pytest.approx(0.25, abs=1e-3)


def test_best_constant_brute_force_value_scan():
    g = sample_on_grid(lambda X: X[..., 0] + X[..., 1], Box.unit(2), 16)
    beta, err = best_constant(g, 1.0)
    assert beta == pytest.approx(1.0, abs=1e-12)
    # scanning every sampled value cannot beat the returned error
    values = np.unique(g.values)
    brute = min(
        lp_quasinorm(GridFunction(g.box, g.values - b), 1.0) for b in values
    )
    assert err == pytest.approx(brute, rel=1e-12)


def test_piecewise_constant_examples():
    g = sample_on_grid(lambda X: np.full(X.shape[:-1], -0.4), Box.unit(2), 8)
    _, err = piecewise_constant_approx(g, 2, 1.0)
    assert err == 0.0

    g = sample_on_grid(lambda X: X[..., 0], Box.unit(1), 512)
    _, err = piecewise_constant_approx(g, 2, 1.0)
    assert err == pytest.approx(1.0 / 8.0, abs=1e-3)

    f = lambda X: np.sin(np.pi * X[..., 0]) * np.sin(np.pi * X[..., 1])
    g = sample_on_grid(f, Box.unit(2), 32)
    _, err2 = piecewise_constant_approx(g, 2, 1.0)
    _, err4 = piecewise_constant_approx(g, 4, 1.0)
    assert err4 < err2


def test_piecewise_constant_power_sum_identity():
    f = lambda X: np.exp(X[..., 0]) * X[..., 1]
    g = sample_on_grid(f, Box.unit(2), 16)
    pw, total = piecewise_constant_approx(g, 2, 0.5)
    acc = 0.0
    for idx in np.ndindex(pw.splits):
        sl = tuple(slice(i * 8, (i + 1) * 8) for i in idx)
        lo = np.array([0.0, 0.0]) + np.array(idx) * 0.5
        cell = GridFunction(Box(tuple(lo), tuple(lo + 0.5)), g.values[sl])
        acc += lp_quasinorm(
            GridFunction(cell.box, cell.values - pw.betas[idx]), 0.5
        ) ** 0.5
    assert total**0.5 == pytest.approx(acc, rel=1e-12)


def test_piecewise_constant_requires_divisible_grid():
    g = sample_on_grid(lambda X: X[..., 0], Box.unit(1), 10)
    with pytest.raises(ValueError):
        piecewise_constant_approx(g, 3, 1.0)


def test_piecewise_constant_evaluation():
    g = sample_on_grid(lambda X: X[..., 0], Box.unit(1), 8)
    pw, _ = piecewise_constant_approx(g, 2, math.inf)
    assert pw(np.array([0.1])) == pytest.approx(0.25, abs=0.3)
    left = pw(np.array([[0.2], [0.9]]))
    assert left.shape == (2,)
