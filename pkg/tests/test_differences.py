import math

import numpy as np
import pytest

from mixsmooth.corpus import corpus_entries
from mixsmooth.differences import (
    ModulusRequest,
    difference_field,
    lower_whitney_constant,
    mixed_difference,
    modulus_mean,
    modulus_sup,
    total_modulus_mean,
    total_modulus_sup,
    total_sup_terms,
)
from mixsmooth.domain import Box, lp_quasinorm, sample_on_grid
from mixsmooth.polyapprox import TensorPolynomial


def test_mixed_difference_annihilates_constants():
    f = lambda X: np.full(X.shape[:-1], 4.2)
    assert mixed_difference(f, (1,), (0.2,), np.array([0.1])) == pytest.approx(0.0, abs=1e-14)


def test_mixed_difference_square_symbolic_oracle():
    # (x+2h)^2 - 2(x+h)^2 + x^2 expands to 2h^2 for every x
    f = lambda X: X[..., 0] ** 2
    for x in (0.0, 0.3, 0.71):
        for h in (0.05, 0.25, -0.1):
            assert mixed_difference(f, (2,), (h,), np.array([x])) == pytest.approx(
                2.0 * h * h, rel=1e-10, abs=1e-12
            )


def test_mixed_difference_bilinear_four_term_oracle():
    f = lambda X: X[..., 0] * X[..., 1]
    for x, y in ((0.0, 0.0), (0.2, 0.7)):
        for h1, h2 in ((0.1, 0.3), (-0.2, 0.05)):
            got = mixed_difference(f, (1, 1), (h1, h2), np.array([x, y]))
            assert got == pytest.approx(h1 * h2, rel=1e-10, abs=1e-13)


def test_order_zero_is_identity():
    f = lambda X: np.sin(X[..., 0])
    x = np.array([0.4])
    assert mixed_difference(f, (0,), (0.2,), x) == pytest.approx(math.sin(0.4))


def test_difference_field_annihilates_space_members():
    rng = np.random.default_rng(0)
    phi = TensorPolynomial.random((2, 3), rng)
    scale = float(np.abs(sample_on_grid(phi, Box.unit(2), 8).values).max())
    field = difference_field(phi, (2, 3), (0.1, 0.07), Box.unit(2), 8)
    assert field is not None
    assert np.abs(field.values).max() <= 1e-9 * max(scale, 1.0)


def test_difference_field_linear_constant_field():
    f = lambda X: X[..., 0]
    field = difference_field(f, (1,), (0.25,), Box.unit(1), 16)
    assert field is not None
    assert field.box == Box((0.0,), (0.75,))
    assert np.allclose(field.values, 0.25)
    # resolution density carried over to the shrunken box
    assert field.spec == (12,)


def test_difference_field_empty_when_shift_exceeds_box():
    f = lambda X: X[..., 0]
    assert difference_field(f, (2,), (0.6,), Box.unit(1), 8) is None


def test_modulus_sup_annihilation_and_linear_oracle():
    req = ModulusRequest(r=(1,), t=(0.3,), p=math.inf, box=Box.unit(1), h_samples=9, density=64)
    assert modulus_sup(req, lambda X: np.full(X.shape[:-1], 2.0)) == 0.0
    # sup over |h| <= t of |h| is t, attained at the endpoint node
    assert modulus_sup(req, lambda X: X[..., 0]) == pytest.approx(0.3, abs=1e-12)


def test_modulus_sup_square_oracle():
    # max over x in [0, 1-h] and |h| <= t of |2xh + h^2| equals 2t - t^2
    req = ModulusRequest(
        r=(1,), t=(0.25,), p=math.inf, box=Box.unit(1), h_samples=17, density=512
    )
    value = modulus_sup(req, lambda X: X[..., 0] ** 2)
    assert value == pytest.approx(2 * 0.25 - 0.25**2, abs=2e-3)


def test_modulus_mean_zero_and_member():
    req = ModulusRequest(r=(2,), t=(0.2,), p=1.0, box=Box.unit(1), h_samples=8, density=32)
    assert modulus_mean(req, lambda X: np.zeros(X.shape[:-1])) == 0.0
    rng = np.random.default_rng(3)
    phi = TensorPolynomial.random((2,), rng)
    assert modulus_mean(req, phi) <= 1e-9 * (1 + np.abs(phi.coeffs).max())


def test_modulus_mean_brute_force_double_integral():
    # independent double Riemann sum at 4x the h and x resolution
    t, p, n_h, density = 0.25, 2.0, 8, 32
    f = lambda X: X[..., 0]
    box = Box.unit(1)
    got = modulus_mean(
        ModulusRequest(r=(1,), t=(t,), p=p, box=box, h_samples=n_h, density=density), f
    )
    acc = 0.0
    m = 4 * n_h
    hw = 2 * t / m
    for j in range(m):
        h = -t + (j + 0.5) * hw
        lo, hi = max(0.0, -h), min(1.0, 1.0 - h)
        nx = 4 * density
        xw = (hi - lo) / nx
        xs = lo + (np.arange(nx) + 0.5) * xw
        acc += np.sum(np.abs(np.full_like(xs, h)) ** p) * xw * hw
    brute = (acc / (2 * t)) ** (1 / p)
    assert got == pytest.approx(brute, rel=1e-2)


def test_modulus_mean_rejects_zero_t_on_active_axis():
    req = ModulusRequest(r=(1,), t=(0.0,), p=1.0, box=Box.unit(1), h_samples=4, density=8)
    with pytest.raises(ValueError):
        modulus_mean(req, lambda X: X[..., 0])


def test_total_modulus_d1_reduces_to_single_term():
    f = lambda X: np.sin(2 * np.pi * X[..., 0])
    box = Box.unit(1)
    total = total_modulus_sup(f, (2,), (0.3,), 2.0, box, density=32, h_samples=9)
    single = modulus_sup(
        ModulusRequest(r=(2,), t=(0.3,), p=2.0, box=box, h_samples=9, density=32), f
    )
    assert total == pytest.approx(single, rel=1e-14)


def test_total_modulus_bilinear_per_term_oracles():
    # f = xy, r = (1,1), p = inf: the three subset terms have closed forms
    f = lambda X: X[..., 0] * X[..., 1]
    box = Box.unit(2)
    t = (0.25, 0.4)
    terms = total_sup_terms(
        f, (1, 1), t, box, density=256, h_samples=9, p_values=[math.inf]
    )
    # axis 0 alone: sup |h1 * y| over the shrunken box, y up to 1 - half cell
    assert terms[(0,)][math.inf] == pytest.approx(t[0], abs=4e-3)
    assert terms[(1,)][math.inf] == pytest.approx(t[1], abs=4e-3)
    assert terms[(0, 1)][math.inf] == pytest.approx(t[0] * t[1], abs=1e-12)
    total = total_modulus_sup(f, (1, 1), t, math.inf, box, density=256, h_samples=9)
    assert total == pytest.approx(sum(v[math.inf] for v in terms.values()), rel=1e-14)


def test_total_modulus_requires_positive_orders():
    with pytest.raises(ValueError):
        total_modulus_sup(
            lambda X: X[..., 0], (0,), (0.1,), 1.0, Box.unit(1), density=8, h_samples=4
        )


def test_mean_below_sup_on_corpus():
    box = Box.unit(2)
    names = [e for e in corpus_entries(dim=2)][:10]
    for entry in names:
        for p in (0.5, 1.0, 2.0):
            w = total_modulus_mean(
                entry, (1, 1), (0.5, 0.5), p, box, density=12, h_samples=6
            )
            om = total_modulus_sup(
                entry, (1, 1), (0.5, 0.5), p, box, density=12, h_samples=6
            )
            assert w <= om * (1.0 + 1e-3) + 1e-9


def test_modulus_monotone_in_t_on_nested_ladder():
    f = lambda X: np.sin(2 * np.pi * X[..., 0]) * X[..., 1]
    box = Box.unit(2)
    prev = 0.0
    # doubling t alongside 2m-1 samples keeps the old step nodes in the sweep
    for t, m in (((0.125, 0.125), 5), ((0.25, 0.25), 9), ((0.5, 0.5), 17)):
        value = modulus_sup(
            ModulusRequest(r=(1, 1), t=t, p=2.0, box=box, h_samples=m, density=16), f
        )
        assert value >= prev - 1e-12
        prev = value


def test_modulus_reflection_invariance():
    f = lambda X: np.exp(X[..., 0]) * np.cos(X[..., 0])
    g = lambda X: np.exp(1.0 - X[..., 0]) * np.cos(1.0 - X[..., 0])
    req = ModulusRequest(r=(2,), t=(0.3,), p=2.0, box=Box.unit(1), h_samples=9, density=64)
    assert modulus_sup(req, f) == pytest.approx(modulus_sup(req, g), rel=1e-10)


def test_modulus_seminorm_under_space_members():
    rng = np.random.default_rng(8)
    f = lambda X: np.exp(X[..., 0] + X[..., 1])
    phi = TensorPolynomial.random((2, 2), rng)
    shifted = lambda X: f(X) + phi(X)
    req = ModulusRequest(
        r=(2, 2), t=(0.25, 0.25), p=1.0, box=Box.unit(2), h_samples=5, density=16
    )
    a = modulus_sup(req, f)
    b = modulus_sup(req, shifted)
    assert a == pytest.approx(b, rel=1e-9, abs=1e-9)


def test_modulus_sup_matches_plain_loop_brute_force():
    # independent scan, no vectorized shortcuts, same candidate steps
    f = lambda X: np.sin(2.3 * X[..., 0]) + 0.5 * X[..., 0] ** 2
    box = Box.unit(1)
    t, m, density, p = 0.4, 8, 8, 2.0
    got = modulus_sup(
        ModulusRequest(r=(1,), t=(t,), p=p, box=box, h_samples=m, density=density), f
    )
    best = 0.0
    for h in np.linspace(-t, t, m):
        if h == 0.0:
            continue
        lo, hi = max(0.0, -h), min(1.0, 1.0 - h)
        if hi <= lo:
            continue
        n = max(1, math.ceil(density * (hi - lo) - 1e-9))
        w = (hi - lo) / n
        acc = 0.0
        for k in range(n):
            x = lo + (k + 0.5) * w
            fa = float(f(np.array([[x + h]]))[0])
            fb = float(f(np.array([[x]]))[0])
            acc += abs(fa - fb) ** p * w
        best = max(best, acc ** (1 / p))
    assert got == pytest.approx(best, abs=1e-12)


def test_lower_whitney_constant_examples():
    assert lower_whitney_constant((1,), 1.0) == pytest.approx(2.0)
    assert lower_whitney_constant((1,), 0.5) == pytest.approx(4.0)
    assert lower_whitney_constant((1, 1), 1.0) == pytest.approx(8.0)
    assert lower_whitney_constant((2,), math.inf) == pytest.approx(4.0)


def test_lower_whitney_bound_random_space_members():
    # total modulus of f is unchanged by adding any member, so it is
    # bounded by the constant times ||f - phi|| for every phi
    rng = np.random.default_rng(42)
    box = Box.unit(2)
    r = (2, 2)
    for entry in [e for e in corpus_entries(dim=2)][:6]:
        for p in (0.5, 1.0, math.inf):
            const = lower_whitney_constant(r, p)
            omega = total_modulus_sup(
                entry, r, tuple(box.size), p, box, density=16, h_samples=7
            )
            for _ in range(3):
                phi = TensorPolynomial.random(r, rng)
                diff = lambda X, e=entry, q=phi: e(X) - q(X)
                norm = lp_quasinorm(sample_on_grid(diff, box, 16), p)
                assert omega <= const * norm * 1.05 + 1e-9


def test_total_mean_d1_reduces_to_single_mean_term():
    f = lambda X: np.exp(X[..., 0])
    box = Box.unit(1)
    total = total_modulus_mean(f, (2,), (0.3,), 1.0, box, density=32, h_samples=8)
    single = modulus_mean(
        ModulusRequest(r=(2,), t=(0.3,), p=1.0, box=box, h_samples=8, density=32), f
    )
    assert total == pytest.approx(single, rel=1e-14)
