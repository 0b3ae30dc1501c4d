import itertools
from fractions import Fraction

import numpy as np
import pytest

from mixsmooth.differences import mixed_difference
from mixsmooth.domain import Box, grid_points, nonempty_axis_subsets, restrict_order
from mixsmooth.identities import (
    RationalMultiPoly,
    annihilation_residual,
    expand_Ae,
    expand_Pe,
    halving_identity,
    reproduction_identity_gap,
    reproduction_residual,
    unit_decomposition,
    univariate_divmod,
)
from mixsmooth.polyapprox import TensorPolynomial


def poly_from_terms(dim, terms):
    return RationalMultiPoly(dim, {k: Fraction(c) for k, c in terms.items()})


def test_rational_poly_arithmetic_is_exact():
    x = RationalMultiPoly.variable(0, 1)
    third = RationalMultiPoly.constant(1, Fraction(1, 3))
    p = (x + third) * (x - third)
    assert p == poly_from_terms(1, {(2,): 1, (0,): Fraction(-1, 9)})
    assert (p - p).is_zero
    assert p.evaluate([Fraction(1, 3)]) == 0


def test_expand_Pe_and_Ae_examples():
    assert expand_Pe((1,), (0,)) == poly_from_terms(1, {(1,): 1, (0,): -1})
    assert expand_Ae((1,), (0,)) == poly_from_terms(1, {(1,): 1})
    assert expand_Pe((2,), (0,)) == poly_from_terms(1, {(2,): 1, (1,): -2, (0,): 1})
    assert expand_Ae((2,), (0,)) == poly_from_terms(1, {(2,): 1, (1,): -2})
    p = expand_Pe((1, 1), (0, 1))
    assert p == poly_from_terms(
        2, {(1, 1): 1, (1, 0): -1, (0, 1): -1, (0, 0): 1}
    )
    assert len(p) == 4


def test_unit_decomposition_known_small_cases():
    d = unit_decomposition((1,))
    assert d.a == {(1,): Fraction(1)}
    assert d.b == {(0,): Fraction(-1)}

    d = unit_decomposition((2,))
    assert d.a == {(1,): Fraction(2), (2,): Fraction(-1)}
    assert d.b == {(0,): Fraction(1)}

    d = unit_decomposition((1, 1))
    assert d.a == {(1, 1): Fraction(1)}
    assert d.b == {(0,): Fraction(-1), (1,): Fraction(-1), (0, 1): Fraction(-1)}


def test_unit_decomposition_exact_for_all_small_orders():
    for dim in (1, 2, 3):
        for r in itertools.product(range(1, 5), repeat=dim):
            decomp = unit_decomposition(r)
            # construction already verifies; assert the invariant again
            assert decomp.as_polynomial() == 1
            assert all(all(1 <= v for v in k) for k in decomp.a)


def test_reproduction_residual_member_and_affine():
    rng = np.random.default_rng(1)
    box = Box.unit(1)
    phi = TensorPolynomial.random((2,), rng)
    scale = 1.0 + float(np.abs(phi.coeffs).max())
    res = reproduction_residual(phi, (2,), box, [(0.04,), (-0.06,)], 16)
    assert res <= 1e-9 * scale
    # affine: f(x) = 2 f(x+h) - f(x+2h) exactly
    f = lambda X: 3.0 * X[..., 0] - 0.7
    assert reproduction_residual(f, (2,), box, [(0.1,)], 16) <= 1e-12


def test_reproduction_residual_matches_difference_side_for_nonmember():
    # x^2 is not annihilated at order 1; the residual must equal the
    # difference-side sum pointwise, so the gap stays at rounding level
    f = lambda X: X[..., 0] ** 2
    box = Box.unit(1)
    gap = reproduction_identity_gap(f, (1,), box, [(0.07,), (0.11,)], 32)
    assert gap <= 1e-12
    h = 0.07
    res = reproduction_residual(f, (1,), box, [(h,)], 32)
    decomp = unit_decomposition((1,))
    # single subset: residual is |b| * |2xh + h^2| at the worst valid sample
    xs = (np.arange(32) + 0.5) / 32
    xs = xs[xs + h <= 1.0 + 1e-12]
    expected = abs(float(decomp.b[(0,)])) * np.abs(2 * xs * h + h * h).max()
    assert res == pytest.approx(expected, rel=1e-9)


def test_reproduction_identity_gap_two_dim():
    f = lambda X: np.exp(X[..., 0]) * np.cos(X[..., 1])
    gap = reproduction_identity_gap(f, (2, 2), Box.unit(2), [(0.05, 0.04)], 8)
    assert gap <= 1e-9


def test_reproduction_all_points_skipped_raises():
    f = lambda X: X[..., 0]
    with pytest.raises(ValueError):
        reproduction_residual(f, (1,), Box.unit(1), [(5.0,)], 4)


def test_annihilation_examples_and_property():
    box = Box.unit(2)
    const = TensorPolynomial(np.array([[2.5]]))
    for e in nonempty_axis_subsets(2):
        assert annihilation_residual(const, e, (0.1, 0.1), box, 8) <= 1e-12
    # x*y as a member of the (2,2) space: order (2,0) annihilates it
    xy = TensorPolynomial(np.array([[0.0, 0.0], [0.0, 1.0]]))
    assert annihilation_residual(xy, (0,), (0.2, 0.1), box, 8) <= 1e-10

    rng = np.random.default_rng(77)
    for _ in range(50):
        phi = TensorPolynomial.random((3, 2), rng)
        scale = float(np.abs(phi(grid_points(box, 8))).max()) + 1.0
        for e in nonempty_axis_subsets(2):
            for h0 in (-0.15, 0.08, 0.2):
                resid = annihilation_residual(phi, e, (h0, h0 / 2), box, 8)
                assert resid <= 1e-9 * scale


def test_decomposition_operator_identity_consistency():
    # f(x) - sum a_k f(x+kh) equals sum b_e Delta^{r(e)} f(x) at every sample
    rng = np.random.default_rng(5)
    box = Box.unit(2)
    r = (2, 3)
    decomp = unit_decomposition(r)
    f = lambda X: np.sin(X[..., 0] * 2.0) * np.exp(0.5 * X[..., 1])
    pts = grid_points(box, 5).reshape(-1, 2)
    pts = pts[box.contains(pts + np.array(r) * np.array([0.05, 0.03]))]
    h = np.array([0.05, 0.03])
    lhs = f(pts).copy()
    for k, c in decomp.a.items():
        lhs -= float(c) * f(pts + np.array(k) * h)
    rhs = np.zeros(pts.shape[0])
    for e, c in decomp.b.items():
        rhs += float(c) * mixed_difference(f, restrict_order(r, e), h, pts)
    assert np.abs(lhs - rhs).max() <= 1e-9 * max(1.0, np.abs(f(pts)).max())


def test_halving_identity_small_orders():
    p1 = halving_identity(1)
    assert p1 == RationalMultiPoly(1, {(0,): Fraction(-1, 2)})
    p2 = halving_identity(2)
    assert p2 == RationalMultiPoly(1, {(0,): Fraction(-3, 4), (1,): Fraction(-1, 4)})
    for k in range(1, 7):
        poly = halving_identity(k)
        assert poly.degrees()[0] == k - 1


def test_halving_identity_exact_through_ten():
    for k in range(1, 11):
        halving_identity(k)  # raises on any inexactness


def test_univariate_divmod_remainder():
    x = RationalMultiPoly.variable(0, 1)
    num = x**3 - 1
    quo, rem = univariate_divmod(num, x - 1)
    assert rem.is_zero
    assert quo == poly_from_terms(1, {(2,): 1, (1,): 1, (0,): 1})
    quo, rem = univariate_divmod(x**2, x - 1)
    assert rem == poly_from_terms(1, {(0,): 1})
