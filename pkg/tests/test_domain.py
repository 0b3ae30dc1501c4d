import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixsmooth.domain import (
    Box,
    GridFunction,
    box_size,
    grid_points,
    lp_quasinorm,
    nonempty_axis_subsets,
    restrict_order,
    sample_on_grid,
    shrink_domain,
)


def test_box_size_examples():
    assert np.allclose(box_size(Box.unit(2)), [1.0, 1.0])
    assert np.allclose(box_size(Box((0.0, 0.0), (1.0, 0.5))), [1.0, 0.5])
    assert np.allclose(box_size(Box((-1.0,), (1.0,))), [2.0])


def test_box_validation():
    with pytest.raises(ValueError):
        Box((0.0,), (0.0,))
    with pytest.raises(ValueError):
        Box((0.0, 1.0), (1.0,))
    with pytest.raises(ValueError):
        Box((0.0,), (math.inf,))


def test_shrink_examples():
    assert shrink_domain(Box.unit(1), (0.3,)) == Box((0.0,), (0.7,))
    assert shrink_domain(Box.unit(1), (-0.3,)) == Box((0.3,), (1.0,))
    assert shrink_domain(Box.unit(1), (1.5,)) is None
    # exactly the side length degenerates to measure zero -> empty
    assert shrink_domain(Box.unit(1), (1.0,)) is None


def test_shrink_zero_is_identity_and_monotone():
    q = Box((0.0, -1.0), (2.0, 1.0))
    assert shrink_domain(q, (0.0, 0.0)) == q
    small = shrink_domain(q, (0.5, -0.2))
    big = shrink_domain(q, (1.0, -0.4))
    assert big is not None and small is not None
    assert all(bl >= sl for bl, sl in zip(big.lower, small.lower))
    assert all(bu <= su for bu, su in zip(big.upper, small.upper))


def test_quasinorm_constant_all_p():
    g = sample_on_grid(lambda X: np.ones(X.shape[:-1]), Box.unit(2), 8)
    for p in (0.5, 1.0, 2.0, math.inf):
        assert lp_quasinorm(g, p) == pytest.approx(1.0, abs=1e-14)


def test_quasinorm_linear_oracle_p2():
    # closed form: integral of x^2 over [0,1] is 1/3
    g = sample_on_grid(lambda X: X[..., 0], Box.unit(1), 256)
    assert lp_quasinorm(g, 2.0) == pytest.approx(1.0 / math.sqrt(3.0), abs=2e-5)


def test_quasinorm_linear_oracle_p_half():
    # closed form: integral of sqrt(x) over [0,1] is 2/3, norm is (2/3)^2
    g = sample_on_grid(lambda X: X[..., 0], Box.unit(1), 1024)
    assert lp_quasinorm(g, 0.5) == pytest.approx(4.0 / 9.0, abs=2e-4)


def test_quasinorm_rejects_bad_p_and_empty_is_zero():
    g = sample_on_grid(lambda X: X[..., 0], Box.unit(1), 4)
    with pytest.raises(ValueError):
        lp_quasinorm(g, 0.0)
    with pytest.raises(ValueError):
        lp_quasinorm(g, -1.0)
    assert lp_quasinorm(None, 0.5) == 0.0


def test_quasinorm_power_additive_over_partition():
    rng = np.random.default_rng(5)
    vals = rng.standard_normal(16)
    g = GridFunction(Box.unit(1), vals)
    left = GridFunction(Box((0.0,), (0.5,)), vals[:8])
    right = GridFunction(Box((0.5,), (1.0,)), vals[8:])
    for p in (0.5, 1.0, 2.0):
        whole = lp_quasinorm(g, p) ** p
        parts = lp_quasinorm(left, p) ** p + lp_quasinorm(right, p) ** p
        assert whole == pytest.approx(parts, rel=1e-14)


@settings(max_examples=25, deadline=None)
@given(st.floats(-10, 10, allow_nan=False), st.floats(0.3, 4.0))
def test_quasinorm_homogeneous(c, p):
    rng = np.random.default_rng(11)
    vals = rng.standard_normal((4, 4))
    g = GridFunction(Box.unit(2), vals)
    scaled = GridFunction(Box.unit(2), c * vals)
    assert lp_quasinorm(scaled, p) == pytest.approx(
        abs(c) * lp_quasinorm(g, p), rel=1e-12, abs=1e-12
    )


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_quasinorm_power_subadditive_small_p(seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal(12)
    b = rng.standard_normal(12)
    box = Box.unit(1)
    p = 0.5
    lhs = lp_quasinorm(GridFunction(box, a + b), p) ** p
    rhs = (
        lp_quasinorm(GridFunction(box, a), p) ** p
        + lp_quasinorm(GridFunction(box, b), p) ** p
    )
    assert lhs <= rhs + 1e-12


def test_midpoint_refinement_order():
    # successive-error ratios for a smooth function sit near the
    # second-order value 4; the contract window is [2, 8]
    exact = math.sqrt((math.e**2 - 1.0) / 2.0)
    errors = []
    for n in (16, 32, 64, 128):
        g = sample_on_grid(lambda X: np.exp(X[..., 0]), Box.unit(1), n)
        errors.append(abs(lp_quasinorm(g, 2.0) - exact))
    for a, b in zip(errors, errors[1:]):
        assert 2.0 <= a / b <= 8.0


def test_sample_on_grid_examples():
    g = sample_on_grid(lambda X: np.full(X.shape[:-1], 3.0), Box.unit(2), (2, 3))
    assert np.all(g.values == 3.0)
    g = sample_on_grid(lambda X: X[..., 0], Box.unit(1), 2)
    assert np.allclose(g.values, [0.25, 0.75])
    g = sample_on_grid(lambda X: X[..., 0] + X[..., 1], Box.unit(2), (1, 1))
    assert g.values.shape == (1, 1)
    assert g.values[0, 0] == pytest.approx(1.0)


def test_sample_on_grid_rejects_nonfinite():
    def blows_up(X):
        with np.errstate(divide="ignore"):
            return 1.0 / (X[..., 0] - X[..., 0])

    with pytest.raises(ValueError):
        sample_on_grid(blows_up, Box.unit(1), 4)


def test_grid_points_row_major_shape():
    pts = grid_points(Box.unit(2), (2, 3))
    assert pts.shape == (2, 3, 2)
    assert pts[0, 0, 0] == pytest.approx(0.25)
    assert pts[0, 1, 1] == pytest.approx(0.5)


def test_nonempty_axis_subsets():
    assert nonempty_axis_subsets(1) == [(0,)]
    assert nonempty_axis_subsets(2) == [(0,), (1,), (0, 1)]
    assert len(nonempty_axis_subsets(3)) == 7


def test_restrict_order():
    assert restrict_order((3, 2, 1), (0, 2)) == (3, 0, 1)
    assert restrict_order((3, 2), ()) == (0, 0)
