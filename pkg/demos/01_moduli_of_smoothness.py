"""Mixed differences and the four moduli of smoothness, by example.

Walks through the geometric substrate (boxes, midpoint grids, shrunken
domains) and the difference operators built on it, then computes the
sup-type and mean-type moduli for a few functions and shows the
qualitative behaviour you should expect: annihilation on polynomial
space members, monotone growth in the step bound, and mean <= sup.
"""

import math

import numpy as np

from mixsmooth import (
    Box,
    ModulusRequest,
    TensorPolynomial,
    difference_field,
    mixed_difference,
    modulus_mean,
    modulus_sup,
    nonempty_axis_subsets,
    shrink_domain,
    total_modulus_mean,
    total_modulus_sup,
)

box = Box.unit(2)
print("working box:", box.lower, "to", box.upper, "size", box.size)

# Shifting by y shrinks the admissible domain on both ends of each axis.
for y in [(0.25, 0.0), (0.25, -0.5), (1.5, 0.0)]:
    sub = shrink_domain(box, y)
    print(f"  shrink by {y}: {None if sub is None else (sub.lower, sub.upper)}")

# A mixed difference of order (1, 1) applied to x*y is exactly h1*h2,
# independent of the evaluation point.
f_xy = lambda X: X[..., 0] * X[..., 1]
for h in [(0.1, 0.2), (0.3, -0.05)]:
    val = mixed_difference(f_xy, (1, 1), h, np.array([0.3, 0.4]))
    print(f"difference of x*y, order (1,1), step {h}: {val:.6f}  (h1*h2 = {h[0]*h[1]:.6f})")

# Members of the tensor polynomial space are annihilated: here degree
# bounds (2, 2) mean degree <= 1 per axis, and the order-(2,2) mixed
# difference of any such polynomial vanishes identically.
rng = np.random.default_rng(0)
phi = TensorPolynomial.random((2, 2), rng)
field = difference_field(phi, (2, 2), (0.1, 0.15), box, 32)
print("max |difference| over the grid for a space member:", np.abs(field.values).max())

# The sup modulus sweeps a symmetric grid of steps and maximizes the
# quasi-norm of the difference field over the shrunken domain.
f = lambda X: np.sin(2 * np.pi * X[..., 0]) * np.sin(2 * np.pi * X[..., 1])
print("\nsup modulus of sin(2 pi x) sin(2 pi y), order (1,1), p = 2:")
for t in (0.0625, 0.125, 0.25, 0.5):
    req = ModulusRequest(r=(1, 1), t=(t, t), p=2.0, box=box, h_samples=9, density=32)
    print(f"  t = {t:7.4f}: omega = {modulus_sup(req, f):.6f}")
print("(nondecreasing in t, as a supremum over a growing step box)")

# The total modulus sums one term per nonempty axis subset; each term
# zeroes the order off its subset.
print("\nper-subset structure in d = 2:", nonempty_axis_subsets(2))
for p in (0.5, 1.0, 2.0, math.inf):
    omega = total_modulus_sup(f, (1, 1), (0.25, 0.25), p, box, density=32, h_samples=9)
    w = total_modulus_mean(f, (1, 1), (0.25, 0.25), p, box, density=32, h_samples=9)
    print(f"  p = {p}: total sup = {omega:.6f}, total mean = {w:.6f}, mean <= sup: {w <= omega * 1.001}")

# Mean modulus: the same double integral, averaged over steps instead
# of maximized; for p = inf it coincides with the sup form by definition.
req = ModulusRequest(r=(1, 1), t=(0.25, 0.25), p=math.inf, box=box, h_samples=9, density=32)
print("\np = inf mean delegates to sup:", modulus_mean(req, f) == modulus_sup(req, f))
