"""Exact rational identities behind the difference calculus.

Everything here runs in exact rational arithmetic.  The unit
decomposition writes 1 as a combination of monomials x^k and the
difference polynomials P_e(x) = prod_{i in e} (x_i - 1)^{r_i}; under
the shift correspondence that becomes a reproduction formula for any
function whose mixed differences vanish.  The halving identity is the
exact step-doubling device used to trade a difference of order k for
one of order k + 1.
"""

import numpy as np

from mixsmooth import (
    Box,
    halving_identity,
    reproduction_identity_gap,
    reproduction_residual,
    unit_decomposition,
)


def show_decomposition(r):
    d = unit_decomposition(r)
    a_terms = " + ".join(f"{c}*x^{list(k)}" for k, c in sorted(d.a.items()))
    b_terms = " + ".join(f"{c}*P_{list(e)}" for e, c in sorted(d.b.items()))
    print(f"r = {r}:  1 = {a_terms}  +  {b_terms}")


print("unit decompositions (verified exactly at construction):")
for r in [(1,), (2,), (3,), (1, 1), (2, 2), (1, 1, 1)]:
    show_decomposition(r)

# The a-coefficients turn into a reproduction formula: for r = (2,),
# 1 = 2x - x^2 + (x-1)^2 says f(x) = 2 f(x+h) - f(x+2h) whenever the
# order-2 difference of f vanishes, e.g. for affine f.
box = Box.unit(1)
affine = lambda X: 3.0 * X[..., 0] - 0.7
resid = reproduction_residual(affine, (2,), box, [(0.05,), (0.11,)], 32)
print("\nreproduction residual for an affine function at r = (2,):", resid)

# For functions outside the space the residual does not vanish, but it
# always equals the difference-operator side pointwise.
f = lambda X: np.exp(X[..., 0]) * np.cos(3.0 * X[..., 0])
gap = reproduction_identity_gap(f, (2,), box, [(0.07,)], 64)
print("pointwise identity gap for a non-member:", gap)

# Halving identities: (x-1)^k = 2^-k (x^2-1)^k + P(x) (x-1)^(k+1)
# with an exact polynomial witness P of degree k - 1.
print("\nhalving identity witnesses:")
for k in range(1, 7):
    poly = halving_identity(k)
    terms = " + ".join(f"({c})*x^{e[0]}" for e, c in poly.items())
    print(f"  k = {k}: P(x) = {terms}")
