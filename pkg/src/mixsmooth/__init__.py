"""Mixed moduli of smoothness and anisotropic polynomial approximation in L_p.

The package computes, on axis-aligned boxes and for any exponent
0 < p <= inf:

* mixed finite differences and the sup / p-mean moduli of smoothness
  built from them, per axis subset and in total;
* best approximation by tensor polynomials of fixed per-axis degree,
  with exponent-appropriate solvers (projection, reweighted least
  squares, a minimax weight iteration, and smoothed multi-start descent
  for the nonconvex p < 1 range);
* exact rational-arithmetic identities linking differences and
  polynomials (unit decomposition, reproduction formula, step halving);
* a verifier that measures both sides of every supported inequality on
  a shipped corpus, estimates the constants empirically, and hard-fails
  only where an explicit constant is known.
"""

from .domain import (
    Box,
    GridFunction,
    box_size,
    grid_axes,
    grid_points,
    lp_quasinorm,
    nonempty_axis_subsets,
    normalize_grid,
    restrict_order,
    sample_on_grid,
    shrink_domain,
)
from .differences import (
    ModulusRequest,
    difference_field,
    lower_whitney_constant,
    mixed_difference,
    modulus_mean,
    modulus_sup,
    total_modulus_mean,
    total_modulus_sup,
)
from .identities import (
    RationalMultiPoly,
    UnitDecomposition,
    annihilation_residual,
    expand_Ae,
    expand_Pe,
    halving_identity,
    reproduction_identity_gap,
    reproduction_residual,
    unit_decomposition,
)
from .polyapprox import (
    BestApproxResult,
    DerivativeBundle,
    PiecewiseConstant,
    TensorPolynomial,
    best_approx,
    best_constant,
    eval_poly,
    piecewise_constant_approx,
    taylor_polynomial,
    taylor_remainder_bound,
)
from .corpus import CorpusFunction, corpus_entries, corpus_names, get_function
from .verifier import (
    InequalityReport,
    TolerancePolicy,
    VerifierSettings,
    constant_bound_report,
    equivalence_report,
    estimate_constants,
    marchaud_report,
    run_suite,
    suite_identities,
    superadditivity_report,
    taylor_report,
    whitney_report,
)

__version__ = "0.1.0"
