"""Tensor polynomial spaces and best L_p approximation on grids.

A :class:`TensorPolynomial` has per-axis degree strictly below r_i; the
space of all such polynomials is the approximation target everywhere in
this package.  :func:`best_approx` minimizes the discrete L_p
quasi-norm of the residual on a midpoint grid with a solver ladder
matched to the convexity of each exponent regime:

* p = 2        exact orthogonal projection in a per-axis
                orthonormalized basis (thin QR per axis, no normal
                equations);
* 1 <= p < inf  iteratively reweighted least squares started from the
                p = 2 solution;
* p = inf       Lawson's algorithm, a sequence of weighted least-squares
                problems driving the maximum residual down, with the
                weighted error as an optimality certificate;
* 0 < p < 1     multi-start majorize-minimize descent on the smoothed
                objective sum (res^2 + eps^2)^(p/2) with a decreasing
                eps schedule; the returned value is an upper bound on
                the discrete optimum and the spread of local minima is
                reported.

Also here: anisotropic Taylor polynomials from a derivative bundle, the
matching mixed-derivative remainder bracket, and the best-constant /
piecewise-constant approximants used to reduce low-order smoothness to
approximation by constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from numpy.polynomial import legendre as npleg
from numpy.polynomial import polynomial as nppoly

from .domain import (
    Box,
    GridFunction,
    lp_quasinorm,
    nonempty_axis_subsets,
    normalize_grid,
    restrict_order,
    sample_on_grid,
)

__all__ = [
    "TensorPolynomial",
    "DerivativeBundle",
    "PiecewiseConstant",
    "BestApproxResult",
    "eval_poly",
    "best_approx",
    "taylor_polynomial",
    "taylor_remainder_bound",
    "best_constant",
    "piecewise_constant_approx",
]


@dataclass(frozen=True)
class TensorPolynomial:
    """Polynomial with per-axis degree < r_i, in the global monomial basis.

    ``coeffs[s]`` multiplies ``prod_i x_i^{s_i}``; the coefficient
    tensor shape is exactly the degree-bound vector r.  Evaluation is
    Horner's scheme folded one axis at a time.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, float)
        if c.ndim < 1:
            c = c.reshape(1)
        if not np.all(np.isfinite(c)):
            raise ValueError("polynomial coefficients must be finite")
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def dim(self) -> int:
        return self.coeffs.ndim

    @property
    def degrees(self) -> tuple[int, ...]:
        """Degree bounds (exclusive): shape of the coefficient tensor."""
        return self.coeffs.shape

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, float)
        single = x.ndim == 1
        pts = x[None, :] if single else x
        flat = pts.reshape(-1, self.dim)
        res = nppoly.polyval(flat[:, 0], self.coeffs, tensor=True)
        for i in range(1, self.dim):
            res = nppoly.polyval(flat[:, i], res, tensor=False)
        res = res.reshape(pts.shape[:-1])
        return float(res[0]) if single else res

    def derivative(self, order: Sequence[int]) -> "TensorPolynomial":
        """Exact mixed derivative; orders past the degree give the zero polynomial."""
        c = np.asarray(self.coeffs, float)
        for axis, m in enumerate(order):
            m = int(m)
            if m == 0:
                continue
            n = c.shape[axis]
            if m >= n:
                shape = list(c.shape)
                shape[axis] = 1
                c = np.zeros(shape)
                continue
            # factors[k] = (k+m)! / k! for the shifted coefficient c[k+m]
            factors = np.ones(n - m)
            for k in range(n - m):
                acc = 1.0
                for t in range(1, m + 1):
                    acc *= k + t
                factors[k] = acc
            sl = [slice(None)] * c.ndim
            sl[axis] = slice(m, None)
            c = c[tuple(sl)] * factors.reshape(
                [-1 if ax == axis else 1 for ax in range(c.ndim)]
            )
        return TensorPolynomial(c)

    @classmethod
    def zero(cls, degrees: Sequence[int]) -> "TensorPolynomial":
        return cls(np.zeros(tuple(int(d) for d in degrees)))

    @classmethod
    def random(cls, degrees: Sequence[int], rng: np.random.Generator, scale: float = 1.0):
        shape = tuple(int(d) for d in degrees)
        return cls(rng.standard_normal(shape) * scale)


def eval_poly(phi: TensorPolynomial, x) -> np.ndarray:
    """Evaluate a tensor polynomial at one point or a batch of points."""
    return phi(x)


# ---------------------------------------------------------------------------
# Per-axis orthonormal bases and the p = 2 projection


def _axis_basis(a: float, b: float, n: int, r: int):
    """Discrete-orthonormal polynomial basis on the n midpoint nodes of [a, b].

    Returns (B, M): B is (n, r) with B[k, j] the value of basis function
    j at node k, orthonormal for the midpoint-quadrature inner product;
    M is (r, r) with column j holding the global monomial coefficients
    of basis function j.  Built from a Legendre Vandermonde in scaled
    coordinates plus a thin QR, which keeps the conditioning flat in
    the box geometry.
    """
    cw = (b - a) / n
    nodes = a + (np.arange(n) + 0.5) * cw
    u = (2.0 * nodes - (a + b)) / (b - a)
    V = npleg.legvander(u, r - 1)
    q, rmat = np.linalg.qr(V * math.sqrt(cw))
    # fix the QR sign ambiguity so bases are reproducible
    signs = np.sign(np.diag(rmat))
    signs[signs == 0] = 1.0
    q = q * signs
    rmat = rmat * signs[:, None]
    B = q / math.sqrt(cw)
    rinv = np.linalg.inv(rmat)
    # Legendre-in-u -> monomial-in-u
    leg2mono = np.zeros((r, r))
    for m in range(r):
        unit = np.zeros(m + 1)
        unit[m] = 1.0
        leg2mono[: m + 1, m] = npleg.leg2poly(unit)
    # u = alpha*x + beta -> monomial-in-x
    alpha = 2.0 / (b - a)
    beta = -(a + b) / (b - a)
    lin = np.zeros((r, r))
    for m in range(r):
        for j in range(m + 1):
            lin[j, m] = math.comb(m, j) * alpha**j * beta ** (m - j)
    M = lin @ leg2mono @ rinv
    return B, M


def _fold(tensor: np.ndarray, mats: Sequence[np.ndarray]) -> np.ndarray:
    """Apply ``out[m] = sum_s M[m, s] T[s]`` along every axis in order.

    Each contracted axis is appended at the end, so after all d folds
    the axis order is restored.
    """
    out = tensor
    for m in mats:
        out = np.tensordot(out, m, axes=([0], [1]))
    return out


def _contract_rows(tensor: np.ndarray, mats: Sequence[np.ndarray]) -> np.ndarray:
    """``out[s] = sum_k T[k] M[k, s]`` applied along every axis in order."""
    out = tensor
    for m in mats:
        out = np.tensordot(out, m, axes=([0], [0]))
    return out


def _design_matrix(bases: Sequence[np.ndarray]) -> np.ndarray:
    """Flattened tensor design matrix, rows in C (row-major) cell order."""
    M = bases[0]
    for B in bases[1:]:
        M = (M[:, None, :, None] * B[None, :, None, :]).reshape(
            M.shape[0] * B.shape[0], M.shape[1] * B.shape[1]
        )
    return M


def _objective(res_flat: np.ndarray, cell_volume: float, p: float) -> float:
    if p == math.inf:
        return float(np.abs(res_flat).max()) if res_flat.size else 0.0
    return float((np.abs(res_flat) ** p).sum() * cell_volume)


@dataclass
class BestApproxResult:
    """Best-approximation output: polynomial, achieved error, diagnostics."""

    polynomial: TensorPolynomial
    error: float
    converged: bool
    diagnostics: dict = field(default_factory=dict)


def _weighted_lstsq(design: np.ndarray, target: np.ndarray, weights: np.ndarray):
    sw = np.sqrt(weights)
    sol, *_ = np.linalg.lstsq(design * sw[:, None], target * sw, rcond=None)
    return sol


def best_approx(
    g: GridFunction,
    r: Sequence[int],
    p: float,
    *,
    seed: int = 0,
    n_starts: int = 8,
    max_iter: int = 500,
) -> BestApproxResult:
    """Best tensor-polynomial approximation of grid samples in L_p.

    Requires at least ``2 r_i`` grid points per axis.  The achieved
    error is the discrete quasi-norm of the residual; for the nonconvex
    regime 0 < p < 1 it is an upper bound on the discrete optimum.
    Non-convergence within the iteration budget is flagged in the
    result, not raised.
    """
    r = tuple(int(v) for v in r)
    if len(r) != g.box.dim:
        raise ValueError("degree vector must match the box dimension")
    if any(v < 1 for v in r):
        raise ValueError("degree bounds must satisfy r_i >= 1")
    if not p > 0:
        raise ValueError("exponent p must be positive")
    for n, ri in zip(g.spec, r):
        if n < 2 * ri:
            raise ValueError(
                f"grid with {n} points per axis is underdetermined for degree bound {ri}"
            )
    p = float(p)
    dim = g.box.dim
    bases = []
    monos = []
    for i in range(dim):
        B, M = _axis_basis(g.box.lower[i], g.box.upper[i], g.spec[i], r[i])
        bases.append(B)
        monos.append(M)
    cv = g.cell_volume
    values = g.values
    cws = g.cell_widths

    # exact discrete projection: contraction with each axis basis, weighted
    weighted = [B * cw for B, cw in zip(bases, cws)]
    c2 = _contract_rows(values, weighted)
    recon2 = _fold(c2, bases)
    scale = float(np.abs(values).max(initial=0.0))

    def finish(c, err, converged, diag):
        mono = _fold(c, monos)
        return BestApproxResult(TensorPolynomial(mono), float(err), converged, diag)

    if p == 2.0:
        res = values - recon2
        err = math.sqrt(_objective(res.reshape(-1), cv, 2.0))
        return finish(c2, err, True, {"method": "projection", "iterations": 0})

    design = _design_matrix(bases)
    target = values.reshape(-1)
    c_flat = c2.reshape(-1)

    if p == math.inf:
        c, err, iters, conv = _lawson(design, target, c_flat, max_iter)
        return finish(
            c.reshape(c2.shape),
            err,
            conv,
            {"method": "lawson", "iterations": iters},
        )

    if p >= 1.0:
        eps = 1e-10 * max(scale, 1e-30)
        c, obj, iters, conv = _irls(design, target, c_flat, p, cv, eps, max_iter)
        return finish(
            c.reshape(c2.shape),
            obj ** (1.0 / p),
            conv,
            {"method": "irls", "iterations": iters},
        )

    # 0 < p < 1: multi-start smoothed descent
    rng = np.random.default_rng(seed)
    res2 = target - design @ c_flat
    err2 = math.sqrt(float((res2**2).sum() * cv))
    amp = 0.5 * (err2 + 1e-3 * max(scale, 1e-30))
    starts = [c_flat]
    for _ in range(n_starts):
        starts.append(c_flat + rng.standard_normal(c_flat.shape) * amp)
    best_c = None
    best_obj = math.inf
    per_start = []
    total_iters = 0
    eps_ladder = [10.0**-k for k in range(2, 9)]
    eps_scale = max(scale, 1e-30)
    for c0 in starts:
        c = c0.copy()
        for eps_rel in eps_ladder:
            c, iters = _smoothed_descent(
                design, target, c, p, eps_rel * eps_scale, cv, max_stage_iter=100
            )
            total_iters += iters
        obj = _objective(target - design @ c, cv, p)
        per_start.append(obj ** (1.0 / p))
        if obj < best_obj:
            best_obj = obj
            best_c = c
    spread = max(per_start) - min(per_start)
    return finish(
        best_c.reshape(c2.shape),
        best_obj ** (1.0 / p),
        True,
        {
            "method": "smoothed-multistart",
            "iterations": total_iters,
            "starts": len(starts),
            "start_errors": per_start,
            "start_spread": spread,
        },
    )


def _irls(design, target, c0, p, cv, eps, max_iter):
    """Reweighted least squares for 1 <= p < inf, with descent safeguard."""
    c = c0.copy()
    res = target - design @ c
    obj = float((np.abs(res) ** p).sum() * cv)
    floor = 1e-30
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        w = np.maximum(np.abs(res), eps) ** (p - 2.0)
        c_new = _weighted_lstsq(design, target, w)
        # damp toward the previous iterate if the true objective got worse
        step = 1.0
        for _ in range(30):
            cand = c + step * (c_new - c)
            res_new = target - design @ cand
            obj_new = float((np.abs(res_new) ** p).sum() * cv)
            if obj_new <= obj or step < 1e-6:
                break
            step *= 0.5
        if obj_new > obj:
            converged = True
            break
        moved = abs(obj - obj_new)
        c, res, obj = cand, res_new, obj_new
        if moved <= 1e-10 * max(obj, floor):
            converged = True
            break
    return c, obj, it, converged


def _lawson(design, target, c0, max_iter):
    """Lawson iteration for discrete minimax; weighted error certifies optimality."""
    n = target.size
    w = np.full(n, 1.0 / n)
    best_c = c0.copy()
    best_max = float(np.abs(target - design @ best_c).max())
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        c = _weighted_lstsq(design, target, w)
        res = target - design @ c
        max_res = float(np.abs(res).max())
        if max_res < best_max:
            best_max = max_res
            best_c = c
        weighted_err = math.sqrt(float((w * res**2).sum()))
        # weighted RMS error lower-bounds the minimax value
        if best_max <= weighted_err * (1.0 + 1e-9) + 1e-300:
            converged = True
            break
        w = w * np.maximum(np.abs(res), 1e-300)
        total = w.sum()
        if not np.isfinite(total) or total <= 0:
            break
        w = w / total
    return best_c, best_max, it, converged


def _smoothed_descent(design, target, c0, p, eps, cv, max_stage_iter):
    """Majorize-minimize on sum (res^2 + eps^2)^(p/2); monotone for p < 2."""
    c = c0.copy()
    res = target - design @ c
    obj = float(((res**2 + eps**2) ** (p / 2.0)).sum() * cv)
    it = 0
    for it in range(1, max_stage_iter + 1):
        w = (res**2 + eps**2) ** (p / 2.0 - 1.0)
        c = _weighted_lstsq(design, target, w)
        res = target - design @ c
        new_obj = float(((res**2 + eps**2) ** (p / 2.0)).sum() * cv)
        if abs(obj - new_obj) <= 1e-10 * max(new_obj, 1e-30):
            obj = new_obj
            break
        obj = new_obj
    return c, it


# ---------------------------------------------------------------------------
# Taylor polynomials from derivative data


@dataclass(frozen=True)
class DerivativeBundle:
    """Derivative data of a function around a base point.

    ``point_derivs`` holds the mixed derivative values at ``x0`` for
    every multi-order s strictly below the working order (all
    componentwise); ``mixed_derivs`` holds callables for the full-order
    derivative on each nonempty axis subset, keyed by the sorted subset
    tuple.
    """

    x0: tuple[float, ...]
    point_derivs: Mapping[tuple[int, ...], float]
    mixed_derivs: Mapping[tuple[int, ...], Callable]

    @classmethod
    def from_factory(
        cls,
        factory: Callable[[tuple[int, ...]], Callable],
        x0: Sequence[float],
        r: Sequence[int],
    ) -> "DerivativeBundle":
        """Build a bundle from a factory mapping a multi-order to a callable."""
        x0 = tuple(float(v) for v in x0)
        r = tuple(int(v) for v in r)
        pt = np.asarray(x0)[None, :]
        point = {}
        for s in np.ndindex(r):
            point[tuple(int(v) for v in s)] = float(np.asarray(factory(tuple(s))(pt))[0])
        mixed = {}
        for e in nonempty_axis_subsets(len(r)):
            mixed[e] = factory(restrict_order(r, e))
        return cls(x0=x0, point_derivs=dict(point), mixed_derivs=dict(mixed))

    @classmethod
    def from_polynomial(
        cls, phi: TensorPolynomial, x0: Sequence[float], r: Sequence[int]
    ) -> "DerivativeBundle":
        return cls.from_factory(lambda s: phi.derivative(s), x0, r)


def taylor_polynomial(bundle: DerivativeBundle, k: Sequence[int]) -> TensorPolynomial:
    """Taylor polynomial of multi-order k around the bundle's base point.

    Sums ``f^(s)(x0) * prod (x_i - x0_i)^{s_i} / s_i!`` over all s
    strictly below k componentwise; missing derivative entries raise.
    """
    k = tuple(int(v) for v in k)
    if any(v < 1 for v in k):
        raise ValueError("taylor order must be >= 1 on every axis")
    d = len(k)
    shifted = np.zeros(k)
    for s in np.ndindex(k):
        key = tuple(int(v) for v in s)
        if key not in bundle.point_derivs:
            raise KeyError(f"derivative bundle is missing order {key}")
        denom = 1.0
        for v in key:
            denom *= math.factorial(v)
        shifted[s] = bundle.point_derivs[key] / denom
    # expand (x - x0)^s into global monomials, one axis at a time
    mats = []
    for i in range(d):
        n = k[i]
        L = np.zeros((n, n))
        for s in range(n):
            for j in range(s + 1):
                L[j, s] = math.comb(s, j) * (-bundle.x0[i]) ** (s - j)
        mats.append(L)
    mono = _fold(shifted, mats)
    return TensorPolynomial(mono)


def taylor_remainder_bound(
    bundle: DerivativeBundle,
    r: Sequence[int],
    p: float,
    box: Box,
    density=32,
) -> float:
    """Mixed-derivative bracket bounding the Taylor remainder up to a constant.

    Returns ``sum over nonempty subsets e of prod_{i in e} size_i^{r_i}
    times the L_p quasi-norm of the order-r(e) derivative on the box``.
    The multiplying constant is not included; it is estimated
    empirically by the verifier.  Stated for p >= 1 only.
    """
    if not p >= 1:
        raise ValueError("the remainder bracket is stated for p >= 1")
    r = tuple(int(v) for v in r)
    size = box.size
    total = 0.0
    for e in nonempty_axis_subsets(box.dim):
        if e not in bundle.mixed_derivs:
            raise KeyError(f"derivative bundle is missing the subset {e}")
        weight = 1.0
        for i in e:
            weight *= size[i] ** r[i]
        deriv = sample_on_grid(bundle.mixed_derivs[e], box, density)
        total += weight * lp_quasinorm(deriv, p)
    return total


# ---------------------------------------------------------------------------
# Approximation by constants


def best_constant(g: GridFunction, p: float) -> tuple[float, float]:
    """Best constant in the L_p sense by scanning the sample values.

    Scans grid points y, computes ``integral of |f - f(y)|^p`` by
    quadrature, and returns the value at the minimizing point together
    with the achieved quasi-norm error.  For ties the first minimizer
    in row-major order wins, so results are reproducible.
    """
    if not p > 0:
        raise ValueError("exponent p must be positive")
    v = g.values.reshape(-1)
    cv = g.cell_volume
    n = v.size
    scores = np.empty(n)
    chunk = max(1, int(2**22 // max(n, 1)))
    for start in range(0, n, chunk):
        block = v[start : start + chunk]
        diffs = np.abs(v[None, :] - block[:, None])
        if p == math.inf:
            scores[start : start + chunk] = diffs.max(axis=1)
        else:
            scores[start : start + chunk] = (diffs**p).sum(axis=1) * cv
    beta = float(v[int(np.argmin(scores))])
    residual = GridFunction(g.box, g.values - beta)
    return beta, lp_quasinorm(residual, p)


@dataclass(frozen=True)
class PiecewiseConstant:
    """One constant per cell of a congruent subdivision of a box."""

    box: Box
    splits: tuple[int, ...]
    betas: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.betas, float)
        if b.shape != tuple(self.splits):
            raise ValueError("betas shape must equal the per-axis split counts")
        b = b.copy()
        b.flags.writeable = False
        object.__setattr__(self, "betas", b)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, float)
        single = x.ndim == 1
        pts = x[None, :] if single else x
        lo = np.asarray(self.box.lower)
        widths = self.box.size / np.asarray(self.splits)
        idx = np.floor((pts - lo) / widths).astype(int)
        idx = np.clip(idx, 0, np.asarray(self.splits) - 1)
        vals = self.betas[tuple(idx[..., i] for i in range(self.box.dim))]
        return float(vals[0]) if single else vals


def piecewise_constant_approx(
    g: GridFunction, splits, p: float
) -> tuple[PiecewiseConstant, float]:
    """Best-constant fit on each cell of a congruent subdivision.

    ``splits`` (an int or per-axis counts) must divide the grid so that
    every cell owns a whole sub-grid; the total error is the exact
    p-th-power sum of the per-cell errors (max for p = inf).
    """
    splits = normalize_grid(splits, g.box.dim)
    for n, m in zip(g.spec, splits):
        if n % m != 0:
            raise ValueError(f"split {m} does not divide the grid axis of {n} points")
    sub = tuple(n // m for n, m in zip(g.spec, splits))
    lo = np.asarray(g.box.lower)
    widths = g.box.size / np.asarray(splits)
    betas = np.zeros(splits)
    errors = np.zeros(splits)
    for idx in np.ndindex(splits):
        slices = tuple(
            slice(i * s, (i + 1) * s) for i, s in zip(idx, sub)
        )
        cell_lo = lo + np.asarray(idx) * widths
        cell_box = Box(tuple(cell_lo), tuple(cell_lo + widths))
        cell = GridFunction(cell_box, g.values[slices])
        beta, err = best_constant(cell, p)
        betas[idx] = beta
        errors[idx] = err
    if p == math.inf:
        total = float(errors.max())
    else:
        total = float((errors**p).sum()) ** (1.0 / p)
    return PiecewiseConstant(g.box, splits, betas), total
