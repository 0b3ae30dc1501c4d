"""Mixed difference operators and moduli of smoothness.

Implements the tensor-product finite difference of multi-order r with
step vector h, and four moduli built on it:

* ``modulus_sup``   -- sup over steps |h_i| <= t_i of the L_p quasi-norm
  of the difference field over the shrunken domain (omega).
* ``modulus_mean``  -- the p-mean counterpart, averaging |difference|^p
  over the step box instead of taking a supremum (w).
* ``total_modulus_sup`` / ``total_modulus_mean`` -- sums of the above
  over every nonempty axis subset, with the order zeroed off the
  subset (Omega and W).

The supremum over steps is approximated by a finite symmetric grid and
is therefore a *lower* estimate of the true supremum; callers that put
a modulus on the right-hand side of an inequality should inflate it by
the measured refinement gap (see the verifier's tolerance policy).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .domain import (
    Box,
    GridFunction,
    _quasinorm_from_abs,
    grid_points,
    lp_quasinorm,
    nonempty_axis_subsets,
    normalize_grid,
    restrict_order,
    shrink_domain,
)

__all__ = [
    "ModulusRequest",
    "mixed_difference",
    "difference_field",
    "modulus_sup",
    "modulus_mean",
    "total_modulus_sup",
    "total_modulus_mean",
    "sup_modulus_sweep",
    "mean_modulus_sweep",
    "total_sup_terms",
    "total_mean_terms",
    "lower_whitney_constant",
]


def _stencil(r: Sequence[int]) -> list[tuple[float, tuple[int, ...]]]:
    """Weights and offsets of the tensor-product difference of order r.

    The univariate order-m stencil is ``(-1)^(m-j) C(m,j)`` at offset j;
    the mixed stencil is the outer product over axes.  Order 0 on an
    axis leaves that axis untouched (identity).
    """
    per_axis = [
        [((-1.0) ** (ri - j)) * math.comb(ri, j) for j in range(ri + 1)] for ri in r
    ]
    out = []
    for combo in itertools.product(*(range(ri + 1) for ri in r)):
        w = 1.0
        for i, j in enumerate(combo):
            w *= per_axis[i][j]
        out.append((w, combo))
    return out


def mixed_difference(f: Callable, r: Sequence[int], h: Sequence[float], x) -> np.ndarray:
    """Mixed difference of order ``r`` with step ``h`` evaluated at ``x``.

    ``x`` may be a single point of shape ``(d,)`` or a batch
    ``(..., d)``; all shifted points ``x + j*h`` must lie in the domain
    of ``f``.  Order zero on every axis reduces to ``f(x)``.
    """
    r = tuple(int(v) for v in r)
    hv = np.asarray(h, float)
    x = np.asarray(x, float)
    single = x.ndim == 1
    pts = x[None, :] if single else x
    acc = np.zeros(pts.shape[:-1])
    for w, offset in _stencil(r):
        acc = acc + w * np.asarray(f(pts + np.asarray(offset) * hv), float)
    return float(acc[0]) if single else acc


def difference_field(
    f: Callable,
    r: Sequence[int],
    h: Sequence[float],
    box: Box,
    density,
) -> GridFunction | None:
    """Sample the mixed difference on a midpoint grid over the shrunken box.

    The domain is ``box`` shrunk by the total shift ``r*h``; None is
    returned when it is empty.  The fresh grid keeps the per-axis
    resolution density of ``density`` (points proportional to the
    surviving side length, at least one per axis).
    """
    r = tuple(int(v) for v in r)
    hv = np.asarray(h, float)
    density = normalize_grid(density, box.dim)
    sub = shrink_domain(box, np.asarray(r) * hv)
    if sub is None:
        return None
    ratio = sub.size / box.size
    shape = tuple(
        max(1, int(math.ceil(density[i] * ratio[i] - 1e-9))) for i in range(box.dim)
    )
    pts = grid_points(sub, shape)
    vals = np.zeros(shape)
    for w, offset in _stencil(r):
        vals = vals + w * np.asarray(f(pts + np.asarray(offset) * hv), float)
    return GridFunction(sub, vals)


@dataclass(frozen=True)
class ModulusRequest:
    """Parameters of one modulus evaluation.

    ``r`` is the difference multi-order, ``t`` the per-axis step bound,
    ``p`` the quasi-norm exponent, ``h_samples`` the number of step
    samples per active axis, and ``density`` the per-axis value-grid
    resolution on the full box.
    """

    r: tuple[int, ...]
    t: tuple[float, ...]
    p: float
    box: Box
    h_samples: int = 9
    density: tuple[int, ...] | int = 32

    def __post_init__(self):
        r = tuple(int(v) for v in self.r)
        t = tuple(float(v) for v in self.t)
        if len(r) != self.box.dim or len(t) != self.box.dim:
            raise ValueError("r and t must match the box dimension")
        if any(v < 0 for v in r):
            raise ValueError("difference orders must be non-negative")
        if any(v < 0 for v in t):
            raise ValueError("step bounds must be non-negative")
        if self.h_samples < 2:
            raise ValueError("h_samples must be at least 2")
        if not self.p > 0:
            raise ValueError("exponent p must be positive")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "t", t)


def _sup_axis_nodes(ri: int, ti: float, m: int) -> np.ndarray:
    """Step candidates on one axis for the sup modulus.

    Inactive axes (ri == 0) contribute the single step 0.  Active axes
    use a symmetric uniform grid including both endpoints; the exact
    zero step is dropped there because the difference vanishes
    identically.
    """
    if ri == 0:
        return np.zeros(1)
    nodes = np.linspace(-ti, ti, m)
    return nodes[nodes != 0.0]


def sup_modulus_sweep(
    f: Callable,
    r: Sequence[int],
    t: Sequence[float],
    box: Box,
    *,
    density,
    h_samples: int,
    p_values: Iterable[float],
) -> dict[float, float]:
    """Sup-type modulus for several exponents in one sweep over steps.

    Returns a dict mapping each p to the maximum over the step grid of
    the L_p quasi-norm of the difference field.  The difference field
    for a given step does not depend on p, so sharing the sweep is
    exact, not an approximation.
    """
    r = tuple(int(v) for v in r)
    t = tuple(float(v) for v in t)
    ps = [float(p) for p in p_values]
    out = {p: 0.0 for p in ps}
    axis_nodes = [_sup_axis_nodes(ri, ti, h_samples) for ri, ti in zip(r, t)]
    if any(n.size == 0 for n in axis_nodes):
        return out
    for combo in itertools.product(*axis_nodes):
        field = difference_field(f, r, combo, box, density)
        if field is None:
            continue
        a = np.abs(field.values)
        cv = field.cell_volume
        for p in ps:
            v = _quasinorm_from_abs(a, cv, p)
            if v > out[p]:
                out[p] = v
    return out


def mean_modulus_sweep(
    f: Callable,
    r: Sequence[int],
    t: Sequence[float],
    box: Box,
    *,
    density,
    h_samples: int,
    p_values: Iterable[float],
) -> dict[float, float]:
    """p-mean modulus for several finite exponents in one sweep.

    The step integral is a composite midpoint rule with ``h_samples``
    cells per active axis over the symmetric step box, normalized to a
    genuine mean (integral divided by the step-box volume); axes with
    order zero carry no step variable and average out exactly.
    """
    r = tuple(int(v) for v in r)
    t = tuple(float(v) for v in t)
    ps = [float(p) for p in p_values]
    if any(p == math.inf for p in ps):
        raise ValueError("mean modulus is defined for finite p; use the sup form")
    active = [i for i, ri in enumerate(r) if ri > 0]
    for i in active:
        if t[i] <= 0:
            raise ValueError(f"step bound t[{i}] must be positive on an active axis")
    if not active:
        field = difference_field(f, r, np.zeros(len(r)), box, density)
        return {p: lp_quasinorm(field, p) for p in ps}
    nodes = []
    steps = []
    for i in active:
        w = 2.0 * t[i] / h_samples
        nodes.append(-t[i] + (np.arange(h_samples) + 0.5) * w)
        steps.append(w)
    h_weight = float(np.prod(steps))
    volume = float(np.prod([2.0 * t[i] for i in active]))
    acc = {p: 0.0 for p in ps}
    h_full = np.zeros(len(r))
    for combo in itertools.product(*nodes):
        for i, hi in zip(active, combo):
            h_full[i] = hi
        field = difference_field(f, r, h_full, box, density)
        if field is None:
            continue
        a = np.abs(field.values)
        cv = field.cell_volume
        for p in ps:
            acc[p] += float((a**p).sum() * cv) * h_weight
    return {p: (acc[p] / volume) ** (1.0 / p) for p in ps}


def modulus_sup(req: ModulusRequest, f: Callable) -> float:
    """Sup-type mixed modulus of smoothness (lower estimate of the sup)."""
    return sup_modulus_sweep(
        f,
        req.r,
        req.t,
        req.box,
        density=req.density,
        h_samples=req.h_samples,
        p_values=[req.p],
    )[float(req.p)]


def modulus_mean(req: ModulusRequest, f: Callable) -> float:
    """p-mean mixed modulus of smoothness; delegates to sup for p = inf."""
    if req.p == math.inf:
        return modulus_sup(req, f)
    return mean_modulus_sweep(
        f,
        req.r,
        req.t,
        req.box,
        density=req.density,
        h_samples=req.h_samples,
        p_values=[req.p],
    )[float(req.p)]


def _check_total_order(r: Sequence[int], dim: int) -> tuple[int, ...]:
    r = tuple(int(v) for v in r)
    if len(r) != dim:
        raise ValueError("order must match the box dimension")
    if any(v < 1 for v in r):
        raise ValueError("total moduli require every order r_i >= 1")
    return r


def total_sup_terms(
    f: Callable,
    r: Sequence[int],
    t: Sequence[float],
    box: Box,
    *,
    density,
    h_samples: int,
    p_values: Iterable[float],
) -> dict[tuple[int, ...], dict[float, float]]:
    """Per-axis-subset sup moduli, keyed by subset then exponent."""
    r = _check_total_order(r, box.dim)
    return {
        e: sup_modulus_sweep(
            f,
            restrict_order(r, e),
            t,
            box,
            density=density,
            h_samples=h_samples,
            p_values=p_values,
        )
        for e in nonempty_axis_subsets(box.dim)
    }


def total_mean_terms(
    f: Callable,
    r: Sequence[int],
    t: Sequence[float],
    box: Box,
    *,
    density,
    h_samples: int,
    p_values: Iterable[float],
) -> dict[tuple[int, ...], dict[float, float]]:
    """Per-axis-subset p-mean moduli (sup form is used when p = inf)."""
    r = _check_total_order(r, box.dim)
    out: dict[tuple[int, ...], dict[float, float]] = {}
    ps = [float(p) for p in p_values]
    finite = [p for p in ps if p != math.inf]
    for e in nonempty_axis_subsets(box.dim):
        re = restrict_order(r, e)
        terms: dict[float, float] = {}
        if finite:
            terms.update(
                mean_modulus_sweep(
                    f, re, t, box, density=density, h_samples=h_samples, p_values=finite
                )
            )
        if math.inf in ps:
            terms[math.inf] = sup_modulus_sweep(
                f, re, t, box, density=density, h_samples=h_samples, p_values=[math.inf]
            )[math.inf]
        out[e] = terms
    return out


def total_modulus_sup(
    f: Callable,
    r: Sequence[int],
    t: Sequence[float],
    p: float,
    box: Box,
    *,
    density,
    h_samples: int,
) -> float:
    """Total mixed modulus: sum of sup moduli over nonempty axis subsets."""
    terms = total_sup_terms(
        f, r, t, box, density=density, h_samples=h_samples, p_values=[p]
    )
    return float(sum(v[float(p)] for v in terms.values()))


def total_modulus_mean(
    f: Callable,
    r: Sequence[int],
    t: Sequence[float],
    p: float,
    box: Box,
    *,
    density,
    h_samples: int,
) -> float:
    """Total p-mean modulus: sum of mean moduli over nonempty axis subsets."""
    terms = total_mean_terms(
        f, r, t, box, density=density, h_samples=h_samples, p_values=[p]
    )
    return float(sum(v[float(p)] for v in terms.values()))


def lower_whitney_constant(r: Sequence[int], p: float, dim: int | None = None) -> float:
    """Explicit constant bounding the total modulus by any approximation error.

    For each nonempty axis subset e the difference expansion gives
    ``omega_{r(e)}(g) <= K_e ||g||_p`` with ``K_e = prod_{i in e} 2^{r_i}``
    when p >= 1 (triangle inequality over the stencil) and
    ``K_e = (prod_{i in e} sum_j C(r_i, j)^p)^(1/p)`` when 0 < p < 1
    (p-th power subadditivity).  The returned value is the sum of the
    K_e over all nonempty subsets.
    """
    r = tuple(int(v) for v in r)
    if dim is None:
        dim = len(r)
    if len(r) != dim:
        raise ValueError("order length must equal dim")
    if any(v < 1 for v in r):
        raise ValueError("orders must satisfy r_i >= 1")
    if not p > 0:
        raise ValueError("exponent p must be positive")
    total = 0.0
    for e in nonempty_axis_subsets(dim):
        if p >= 1:
            k = 1.0
            for i in e:
                k *= 2.0 ** r[i]
        else:
            prod = 1.0
            for i in e:
                prod *= sum(math.comb(r[i], j) ** p for j in range(r[i] + 1))
            k = prod ** (1.0 / p)
        total += k
    return total
