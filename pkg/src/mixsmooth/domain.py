"""Axis-aligned boxes, tensor midpoint grids, and L_p quasi-norms.

Geometric substrate for the difference operators and the polynomial
fitting code: a :class:`Box` is a d-dimensional axis-aligned
parallelepiped, a :class:`GridFunction` holds samples of a function at
the midpoints of a uniform tensor grid over a box, and
:func:`lp_quasinorm` evaluates the discrete L_p quasi-norm by composite
midpoint quadrature for any exponent 0 < p <= inf.

All values are plain 64-bit floats.  Every operation here is a pure
function of its inputs; grids are enumerated row-major along the axis
order, so reductions are reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "Box",
    "GridFunction",
    "box_size",
    "shrink_domain",
    "sample_on_grid",
    "lp_quasinorm",
    "nonempty_axis_subsets",
    "restrict_order",
    "normalize_grid",
    "grid_axes",
    "grid_points",
]


@dataclass(frozen=True)
class Box:
    """Axis-aligned d-parallelepiped ``[lower_1, upper_1] x ... x [lower_d, upper_d]``.

    Every side must have strictly positive length.
    """

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        lo = tuple(float(a) for a in self.lower)
        hi = tuple(float(b) for b in self.upper)
        if len(lo) == 0 or len(lo) != len(hi):
            raise ValueError("lower and upper must be nonempty and of equal length")
        for a, b in zip(lo, hi):
            if not (math.isfinite(a) and math.isfinite(b)):
                raise ValueError("box bounds must be finite")
            if not a < b:
                raise ValueError(f"degenerate box side [{a}, {b}]")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def size(self) -> np.ndarray:
        """Vector of side lengths ``upper - lower``."""
        return np.asarray(self.upper, float) - np.asarray(self.lower, float)

    @property
    def volume(self) -> float:
        return float(np.prod(self.size))

    @classmethod
    def unit(cls, dim: int) -> "Box":
        return cls((0.0,) * dim, (1.0,) * dim)

    @classmethod
    def cube(cls, a: float, b: float, dim: int) -> "Box":
        return cls((float(a),) * dim, (float(b),) * dim)

    def contains(self, points: np.ndarray, slack: float = 1e-12) -> np.ndarray:
        """Componentwise membership test for points of shape ``(..., dim)``."""
        pts = np.asarray(points, float)
        lo = np.asarray(self.lower) - slack
        hi = np.asarray(self.upper) + slack
        return np.all((pts >= lo) & (pts <= hi), axis=-1)


def box_size(box: Box) -> np.ndarray:
    """Size vector of a box (per-axis side lengths)."""
    return box.size


def shrink_domain(box: Box, shift: Sequence[float]) -> Box | None:
    """Sub-box of points x with both x and x + shift inside ``box``.

    Returns None when some axis interval becomes empty or degenerates to
    measure zero (empty is a value here, not an error).
    """
    y = np.asarray(shift, float)
    if y.shape != (box.dim,):
        raise ValueError("shift length must match box dimension")
    lo = np.asarray(box.lower) + np.maximum(0.0, -y)
    hi = np.asarray(box.upper) - np.maximum(0.0, y)
    if np.any(hi <= lo):
        return None
    return Box(tuple(lo), tuple(hi))


def normalize_grid(spec, dim: int) -> tuple[int, ...]:
    """Coerce an int or per-axis sequence into a validated grid shape."""
    if np.isscalar(spec):
        shape = (int(spec),) * dim
    else:
        shape = tuple(int(n) for n in spec)
    if len(shape) != dim:
        raise ValueError(f"grid spec has {len(shape)} axes, expected {dim}")
    if any(n < 1 for n in shape):
        raise ValueError("grid must have at least one point per axis")
    return shape


def grid_axes(box: Box, spec) -> list[np.ndarray]:
    """Per-axis midpoint coordinates of the uniform tensor grid."""
    shape = normalize_grid(spec, box.dim)
    axes = []
    for a, b, n in zip(box.lower, box.upper, shape):
        w = (b - a) / n
        axes.append(a + (np.arange(n) + 0.5) * w)
    return axes


def grid_points(box: Box, spec) -> np.ndarray:
    """All grid midpoints, shape ``spec + (dim,)``, row-major by axis order."""
    axes = grid_axes(box, spec)
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)


@dataclass(frozen=True)
class GridFunction:
    """Samples of a function at the midpoints of a uniform tensor grid.

    ``values`` has one entry per grid cell and exactly the shape of the
    grid spec.  The array is frozen after construction.
    """

    box: Box
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, float)
        if vals.ndim != self.box.dim:
            raise ValueError(
                f"values have {vals.ndim} axes but the box has dimension {self.box.dim}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("grid values must all be finite")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def spec(self) -> tuple[int, ...]:
        return self.values.shape

    @property
    def cell_widths(self) -> np.ndarray:
        return self.box.size / np.asarray(self.spec)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.cell_widths))

    def midpoints(self) -> np.ndarray:
        return grid_points(self.box, self.spec)


def sample_on_grid(f: Callable[[np.ndarray], np.ndarray], box: Box, spec) -> GridFunction:
    """Evaluate ``f`` at every grid midpoint of ``box``.

    ``f`` must accept an array of shape ``(..., dim)`` and return the
    matching ``(...)`` array of values.  Non-finite values are rejected.
    """
    pts = grid_points(box, spec)
    vals = np.asarray(f(pts), float)
    if vals.shape != pts.shape[:-1]:
        raise ValueError(
            f"function returned shape {vals.shape}, expected {pts.shape[:-1]}"
        )
    if not np.all(np.isfinite(vals)):
        raise ValueError("function produced non-finite values on the grid")
    return GridFunction(box, vals)


def _quasinorm_from_abs(abs_values: np.ndarray, cell_volume: float, p: float) -> float:
    if p == math.inf:
        return float(abs_values.max()) if abs_values.size else 0.0
    return float((abs_values**p).sum() * cell_volume) ** (1.0 / p)


def lp_quasinorm(g: GridFunction | None, p: float) -> float:
    """Discrete L_p quasi-norm by composite midpoint quadrature.

    For finite p this is ``(sum |v|^p * cell_volume)**(1/p)``; for
    ``p = inf`` the maximum of ``|v|``.  An empty domain (None) counts
    as 0.  Exponents p <= 0 are rejected.
    """
    if not p > 0:
        raise ValueError(f"exponent p must be positive, got {p}")
    if g is None or g.values.size == 0:
        return 0.0
    return _quasinorm_from_abs(np.abs(g.values), g.cell_volume, float(p))


def nonempty_axis_subsets(dim: int) -> list[tuple[int, ...]]:
    """All 2^d - 1 nonempty subsets of axes {0, ..., d-1}.

    Fixed deterministic order: by cardinality, then lexicographic.
    """
    if dim < 1:
        raise ValueError("dimension must be at least 1")
    import itertools

    out: list[tuple[int, ...]] = []
    for k in range(1, dim + 1):
        out.extend(itertools.combinations(range(dim), k))
    return out


def restrict_order(r: Sequence[int], axes: Sequence[int]) -> tuple[int, ...]:
    """Zero out the multi-index ``r`` off the given axis subset."""
    keep = set(int(i) for i in axes)
    return tuple(int(ri) if i in keep else 0 for i, ri in enumerate(r))
