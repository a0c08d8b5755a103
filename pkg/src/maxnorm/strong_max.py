"""Strong (axis-parallel box) maximal function on tensor grids.

For a nonnegative product g(x) = prod_j u_j(x_j), the average over a box
factors into per-axis averages, so the strong maximal function is the product
of the one-dimensional uncentered maximal functions.  That separable route is
the main one.  The dense route applies the one-dimensional operator along each
axis in turn, which dominates the strong maximal function for any input and
coincides with it on products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .best_constant import c_p as sharp_constant
from .extremal import ExtremalSpec, build_extremal, ratio_bounds
from .maximal_1d import SampledMaximal, _left_nodes, maximal_bracket, uncentered_max
from .step_fn import DomainError, PNormParams, StepFunction

MAX_CELLS = 10**7


@dataclass(frozen=True, eq=False)
class TensorStepFunction:
    axes: tuple
    values: np.ndarray
    separable_factors: tuple | None = field(default=None)

    def __post_init__(self):
        axes = tuple(np.array(a, dtype=float) for a in self.axes)
        vals = np.array(self.values, dtype=float)
        if vals.ndim != len(axes):
            raise ValueError("values must have one dimension per axis")
        for k, a in enumerate(axes):
            if a.ndim != 1 or len(a) < 2 or not np.all(np.diff(a) > 0):
                raise ValueError(f"axis {k} must be strictly increasing with >= 2 points")
            if vals.shape[k] != len(a) - 1:
                raise ValueError(f"axis {k}: {len(a) - 1} cells but values extent {vals.shape[k]}")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_factors(cls, factors: Sequence[StepFunction]) -> "TensorStepFunction":
        vals = factors[0].values
        for f in factors[1:]:
            vals = np.multiply.outer(vals, f.values)
        return cls(tuple(f.breakpoints for f in factors), vals, tuple(factors))

    @property
    def ndim(self) -> int:
        return len(self.axes)

    def cell_volumes(self) -> np.ndarray:
        vol = np.diff(self.axes[0])
        for a in self.axes[1:]:
            vol = np.multiply.outer(vol, np.diff(a))
        return vol


def strong_max_separable(factors: Sequence[StepFunction]) -> list[SampledMaximal]:
    """Per-axis uncentered maximal functions of the factors."""
    if not factors:
        raise DomainError("need at least one factor")
    return [uncentered_max(f) for f in factors]


def vertex_product(per_axis: Sequence[SampledMaximal]) -> np.ndarray:
    """Strong maximal function at grid vertices for a separable input."""
    out = per_axis[0].node_values
    for sm in per_axis[1:]:
        out = np.multiply.outer(out, sm.node_values)
    return out


def _nodes_1d(x: np.ndarray, c: np.ndarray) -> np.ndarray:
    left = _left_nodes(x, c)
    right = _left_nodes(-x[::-1], c[::-1])[::-1]
    return np.maximum(left, right)


def _apply_along(arr: np.ndarray, x: np.ndarray, axis: int, envelope: bool) -> np.ndarray:
    """Apply the 1D operator to every line of ``arr`` along ``axis``.

    Lines are cell values; the result holds node values (envelope=False) or
    envelope cell values (envelope=True).
    """
    moved = np.moveaxis(arr, axis, -1)
    flat = moved.reshape(-1, moved.shape[-1])
    width = flat.shape[1] if envelope else flat.shape[1] + 1
    out = np.empty((flat.shape[0], width))
    for r, line in enumerate(flat):
        nv = _nodes_1d(x, line)
        out[r] = np.maximum(np.maximum(nv[:-1], nv[1:]), line) if envelope else nv
    return np.moveaxis(out.reshape(moved.shape[:-1] + (width,)), -1, axis)


@dataclass(frozen=True, eq=False)
class IteratedMaximal:
    """Composition of per-axis maximal operators.

    ``vertex_values`` is the composition evaluated exactly at grid vertices;
    ``envelope`` is a cellwise upper bound for it (and hence for the strong
    maximal function).
    """

    envelope: TensorStepFunction
    vertex_values: np.ndarray
    order: tuple


def strong_max_iterated(F: TensorStepFunction, order: Sequence[int] | None = None) -> IteratedMaximal:
    """Apply the 1D maximal operator along each axis, ``order[0]`` first.

    Vertex values: after an axis has been processed the data along it are node
    values, but along every unprocessed axis they are still cell values, i.e.
    each line to be processed next is an honest step function.  So the
    composition is evaluated exactly at vertices, for any nonnegative F.
    """
    if np.any(F.values < 0):
        raise DomainError("strong maximal function takes nonnegative input")
    if F.values.size > MAX_CELLS:
        raise ValueError(f"tensor has {F.values.size} cells, limit is {MAX_CELLS}")
    order = tuple(range(F.ndim)) if order is None else tuple(order)
    if sorted(order) != list(range(F.ndim)):
        raise ValueError(f"order must be a permutation of the axes, got {order}")
    vert = F.values
    env = F.values
    for ax in order:
        vert = _apply_along(vert, F.axes[ax], ax, envelope=False)
        env = _apply_along(env, F.axes[ax], ax, envelope=True)
    return IteratedMaximal(TensorStepFunction(F.axes, env), vert, order)


def tensor_lp_norm(values: np.ndarray, volumes: np.ndarray, params: PNormParams) -> float:
    return math.fsum((np.abs(values) ** params.p * volumes).ravel()) ** (1.0 / params.p)


@dataclass(frozen=True)
class StrongRow:
    n: int
    p: float
    ratio: float
    ratio_upper: float
    target: float

    @property
    def relative_gap(self) -> float:
        return (self.target - self.ratio) / self.target


def strong_ratio(params: PNormParams, n: int, spec: ExtremalSpec) -> StrongRow:
    """||N_n g||_p / ||g||_p for g the n-fold product of the extremal function.

    Both the cellwise bounds on N_n g and the L^p norm factor over the axes, so
    the ratio is the one-dimensional ratio to the n-th power.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"dimension must be a positive integer, got {n}")
    n = int(n)
    lo, hi = ratio_bounds(build_extremal(spec), params)
    cp = sharp_constant(params.p)
    return StrongRow(n, params.p, lo ** n, hi ** n, cp ** n)


def dense_ratio_2d(params: PNormParams, spec: ExtremalSpec) -> float:
    """The n = 2 ratio summed over the full tensor grid (no factorization)."""
    f = build_extremal(spec)
    lower = maximal_bracket(f).lower.values
    vol = np.multiply.outer(f.widths, f.widths)
    num = tensor_lp_norm(np.multiply.outer(lower, lower), vol, params)
    den = tensor_lp_norm(np.multiply.outer(f.values, f.values), vol, params)
    return num / den


def strong_csv(rows: Sequence[StrongRow], fmt: str = ".15g") -> str:
    lines = ["n,p,ratio,target_cpn,relative_gap"]
    for r in rows:
        lines.append(",".join([str(r.n), format(r.p, fmt), format(r.ratio, fmt),
                               format(r.target, fmt), format(r.relative_gap, fmt)]))
    return "\n".join(lines) + "\n"

