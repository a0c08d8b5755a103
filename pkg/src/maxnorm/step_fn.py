"""Compactly supported piecewise-constant functions on the real line.

Cells are open intervals ``(x[k-1], x[k])``; the value at a breakpoint is never
used, since every quantity computed here is an integral or the measure of a
level set.  The function vanishes outside ``[x[0], x[-1]]``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PNormParams:
    p: float

    def __post_init__(self):
        p = float(self.p)
        if not (math.isfinite(p) and p > 1.0):
            raise DomainError(f"p must be a finite real > 1, got {self.p!r}")
        object.__setattr__(self, "p", p)

    @property
    def p_prime(self) -> float:
        return self.p / (self.p - 1.0)


@dataclass(frozen=True, eq=False)
class StepFunction:
    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        x = _frozen(self.breakpoints)
        c = _frozen(self.values)
        if x.ndim != 1 or c.ndim != 1:
            raise ValueError("breakpoints and values must be one-dimensional")
        if len(c) < 1 or len(x) != len(c) + 1:
            raise ValueError("need len(values) == len(breakpoints) - 1 >= 1")
        if not np.all(np.isfinite(x)) or not np.all(np.isfinite(c)):
            raise ValueError("breakpoints and values must be finite")
        if not np.all(np.diff(x) > 0):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", x)
        object.__setattr__(self, "values", c)

    @property
    def m(self) -> int:
        """Number of cells."""
        return len(self.values)

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    @property
    def support(self) -> tuple[float, float]:
        return float(self.breakpoints[0]), float(self.breakpoints[-1])

    def __call__(self, t):
        """Evaluate at points strictly inside cells; 0 outside the support.

        Points landing exactly on a breakpoint get the value of the cell to
        their right (an arbitrary but fixed convention, measure zero).
        """
        t = np.asarray(t, dtype=float)
        k = np.searchsorted(self.breakpoints, t, side="right") - 1
        inside = (k >= 0) & (k < self.m)
        out = np.zeros_like(t)
        out[inside] = self.values[k[inside]]
        return out if out.ndim else float(out)

    def is_nonnegative(self) -> bool:
        return bool(np.all(self.values >= 0))

    def total_integral(self) -> float:
        return math.fsum(self.values * self.widths)

    def scaled(self, c: float) -> "StepFunction":
        return StepFunction(self.breakpoints, c * self.values)

    def dilated(self, s: float) -> "StepFunction":
        """The function t -> f(t / s), s > 0."""
        if s <= 0:
            raise DomainError("dilation factor must be positive")
        return StepFunction(s * self.breakpoints, self.values)

    def reflected(self) -> "StepFunction":
        """The function t -> f(-t)."""
        return StepFunction(-self.breakpoints[::-1], self.values[::-1])

    def power(self, p: float) -> "StepFunction":
        return StepFunction(self.breakpoints, np.abs(self.values) ** p)

    def refined(self, k: int) -> "StepFunction":
        """Split every cell into ``k`` equal sub-cells (same function)."""
        if k < 1:
            raise ValueError("refinement factor must be >= 1")
        if k == 1:
            return self
        x = self.breakpoints
        frac = np.arange(k) / k
        inner = (x[:-1, None] + np.outer(self.widths, frac)).ravel()
        return StepFunction(np.append(inner, x[-1]), np.repeat(self.values, k))

    def on_grid(self, grid: np.ndarray) -> np.ndarray:
        """Cell values of this function on a finer grid (one per grid cell)."""
        grid = np.asarray(grid, dtype=float)
        return self(0.5 * (grid[:-1] + grid[1:]))


def merged_grid(*fs: StepFunction) -> np.ndarray:
    """Union of the breakpoints of several step functions."""
    return np.unique(np.concatenate([f.breakpoints for f in fs]))


class IntervalSet:
    """Finite disjoint union of open intervals, kept sorted.

    Overlapping intervals and intervals sharing an endpoint are merged; empty
    intervals are dropped.  A shared endpoint is a single point, so merging
    never changes a measure.
    """

    __slots__ = ("_iv",)

    def __init__(self, intervals: Iterable[tuple[float, float]] = ()):
        ivs = sorted((float(a), float(b)) for a, b in intervals if b > a)
        merged: list[tuple[float, float]] = []
        for a, b in ivs:
            if merged and a <= merged[-1][1]:
                if b > merged[-1][1]:
                    merged[-1] = (merged[-1][0], b)
            else:
                merged.append((a, b))
        self._iv = tuple(merged)

    @property
    def intervals(self) -> tuple[tuple[float, float], ...]:
        return self._iv

    def __iter__(self):
        return iter(self._iv)

    def __len__(self):
        return len(self._iv)

    def __bool__(self):
        return bool(self._iv)

    def __eq__(self, other):
        return isinstance(other, IntervalSet) and self._iv == other._iv

    def __repr__(self):
        return f"IntervalSet({list(self._iv)!r})"

    def measure(self) -> float:
        return math.fsum(b - a for a, b in self._iv)

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(self._iv + other._iv)

    def intersection(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        i = j = 0
        A, B = self._iv, other._iv
        while i < len(A) and j < len(B):
            lo = max(A[i][0], B[j][0])
            hi = min(A[i][1], B[j][1])
            if hi > lo:
                out.append((lo, hi))
            if A[i][1] < B[j][1]:
                i += 1
            else:
                j += 1
        return IntervalSet(out)

    def reflected(self) -> "IntervalSet":
        return IntervalSet((-b, -a) for a, b in self._iv)


def integrate(f: StepFunction, S: IntervalSet) -> float:
    """Exact integral of f over S: sum of c_k * |cell_k ∩ S|."""
    x, c = f.breakpoints, f.values
    terms = []
    for a, b in S:
        lo = max(int(np.searchsorted(x, a, side="right")) - 1, 0)
        hi = min(int(np.searchsorted(x, b, side="left")), f.m)
        if hi <= lo:
            continue
        left = np.maximum(x[lo:hi], a)
        right = np.minimum(x[lo + 1:hi + 1], b)
        terms.extend(c[lo:hi] * np.clip(right - left, 0.0, None))
    return math.fsum(terms)


def lp_norm(f: StepFunction, params: PNormParams) -> float:
    if not np.all(np.isfinite(f.values)):
        raise ValueError("non-finite cell value")
    return math.fsum(np.abs(f.values) ** params.p * f.widths) ** (1.0 / params.p)


def level_set(f: StepFunction, lam: float) -> IntervalSet:
    """{x : f(x) > lam}, adjacent qualifying cells merged."""
    if not lam > 0:
        raise DomainError("lambda must be positive")
    x = f.breakpoints
    idx = np.flatnonzero(f.values > lam)
    return IntervalSet((x[k], x[k + 1]) for k in idx)


@dataclass(frozen=True, eq=False)
class PiecewiseLinear:
    """Continuous piecewise-linear function through ``nodes``; constant beyond them."""

    x: np.ndarray
    y: np.ndarray

    def __call__(self, t):
        return np.interp(t, self.x, self.y)

    @property
    def nodes(self) -> list[tuple[float, float]]:
        return list(zip(self.x.tolist(), self.y.tolist()))


def prefix_integral(f: StepFunction) -> PiecewiseLinear:
    """S(x) = integral of f from x_0 to x, tabulated at the breakpoints."""
    y = np.concatenate(([0.0], np.cumsum(f.values * f.widths)))
    return PiecewiseLinear(_frozen(f.breakpoints), _frozen(y))


def is_symmetric_decreasing(f: StepFunction, tol: float = 1e-12) -> bool:
    """True iff f is even and non-increasing in |x| (up to ``tol``)."""
    grid = np.unique(np.concatenate((f.breakpoints, -f.breakpoints)))
    # pad one cell on each side so the drop to zero outside the support is seen
    span = grid[-1] - grid[0]
    grid = np.concatenate(([grid[0] - span], grid, [grid[-1] + span]))
    mid = 0.5 * (grid[:-1] + grid[1:])
    v = f(mid)
    if np.any(np.abs(v - f(-mid)) > tol):
        return False
    right = v[mid >= 0]
    left = v[mid <= 0]
    return bool(np.all(np.diff(right) <= tol) and np.all(np.diff(left) >= -tol))


def random_step_function(rng: np.random.Generator, m: int, *, vmax: float = 10.0,
                         wmin: float = 0.1, wmax: float = 2.0,
                         start: float | None = None) -> StepFunction:
    """Values ~ U[0, vmax], widths ~ U[wmin, wmax]."""
    widths = rng.uniform(wmin, wmax, size=m)
    x0 = rng.uniform(-5.0, 5.0) if start is None else start
    x = x0 + np.concatenate(([0.0], np.cumsum(widths)))
    return StepFunction(x, rng.uniform(0.0, vmax, size=m))


def random_symmetric_decreasing(rng: np.random.Generator, m: int) -> StepFunction:
    """Even, non-increasing in |x|, with ``m`` cells on each side of the origin.

    Half of the draws put a flat cell across the origin instead of a
    breakpoint at 0.
    """
    radii = np.cumsum(rng.uniform(0.1, 2.0, size=m))
    vals = np.sort(rng.uniform(0.0, 10.0, size=m))[::-1]
    if rng.random() < 0.5:
        x = np.concatenate((-radii[::-1], [0.0], radii))
        c = np.concatenate((vals[::-1], vals))
    else:
        x = np.concatenate((-radii[::-1], radii))
        c = np.concatenate((vals[:0:-1], vals))
    return StepFunction(x, c)


def read_csv(source) -> StepFunction:
    """Parse the ``x,value`` format: m+1 rows, the last row's value ignored."""
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, newline="", encoding="utf-8") as fh:
            return read_csv(fh)
    reader = csv.reader(source)
    header = next(reader, None)
    if header is None or [h.strip() for h in header[:2]] != ["x", "value"]:
        raise ValueError("expected header 'x,value'")
    xs, vs = [], []
    for row in reader:
        if not row or not "".join(row).strip():
            continue
        xs.append(float(row[0]))
        vs.append(row[1].strip() if len(row) > 1 else "")
    if len(xs) < 2:
        raise ValueError("need at least two breakpoints")
    return StepFunction(xs, [float(v) for v in vs[:-1]])


def write_csv(f: StepFunction, sink=None, fmt: str = ".15g") -> str:
    buf = io.StringIO()
    buf.write("x,value\n")
    for xk, ck in zip(f.breakpoints[:-1], f.values):
        buf.write(f"{format(xk, fmt)},{format(ck, fmt)}\n")
    buf.write(f"{format(f.breakpoints[-1], fmt)},\n")
    text = buf.getvalue()
    if sink is not None:
        sink.write(text)
    return text

