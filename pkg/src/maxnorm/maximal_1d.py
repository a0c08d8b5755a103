"""One-sided and uncentered maximal functions of nonnegative step functions.

Why breakpoints suffice
-----------------------
Fix a breakpoint x_i and let A(a) be the average of f over [a, x_i].  On any
cell where f equals a constant c, A'(a) = (A(a) - c) / (x_i - a), so A is
monotone across that cell (it moves away from c).  Hence sup_{a < x_i} A(a) is
attained with a at a breakpoint, or as a -> x_i, where A tends to the value of
the cell just left of x_i -- which is also the average over that whole cell,
i.e. the breakpoint choice a = x_{i-1}.  Left of the support f = 0 and moving a
further left only dilutes the average, so a = x_0 covers that range.  The
maximum over breakpoint pairs is therefore the exact value of M_L f(x_i), and
symmetrically for M_R f.  M_1 = max(M_L, M_R) pointwise.

Fast path
---------
With S the prefix integral and P_j = (x_j, S(x_j)), M_L f(x_i) is the largest
slope from an earlier P_j to P_i.  The maximizing P_j is where the supporting
line through P_i touches the lower convex hull of P_0..P_{i-1}; along the hull
the slope to P_i is unimodal, so a binary search finds it.  Total cost is
O(m log m); hull maintenance is amortized O(m).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .step_fn import DomainError, IntervalSet, StepFunction

Side = Literal["left", "right"]

BRUTE_FORCE_LIMIT = 5000


@dataclass(frozen=True, eq=False)
class SampledMaximal:
    source: StepFunction
    node_values: np.ndarray
    envelope: StepFunction

    @property
    def breakpoints(self) -> np.ndarray:
        return self.source.breakpoints


def _require_nonnegative(f: StepFunction) -> None:
    if not f.is_nonnegative():
        raise DomainError("maximal operators take nonnegative input")


def envelope_of(f: StepFunction, node_values: np.ndarray) -> StepFunction:
    """Cellwise max of both endpoint node values and the cell value.

    For x inside cell k, an interval containing x either contains one of the
    cell's endpoints or lies in the cell, so this bounds M_1 f(x) from above.
    """
    nv = np.asarray(node_values)
    return StepFunction(f.breakpoints, np.maximum(np.maximum(nv[:-1], nv[1:]), f.values))


def _sampled(f: StepFunction, nv: np.ndarray) -> SampledMaximal:
    nv = np.array(nv, dtype=float)
    nv.setflags(write=False)
    return SampledMaximal(f, nv, envelope_of(f, nv))


def _prefix_dd(mass) -> tuple[list[float], list[float]]:
    """Prefix sums carried as hi + lo pairs (error-free TwoSum accumulation).

    Differences of nearby prefix sums then keep full relative precision even
    when the running total is many orders of magnitude larger than the mass
    between the two points.
    """
    hi, lo = [0.0], [0.0]
    s, e = 0.0, 0.0
    for w in mass:
        t = s + w
        bv = t - s
        e += (s - (t - bv)) + (w - bv)
        s = t
        hi.append(s)
        lo.append(e)
    return hi, lo


def _left_nodes(x: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Exact M_L f at every breakpoint via the prefix-sum hull."""
    m = len(c)
    H, L = _prefix_dd((c * np.diff(x)).tolist())
    xs = x.tolist()
    out = [0.0] * (m + 1)
    hull: list[int] = [0]
    for i in range(1, m + 1):
        xi, hi_, lo_ = xs[i], H[i], L[i]

        def mass_to(j):
            return (hi_ - H[j]) + (lo_ - L[j])

        def slope(j):
            return mass_to(j) / (xi - xs[j])

        # unimodal slope-to-P_i along the hull: find the last index whose
        # successor does not improve the slope
        lo, hi = 0, len(hull) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if slope(hull[mid + 1]) >= slope(hull[mid]):
                lo = mid + 1
            else:
                hi = mid
        out[i] = slope(hull[lo])

        # add P_i to the lower hull
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            dab = (H[b] - H[a]) + (L[b] - L[a])
            cross = (xs[b] - xs[a]) * mass_to(a) - dab * (xi - xs[a])
            if cross <= 0.0:
                hull.pop()
            else:
                break
        hull.append(i)
    return np.array(out)


def left_max(f: StepFunction) -> SampledMaximal:
    """M_L f(x) = sup_{a < x} average of f over (a, x), at every breakpoint."""
    _require_nonnegative(f)
    return _sampled(f, _left_nodes(f.breakpoints, f.values))


def right_max(f: StepFunction) -> SampledMaximal:
    """M_R f(x) = sup_{b > x} average of f over (x, b), by reflecting left_max."""
    _require_nonnegative(f)
    g = f.reflected()
    nv = _left_nodes(g.breakpoints, g.values)[::-1]
    return _sampled(f, nv)


def uncentered_max(f: StepFunction) -> SampledMaximal:
    _require_nonnegative(f)
    return _sampled(f, np.maximum(left_max(f).node_values, right_max(f).node_values))


def brute_force_one_sided(f: StepFunction, side: Side = "left") -> SampledMaximal:
    """O(m^2) oracle: best average over every breakpoint pair.

    Integrals are accumulated cell by cell outward from the query point rather
    than taken from prefix sums, so this shares no arithmetic with the hull
    path.
    """
    _require_nonnegative(f)
    if f.m > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_LIMIT} cells, got {f.m}")
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    x, c = f.breakpoints, f.values
    mass = c * np.diff(x)
    m = f.m
    out = np.zeros(m + 1)
    if side == "left":
        for i in range(1, m + 1):
            acc = np.cumsum(mass[:i][::-1])  # mass over (x_j, x_i), j = i-1 .. 0
            out[i] = np.max(acc / (x[i] - x[:i][::-1]))
    else:
        for i in range(m):
            acc = np.cumsum(mass[i:])  # mass over (x_i, x_j), j = i+1 .. m
            out[i] = np.max(acc / (x[i + 1:] - x[i]))
    return _sampled(f, out)


def lower_cell_values(f: StepFunction, left: SampledMaximal, right: SampledMaximal) -> np.ndarray:
    """A pointwise lower bound for M_1 f on each cell.

    For x in cell k = (x_{k-1}, x_k), the intervals realizing M_L f(x_k) and
    M_R f(x_{k-1}) both cover the whole cell, so
    M_1 f(x) >= max(M_L f(x_k), M_R f(x_{k-1})) for every x in the cell.
    """
    return np.maximum(left.node_values[1:], right.node_values[:-1])


@dataclass(frozen=True, eq=False)
class MaximalBracket:
    """Step functions bracketing M_1 f pointwise: lower <= M_1 f <= upper."""

    maximal: SampledMaximal
    lower: StepFunction
    upper: StepFunction


def maximal_bracket(f: StepFunction) -> MaximalBracket:
    _require_nonnegative(f)
    L = left_max(f)
    R = right_max(f)
    M = _sampled(f, np.maximum(L.node_values, R.node_values))
    lower = StepFunction(f.breakpoints, lower_cell_values(f, L, R))
    return MaximalBracket(M, lower, M.envelope)


def one_sided_level_set(f: StepFunction, lam: float, side: Side = "left") -> IntervalSet:
    """Exact {M_L f > lam} (or {M_R f > lam}).

    With h(x) = S(x) - lam*x, M_L f(x) > lam iff h(x) exceeds min_{a <= x} h(a).
    h is piecewise linear (slope -lam outside the support), so the set is
    traced segment by segment against the running minimum; each component
    ends where h falls back to that minimum, a linear equation.
    """
    if not lam > 0:
        raise DomainError("lambda must be positive")
    _require_nonnegative(f)
    if side == "right":
        return one_sided_level_set(f.reflected(), lam, "left").reflected()
    if side != "left":
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")

    x = f.breakpoints.tolist()
    c = f.values.tolist()
    out: list[tuple[float, float]] = []
    # left of x_0, h = -lam*x is decreasing, so no point there qualifies and the
    # running minimum at x_0 is h(x_0)
    h0 = -lam * x[0]
    run_min = h0
    start = None  # left end of the component currently open
    for k in range(len(c)):
        xa, xb = x[k], x[k + 1]
        slope = c[k] - lam
        h1 = h0 + c[k] * (xb - xa) - lam * (xb - xa)
        gap = h0 - run_min
        if slope > 0.0:
            if start is None:
                start = xa
        elif gap > 0.0:
            if start is None:
                start = xa
            if slope < 0.0 and h1 <= run_min:
                t = xa + gap / (lam - c[k])
                out.append((start, min(t, xb)))
                start = None
                run_min = h1
        else:
            # sitting on the running minimum with non-positive slope
            if start is not None:
                out.append((start, xa))
                start = None
            run_min = min(run_min, h1)
        h0 = h1
    gap = h0 - run_min
    if gap > 0.0:
        if start is None:
            start = x[-1]
        out.append((start, x[-1] + gap / lam))
    elif start is not None:
        out.append((start, x[-1]))
    return IntervalSet(out)


def node_csv(sm: SampledMaximal, fmt: str = ".15g") -> str:
    lines = ["x,node_value"]
    for xk, vk in zip(sm.breakpoints, sm.node_values):
        lines.append(f"{format(xk, fmt)},{format(vk, fmt)}")
    return "\n".join(lines) + "\n"
