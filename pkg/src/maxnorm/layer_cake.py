"""Level-set identities and the sharp weak-type inequality, checked exactly.

Every lambda-integral here is evaluated by slabs: between consecutive
distinct values of a step function its level set does not change, so the
lambda-integral over a slab is a closed-form power difference times a fixed
spatial integral.  No quadrature in lambda is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .best_constant import c_p as sharp_constant
from .best_constant import phi
from .extremal import ratio_bounds
from .maximal_1d import one_sided_level_set
from .step_fn import (
    DomainError,
    PNormParams,
    StepFunction,
    integrate,
    level_set,
    merged_grid,
)

REL_TOL = 1e-9


@dataclass(frozen=True)
class WeakTypeReport:
    lemma: str
    lam: float
    lhs: float
    rhs: float
    sets: dict

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def scale(self) -> float:
        return max(1.0, abs(self.rhs))

    @property
    def is_equality(self) -> bool:
        return abs(self.slack) <= REL_TOL * self.scale

    @property
    def passed(self) -> bool:
        if self.lemma == "2":
            return self.slack >= -REL_TOL * self.scale
        return self.is_equality


def _check(f: StepFunction, lam: float) -> None:
    if not lam > 0:
        raise DomainError("lambda must be positive")
    if not f.is_nonnegative():
        raise DomainError("f must be nonnegative")


def lemma1_check(f: StepFunction, lam: float) -> tuple[WeakTypeReport, WeakTypeReport]:
    """lam |C| = int_C f and lam |D| = int_D f for the one-sided level sets."""
    _check(f, lam)
    out = []
    for side, name in (("left", "C"), ("right", "D")):
        S = one_sided_level_set(f, lam, side)
        out.append(WeakTypeReport(f"1-{side}", lam, lam * S.measure(), integrate(f, S), {name: S}))
    return out[0], out[1]


def lemma2_check(f: StepFunction, lam: float) -> WeakTypeReport:
    """lam (|A| + |B|) <= int_A f + int_B f with A = {M_1 f > lam}, B = {f > lam}.

    A is assembled as C ∪ D from the exact one-sided level sets.
    """
    _check(f, lam)
    C = one_sided_level_set(f, lam, "left")
    D = one_sided_level_set(f, lam, "right")
    A = C.union(D)
    B = level_set(f, lam)
    lhs = lam * (A.measure() + B.measure())
    rhs = math.fsum((integrate(f, A), integrate(f, B)))
    return WeakTypeReport("2", lam, lhs, rhs, {"A": A, "B": B, "C": C, "D": D})


def _common_cells(*fs: StepFunction) -> tuple[np.ndarray, list[np.ndarray]]:
    grid = merged_grid(*fs)
    return np.diff(grid), [f.on_grid(grid) for f in fs]


def _slab_integral(weight_mass: np.ndarray, g_vals: np.ndarray, e: float) -> float:
    """int_0^inf lam^(e-1) * (sum of weight_mass over cells with g > lam) dlam.

    Slab [v_{i-1}, v_i) of consecutive distinct positive values of g sees the
    cells with g >= v_i; its lam-integral is (v_i^e - v_{i-1}^e) / e.
    """
    pos = g_vals > 0
    if not np.any(pos):
        return 0.0
    v = g_vals[pos]
    w = weight_mass[pos]
    order = np.argsort(v, kind="stable")[::-1]
    v, w = v[order], w[order]
    levels, first = np.unique(-v, return_index=True)
    levels = -levels  # distinct values, descending
    # mass of cells with g >= levels[i]: prefix over the descending order
    above = np.cumsum(w)
    last = np.append(first[1:], len(v)) - 1
    mass_ge = above[last]
    lower = np.append(levels[1:], 0.0)
    terms = mass_ge * (levels ** e - lower ** e) / e
    return math.fsum(terms)


def lemma3_first(f: StepFunction, g: StepFunction, params: PNormParams) -> tuple[float, float]:
    """(int_0^inf lam^(p-2) int_{g>lam} f dt dlam,  1/(p-1) int f g^(p-1) dt)."""
    p = params.p
    if not (f.is_nonnegative() and g.is_nonnegative()):
        raise DomainError("f and g must be nonnegative")
    dx, (fv, gv) = _common_cells(f, g)
    lhs = _slab_integral(fv * dx, gv, p - 1.0)
    rhs = math.fsum(fv * gv ** (p - 1.0) * dx) / (p - 1.0)
    return lhs, rhs


def lemma3_second(g: StepFunction, params: PNormParams) -> tuple[float, float]:
    """(int_0^inf lam^(p-1) |{g > lam}| dlam,  1/p int g^p dt).

    This is the first identity with f = 1 on the support of g and exponent
    p + 1.
    """
    one = StepFunction(g.breakpoints, np.ones(g.m))
    return lemma3_first(one, g, PNormParams(params.p + 1.0))


@dataclass(frozen=True)
class TheoremCheck:
    p: float
    ratio_lower: float
    ratio_upper: float
    c_p: float
    poly_value: float  # (p-1) r^p - p r^(p-1) - 1 at the lower ratio

    @property
    def passed(self) -> bool:
        return self.ratio_lower <= self.c_p + 1e-6 and self.poly_value <= 1e-6


def theorem_check(f: StepFunction, params: PNormParams, refine: int = 8) -> TheoremCheck:
    """The integrated weak-type bound: ||M_1 f||_p / ||f||_p <= c_p.

    Evaluated with the cellwise lower estimate of M_1 f after splitting every
    cell ``refine`` ways (refinement leaves f unchanged and only tightens the
    estimate).
    """
    lo, hi = ratio_bounds(f.refined(refine), params)
    cp = sharp_constant(params.p)
    return TheoremCheck(params.p, lo, hi, cp, phi(lo, params.p))


def report_csv_rows(reports, fmt: str = ".15g") -> list[str]:
    rows = []
    for r in reports:
        lam = "" if r.lam is None else format(r.lam, fmt)
        rows.append(",".join([r.lemma, lam, format(r.lhs, fmt), format(r.rhs, fmt),
                              format(r.slack, fmt), str(r.passed).lower()]))
    return rows


@dataclass(frozen=True)
class IdentityReport:
    """A Lemma 3 style identity: both sides must agree to ``rel_tol``."""

    lemma: str
    lhs: float
    rhs: float
    rel_tol: float = 1e-12
    lam: float | None = None

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        return abs(self.slack) <= self.rel_tol * max(abs(self.lhs), abs(self.rhs), 1e-300)

