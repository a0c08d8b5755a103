"""The extremal family |t|^(-1/p) on eps <= |t| <= N and its norm ratios."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np

from .best_constant import c_p as sharp_constant
from .maximal_1d import maximal_bracket
from .step_fn import DomainError, PNormParams, StepFunction, lp_norm


@dataclass(frozen=True)
class ExtremalSpec:
    params: PNormParams
    eps: float
    N: float
    cells_per_decade: int = 200

    def __post_init__(self):
        if not (self.eps > 0 and math.isfinite(self.N)):
            raise DomainError("need eps > 0 and finite N")
        if not self.eps < self.N:
            raise DomainError(f"need eps < N, got eps={self.eps}, N={self.N}")
        if int(self.cells_per_decade) != self.cells_per_decade or self.cells_per_decade < 8:
            raise DomainError("cells_per_decade must be an integer >= 8")


@dataclass(frozen=True)
class RatioRow:
    eps: float
    N: float
    cells_per_decade: int
    ratio: float  # lower estimate
    ratio_upper: float
    c_p: float

    @property
    def relative_gap(self) -> float:
        return (self.c_p - self.ratio) / self.c_p


def geometric_grid(eps: float, N: float, cells_per_decade: int) -> np.ndarray:
    n = max(1, math.ceil(cells_per_decade * math.log10(N / eps) - 1e-9))
    t = eps * (N / eps) ** (np.arange(n + 1) / n)
    t[0], t[-1] = eps, N
    return t


def _cell_average(t1: np.ndarray, t2: np.ndarray, p: float) -> np.ndarray:
    # mean of t^(-1/p) over (t1, t2) = t1^(a-1) * (r^a - 1) / (a (r - 1)), a = 1 - 1/p
    a = 1.0 - 1.0 / p
    lr = np.log(t2 / t1)
    return t1 ** (a - 1.0) * np.expm1(a * lr) / (a * np.expm1(lr))


def build_extremal(spec: ExtremalSpec) -> StepFunction:
    """Even step function whose cells carry the exact averages of |t|^(-1/p).

    Cells are geometric on [eps, N], mirrored onto [-N, -eps]; (-eps, eps) is a
    single zero cell.
    """
    t = geometric_grid(spec.eps, spec.N, spec.cells_per_decade)
    v = _cell_average(t[:-1], t[1:], spec.params.p)
    x = np.concatenate((-t[::-1], t))
    c = np.concatenate((v[::-1], [0.0], v))
    return StepFunction(x, c)


def ratio_bounds(f: StepFunction, params: PNormParams) -> tuple[float, float]:
    """(lower, upper) estimates of ||M_1 f||_p / ||f||_p.

    The lower estimate uses a cellwise lower bound for M_1 f, so it can never
    exceed the true ratio; the upper one uses the envelope.
    """
    nf = lp_norm(f, params)
    if nf == 0.0:
        raise DomainError("ratio undefined for the zero function")
    br = maximal_bracket(f)
    return lp_norm(br.lower, params) / nf, lp_norm(br.upper, params) / nf


def ratio(f: StepFunction, params: PNormParams) -> float:
    return ratio_bounds(f, params)[0]


def _workers() -> int:
    raw = os.environ.get("MAXNORM_THREADS")
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def ratio_row(spec: ExtremalSpec, cp: float | None = None) -> RatioRow:
    lo, hi = ratio_bounds(build_extremal(spec), spec.params)
    if cp is None:
        cp = sharp_constant(spec.params.p)
    return RatioRow(spec.eps, spec.N, int(spec.cells_per_decade), lo, hi, cp)


def sweep(params: PNormParams, eps_list: Sequence[float], N_list: Sequence[float],
          cells_per_decade: int = 200) -> list[RatioRow]:
    """One row per (eps, N) pair, eps-major, in input order."""
    if not eps_list or not N_list:
        raise DomainError("eps and N lists must be nonempty")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise DomainError("eps list must be strictly decreasing")
    if any(b <= a for a, b in zip(N_list, N_list[1:])):
        raise DomainError("N list must be strictly increasing")
    specs = [ExtremalSpec(params, e, n, cells_per_decade) for e, n in product(eps_list, N_list)]
    cp = sharp_constant(params.p)
    nw = _workers()
    if nw == 1:
        return [ratio_row(s, cp) for s in specs]
    with ThreadPoolExecutor(max_workers=nw) as ex:
        return list(ex.map(lambda s: ratio_row(s, cp), specs))


def diagonal(rows: Sequence[RatioRow], n_eps: int, n_N: int) -> list[RatioRow]:
    """Rows with matching positions in the eps and N lists."""
    return [rows[i * n_N + i] for i in range(min(n_eps, n_N))]


def gap_shrinks(rows: Sequence[RatioRow], wobble: float = 0.10) -> bool:
    """Each gap at most (1 + wobble) times its predecessor; last below first."""
    gaps = [r.relative_gap for r in rows]
    if len(gaps) < 2:
        return True
    steps = all(b <= (1.0 + wobble) * a for a, b in zip(gaps, gaps[1:]))
    return steps and gaps[-1] < gaps[0]


def sweep_csv(rows: Sequence[RatioRow], fmt: str = ".15g") -> str:
    lines = ["eps,N,cells_per_decade,ratio_lower,ratio_upper,c_p,relative_gap"]
    for r in rows:
        vals = [format(r.eps, fmt), format(r.N, fmt), str(r.cells_per_decade),
                format(r.ratio, fmt), format(r.ratio_upper, fmt), format(r.c_p, fmt),
                format(r.relative_gap, fmt)]
        lines.append(",".join(vals))
    return "\n".join(lines) + "\n"
