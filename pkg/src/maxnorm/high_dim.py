"""Lower bound for the ball maximal operator on L^p(R^n) and its growth rate.

Testing against |x|^(-n/p) truncated to eps < |x| < N and letting eps -> 0,
N -> inf gives the lower bound

    LB(n, p) = 2^n p' (w_{n-2} / w_{n-1}) I(n, p),
    I(n, p)  = int_0^1 s^(n/p') (1 - s^2)^((n-3)/2) ds,

with w_{k} the surface area of the unit sphere S^k.  Substituting u = s^2,

    I(n, p) = B((n/p' + 1)/2, (n-1)/2) / 2.

I is evaluated both by adaptive quadrature and by that Beta closed form; they
serve as checks on each other.  All quantities are kept as logarithms, since
2^n and the sphere ratios overflow long before n = 2000.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

from .step_fn import DomainError, PNormParams

QUAD_RTOL = 1e-12


def sphere_surface(n: int) -> float:
    """log |S^(n-1)| = log 2 + (n/2) log pi - lgamma(n/2)."""
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    return math.log(2.0) + 0.5 * n * math.log(math.pi) - math.lgamma(0.5 * n)


def _check_n(n: int) -> int:
    if int(n) != n or n < 3:
        raise DomainError(f"need an integer n >= 3, got {n}")
    return int(n)


def log_integral_beta(n: int, params: PNormParams) -> float:
    """log I(n, p) through the Beta function."""
    n = _check_n(n)
    a = 0.5 * (n / params.p_prime + 1.0)
    b = 0.5 * (n - 1.0)
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b) - math.log(2.0)


def log_integral_quad(n: int, params: PNormParams) -> float:
    """log I(n, p) by adaptive quadrature.

    For (n-3)/2 < 1 the factor (1-s)^((n-3)/2) is not smooth at s = 1, so both
    algebraic endpoint factors go into a QAWS weight.  Otherwise the integrand
    is smooth; it is rescaled by its peak value (at s^2 = a/(a + 2b)) so that
    it stays O(1) however large n is, and the peak is passed as a breakpoint.
    """
    n = _check_n(n)
    a = n / params.p_prime
    b = 0.5 * (n - 3)
    if b < 1.0:
        val, _ = quad(lambda s: (1.0 + s) ** b, 0.0, 1.0, weight="alg", wvar=(a, b),
                      epsabs=0.0, epsrel=QUAD_RTOL, limit=200)
        return math.log(val)
    s0 = math.sqrt(a / (a + 2.0 * b))
    log_peak = a * math.log(s0) + b * math.log1p(-s0 * s0)

    def scaled(s):
        if s <= 0.0 or s >= 1.0:
            return 0.0
        return math.exp(a * math.log(s) + b * math.log1p(-s * s) - log_peak)

    val, _ = quad(scaled, 0.0, 1.0, points=[s0], epsabs=0.0, epsrel=QUAD_RTOL, limit=400)
    return math.log(val) + log_peak


def lower_bound(n: int, params: PNormParams, route: str = "beta") -> float:
    """log LB(n, p)."""
    n = _check_n(n)
    if route == "beta":
        log_i = log_integral_beta(n, params)
    elif route == "quad":
        log_i = log_integral_quad(n, params)
    else:
        raise ValueError(f"route must be 'beta' or 'quad', got {route!r}")
    return (n * math.log(2.0) + math.log(params.p_prime)
            + sphere_surface(n - 1) - sphere_surface(n) + log_i)


def stirling_base(params: PNormParams) -> float:
    """b(p) = 4 a^a / (a+1)^(a+1) with a = 1/p'; LB(n+2)/LB(n) -> b(p)."""
    a = 1.0 / params.p_prime
    return 4.0 * math.exp(a * math.log(a) - (a + 1.0) * math.log1p(a))


@dataclass(frozen=True)
class GrowthRow:
    n: int
    params: PNormParams
    log_lower_bound: float
    ratio_to_prev: float | None  # LB(n) / LB(n-2)
    stirling_base: float

    @property
    def p(self) -> float:
        return self.params.p


def growth_table(params: PNormParams, n_max: int) -> list[GrowthRow]:
    if int(n_max) != n_max or n_max < 5:
        raise DomainError(f"n_max must be an integer >= 5, got {n_max}")
    b = stirling_base(params)
    logs: dict[int, float] = {}
    rows = []
    for n in range(3, int(n_max) + 1):
        logs[n] = lower_bound(n, params)
        prev = math.exp(logs[n] - logs[n - 2]) if n - 2 in logs else None
        rows.append(GrowthRow(n, params, logs[n], prev, b))
    return rows


def growth_csv(rows, fmt: str = ".15g") -> str:
    lines = ["n,p,log_lower_bound,two_step_ratio,stirling_base"]
    for r in rows:
        ratio = "" if r.ratio_to_prev is None else format(r.ratio_to_prev, fmt)
        lines.append(",".join([str(r.n), format(r.p, fmt), format(r.log_lower_bound, fmt),
                               ratio, format(r.stirling_base, fmt)]))
    return "\n".join(lines) + "\n"
