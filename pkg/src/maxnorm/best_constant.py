"""The sharp L^p bound c_p of the uncentered maximal operator on the line.

c_p is the positive root of  phi(x) = (p-1) x^p - p x^(p-1) - 1.  It is
computed twice, independently:

* directly, by a bracketed bisection/Newton solve of phi = 0;
* through the extremal point value M_1(|t|^(-1/p))(1) = p'(g^(1/p') + 1)/(g + 1),
  where g > 0 solves p'(g^(1/p') + 1)/(g + 1) = g^(-1/p).

The two routes share no code beyond the parameter object.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .step_fn import DomainError, PNormParams

MAX_P = 1e6
MAX_ITER = 200


class ConvergenceError(ArithmeticError):
    pass


def _check_p(params: PNormParams) -> float:
    p = params.p
    if p > MAX_P:
        raise DomainError(f"p = {p} exceeds the supported range p <= {MAX_P:g}")
    return p


def _pow(x: float, e: float) -> float:
    """x**e as exp(e ln x), saturating to inf instead of raising."""
    t = e * math.log(x)
    return math.inf if t > 709.0 else math.exp(t)


def phi(x: float, p: float) -> float:
    """(p-1) x^p - p x^(p-1) - 1, written as x^(p-1) ((p-1)(x-1) - 1) - 1."""
    return _pow(x, p - 1.0) * ((p - 1.0) * (x - 1.0) - 1.0) - 1.0


def _psi(x: float, p: float) -> float:
    # phi(x) / x^(p-1); same sign as phi, increasing on (0, inf), never overflows
    return (p - 1.0) * (x - 1.0) - 1.0 - _pow(x, 1.0 - p)


def _dpsi(x: float, p: float) -> float:
    return (p - 1.0) * (1.0 + _pow(x, -p))


def bracket(params: PNormParams) -> tuple[float, float]:
    """The interval (p/(p-1), 2p/(p-1)) known to contain c_p."""
    q = params.p_prime
    return q, 2.0 * q


def _solve_cp(p: float, lo: float, hi: float) -> float:
    if not (_psi(lo, p) < 0.0 < _psi(hi, p)):
        raise ConvergenceError(f"no sign change of phi on [{lo}, {hi}] for p = {p}")
    it = 0
    # bisect down to a narrow bracket, then Newton; fall back to bisection
    # whenever an iterate leaves the bracket
    while hi - lo > 1e-3 * lo:
        mid = 0.5 * (lo + hi)
        if _psi(mid, p) < 0.0:
            lo = mid
        else:
            hi = mid
        it += 1
    x = 0.5 * (lo + hi)
    while it < MAX_ITER:
        it += 1
        fx = _psi(x, p)
        if fx == 0.0:
            return x
        if fx < 0.0:
            lo = x
        else:
            hi = x
        step = fx / _dpsi(x, p)
        nxt = x - step
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        if nxt == x or abs(nxt - x) <= 4 * math.ulp(x):
            return nxt
        x = nxt
    raise ConvergenceError(f"c_p solve did not converge for p = {p}")


def _gamma_residual(g: float, p: float, q: float) -> float:
    # Eq. for g multiplied through by g^(1/p) (g + 1)
    return q * (_pow(g, 1.0 / q) + 1.0) * _pow(g, 1.0 / p) - (g + 1.0)


def solve_gamma(params: PNormParams) -> float:
    """Unique positive root g of p'(g^(1/p') + 1)/(g + 1) = g^(-1/p)."""
    p = _check_p(params)
    q = params.p_prime
    # sign change scan on g = 2^k, then bisection in log2(g)
    prev_k = None
    for k in range(-60, 61):
        r = _gamma_residual(2.0 ** k, p, q)
        if r == 0.0:
            return 2.0 ** k
        if r > 0.0:
            if prev_k is None:
                raise ConvergenceError(f"gamma root below 2^-60 for p = {p}")
            break
        prev_k = k
    else:
        raise ConvergenceError(f"no sign change for gamma on [2^-60, 2^60], p = {p}")
    lo, hi = 2.0 ** prev_k, 2.0 ** k
    for _ in range(MAX_ITER):
        mid = math.sqrt(lo * hi)
        if not lo < mid < hi:
            mid = 0.5 * (lo + hi)
            if not lo < mid < hi:
                break
        if _gamma_residual(mid, p, q) < 0.0:
            lo = mid
        else:
            hi = mid
    else:
        raise ConvergenceError(f"gamma solve did not converge for p = {p}")
    rl, rh = _gamma_residual(lo, p, q), _gamma_residual(hi, p, q)
    return lo if abs(rl) <= abs(rh) else hi


def m1f0_at_one(params: PNormParams, gamma: float) -> float:
    """p'(g^(1/p') + 1)/(g + 1): the maximal function of |t|^(-1/p) at t = 1."""
    if not gamma > 0:
        raise DomainError("gamma must be positive")
    q = params.p_prime
    return q * (_pow(gamma, 1.0 / q) + 1.0) / (gamma + 1.0)


@dataclass(frozen=True)
class BestConstant:
    params: PNormParams
    c_p: float
    residual: float
    gamma: float
    m1f0_at_1: float
    lower: float
    upper: float

    @property
    def p(self) -> float:
        return self.params.p

    @property
    def gamma_residual(self) -> float:
        return _gamma_residual(self.gamma, self.params.p, self.params.p_prime)

    def as_dict(self) -> dict:
        return {
            "p": self.p,
            "c_p": self.c_p,
            "residual": self.residual,
            "gamma": self.gamma,
            "m1f0_at_1": self.m1f0_at_1,
            "lower": self.lower,
            "upper": self.upper,
        }


def solve_cp(params: PNormParams) -> BestConstant:
    p = _check_p(params)
    lo, hi = bracket(params)
    c = _solve_cp(p, lo, hi)
    g = solve_gamma(params)
    return BestConstant(
        params=params,
        c_p=c,
        residual=phi(c, p),
        gamma=g,
        m1f0_at_1=m1f0_at_one(params, g),
        lower=lo,
        upper=hi,
    )


def c_p(p: float) -> float:
    """Shorthand: the sharp constant for exponent p."""
    params = PNormParams(p)
    lo, hi = bracket(params)
    return _solve_cp(_check_p(params), lo, hi)


@dataclass(frozen=True)
class IdentityReport:
    p: float
    c_p: float
    m1f0_at_1: float
    gamma_power: float  # gamma^(-1/p)
    abs_diff: float
    phi_residual: float
    gamma_residual: float
    tol: float

    @property
    def rel_diff(self) -> float:
        return self.abs_diff / self.c_p

    @property
    def passed(self) -> bool:
        return (
            self.abs_diff <= self.tol * self.c_p
            and abs(self.gamma_power - self.c_p) <= self.tol * self.c_p
        )


def verify_theorem_identity(params: PNormParams, tol: float = 1e-10) -> IdentityReport:
    """Check that the root of phi equals the extremal point value M_1(f_0)(1)."""
    bc = solve_cp(params)
    return IdentityReport(
        p=bc.p,
        c_p=bc.c_p,
        m1f0_at_1=bc.m1f0_at_1,
        gamma_power=_pow(bc.gamma, -1.0 / bc.p),
        abs_diff=abs(bc.c_p - bc.m1f0_at_1),
        phi_residual=bc.residual,
        gamma_residual=bc.gamma_residual,
        tol=tol,
    )
