import math

import pytest
from scipy.integrate import dblquad, quad

from maxnorm.high_dim import (
    growth_csv,
    growth_table,
    log_integral_beta,
    log_integral_quad,
    lower_bound,
    sphere_surface,
    stirling_base,
)
from maxnorm.step_fn import DomainError, PNormParams

P_GRID = [1.01, 1.1, 1.5, 2, 3, 5, 10, 100]


def test_sphere_surface_low_dims():
    assert math.exp(sphere_surface(1)) == pytest.approx(2.0, rel=1e-15)
    assert math.exp(sphere_surface(2)) == pytest.approx(2 * math.pi, rel=1e-15)
    assert math.exp(sphere_surface(3)) == pytest.approx(4 * math.pi, rel=1e-15)
    assert math.exp(sphere_surface(4)) == pytest.approx(2 * math.pi ** 2, rel=1e-14)
    with pytest.raises(DomainError):
        sphere_surface(0)


def test_integral_n3_p2():
    # int_0^1 s^(3/2) ds = 2/5
    P2 = PNormParams(2)
    assert math.exp(log_integral_beta(3, P2)) == pytest.approx(0.4, abs=1e-13)
    assert math.exp(log_integral_quad(3, P2)) == pytest.approx(0.4, abs=1e-13)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_two_routes_agree(p):
    params = PNormParams(p)
    worst = 0.0
    for n in range(3, 401):
        a = log_integral_beta(n, params)
        b = log_integral_quad(n, params)
        worst = max(worst, abs(math.expm1(b - a)))
    assert worst <= 1e-10


@pytest.mark.parametrize("n, p", [(3, 2.0), (4, 1.5), (5, 3.0), (6, 2.0)])
def test_bound_from_cap_areas(n, p):
    # n 2^n / w_{n-1} * int_0^1 t^(n/p') |{theta in S^(n-1): theta_1 >= t}| dt/t,
    # with the cap area w_{n-2} int_t^1 (1 - s^2)^((n-3)/2) ds
    q = p / (p - 1)
    w1 = math.exp(sphere_surface(n - 1))
    val, _ = dblquad(lambda s, t: t ** (n / q - 1) * (1 - s * s) ** ((n - 3) / 2),
                     0, 1, lambda t: t, lambda t: 1, epsabs=0, epsrel=1e-11)
    direct = n * 2 ** n / math.exp(sphere_surface(n)) * w1 * val
    assert math.exp(lower_bound(n, PNormParams(p))) == pytest.approx(direct, rel=1e-8)
    assert lower_bound(n, PNormParams(p), route="quad") == pytest.approx(
        lower_bound(n, PNormParams(p)), abs=1e-10)


def test_bound_exceeds_one_dimensional_scale():
    # the n = 3 bound at p = 2 is 2^3 * 2 * (2 pi / 4 pi) * 2/5 = 3.2
    assert math.exp(lower_bound(3, PNormParams(2))) == pytest.approx(3.2, rel=1e-14)


def test_stirling_base_value():
    a = 0.5
    assert stirling_base(PNormParams(2)) == pytest.approx(4 * a ** a / (a + 1) ** (a + 1), rel=1e-15)
    assert stirling_base(PNormParams(2)) == pytest.approx(1.5396007, abs=1e-7)


@pytest.mark.parametrize("p", P_GRID)
def test_stirling_base_above_one(p):
    assert stirling_base(PNormParams(p)) > 1


def test_stirling_base_endpoints():
    assert stirling_base(PNormParams(1e4)) == pytest.approx(1.0, rel=0.05)
    assert stirling_base(PNormParams(1.0001)) == pytest.approx(4.0, rel=0.05)
    vals = [stirling_base(PNormParams(p)) for p in P_GRID]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_growth_table_converges():
    params = PNormParams(2)
    rows = growth_table(params, 200)
    assert [r.n for r in rows] == list(range(3, 201))
    assert rows[0].ratio_to_prev is None and rows[1].ratio_to_prev is None
    b = stirling_base(params)
    assert abs(rows[-1].ratio_to_prev - b) <= 0.01 * b
    assert len({r.stirling_base for r in rows}) == 1
    errs = [abs(r.ratio_to_prev - b) for r in rows[10:]]
    assert errs[-1] < errs[0]


def test_finite_up_to_2000():
    for p in (1.01, 2.0, 100.0):
        rows = growth_table(PNormParams(p), 2000)
        assert all(math.isfinite(r.log_lower_bound) for r in rows)
        assert rows[-1].log_lower_bound > rows[-3].log_lower_bound
    assert math.isfinite(log_integral_quad(2000, PNormParams(2)))


def test_small_n_rejected():
    with pytest.raises(DomainError):
        lower_bound(2, PNormParams(2))
    with pytest.raises(DomainError):
        growth_table(PNormParams(2), 4)
    with pytest.raises(ValueError):
        lower_bound(5, PNormParams(2), route="simpson")


def test_csv():
    text = growth_csv(growth_table(PNormParams(2), 5))
    lines = text.splitlines()
    assert lines[0] == "n,p,log_lower_bound,two_step_ratio,stirling_base"
    assert len(lines) == 4
    assert lines[1].split(",")[3] == ""
    assert lines[3].split(",")[3] != ""
