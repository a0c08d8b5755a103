import itertools
import math

import numpy as np
import pytest

from maxnorm.best_constant import c_p
from maxnorm.extremal import ExtremalSpec, build_extremal, ratio
from maxnorm.maximal_1d import uncentered_max
from maxnorm.step_fn import DomainError, PNormParams, StepFunction, random_step_function
from maxnorm.strong_max import (
    MAX_CELLS,
    TensorStepFunction,
    dense_ratio_2d,
    strong_csv,
    strong_max_iterated,
    strong_max_separable,
    strong_ratio,
    vertex_product,
)

CHI_PAD = StepFunction([0, 1, 2], [1.0, 0.0])
P2 = PNormParams(2)


def box_max_at_vertices(F: TensorStepFunction) -> np.ndarray:
    """Largest average over grid-aligned boxes containing each vertex (2-D, brute force).

    Along each coordinate the box average is a ratio of affine functions of a
    box edge inside a cell, so the supremum is attained with edges on the grid.
    """
    x, y = F.axes
    vol = F.cell_volumes()
    S = np.zeros((len(x), len(y)))
    S[1:, 1:] = np.cumsum(np.cumsum(F.values * vol, axis=0), axis=1)
    out = np.zeros((len(x), len(y)))
    for a, b in itertools.combinations(range(len(x)), 2):
        for c, d in itertools.combinations(range(len(y)), 2):
            avg = (S[b, d] - S[a, d] - S[b, c] + S[a, c]) / ((x[b] - x[a]) * (y[d] - y[c]))
            block = out[a:b + 1, c:d + 1]
            np.maximum(block, avg, out=block)
    return out


def test_chi_square_corner():
    per_axis = strong_max_separable([CHI_PAD, CHI_PAD])
    assert vertex_product(per_axis)[2, 2] == 0.25
    F = TensorStepFunction.from_factors([CHI_PAD, CHI_PAD])
    assert strong_max_iterated(F).vertex_values[2, 2] == 0.25


def test_constant_factor_is_transparent():
    rng = np.random.default_rng(1)
    u = random_step_function(rng, 20)
    const = StepFunction([0, 1, 3], [2.0, 2.0])
    v = vertex_product(strong_max_separable([u, const]))
    assert np.allclose(v, 2.0 * uncentered_max(u).node_values[:, None], rtol=1e-15)


def test_one_dimension_is_uncentered():
    rng = np.random.default_rng(2)
    u = random_step_function(rng, 30)
    F = TensorStepFunction((u.breakpoints,), u.values)
    assert np.array_equal(strong_max_iterated(F).vertex_values, uncentered_max(u).node_values)
    assert np.array_equal(vertex_product(strong_max_separable([u])), uncentered_max(u).node_values)


def test_iterated_matches_product_on_separable():
    rng = np.random.default_rng(3)
    for _ in range(5):
        fs = [random_step_function(rng, int(rng.integers(2, 15))) for _ in range(3)]
        F = TensorStepFunction.from_factors(fs)
        a = strong_max_iterated(F).vertex_values
        b = vertex_product(strong_max_separable(fs))
        assert np.max(np.abs(a - b) / np.maximum(b, 1e-300)) <= 1e-12


def test_order_independent_on_separable():
    rng = np.random.default_rng(4)
    fs = [random_step_function(rng, 6) for _ in range(3)]
    F = TensorStepFunction.from_factors(fs)
    base = strong_max_iterated(F).vertex_values
    for order in itertools.permutations(range(3)):
        got = strong_max_iterated(F, order).vertex_values
        assert np.allclose(got, base, rtol=1e-12, atol=0)


def test_brute_force_box_oracle():
    rng = np.random.default_rng(5)
    for _ in range(6):
        fs = [random_step_function(rng, int(rng.integers(2, 7))) for _ in range(2)]
        F = TensorStepFunction.from_factors(fs)
        truth = box_max_at_vertices(F)
        assert np.allclose(strong_max_iterated(F).vertex_values, truth, rtol=1e-12, atol=0)
        # a non-product input: the composition can only overshoot
        G = TensorStepFunction(F.axes, rng.uniform(0, 5, size=F.values.shape))
        assert np.all(strong_max_iterated(G).vertex_values >= box_max_at_vertices(G) * (1 - 1e-12))


def test_envelope_dominates():
    rng = np.random.default_rng(6)
    G = TensorStepFunction((np.cumsum(rng.uniform(0.1, 1, 9)), np.cumsum(rng.uniform(0.1, 1, 7))),
                           rng.uniform(0, 3, size=(8, 6)))
    it = strong_max_iterated(G)
    env = it.envelope.values
    assert np.all(env >= G.values)
    v = it.vertex_values
    for di, dj in itertools.product((0, 1), repeat=2):
        assert np.all(env >= v[di:di + 8, dj:dj + 6] * (1 - 1e-14))


def test_constant_tensor_unchanged():
    F = TensorStepFunction(([0, 1, 2.5], [0, 2, 3, 4]), np.full((2, 3), 1.75))
    it = strong_max_iterated(F)
    assert np.allclose(it.vertex_values, 1.75, rtol=1e-15)
    assert np.allclose(it.envelope.values, 1.75, rtol=1e-15)


def test_input_validation():
    with pytest.raises(ValueError):
        TensorStepFunction(([0, 1],), np.ones((2,)))
    with pytest.raises(DomainError):
        strong_max_iterated(TensorStepFunction(([0, 1],), [-1.0]))
    with pytest.raises(ValueError):
        strong_max_iterated(TensorStepFunction(([0, 1], [0, 1]), [[1.0]]), order=(0, 0))
    with pytest.raises(DomainError):
        strong_max_separable([])


def test_size_limit():
    side = math.isqrt(MAX_CELLS) + 1
    ax = np.arange(side + 1, dtype=float)
    F = TensorStepFunction((ax, ax), np.broadcast_to(np.float64(1.0), (side, side)))
    with pytest.raises(ValueError):
        strong_max_iterated(F)


def test_target_value():
    row = strong_ratio(P2, 2, ExtremalSpec(P2, 1e-2, 1e2, 50))
    assert row.target == pytest.approx((1 + math.sqrt(2)) ** 2, rel=1e-14)
    assert row.target == pytest.approx(5.8284271, abs=1e-7)


def test_strong_ratio_is_power_of_1d():
    spec = ExtremalSpec(P2, 1e-2, 1e2, 50)
    one = ratio(build_extremal(spec), P2)
    for n in (1, 2, 3):
        row = strong_ratio(P2, n, spec)
        assert row.ratio == pytest.approx(one ** n, rel=1e-14)
        assert row.ratio <= row.ratio_upper
        assert row.ratio <= c_p(2) ** n + 1e-6
    with pytest.raises(DomainError):
        strong_ratio(P2, 0, spec)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_dense_2d_equals_product(p):
    params = PNormParams(p)
    spec = ExtremalSpec(params, 1e-2, 1e2, 25)
    dense = dense_ratio_2d(params, spec)
    assert dense == pytest.approx(strong_ratio(params, 2, spec).ratio, rel=1e-12)


def test_csv():
    row = strong_ratio(P2, 2, ExtremalSpec(P2, 1e-1, 1e1, 8))
    lines = strong_csv([row]).splitlines()
    assert lines[0] == "n,p,ratio,target_cpn,relative_gap"
    assert lines[1].startswith("2,2,")
