from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from graphnorm.grid import FREQUENCY, Field, apply_multiplier, plane_wave, random_bandlimited_state
from graphnorm.norms import (
    MAX_GRAPH_ORDER,
    equivalence_constants,
    graph_norm,
    identity_operator,
    l2_norm,
    laplacian_power_norms,
    interpolation_constant,
    matrix_operator,
    mixed_derivative_identity,
    multi_indices,
    multiplication_operator,
    multiplier_operator,
    operator_norm_estimate,
    pythagorean_graph_norm,
    scalar_operator,
    sobolev_norm,
)

from conftest import TWO_PI, make

SQ2PI = np.sqrt(TWO_PI)
grids = st.sampled_from([(1, 1, 16), (1, 1, 32), (2, 1, 8), (1, 2, 8), (3, 1, 8)])


def eix(g):
    return Field(g, np.exp(1j * g.x_1d).astype(complex))


# ---------------------------------------------------------------- l2 / graph / sobolev

def test_l2_examples():
    g = make(1, 1, 32)
    assert l2_norm(g.constant(1.0)) == pytest.approx(SQ2PI, rel=1e-14)
    assert l2_norm(g.zeros()) == 0.0
    assert l2_norm(eix(g)) == pytest.approx(SQ2PI, rel=1e-14)


@pytest.mark.parametrize("m", range(MAX_GRAPH_ORDER + 1))
def test_graph_norm_of_constant(m):
    assert graph_norm(make(1, 1, 32).constant(1.0), m) == pytest.approx(SQ2PI, rel=1e-13)


@pytest.mark.parametrize("m, factor", [(1, 2), (2, 3)])
def test_graph_norm_plane_wave(m, factor):
    assert graph_norm(eix(make(1, 1, 32)), m) == pytest.approx(factor * SQ2PI, rel=1e-13)


def test_graph_norm_order_cap():
    g = make(1, 1, 16)
    with pytest.raises(ValueError):
        graph_norm(g.constant(1.0), MAX_GRAPH_ORDER + 1)
    with pytest.raises(ValueError):
        graph_norm(g.constant(1.0), -1)


def test_sobolev_examples():
    g = make(1, 1, 32)
    for s in range(5):
        assert sobolev_norm(g.constant(1.0), s) == pytest.approx(SQ2PI, rel=1e-13)
    assert sobolev_norm(eix(g), 2) == pytest.approx(np.sqrt(3 * TWO_PI), rel=1e-13)


def _brute_force_sobolev(f, s):
    """Sum over explicitly enumerated multi-indices of ||D^alpha f||^2."""
    g = f.grid
    total = 0.0
    for alpha in product(range(s + 1), repeat=g.d):
        if sum(alpha) > s:
            continue
        total += l2_norm(apply_multiplier(g.derivative(alpha), f)) ** 2
    return np.sqrt(total)


@pytest.mark.parametrize("shape", [(1, 1, 16), (2, 1, 16), (3, 1, 8), (1, 2, 8)])
@pytest.mark.parametrize("s", [0, 1, 2, 3, 4])
def test_sobolev_matches_multi_index_enumeration(shape, s):
    g = make(*shape, L=5.0)
    f = random_bandlimited_state(g, g.P // 4, [s, 9])
    assert sobolev_norm(f, s) == pytest.approx(_brute_force_sobolev(f, s), rel=1e-12)


def test_multi_index_counts():
    from math import comb
    for d in range(1, 5):
        for s in range(5):
            assert len(list(multi_indices(d, s))) == comb(s + d, d)
            assert len(list(multi_indices(d, s, exact=True))) == comb(s + d - 1, d - 1)


# ---------------------------------------------------------------- mixed derivative identity

def test_mixed_identity_1d_plane_wave():
    lhs, rhs = mixed_derivative_identity(eix(make(1, 1, 32)))
    assert lhs == pytest.approx(TWO_PI, rel=1e-13)
    assert rhs == pytest.approx(TWO_PI, rel=1e-13)


def test_mixed_identity_2d_diagonal_wave():
    g = make(2, 1, 16)
    f = Field(g, np.exp(1j * (g.coordinate(0) + g.coordinate(1))).astype(complex))
    lhs, rhs = mixed_derivative_identity(f)
    # hand expansion: d11, d22 contribute 1 each, d12 and d21 one each -> 4 (2 pi)^2
    assert lhs == pytest.approx(4 * TWO_PI ** 2, rel=1e-13)
    assert rhs == pytest.approx(4 * TWO_PI ** 2, rel=1e-13)


def test_mixed_identity_against_fourier_weight_oracle():
    g = make(3, 1, 8, L=4.0)
    for i in range(20):
        f = random_bandlimited_state(g, 2, [i, 5])
        lhs, rhs = mixed_derivative_identity(f)
        c2 = np.abs(np.fft.fftn(f.values, norm="ortho")) ** 2
        k = [g.kappa(a) for a in range(3)]
        oracle = sum(np.sum((k[i] * k[j]) ** 2 * c2) for i in range(3) for j in range(3))
        assert lhs == pytest.approx(oracle * g.cell_volume, rel=1e-12)
        assert abs(lhs - rhs) <= 1e-10 * rhs


# ---------------------------------------------------------------- norm properties

@given(grids, st.integers(0, 10**6), st.integers(0, MAX_GRAPH_ORDER - 1))
def test_graph_norm_properties(shape, seed, m):
    g = make(*shape, L=3.0)
    f = random_bandlimited_state(g, g.P // 4, [seed, 0])
    h = random_bandlimited_state(g, g.P // 4, [seed, 1])
    assert graph_norm(f, 0) == sobolev_norm(f, 0) == pytest.approx(l2_norm(f), rel=1e-14)
    assert graph_norm(f, m) <= graph_norm(f, m + 1)
    for norm in (lambda x: graph_norm(x, m), lambda x: sobolev_norm(x, 2 * m)):
        assert norm(f + h) <= (norm(f) + norm(h)) * (1 + 1e-10)
        assert norm(f * (2 - 3j)) == pytest.approx(abs(2 - 3j) * norm(f), rel=1e-10)


def test_zero_order_norms_agree_exactly():
    g = make(2, 1, 16)
    f = random_bandlimited_state(g, 4, 2)
    assert graph_norm(f, 0) == sobolev_norm(f, 0)
    assert graph_norm(f, 0) == laplacian_power_norms(f, 0)[0]


@given(grids, st.integers(0, 10**6))
def test_sum_and_square_forms(shape, seed):
    g = make(*shape)
    f = random_bandlimited_state(g, g.P // 4, seed)
    pw = laplacian_power_norms(f, 1)
    pyth = np.sqrt(pw[0] ** 2 + pw[1] ** 2)
    s = pw[0] + pw[1]
    assert pyth <= s * (1 + 1e-14)
    assert s <= np.sqrt(2) * pyth * (1 + 1e-14)
    assert pythagorean_graph_norm(f, 1) == pytest.approx(pyth, rel=1e-14)


# ---------------------------------------------------------------- operator norms

@pytest.mark.parametrize("k", [0, 1, 2])
def test_identity_operator_norm(k):
    g = make(1, 1, 32)
    est = operator_norm_estimate(identity_operator(), g, k, k, budget=20)
    assert est.value == pytest.approx(1.0, abs=1e-10)


def test_scalar_operator_norm():
    g = make(2, 1, 8)
    c = 0.5 - 2j
    est = operator_norm_estimate(scalar_operator(c), g, 0, 0, budget=10)
    assert est.value == pytest.approx(abs(c), abs=1e-10)


def test_cosine_multiplication_norm():
    g = make(1, 1, 64)
    cos = Field(g, np.cos(2 * np.pi * g.x_1d / g.L))
    est = operator_norm_estimate(multiplication_operator(cos), g, 0, 0, budget=200)
    assert 0.99 <= est.value <= 1.0 + 1e-12


def test_witness_reproduces_value():
    g = make(1, 1, 32)
    v = Field(g, 1 + np.sin(g.x_1d) ** 2)
    op = multiplication_operator(v)
    for k, l in [(0, 0), (1, 0), (2, 1), (1, 1)]:
        est = operator_norm_estimate(op, g, k, l, budget=30, seed=4)
        ratio = graph_norm(op(est.witness), l) / graph_norm(est.witness, k)
        assert ratio == pytest.approx(est.value, rel=1e-10)
        assert est.method in ("power_iteration", "random_probe")


def test_matrix_operator_agrees_with_multiplier():
    g = make(1, 1, 16)
    op_dense = matrix_operator(g, g.laplacian_matrix)
    op_diag = multiplier_operator(g.laplacian())
    f = random_bandlimited_state(g, 4, 1)
    np.testing.assert_allclose(op_dense(f).values, apply_multiplier(g.laplacian(), f).values,
                               atol=1e-12)
    assert operator_norm_estimate(op_dense, g, 1, 0, 20).value == pytest.approx(
        operator_norm_estimate(op_diag, g, 1, 0, 20).value, rel=1e-10)


@given(grids, st.integers(0, 1000), st.integers(0, 2))
def test_estimate_never_exceeds_symbol_sup(shape, seed, k):
    g = make(*shape)
    rng = np.random.default_rng(seed)
    mult = g.laplacian()
    mult = type(mult)(g, rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape))
    op = multiplier_operator(mult)
    true = mult.sup()  # exact norm of a multiplier in every (k, k) norm
    est = operator_norm_estimate(op, g, k, k, budget=10, seed=seed, power_steps=20)
    assert est.value <= true * (1 + 1e-12)


# ---------------------------------------------------------------- equivalence constants

def test_interpolation_constant_values():
    assert interpolation_constant(1) == 1.0
    assert interpolation_constant(2) == 2.0
    assert interpolation_constant(3) == 5.0
    with pytest.raises(ValueError):
        interpolation_constant(0)


def test_equivalence_m0():
    r = equivalence_constants(make(1, 1, 32), 0, 50)
    assert r.c_low == pytest.approx(1.0, rel=1e-14)
    assert r.c_high == pytest.approx(1.0, rel=1e-14)


def test_constant_probe_ratio_is_one():
    g = make(1, 1, 32)
    f = g.constant(1.0)
    for m in range(1, 4):
        assert graph_norm(f, m) / sobolev_norm(f, 2 * m) == pytest.approx(1.0, rel=1e-13)


def test_equivalence_m2_1d():
    r = equivalence_constants(make(1, 1, 32), 2, 500)
    assert 0 < r.c_low <= r.c_high < np.inf
    assert r.interpolation_high <= r.interpolation_bound
    assert r.interpolation_high >= 1.0
    with pytest.raises(ValueError):
        equivalence_constants(make(1, 1, 32), 2, 0)


def test_plane_wave_interpolation_ratio():
    g = make(1, 1, 32)
    f = plane_wave(g, [1], space=FREQUENCY)
    pw = laplacian_power_norms(f, 2)
    assert np.sum(pw) / (pw[0] + pw[2]) == pytest.approx(1.5, rel=1e-13)
