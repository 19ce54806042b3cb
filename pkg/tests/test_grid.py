import numpy as np
import pytest
from hypothesis import given, strategies as st

from graphnorm.grid import (
    FREQUENCY,
    POSITION,
    Field,
    GridError,
    GridSpec,
    SpectralMultiplier,
    apply_multiplier,
    bandlimit,
    make_grid,
    plane_wave,
    random_bandlimited_state,
    to_frequency,
    transform,
)
from graphnorm.norms import l2_norm

from conftest import TWO_PI, make

grids = st.sampled_from([(1, 1, 16), (1, 1, 32), (2, 1, 8), (1, 2, 8), (3, 1, 8)])


def _inner(f, g):
    return np.vdot(f.values, g.values) * f.grid.cell_volume


# ---------------------------------------------------------------- make_grid

def test_dual_lattice_frequencies():
    g = make_grid(GridSpec(1, 1, 8, TWO_PI))
    assert sorted(g.frequency_1d.tolist()) == list(range(-4, 4))
    np.testing.assert_array_equal(np.sort(g.kappa_1d), np.arange(-4, 4))


def test_site_count():
    assert make_grid(GridSpec(3, 1, 16, 10.0)).size == 4096


def test_dimension_cap():
    with pytest.raises(GridError, match="cap"):
        GridSpec(3, 3, 16, 10.0)


@pytest.mark.parametrize("P", [6, 12, 4, 0])
def test_points_must_be_power_of_two(P):
    with pytest.raises(GridError):
        GridSpec(1, 1, P, 1.0)


@pytest.mark.parametrize("kw", [dict(n=0), dict(n=4), dict(N=0), dict(L=0.0), dict(L=-1.0)])
def test_invalid_specs(kw):
    args = dict(n=1, N=1, P=8, L=1.0) | kw
    with pytest.raises(GridError):
        GridSpec(args["n"], args["N"], args["P"], args["L"])


def test_laplacian_symbol_zero_at_origin():
    g = make(2, 1, 8, 3.0)
    sym = g.laplacian().symbol
    assert sym[0, 0] == 0
    m = (1, -2)
    np.testing.assert_allclose(sym[g.frequency_index(m)],
                               -((2 * np.pi / 3.0) ** 2) * (1 + 4), rtol=1e-15)


# ---------------------------------------------------------------- transform

def test_constant_transforms_to_delta():
    g = make(1, 1, 16)
    c = transform(g.constant(1.0)).values
    assert abs(c[0]) == pytest.approx(4.0)
    assert np.max(np.abs(c[1:])) < 1e-14


def test_plane_wave_transforms_to_delta():
    g = make(2, 1, 8)
    x = g.coordinate(0)
    f = Field(g, np.broadcast_to(np.exp(2j * np.pi * x / g.L), g.shape).copy())
    c = transform(f).values
    peak = np.unravel_index(np.argmax(np.abs(c)), c.shape)
    assert peak == g.frequency_index((1, 0))
    c[peak] = 0
    assert np.max(np.abs(c)) < 1e-13


@given(grids, st.integers(0, 2**32 - 1))
def test_parseval_and_round_trip(shape, seed):
    g = make(*shape)
    rng = np.random.default_rng(seed)
    f = Field(g, rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape))
    F = transform(f)
    assert F.space == FREQUENCY
    assert l2_norm(F) == pytest.approx(l2_norm(f), rel=1e-12)
    back = transform(F)
    assert back.space == POSITION
    assert np.max(np.abs(back.values - f.values)) <= 1e-12 * np.max(np.abs(f.values))


# ---------------------------------------------------------------- multipliers

def test_laplacian_eigenfunction():
    g = make(1, 1, 16)
    f = plane_wave(g, [1])
    out = apply_multiplier(g.laplacian(), f)
    assert out.space == POSITION
    np.testing.assert_allclose(out.values, -f.values, atol=1e-14)


def test_laplacian_kills_constants():
    g = make(2, 1, 8)
    out = apply_multiplier(g.laplacian(), g.constant(3.0))
    assert np.max(np.abs(out.values)) < 1e-13


def test_multiplier_keeps_space_tag():
    g = make(1, 1, 16)
    f = random_bandlimited_state(g, 4, 0, space=FREQUENCY)
    assert apply_multiplier(g.laplacian(), f).space == FREQUENCY


@given(grids, st.integers(0, 1000), st.integers(1, 3))
def test_multiplier_composition(shape, seed, j):
    g = make(*shape)
    f = random_bandlimited_state(g, g.P // 4, seed)
    lap = g.laplacian()
    once = f
    for _ in range(j + 1):
        once = apply_multiplier(lap, once)
    composed = apply_multiplier(g.laplacian(j + 1), f)
    scale = np.max(np.abs(composed.values))
    assert np.max(np.abs(once.values - composed.values)) <= 1e-12 * scale
    # commutation with powers
    a = apply_multiplier(lap, apply_multiplier(g.laplacian(j), f))
    b = apply_multiplier(g.laplacian(j), apply_multiplier(lap, f))
    assert np.max(np.abs(a.values - b.values)) <= 1e-12 * np.max(np.abs(a.values))


@given(grids, st.integers(0, 1000))
def test_laplacian_hermitian(shape, seed):
    g = make(*shape)
    f = random_bandlimited_state(g, g.P // 4, [seed, 0])
    h = random_bandlimited_state(g, g.P // 4, [seed, 1])
    lap = g.laplacian()
    lhs = _inner(apply_multiplier(lap, f), h)
    rhs = _inner(f, apply_multiplier(lap, h))
    assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), 1.0)


def test_laplacian_is_diagonal_in_frequency():
    g = make(1, 1, 16)
    f = random_bandlimited_state(g, 4, 3, space=FREQUENCY)
    out = apply_multiplier(g.laplacian(), f)
    np.testing.assert_array_equal(out.values, f.values * g.laplacian().symbol)


def test_dense_laplacian_matches_multiplier():
    g = make(2, 1, 8)
    f = random_bandlimited_state(g, 2, 1)
    dense = g.laplacian_matrix @ f.flat
    spectral = apply_multiplier(g.laplacian(), f).flat
    np.testing.assert_allclose(dense, spectral, atol=1e-12)
    np.testing.assert_allclose(g.laplacian_matrix, g.laplacian_matrix.T, atol=1e-12)


def test_spec_mismatch_is_an_error():
    a, b = make(1, 1, 16), make(1, 1, 16)
    with pytest.raises(GridError):
        apply_multiplier(a.laplacian(), b.constant(1.0))
    with pytest.raises(GridError):
        Field(a, np.zeros(8))
    with pytest.raises(GridError):
        SpectralMultiplier(a, np.zeros(8))


# ---------------------------------------------------------------- probe states

def test_random_state_deterministic():
    g = make(1, 1, 32)
    a = random_bandlimited_state(g, 1, 7)
    b = random_bandlimited_state(g, 1, 7)
    np.testing.assert_array_equal(a.values, b.values)
    c = random_bandlimited_state(g, 1, 8)
    assert not np.array_equal(a.values, c.values)


@given(grids, st.integers(0, 10**6), st.data())
def test_random_state_normalized_and_supported(shape, seed, data):
    g = make(*shape)
    cutoff = data.draw(st.integers(1, g.P // 2))
    f = random_bandlimited_state(g, cutoff, seed)
    assert l2_norm(f) == pytest.approx(1.0, abs=1e-12)
    c = to_frequency(f).values
    assert np.max(np.abs(c[~g.band_mask(cutoff)]), initial=0.0) < 1e-12


@pytest.mark.parametrize("cutoff", [0, -1, 9])
def test_random_state_cutoff_range(cutoff):
    with pytest.raises(GridError):
        random_bandlimited_state(make(1, 1, 16), cutoff, 0)


@pytest.mark.parametrize("shape", [(1, 1, 16), (2, 1, 16), (3, 1, 8)])
def test_laplacian_bound_from_frequency_support(shape):
    """||Delta f|| <= (2 pi * 2 sqrt(d) / L)^2 ||f|| for cutoff 2 (symbol maximum oracle)."""
    g = make(*shape, L=5.0)
    f = random_bandlimited_state(g, 2, 11)
    bound = (2 * np.pi * 2 * np.sqrt(g.d) / g.L) ** 2
    # independent oracle: the largest symbol value on the support
    support = g.band_mask(2)
    sym_max = np.max(g.kappa_squared[support])
    assert sym_max == pytest.approx(bound, rel=1e-12)
    lap_f = apply_multiplier(g.laplacian(), f)
    assert l2_norm(lap_f) <= bound * l2_norm(f) * (1 + 1e-12)
    # representable: Delta^j f stays inside the band
    for j in range(1, 4):
        c = to_frequency(apply_multiplier(g.laplacian(j), f)).values
        assert np.max(np.abs(c[~support])) <= 1e-12 * np.max(np.abs(c))


def test_bandlimit_projection():
    g = make(1, 1, 16)
    f = Field(g, np.cos(3 * g.x_1d) + np.cos(6 * g.x_1d))
    out = bandlimit(f, 4)
    assert out.values.dtype == float
    np.testing.assert_allclose(out.values, np.cos(3 * g.x_1d), atol=1e-14)
