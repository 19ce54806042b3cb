"""Periodic lattices, unitary Fourier transforms and spectral multipliers.

The configuration space of ``N`` particles in ``n`` dimensions is sampled as
the torus ``[0, L)^(n N)`` with ``P`` points per axis.  Fields are stored as
complex arrays of shape ``(P,) * d`` in C (row-major) order, either in
position space or in frequency space.  Frequency arrays use the standard FFT
ordering, so the integer frequency of index ``j`` along an axis is
``j`` for ``j < P/2`` and ``j - P`` otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Sequence

import numpy as np

__all__ = [
    "MAX_DIMENSION",
    "GridSpec",
    "Grid",
    "Field",
    "SpectralMultiplier",
    "GridError",
    "make_grid",
    "transform",
    "to_position",
    "to_frequency",
    "apply_multiplier",
    "random_bandlimited_state",
    "bandlimit",
    "plane_wave",
]

MAX_DIMENSION = 6
POSITION = "position"
FREQUENCY = "frequency"


class GridError(ValueError):
    """Invalid grid parameters or mismatched grids."""


def _is_power_of_two(p: int) -> bool:
    return p > 0 and (p & (p - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    dim_per_particle: int
    particles: int
    points_per_axis: int
    extent: float
    max_dimension: int = MAX_DIMENSION

    def __post_init__(self):
        n, N, P = self.dim_per_particle, self.particles, self.points_per_axis
        if not 1 <= n <= 3:
            raise GridError(f"dim_per_particle must be in 1..3, got {n}")
        if N < 1:
            raise GridError(f"particles must be >= 1, got {N}")
        if n * N > self.max_dimension:
            raise GridError(
                f"total dimension {n * N} exceeds the cap {self.max_dimension}"
            )
        if P < 8 or not _is_power_of_two(P):
            raise GridError(f"points_per_axis must be a power of two >= 8, got {P}")
        if not self.extent > 0:
            raise GridError(f"extent must be positive, got {self.extent}")

    @property
    def dimension(self) -> int:
        return self.dim_per_particle * self.particles

    def one_body(self) -> "GridSpec":
        return GridSpec(self.dim_per_particle, 1, self.points_per_axis, self.extent,
                        self.max_dimension)


class Grid:
    """Immutable handle with precomputed coordinates and frequencies."""

    def __init__(self, spec: GridSpec):
        self.spec = spec
        P, L = spec.points_per_axis, spec.extent
        self.d = spec.dimension
        self.P = P
        self.L = float(L)
        self.shape = (P,) * self.d
        self.size = P ** self.d
        self.spacing = self.L / P
        self.cell_volume = self.spacing ** self.d
        ints = np.fft.fftfreq(P, d=1.0 / P).astype(np.int64)
        ints.setflags(write=False)
        self.frequency_1d = ints
        kappa = 2.0 * np.pi * ints / self.L
        kappa.setflags(write=False)
        self.kappa_1d = kappa
        x = np.arange(P) * self.spacing
        x.setflags(write=False)
        self.x_1d = x

    def __repr__(self):
        s = self.spec
        return (f"Grid(n={s.dim_per_particle}, N={s.particles}, P={s.points_per_axis}, "
                f"L={s.extent:g})")

    def _axis_view(self, arr: np.ndarray, axis: int) -> np.ndarray:
        shape = [1] * self.d
        shape[axis] = self.P
        return arr.reshape(shape)

    def kappa(self, axis: int) -> np.ndarray:
        """Wavenumbers along ``axis``, shaped for broadcasting."""
        return self._axis_view(self.kappa_1d, axis)

    def coordinate(self, axis: int) -> np.ndarray:
        return self._axis_view(self.x_1d, axis)

    def frequency(self, axis: int) -> np.ndarray:
        return self._axis_view(self.frequency_1d, axis)

    @cached_property
    def kappa_squared(self) -> np.ndarray:
        """|kappa|^2 on the full frequency lattice (the symbol of -Delta)."""
        out = np.zeros(self.shape)
        for a in range(self.d):
            out = out + self.kappa(a) ** 2
        out.setflags(write=False)
        return out

    @cached_property
    def max_abs_frequency(self) -> np.ndarray:
        """max_i |m_i| for every lattice frequency vector m."""
        out = np.zeros(self.shape, dtype=np.int64)
        for a in range(self.d):
            out = np.maximum(out, np.abs(self.frequency(a)))
        out.setflags(write=False)
        return out

    def band_mask(self, cutoff: int) -> np.ndarray:
        return self.max_abs_frequency <= cutoff

    def frequency_index(self, m: Sequence[int]) -> tuple:
        """Array index of the integer frequency vector ``m``."""
        if len(m) != self.d:
            raise GridError(f"frequency vector needs {self.d} components")
        return tuple(int(mi) % self.P for mi in m)

    def laplacian(self, power: int = 1) -> "SpectralMultiplier":
        sym = (-self.kappa_squared) ** power if power else np.ones(self.shape)
        return SpectralMultiplier(self, sym.astype(complex),
                                  "laplacian" if power == 1 else f"laplacian^{power}")

    def derivative(self, alpha: Sequence[int]) -> "SpectralMultiplier":
        """Multiplier of the partial derivative D^alpha, symbol prod (i kappa_a)^alpha_a."""
        if len(alpha) != self.d:
            raise GridError(f"multi-index needs {self.d} components")
        sym = np.ones(self.shape, dtype=complex)
        for a, k in enumerate(alpha):
            if k:
                sym = sym * (1j * self.kappa(a)) ** k
        return SpectralMultiplier(self, sym, f"D^{tuple(alpha)}")

    @cached_property
    def laplacian_matrix(self) -> np.ndarray:
        """Dense real symmetric matrix of the spectral Laplacian on flattened fields."""
        if self.size > 4096:
            raise GridError(f"dense Laplacian limited to 4096 sites, grid has {self.size}")
        eye = np.eye(self.size).reshape((self.size,) + self.shape)
        axes = tuple(range(1, self.d + 1))
        cols = np.fft.ifftn(-self.kappa_squared * np.fft.fftn(eye, axes=axes), axes=axes)
        mat = np.ascontiguousarray(cols.reshape(self.size, self.size).real.T)
        mat.setflags(write=False)
        return mat

    def field(self, values, space: str = POSITION) -> "Field":
        return Field(self, np.asarray(values).reshape(self.shape), space)

    def zeros(self, space: str = POSITION) -> "Field":
        return Field(self, np.zeros(self.shape, dtype=complex), space)

    def constant(self, c: complex = 1.0) -> "Field":
        return Field(self, np.full(self.shape, c, dtype=complex), POSITION)


@dataclass(frozen=True)
class Field:
    """Lattice function.  ``values`` has shape ``grid.shape``."""

    grid: Grid
    values: np.ndarray
    space: str = POSITION

    def __post_init__(self):
        if self.space not in (POSITION, FREQUENCY):
            raise GridError(f"unknown space tag {self.space!r}")
        if self.values.shape != self.grid.shape:
            raise GridError(
                f"field shape {self.values.shape} does not match grid {self.grid.shape}"
            )

    @property
    def flat(self) -> np.ndarray:
        """Row-major vector of length P^d."""
        return self.values.reshape(-1)

    def with_values(self, values) -> "Field":
        return Field(self.grid, np.asarray(values).reshape(self.grid.shape), self.space)

    def __add__(self, other: "Field") -> "Field":
        other = _match(self, other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        other = _match(self, other)
        return self.with_values(self.values - other.values)

    def __mul__(self, c) -> "Field":
        return self.with_values(self.values * c)

    __rmul__ = __mul__

    def __neg__(self) -> "Field":
        return self.with_values(-self.values)


@dataclass(frozen=True)
class SpectralMultiplier:
    grid: Grid
    symbol: np.ndarray
    description: str = dc_field(default="", compare=False)

    def __post_init__(self):
        if self.symbol.shape != self.grid.shape:
            raise GridError("symbol shape does not match grid")

    def __matmul__(self, other: "SpectralMultiplier") -> "SpectralMultiplier":
        if other.grid is not self.grid:
            raise GridError("multipliers live on different grids")
        return SpectralMultiplier(self.grid, self.symbol * other.symbol,
                                  f"{self.description}*{other.description}")

    def sup(self) -> float:
        return float(np.max(np.abs(self.symbol)))


def _match(f: Field, g: Field) -> Field:
    if g.grid is not f.grid:
        raise GridError("fields live on different grids")
    if g.space != f.space:
        g = transform(g)
    return g


def make_grid(spec: GridSpec) -> Grid:
    return Grid(spec)


def transform(f: Field) -> Field:
    """Unitary DFT between position and frequency space (Parseval without factors)."""
    if f.space == POSITION:
        return Field(f.grid, np.fft.fftn(f.values, norm="ortho"), FREQUENCY)
    return Field(f.grid, np.fft.ifftn(f.values, norm="ortho"), POSITION)


def to_frequency(f: Field) -> Field:
    return f if f.space == FREQUENCY else transform(f)


def to_position(f: Field) -> Field:
    return f if f.space == POSITION else transform(f)


def apply_multiplier(mult: SpectralMultiplier, f: Field) -> Field:
    if mult.grid is not f.grid:
        raise GridError("multiplier and field live on different grids")
    out = Field(f.grid, to_frequency(f).values * mult.symbol, FREQUENCY)
    return out if f.space == FREQUENCY else transform(out)


def unit_normalize(f: Field) -> Field:
    """Scale to unit continuum L^2 norm."""
    nrm = np.sqrt(np.sum(np.abs(f.values) ** 2) * f.grid.cell_volume)
    return f.with_values(f.values / nrm)


def random_bandlimited_state(grid: Grid, cutoff: int, seed, space: str = POSITION) -> Field:
    """Normalized random state with Fourier support in ``max_i |m_i| <= cutoff``.

    Coefficients are independent standard complex Gaussians drawn from
    ``numpy.random.default_rng(seed)``; ``seed`` may be an int or a sequence
    of ints (hashed by ``SeedSequence``).
    """
    if not 0 < cutoff <= grid.P // 2:
        raise GridError(f"cutoff must be in 1..{grid.P // 2}, got {cutoff}")
    rng = np.random.default_rng(seed)
    mask = grid.band_mask(cutoff)
    coef = np.zeros(grid.shape, dtype=complex)
    n = int(mask.sum())
    coef[mask] = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    f = unit_normalize(Field(grid, coef, FREQUENCY))
    return f if space == FREQUENCY else transform(f)


def bandlimit(f: Field, cutoff: int) -> Field:
    """Orthogonal projection onto frequencies with ``max_i |m_i| <= cutoff``."""
    out = Field(f.grid, np.where(f.grid.band_mask(cutoff), to_frequency(f).values, 0),
                FREQUENCY)
    if f.space == FREQUENCY:
        return out
    pos = transform(out)
    if not np.iscomplexobj(f.values):
        return pos.with_values(pos.values.real)
    return pos


def plane_wave(grid: Grid, m: Sequence[int], space: str = POSITION) -> Field:
    """Unit-norm plane wave exp(i kappa_m . x)."""
    coef = np.zeros(grid.shape, dtype=complex)
    coef[grid.frequency_index(m)] = 1.0
    f = unit_normalize(Field(grid, coef, FREQUENCY))
    return f if space == FREQUENCY else transform(f)
