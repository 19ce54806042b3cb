"""Graph norms of iterated Laplacians, Sobolev norms and operator-norm estimates.

All norms use the continuum normalization: a lattice sum of ``|f|^2`` is
weighted by the cell volume ``(L/P)^d``, so that the constant function 1 on
``[0, 2 pi)`` has norm ``sqrt(2 pi)``.  With ``A = i Delta`` the graph norm of
order ``m`` is ``sum_{j<=m} ||Delta^j f||_2`` (the sum form).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from itertools import product
from typing import Callable, Optional

import numpy as np

from .grid import (
    FREQUENCY,
    Field,
    Grid,
    random_bandlimited_state,
    to_frequency,
    to_position,
    transform,
)

__all__ = [
    "MAX_GRAPH_ORDER",
    "Operator",
    "OperatorNormEstimate",
    "EquivalenceReport",
    "l2_norm",
    "sup_norm",
    "laplacian_power_norms",
    "graph_norm",
    "pythagorean_graph_norm",
    "sobolev_norm",
    "sobolev_weight",
    "multi_indices",
    "mixed_derivative_identity",
    "operator_norm_estimate",
    "identity_operator",
    "scalar_operator",
    "multiplication_operator",
    "multiplier_operator",
    "matrix_operator",
    "interpolation_constant",
    "equivalence_constants",
]

MAX_GRAPH_ORDER = 4


def l2_norm(f: Field) -> float:
    return float(np.sqrt(np.sum(np.abs(f.values) ** 2) * f.grid.cell_volume))


def sup_norm(f: Field) -> float:
    return float(np.max(np.abs(to_position(f).values)))


def _check_order(m: int, cap: int):
    if m < 0:
        raise ValueError(f"graph-norm order must be >= 0, got {m}")
    if m > cap:
        raise ValueError(f"graph-norm order {m} exceeds the cap {cap}")


def laplacian_power_norms(f: Field, m: int) -> np.ndarray:
    """``[||f||, ||Delta f||, ..., ||Delta^m f||]``."""
    c2 = np.abs(to_frequency(f).values) ** 2
    lam2 = f.grid.kappa_squared ** 2
    out = np.empty(m + 1)
    w = np.ones_like(lam2)
    for j in range(m + 1):
        out[j] = np.sum(w * c2)
        w = w * lam2
    return np.sqrt(out * f.grid.cell_volume)


def graph_norm(f: Field, m: int, max_order: int = MAX_GRAPH_ORDER) -> float:
    _check_order(m, max_order)
    return float(np.sum(laplacian_power_norms(f, m)))


def pythagorean_graph_norm(f: Field, m: int) -> float:
    """``(sum_j ||Delta^j f||^2)^(1/2)``, the Hilbert-space form of the graph norm."""
    return float(np.sqrt(np.sum(laplacian_power_norms(f, m) ** 2)))


def multi_indices(d: int, max_order: int, exact: bool = False):
    """All multi-indices alpha in N^d with |alpha| <= max_order (or == if ``exact``)."""
    for alpha in product(range(max_order + 1), repeat=d):
        s = sum(alpha)
        if (s == max_order) if exact else (s <= max_order):
            yield alpha


def sobolev_weight(grid: Grid, s: int) -> np.ndarray:
    """Fourier weight ``sum_{|alpha|<=s} prod_a kappa_a^(2 alpha_a)``.

    Built from complete homogeneous symmetric polynomials in the variables
    ``kappa_a^2``, one axis at a time.
    """
    cache = grid.__dict__.setdefault("_sobolev_weights", {})
    if s in cache:
        return cache[s]
    # h[j] = complete homogeneous polynomial of degree j in the axes seen so far
    h = [np.ones((1,) * grid.d)] + [np.zeros((1,) * grid.d) for _ in range(s)]
    for a in range(grid.d):
        y = grid.kappa(a) ** 2
        powers = [np.ones_like(y)]
        for _ in range(s):
            powers.append(powers[-1] * y)
        h = [sum(h[j - i] * powers[i] for i in range(j + 1)) for j in range(s + 1)]
    w = np.broadcast_to(sum(h), grid.shape).copy()
    w.setflags(write=False)
    cache[s] = w
    return w


def sobolev_norm(f: Field, s: int) -> float:
    """``(sum_{|alpha|<=s} ||D^alpha f||_2^2)^(1/2)`` via exact Fourier weights."""
    if s < 0:
        raise ValueError("Sobolev order must be >= 0")
    c2 = np.abs(to_frequency(f).values) ** 2
    return float(np.sqrt(np.sum(sobolev_weight(f.grid, s) * c2) * f.grid.cell_volume))


def mixed_derivative_identity(f: Field) -> tuple[float, float]:
    """Return ``(sum_{i,j} ||d_i d_j f||^2, ||Delta f||^2)``.

    The left side sums over ordered pairs of axes, so each mixed derivative
    counts twice; each derivative is applied as its own multiplier.
    """
    g = f.grid
    coef = to_frequency(f).values
    lhs = 0.0
    for i in range(g.d):
        for j in range(g.d):
            dij = -g.kappa(i) * g.kappa(j) * coef
            lhs += float(np.sum(np.abs(dij) ** 2))
    rhs = float(np.sum(np.abs(g.kappa_squared * coef) ** 2))
    return lhs * g.cell_volume, rhs * g.cell_volume


# --------------------------------------------------------------------------
# operators and operator norms between graph-norm spaces


@dataclass(frozen=True)
class Operator:
    """Linear map on fields of one grid, with an optional adjoint.

    The adjoint is taken with respect to the L^2 inner product; it enables the
    power-iteration refinement in :func:`operator_norm_estimate`.
    """

    apply: Callable[[Field], Field]
    adjoint: Optional[Callable[[Field], Field]] = None
    description: str = ""

    def __call__(self, f: Field) -> Field:
        return self.apply(f)


def identity_operator() -> Operator:
    return Operator(lambda f: f, lambda f: f, "identity")


def scalar_operator(c: complex) -> Operator:
    return Operator(lambda f: f * c, lambda f: f * np.conj(c), f"scalar {c}")


def multiplication_operator(v: Field | np.ndarray,
                            description: str = "multiplication") -> Operator:
    vals = v.values if isinstance(v, Field) else np.asarray(v)
    if isinstance(v, Field):
        if v.space == FREQUENCY:
            vals = transform(v).values
    conj = np.conj(vals)

    def fwd(f: Field) -> Field:
        p = to_position(f)
        return p.with_values(vals * p.values)

    def adj(f: Field) -> Field:
        p = to_position(f)
        return p.with_values(conj * p.values)

    return Operator(fwd, adj, description)


def multiplier_operator(mult) -> Operator:
    sym = mult.symbol
    conj = np.conj(sym)

    def fwd(f: Field) -> Field:
        return Field(f.grid, to_frequency(f).values * sym, FREQUENCY)

    def adj(f: Field) -> Field:
        return Field(f.grid, to_frequency(f).values * conj, FREQUENCY)

    return Operator(fwd, adj, mult.description or "multiplier")


def matrix_operator(grid: Grid, mat: np.ndarray, description: str = "matrix") -> Operator:
    """Dense matrix acting on row-major flattened position values."""
    mat_h = mat.conj().T

    def fwd(f: Field) -> Field:
        return grid.field(mat @ to_position(f).flat)

    def adj(f: Field) -> Field:
        return grid.field(mat_h @ to_position(f).flat)

    return Operator(fwd, adj, description)


@dataclass
class OperatorNormEstimate:
    value: float
    probes: int
    method: str
    witness: Field = dc_field(repr=False)
    k: int = 0
    l: int = 0


def _graph_weight(grid: Grid, k: int) -> np.ndarray:
    """``sqrt(sum_{j<=k} |kappa|^(4 j))``, the Hilbert surrogate of the order-k graph norm."""
    lam2 = grid.kappa_squared ** 2
    w = np.zeros(grid.shape)
    t = np.ones(grid.shape)
    for _ in range(k + 1):
        w += t
        t = t * lam2
    return np.sqrt(w)


def _ratio(T: Operator, x: Field, k: int, l: int) -> float:
    den = graph_norm(x, k, max_order=max(k, MAX_GRAPH_ORDER))
    if den == 0.0:
        return 0.0
    return graph_norm(T(x), l, max_order=max(l, MAX_GRAPH_ORDER)) / den


def _structured_probes(grid: Grid, cutoff: int) -> list:
    """The constant field and single plane waves along the first axis and the diagonal."""
    out = [grid.constant(1.0)]
    for mm in range(1, cutoff + 1):
        for vec in ([mm] + [0] * (grid.d - 1), [mm] * grid.d):
            coef = np.zeros(grid.shape, dtype=complex)
            coef[grid.frequency_index(vec)] = 1.0
            out.append(Field(grid, coef, FREQUENCY))
            if grid.d == 1:
                break
    return out


def operator_norm_estimate(T: Operator, grid: Grid, k: int, l: int, budget: int = 200,
                           seed=0, cutoff: int | None = None,
                           power_steps: int | None = None,
                           tol: float = 1e-13) -> OperatorNormEstimate:
    """Certified lower bound on ``||T||_(k,l)``.

    The constant field, single plane waves up to the cutoff and ``budget``
    random band-limited probes are scored by the exact sum-form ratio.  When ``T`` has an adjoint, the best probe seeds a power iteration
    on ``S^* S`` with ``S = W_l T W_k^{-1}``, where ``W_k`` is the diagonal
    Hilbert surrogate of the order-``k`` graph norm; every iterate is scored
    again in the sum form and the best one is kept as the witness.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    cutoff = grid.P // 4 if cutoff is None else cutoff
    best_val, best = -1.0, None
    probes = _structured_probes(grid, cutoff)
    probes += [random_bandlimited_state(grid, cutoff, [seed, i]) for i in range(budget)]
    for i, x in enumerate(probes):
        try:
            r = _ratio(T, x, k, l)
        except Exception as exc:  # noqa: BLE001
            raise RuntimeError(f"operator failed on probe {i}: {exc}") from exc
        if r > best_val:
            best_val, best = r, x
    method = "random_probe"
    if T.adjoint is not None:
        steps = budget if power_steps is None else power_steps
        wk, wl = _graph_weight(grid, k), _graph_weight(grid, l)
        y = to_frequency(best).values * wk
        y /= np.linalg.norm(y)
        prev = -1.0
        for _ in range(steps):
            x = Field(grid, y / wk, FREQUENCY)
            tx = T(x)
            z = to_frequency(tx).values * wl
            r = graph_norm(tx, l, max(l, MAX_GRAPH_ORDER)) / graph_norm(
                x, k, max(k, MAX_GRAPH_ORDER))
            if r > best_val:
                best_val, best, method = r, x, "power_iteration"
            u = T.adjoint(Field(grid, z * wl, FREQUENCY))
            y = to_frequency(u).values / wk
            nrm = np.linalg.norm(y)
            if nrm == 0.0:
                break
            rayleigh = np.linalg.norm(z)
            y /= nrm
            if prev > 0 and abs(rayleigh - prev) <= tol * prev:
                break
            prev = rayleigh
    return OperatorNormEstimate(float(best_val), len(probes), method, best, k, l)


# --------------------------------------------------------------------------
# norm equivalences


@lru_cache(maxsize=None)
def interpolation_constant(m: int) -> float:
    """Constant C with ``||x||_(m) <= C (||x|| + ||A^m x||)`` for contraction generators.

    The interpolation chain gives ``||A^j x|| <= 2^(j(m-j)) ||x||^(1-j/m)
    ||A^m x||^(j/m)``; weighted AM-GM then bounds the coefficients of
    ``||x||`` and ``||A^m x||`` by the same sum.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    return 1.0 + sum(2.0 ** (j * (m - j)) * (m - j) / m for j in range(1, m))


@dataclass
class EquivalenceReport:
    m: int
    samples: int
    c_low: float
    c_high: float
    interpolation_low: float
    interpolation_high: float
    interpolation_bound: float
    pythagorean_low: float
    pythagorean_high: float


def _equivalence_probes(grid: Grid, samples: int, seed, cutoff: int):
    yield from _structured_probes(grid, cutoff)
    for i in range(samples):
        yield random_bandlimited_state(grid, cutoff, [seed, i], space=FREQUENCY)


def equivalence_constants(grid: Grid, m: int, samples: int, seed=0,
                          cutoff: int | None = None) -> EquivalenceReport:
    """Empirical min/max of graph_norm(f, m) / sobolev_norm(f, 2m) and of the
    ratio ``||f||_(m) / (||f|| + ||Delta^m f||)``.

    The probe set is the constant field, single plane waves up to the cutoff,
    and ``samples`` random band-limited states.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    cutoff = grid.P // 4 if cutoff is None else cutoff
    r_sob, r_l7, r_py = [], [], []
    for f in _equivalence_probes(grid, samples, seed, cutoff):
        pw = laplacian_power_norms(f, m)
        g = float(np.sum(pw))
        r_sob.append(g / sobolev_norm(f, 2 * m))
        r_py.append(g / float(np.sqrt(np.sum(pw ** 2))))
        r_l7.append(g / (pw[0] + pw[m]) if m >= 1 else 1.0)
    bound = interpolation_constant(m) if m >= 1 else 1.0
    return EquivalenceReport(m, len(r_sob), min(r_sob), max(r_sob), min(r_l7), max(r_l7),
                             bound, min(r_py), max(r_py))

