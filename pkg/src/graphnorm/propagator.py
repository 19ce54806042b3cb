"""Stepwise static approximation of the evolution system ``du/dt = (A + B(t)) u``.

With ``A = i Delta`` and ``B(t) = -i V(t)`` every frozen generator is
``-i H_i`` with ``H_i = -Delta + V(t_i)``.  On each subinterval of an
equidistant partition of ``[0, T]`` the potential is held at the left node
and the static group ``exp(-i H_i dt)`` is applied, either by Strang
splitting or exactly through a dense Hermitian eigendecomposition.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from .grid import Field, Grid, GridError, random_bandlimited_state, to_position
from .norms import (
    _graph_weight,
    graph_norm,
    laplacian_power_norms,
    matrix_operator,
    operator_norm_estimate,
    sobolev_norm,
)
from .potentials import System, TimePotential

__all__ = [
    "SPLIT_STEP",
    "DENSE_EIGEN",
    "DENSE_CAP",
    "Partition",
    "PropagatorConfig",
    "NormTrace",
    "CauchyReport",
    "GrowthFit",
    "KmReport",
    "SingularGeneratorError",
    "floor_node",
    "frozen_step",
    "propagate",
    "cauchy_defect",
    "norm_trace",
    "growth_fit",
    "km_constants",
]

SPLIT_STEP = "split_step"
DENSE_EIGEN = "dense_eigen"
DENSE_CAP = 4096
_NODE_TOL = 1e-12


class SingularGeneratorError(ArithmeticError):
    """The shifted generator is (numerically) singular; increase the shift."""


@dataclass(frozen=True)
class Partition:
    T: float
    k: int

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError("horizon T must be positive")
        if self.k < 1:
            raise ValueError("partition needs k >= 1 subintervals")

    def node(self, i: int) -> float:
        return self.T if i == self.k else i * self.T / self.k

    @property
    def nodes(self) -> np.ndarray:
        return np.array([self.node(i) for i in range(self.k + 1)])

    def index(self, s: float) -> int:
        """Subinterval containing ``s``; ``T`` belongs to the last one."""
        if s < -_NODE_TOL * self.T or s > self.T * (1 + _NODE_TOL):
            raise ValueError(f"time {s} outside [0, {self.T}]")
        i = int(np.floor(s * self.k / self.T + _NODE_TOL))
        return min(max(i, 0), self.k - 1)


def floor_node(s: float, p: Partition) -> float:
    """Largest partition node ``<= s`` (``t_{k-1}`` for ``s = T``)."""
    return p.node(p.index(s))


@dataclass(frozen=True)
class PropagatorConfig:
    partition: Partition
    step_method: str = SPLIT_STEP
    substeps: int = 16
    shift: float = 1.0
    m_track: int = 2

    def __post_init__(self):
        if self.step_method not in (SPLIT_STEP, DENSE_EIGEN):
            raise ValueError(f"unknown step method {self.step_method!r}")
        if self.substeps < 1:
            raise ValueError("substeps must be >= 1")
        if self.m_track < 0:
            raise ValueError("m_track must be >= 0")


# --------------------------------------------------------------------------
# single frozen steps


def _values(V) -> np.ndarray:
    if isinstance(V, Field):
        V = to_position(V).values
    V = np.asarray(V)
    return V.real if np.iscomplexobj(V) else V


def _hamiltonian(grid: Grid, V) -> np.ndarray:
    if grid.size > DENSE_CAP:
        raise GridError(f"dense propagation limited to {DENSE_CAP} sites, grid has {grid.size}")
    H = -np.array(grid.laplacian_matrix)
    H[np.diag_indices_from(H)] += _values(V).reshape(-1)
    return H


def _eigh(grid: Grid, V):
    return np.linalg.eigh(_hamiltonian(grid, V))


def _apply_eigen(eig, dt: float, f: Field) -> Field:
    w, Q = eig
    x = to_position(f).flat
    y = Q @ (np.exp(-1j * w * dt) * (Q.conj().T @ x))
    return f.grid.field(y)


def _split_step(grid: Grid, V, dt: float, substeps: int, f: Field) -> Field:
    h = dt / substeps
    half = np.exp(-0.5j * grid.kappa_squared * h)
    full = half * half
    eV = np.exp(-1j * _values(V) * h)
    c = np.fft.fftn(to_position(f).values, norm="ortho") * half
    for j in range(substeps):
        x = np.fft.ifftn(c, norm="ortho") * eV
        c = np.fft.fftn(x, norm="ortho") * (full if j < substeps - 1 else half)
    return Field(grid, np.fft.ifftn(c, norm="ortho"))


def frozen_step(Vt, dt: float, f: Field, method: str = SPLIT_STEP,
                substeps: int = 16) -> Field:
    """Apply ``exp(-i(-Delta + Vt) dt)`` to ``f``; the result is in position space."""
    if dt < 0:
        raise ValueError("dt must be >= 0")
    if dt == 0:
        return to_position(f)
    if method == SPLIT_STEP:
        return _split_step(f.grid, Vt, dt, substeps, f)
    if method == DENSE_EIGEN:
        return _apply_eigen(_eigh(f.grid, Vt), dt, f)
    raise ValueError(f"unknown step method {method!r}")


# --------------------------------------------------------------------------
# composition over a partition


class _Stepper:
    """Frozen steps on one partition with eigendecompositions cached per node."""

    def __init__(self, system: System, cfg: PropagatorConfig):
        self.system = system
        self.cfg = cfg
        self._eig = {}

    def node_potential(self, i: int) -> np.ndarray:
        return self.system.potential(self.cfg.partition.node(i))

    def step(self, i: int, dt: float, f: Field) -> Field:
        if dt <= 0:
            return f
        cfg = self.cfg
        if cfg.step_method == DENSE_EIGEN:
            if i not in self._eig:
                self._eig[i] = _eigh(self.system.grid, self.node_potential(i))
            return _apply_eigen(self._eig[i], dt, f)
        return _split_step(self.system.grid, self.node_potential(i), dt, cfg.substeps, f)

    def run(self, f: Field, s: float, t: float) -> Field:
        p = self.cfg.partition
        if t < s:
            raise ValueError("need s <= t")
        out = to_position(f)
        if t == s:
            return out
        for i in range(p.index(s), p.index(t) + 1):
            a, b = max(s, p.node(i)), min(t, p.node(i + 1))
            out = self.step(i, b - a, out)
        return out


def _as_system(system, grid: Grid) -> System:
    if isinstance(system, System):
        if system.grid is not grid and system.grid.spec != grid.spec:
            raise GridError("system and field live on different grids")
        return system
    if isinstance(system, TimePotential):
        return System(grid, system)
    raise TypeError("expected a System or a TimePotential")


def propagate(f: Field, s: float, t: float, system, cfg: PropagatorConfig) -> Field:
    """``U_k(t, s) f`` with the potential frozen at the left node of each subinterval.

    ``system`` is a :class:`System` (N-particle lift with optional
    interaction) or a bare :class:`TimePotential` on ``f``'s grid.
    """
    p = cfg.partition
    for x in (s, t):
        p.index(x)
    return _Stepper(_as_system(system, f.grid), cfg).run(f, s, t)


# --------------------------------------------------------------------------
# diagnostics


@dataclass
class CauchyReport:
    k_list: list
    m: int
    defects: np.ndarray
    raw_defects: np.ndarray
    per_probe: np.ndarray = dc_field(repr=False)
    per_probe_raw: np.ndarray = dc_field(repr=False)
    order: float = float("nan")
    probes: int = 0
    seed: int = 0

    @property
    def decreasing(self) -> bool:
        return bool(np.all(np.diff(self.defects) < 0))


def _loglog_order(ks, ys) -> float:
    ks, ys = np.asarray(ks, float), np.asarray(ys, float)
    ok = ys > 0
    if ok.sum() < 2:
        return float("nan")
    slope = np.polyfit(np.log(ks[ok]), np.log(ys[ok]), 1)[0]
    return float(-slope)


def cauchy_defect(system, grid: Grid, cfg: PropagatorConfig, k_list: Sequence[int], m: int,
                  probes: int = 4, seed: int = 0, cutoff: int | None = None) -> CauchyReport:
    """Self-convergence of ``U_k(T, 0)`` in the ``(m, m-1)`` graph norms.

    For each ``k`` the defect is ``max_phi ||(U_k - U_2k) phi||_(m-1) /
    ||phi||_(m)`` over unit-norm band-limited probes; ``raw_defects`` holds
    the unnormalized numerators.  The fitted order is minus the log-log slope.
    """
    if m < 1:
        raise ValueError("the (m, m-1) defect needs m >= 1")
    k_list = [int(k) for k in k_list]
    if not k_list or any(k < 1 for k in k_list):
        raise ValueError("k_list must contain positive integers")
    system = _as_system(system, grid)
    cutoff = grid.P // 4 if cutoff is None else cutoff
    T = cfg.partition.T
    phis = [random_bandlimited_state(grid, cutoff, [seed, i]) for i in range(probes)]
    needed = sorted(set(k_list) | {2 * k for k in k_list})
    finals = {}
    for k in needed:
        c = PropagatorConfig(Partition(T, k), cfg.step_method, cfg.substeps, cfg.shift,
                             cfg.m_track)
        st = _Stepper(system, c)
        finals[k] = [st.run(phi, 0.0, T) for phi in phis]
    norm_phi = np.array([graph_norm(phi, m, max_order=max(m, 4)) for phi in phis])
    raw = np.empty((probes, len(k_list)))
    for j, k in enumerate(k_list):
        for i in range(probes):
            diff = finals[k][i] - finals[2 * k][i]
            raw[i, j] = np.sum(laplacian_power_norms(diff, m - 1))
    per = raw / norm_phi[:, None]
    defects = per.max(axis=0)
    return CauchyReport(k_list, m, defects, raw.max(axis=0), per, raw,
                        _loglog_order(k_list, defects), probes, seed)


@dataclass
class NormTrace:
    times: np.ndarray
    graph_norms: np.ndarray  # (len(times), m + 1): graph order j
    sobolev_norms: np.ndarray  # (len(times), m + 1): Sobolev order 2 j
    l2: np.ndarray
    m: int = 0

    @property
    def sobolev_orders(self) -> list:
        return [2 * j for j in range(self.m + 1)]


def norm_trace(f: Field, system, cfg: PropagatorConfig,
               sample_times: Sequence[float]) -> NormTrace:
    """Propagate once from ``t = 0`` recording norms at ``sample_times``."""
    times = np.asarray(sample_times, dtype=float)
    if times.size and np.any(np.diff(times) < 0):
        raise ValueError("sample_times must be sorted")
    for t in times:
        cfg.partition.index(float(t))
    system = _as_system(system, f.grid)
    st = _Stepper(system, cfg)
    m = cfg.m_track
    g = np.empty((times.size, m + 1))
    s = np.empty((times.size, m + 1))
    l2 = np.empty(times.size)
    cur, now = to_position(f), 0.0
    for i, t in enumerate(times):
        if t > now:
            cur = st.run(cur, now, float(t))
            now = float(t)
        pw = laplacian_power_norms(cur, m)
        g[i] = np.cumsum(pw)
        s[i] = [sobolev_norm(cur, 2 * j) for j in range(m + 1)]
        l2[i] = pw[0]
    return NormTrace(times, g, s, l2, m)


@dataclass
class GrowthFit:
    C_prime: float
    rate: float
    intercept: float
    samples: int


def growth_fit(trace: NormTrace, m: int) -> GrowthFit:
    """Fit ``log ||u(t)||_(m) ~ log C' + rate * t``.

    ``rate`` is the least-squares slope; ``C_prime`` is the smallest
    intercept making ``C' exp(rate t)`` an upper envelope of the samples,
    ``intercept`` the least-squares one.
    """
    if trace.times.size < 3:
        raise ValueError("growth fit needs at least 3 samples")
    if not 0 <= m <= trace.m:
        raise ValueError(f"order {m} not tracked (m_track = {trace.m})")
    y = trace.graph_norms[:, m]
    if np.any(y <= 0) or not np.all(np.isfinite(y)):
        raise ValueError("graph norms must be positive and finite")
    t, ly = trace.times, np.log(y)
    A = np.column_stack([t, np.ones_like(t)])
    (rate, b), *_ = np.linalg.lstsq(A, ly, rcond=None)
    env = float(np.max(ly - rate * t))
    return GrowthFit(float(np.exp(env)), float(rate), float(np.exp(b)), int(t.size))


# --------------------------------------------------------------------------
# K_m(t', t) = G(t')^m G(t)^(-m) - I for the shifted generator G = -i(-Delta + V) - shift


@dataclass
class KmReport:
    m: int
    shift: float
    pairs: list  # (t, t2, ||K_m||)
    slope: float
    residual: float
    C_m: float
    C_m_upper: float
    factorization_error: float
    time_independent: bool
    seed: int = 0


def _shifted_generator(system: System, t: float, shift: float) -> np.ndarray:
    H = _hamiltonian(system.grid, system.potential(t))
    return -1j * H - shift * np.eye(H.shape[0])


def _km_matrix_parts(system: System, t: float, shift: float):
    w, Q = _eigh(system.grid, system.potential(t))
    mu = -1j * w - shift
    if np.min(np.abs(mu)) < 1e-12:
        raise SingularGeneratorError(f"shifted generator singular at t={t}; increase shift")
    return mu, Q


def _power(parts, k: int) -> np.ndarray:
    mu, Q = parts
    return (Q * mu ** k) @ Q.conj().T


def _multiplier_matrix(grid: Grid, symbol: np.ndarray) -> np.ndarray:
    eye = np.eye(grid.size).reshape((grid.size,) + grid.shape)
    axes = tuple(range(1, grid.d + 1))
    cols = np.fft.ifftn(symbol * np.fft.fftn(eye, axes=axes), axes=axes)
    return np.ascontiguousarray(cols.reshape(grid.size, grid.size).T)


def _time_pairs(T: float, count: int, rng, anchors: int) -> list[tuple[float, float]]:
    out = []
    for j in range(count):
        u = (j + rng.uniform()) / count
        delta = T * 10.0 ** (-3.0 * (1.0 - u)) / 2
        t = (j % anchors) * (T - delta) / max(anchors - 1, 1) if anchors > 1 else 0.0
        t = min(t, T - delta)
        out.append((float(t), float(t + delta)))
    return out


def km_constants(system, grid: Grid, m: int, shift: float = 1.0, time_pairs: int = 16,
                 probes: int = 64, seed: int = 0, anchors: int = 1,
                 horizon: float | None = None) -> KmReport:
    """Dense evaluation of ``||K_m(t', t)||`` and the constant ``C_m``.

    ``||K_m||`` is the exact spectral norm on L^2.  The slope and its
    maximal relative residual come from a least-squares fit through the
    origin of ``||K_m||`` against ``|t' - t|``.  ``C_m`` is the maximum over
    ``1 <= k <= m`` and the sampled times of
    ``||G(t')^(k-1)||_(k-1, 0) * ||G(t)^(-k)||_(0, k)``, each factor a
    witness-certified lower bound; ``C_m_upper`` replaces the sum-form norms
    by the Hilbert surrogates and a ``sqrt(k+1)`` equivalence factor.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if not shift > 0:
        raise SingularGeneratorError("shift must be positive for a skew-adjoint generator")
    system = _as_system(system, grid)
    T = system.horizon if horizon is None else horizon
    rng = np.random.default_rng([seed, 19])
    pairs = _time_pairs(T, time_pairs, rng, anchors)
    n = grid.size
    eye = np.eye(n)
    parts = {}

    def get(t):
        if t not in parts:
            parts[t] = _km_matrix_parts(system, t, shift)
        return parts[t]

    rows, fact_err = [], 0.0
    for t, t2 in pairs:
        a, b = get(t), get(t2)
        K = _power(b, m) @ _power(a, -m) - eye
        rows.append((t, t2, float(np.linalg.norm(K, 2))))
        if m == 1:
            G_inv = np.linalg.solve(_shifted_generator(system, t, shift), eye)
            K1 = _shifted_generator(system, t2, shift) @ G_inv - eye
            dV = system.potential(t2).reshape(-1) - system.potential(t).reshape(-1)
            fac = (-1j * dV)[:, None] * G_inv
            scale = max(np.linalg.norm(K1, 2), 1e-300)
            fact_err = max(fact_err, float(np.linalg.norm(K1 - fac, 2)) / scale
                           if np.any(dV) else float(np.linalg.norm(K1 - fac, 2)))
    x = np.array([t2 - t for t, t2, _ in rows])
    y = np.array([r[2] for r in rows])
    slope = float(x @ y / (x @ x))
    residual = float(np.max(np.abs(y - slope * x) / (slope * x))) if slope > 0 else 0.0

    times = sorted({t for pr in pairs for t in pr[:2]})
    C_m, C_up = 0.0, 0.0
    weights = {j: _graph_weight(grid, j) for j in range(m + 1)}
    wmat = {j: _multiplier_matrix(grid, weights[j]) for j in range(m + 1)}
    winv = {j: _multiplier_matrix(grid, 1.0 / weights[j]) for j in range(m + 1)}
    for k in range(1, m + 1):
        left, right, left_up, right_up = 0.0, 0.0, 0.0, 0.0
        for t in times:
            pk = get(t)
            Mleft = _power(pk, k - 1)
            Mright = _power(pk, -k)
            left = max(left, operator_norm_estimate(matrix_operator(grid, Mleft), grid, k - 1,
                                                    0, probes, seed=seed * 1000 + k).value)
            right = max(right, operator_norm_estimate(matrix_operator(grid, Mright), grid, 0,
                                                      k, probes, seed=seed * 1000 + k).value)
            left_up = max(left_up, float(np.linalg.norm(Mleft @ winv[k - 1], 2)))
            right_up = max(right_up, np.sqrt(k + 1) * float(np.linalg.norm(wmat[k] @ Mright, 2)))
        C_m = max(C_m, left * right)
        C_up = max(C_up, left_up * right_up)
    return KmReport(m, float(shift), rows, slope, residual, float(C_m), float(C_up),
                    float(fact_err), system.time_independent, seed)
