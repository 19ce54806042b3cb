"""Time-dependent scalar potentials and their Kato-type norms.

A :class:`TimePotential` is ``v(x, t) = base(x) + envelope(t) * drive(x)``
for one particle.  :class:`System` lifts it (and an optional pair
interaction) to the ``N``-particle grid, where it acts as the multiplication
operator of the perturbation ``B(t) = -i v(t)``.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from ._search import golden_section_maximize, golden_section_minimize
from .grid import (
    FREQUENCY,
    Field,
    Grid,
    GridError,
    GridSpec,
    random_bandlimited_state,
    to_frequency,
    transform,
)
from .norms import (
    laplacian_power_norms,
    l2_norm,
    multi_indices,
    multiplication_operator,
    operator_norm_estimate,
)

__all__ = [
    "KINDS",
    "ENVELOPES",
    "PotentialSpec",
    "Envelope",
    "TimePotential",
    "System",
    "KatoDecomposition",
    "ABReport",
    "ABCertificate",
    "LipschitzReport",
    "AliasingError",
    "evaluate",
    "kato_split",
    "kato_norm",
    "kato_norm_dense",
    "sobolev_kato_norm",
    "lift_one_body",
    "lift_two_body",
    "ab_ratio",
    "ab_constants",
    "certify_ab",
    "lipschitz_constant",
    "write_table",
    "read_table",
]

KINDS = ("softened_coulomb", "gaussian_well", "cosine", "constant", "custom_table")
ENVELOPES = ("constant", "linear_ramp", "sinusoid")

_DEFAULTS = {
    "softened_coulomb": {"epsilon": None, "charge": -1.0},
    "gaussian_well": {"depth": 1.0, "width": 1.0},
    "cosine": {"amplitude": 1.0, "mode": 1},
    "constant": {"value": 0.0},
    "custom_table": {"path": None},
}


class AliasingError(ValueError):
    """Spectral content above the alias-free cutoff."""


@dataclass(frozen=True)
class PotentialSpec:
    kind: str
    params: Mapping = dc_field(default_factory=dict)
    center: Sequence[float] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown potential kind {self.kind!r}; known: {KINDS}")
        unknown = set(self.params) - set(_DEFAULTS[self.kind])
        if unknown:
            raise ValueError(f"unknown parameters for {self.kind}: {sorted(unknown)}")
        merged = {**_DEFAULTS[self.kind], **self.params}
        object.__setattr__(self, "params", merged)
        if self.kind == "softened_coulomb":
            eps = merged["epsilon"]
            if eps is None or not eps > 0:
                raise ValueError("softened_coulomb requires epsilon > 0")
        if self.kind == "gaussian_well" and not merged["width"] > 0:
            raise ValueError("gaussian_well requires width > 0")
        if self.kind == "custom_table" and not merged["path"]:
            raise ValueError("custom_table requires a path")

    @classmethod
    def softened_coulomb(cls, epsilon, charge=-1.0, center=None):
        return cls("softened_coulomb", {"epsilon": epsilon, "charge": charge}, center)

    @classmethod
    def gaussian_well(cls, depth=1.0, width=1.0, center=None):
        return cls("gaussian_well", {"depth": depth, "width": width}, center)

    @classmethod
    def cosine(cls, amplitude=1.0, mode=1, center=None):
        return cls("cosine", {"amplitude": amplitude, "mode": mode}, center)

    @classmethod
    def constant(cls, value):
        return cls("constant", {"value": value})

    def to_dict(self) -> dict:
        out = {"kind": self.kind, **self.params}
        if self.center is not None:
            out["center"] = list(self.center)
        return out


def _center(p: PotentialSpec, d: int) -> np.ndarray:
    if p.center is None:
        return np.zeros(d)
    c = np.atleast_1d(np.asarray(p.center, dtype=float))
    if c.size == 1:
        return np.full(d, c[0])
    if c.size != d:
        raise GridError(f"center has {c.size} components, grid has {d}")
    return c


def _min_image_r2(grid: Grid, center: np.ndarray) -> np.ndarray:
    r2 = np.zeros(grid.shape)
    for a in range(grid.d):
        dx = grid.coordinate(a) - center[a]
        dx = dx - grid.L * np.round(dx / grid.L)
        r2 = r2 + dx ** 2
    return r2


def evaluate(p: PotentialSpec, grid: Grid) -> Field:
    """Sample ``p`` at every lattice site; distances use the minimum image."""
    prm = p.params
    c = _center(p, grid.d)
    if p.kind == "softened_coulomb":
        vals = prm["charge"] / np.sqrt(_min_image_r2(grid, c) + prm["epsilon"] ** 2)
    elif p.kind == "gaussian_well":
        vals = -prm["depth"] * np.exp(-_min_image_r2(grid, c) / prm["width"] ** 2)
    elif p.kind == "cosine":
        mode = np.atleast_1d(np.asarray(prm["mode"], dtype=float))
        if mode.size == 1:
            mode = np.concatenate([mode, np.zeros(grid.d - 1)])
        if mode.size != grid.d:
            raise GridError(f"cosine mode has {mode.size} components, grid has {grid.d}")
        phase = np.zeros(grid.shape)
        for a in range(grid.d):
            phase = phase + 2 * np.pi * mode[a] * (grid.coordinate(a) - c[a]) / grid.L
        vals = prm["amplitude"] * np.cos(phase)
    elif p.kind == "constant":
        vals = np.full(grid.shape, float(prm["value"]))
    else:
        vals = read_table(prm["path"])
        if vals.shape != grid.shape:
            raise GridError(f"table shape {vals.shape} does not match grid {grid.shape}")
    vals = np.broadcast_to(vals, grid.shape).astype(float)
    if not np.all(np.isfinite(vals)):
        raise ValueError(f"potential {p.kind} produced non-finite values")
    return Field(grid, vals)


# --------------------------------------------------------------------------
# time dependence


@dataclass(frozen=True)
class Envelope:
    kind: str = "constant"
    value: float = 1.0
    rate: float = 0.0
    amplitude: float = 0.0
    frequency: float = 0.0

    def __post_init__(self):
        if self.kind not in ENVELOPES:
            raise ValueError(f"unknown envelope {self.kind!r}; known: {ENVELOPES}")

    @classmethod
    def linear_ramp(cls, rate):
        return cls("linear_ramp", rate=rate)

    @classmethod
    def sinusoid(cls, amplitude, frequency):
        return cls("sinusoid", amplitude=amplitude, frequency=frequency)

    def __call__(self, t: float) -> float:
        if self.kind == "constant":
            return self.value
        if self.kind == "linear_ramp":
            return self.rate * t
        return self.amplitude * np.sin(self.frequency * t)

    def lipschitz(self) -> float:
        if self.kind == "constant":
            return 0.0
        if self.kind == "linear_ramp":
            return abs(self.rate)
        return abs(self.amplitude * self.frequency)

    def to_dict(self) -> dict:
        keys = {"constant": ("value",), "linear_ramp": ("rate",),
                "sinusoid": ("amplitude", "frequency")}[self.kind]
        return {"kind": self.kind, **{k: getattr(self, k) for k in keys}}


@dataclass(frozen=True)
class TimePotential:
    base: PotentialSpec
    drive: PotentialSpec | None = None
    envelope: Envelope = Envelope()
    horizon: float = 1.0

    def __post_init__(self):
        if not self.horizon > 0:
            raise ValueError("horizon must be positive")

    @property
    def time_independent(self) -> bool:
        return self.drive is None or self.envelope.lipschitz() == 0.0

    def evaluate(self, grid: Grid, t: float) -> Field:
        v = evaluate(self.base, grid).values
        if self.drive is not None:
            v = v + self.envelope(t) * evaluate(self.drive, grid).values
        return Field(grid, v)


class System:
    """One-body potential (plus optional pair interaction) lifted to ``grid``."""

    def __init__(self, grid: Grid, potential: TimePotential,
                 interaction: PotentialSpec | None = None):
        self.grid = grid
        self.potential_spec = potential
        self.interaction = interaction
        N = grid.spec.particles
        one = grid if N == 1 else Grid(grid.spec.one_body())
        self.one_body_grid = one
        self.envelope = potential.envelope
        self.horizon = potential.horizon
        self.base = lift_one_body(evaluate(potential.base, one), N, grid).values
        if potential.drive is not None:
            self.drive = lift_one_body(evaluate(potential.drive, one), N, grid).values
        else:
            self.drive = np.zeros(grid.shape)
        self.static = self.base
        if interaction is not None:
            self.static = self.base + lift_two_body(evaluate(interaction, one), N,
                                                    grid).values
        for arr in (self.base, self.drive, self.static):
            arr.setflags(write=False)

    @property
    def time_independent(self) -> bool:
        return self.potential_spec.time_independent

    def potential(self, t: float) -> np.ndarray:
        return self.static + self.envelope(t) * self.drive

    def potential_field(self, t: float) -> Field:
        return Field(self.grid, self.potential(t))


# --------------------------------------------------------------------------
# N-particle lifting


def _nbody_grid(v: Field, N: int, target: Grid | None) -> Grid:
    spec = v.grid.spec
    if spec.particles != 1:
        raise GridError("lifting expects a one-particle field")
    want = GridSpec(spec.dim_per_particle, N, spec.points_per_axis, spec.extent,
                    spec.max_dimension)
    if target is None:
        return v.grid if N == 1 else Grid(want)
    if target.spec != want:
        raise GridError(f"target grid {target.spec} does not match {want}")
    return target


def lift_one_body(v: Field, N: int, target: Grid | None = None) -> Field:
    """(Gamma v)(x_1, ..., x_N) = sum_i v(x_i)."""
    grid = _nbody_grid(v, N, target)
    n, P = v.grid.d, v.grid.P
    vals = np.real_if_close(v.values) if np.iscomplexobj(v.values) else v.values
    out = np.zeros(grid.shape, dtype=vals.dtype)
    for i in range(N):
        shape = [1] * grid.d
        shape[i * n:(i + 1) * n] = [P] * n
        out = out + vals.reshape(shape)
    return Field(grid, out)


def lift_two_body(v_int: Field, N: int, target: Grid | None = None) -> Field:
    """(Gamma w)(x) = 1/2 sum_{i != j} v_int(x_i - x_j), differences taken on the torus."""
    grid = _nbody_grid(v_int, N, target)
    n, P = v_int.grid.d, v_int.grid.P
    vals = v_int.values
    out = np.zeros(grid.shape, dtype=vals.dtype)
    idx = np.arange(P)
    for i in range(N):
        for j in range(N):
            if i == j:
                continue
            sel = []
            for a in range(n):
                si = [1] * grid.d
                sj = [1] * grid.d
                si[i * n + a] = P
                sj[j * n + a] = P
                sel.append((idx.reshape(si) - idx.reshape(sj)) % P)
            out = out + 0.5 * vals[tuple(sel)]
    return Field(grid, out)


# --------------------------------------------------------------------------
# Kato perturbations


@dataclass
class KatoDecomposition:
    threshold: float
    v1: Field = dc_field(repr=False)
    v2: Field = dc_field(repr=False)
    value: float = 0.0


def _real_values(v: Field) -> np.ndarray:
    vals = v.values if v.space != FREQUENCY else transform(v).values
    return vals.real if np.iscomplexobj(vals) else vals


def kato_split(v: Field, M: float) -> KatoDecomposition:
    """Clamp split ``v2 = clip(v, -M, M)``, ``v1 = v - v2``."""
    if M < 0:
        raise ValueError("threshold must be >= 0")
    vals = _real_values(v)
    v2 = np.clip(vals, -M, M)
    v1 = vals - v2
    f1, f2 = Field(v.grid, v1), Field(v.grid, v2)
    sup2 = float(np.max(np.abs(v2))) if v2.size else 0.0
    return KatoDecomposition(float(M), f1, f2, l2_norm(f1) + sup2)


def _kato_objective(v: Field):
    a = np.abs(_real_values(v)).ravel()
    top = float(a.max()) if a.size else 0.0
    w = v.grid.cell_volume

    def g(M):
        excess = a - M
        excess = excess[excess > 0]
        return float(np.sqrt(np.sum(excess * excess) * w)) + min(M, top)

    return g, top


def kato_norm(v: Field, rtol: float = 1e-6) -> tuple[float, float]:
    """Infimum of ``||v1||_2 + ||v2||_inf`` over clamp splits; returns ``(norm, M*)``.

    The objective is convex in the threshold, so golden-section search on
    ``[0, ||v||_inf]`` finds the global minimum.
    """
    g, top = _kato_objective(v)
    if top == 0.0:
        return 0.0, 0.0
    M, val = golden_section_minimize(g, 0.0, top, xtol=rtol * top)
    return val, M


def kato_norm_dense(v: Field, points: int = 10_000) -> tuple[float, float]:
    """Minimum of the clamp objective over an equispaced threshold grid."""
    g, top = _kato_objective(v)
    Ms = np.linspace(0.0, top, points)
    vals = np.array([g(M) for M in Ms])
    i = int(np.argmin(vals))
    return float(vals[i]), float(Ms[i])


def alias_energy(v: Field, cutoff: int | None = None) -> float:
    """Fraction of spectral energy with some ``|m_i| > cutoff`` (default P/4)."""
    cutoff = v.grid.P // 4 if cutoff is None else cutoff
    c2 = np.abs(to_frequency(v).values) ** 2
    total = float(c2.sum())
    if total == 0.0:
        return 0.0
    return float(c2[~v.grid.band_mask(cutoff)].sum()) / total


def derivative_field(v: Field, alpha: Sequence[int]) -> Field:
    """Real spectral derivative D^alpha v of a real lattice potential."""
    if not any(alpha):
        return Field(v.grid, _real_values(v))
    coef = to_frequency(v).values * v.grid.derivative(alpha).symbol
    return Field(v.grid, np.fft.ifftn(coef, norm="ortho").real)


def sobolev_kato_norm(v: Field, m: int, alias_tol: float = 1e-10) -> float:
    """``sum_{|alpha|<=m} ||D^alpha v||_{2+inf}`` with spectral derivatives."""
    if m < 0:
        raise ValueError("order must be >= 0")
    if m > 0:
        frac = alias_energy(v)
        if frac > alias_tol:
            raise AliasingError(
                f"{frac:.3e} of the spectral energy lies above P/4; derivatives would alias"
            )
    return float(sum(kato_norm(derivative_field(v, a))[0]
                     for a in multi_indices(v.grid.d, m)))


# --------------------------------------------------------------------------
# ||phi||_inf <= alpha ||Delta phi|| + beta ||phi||


@dataclass
class ABReport:
    alpha: float
    beta: float
    samples: int
    cutoff: int
    seed: int
    witness: Field = dc_field(repr=False)


@dataclass
class ABCertificate:
    alpha: float
    beta: float
    estimate_samples: int
    verify_samples: int
    violations: int
    max_verify_ratio: float
    cutoff: int
    seed: int
    grid: Grid = dc_field(repr=False)

    @property
    def certified(self) -> bool:
        return self.violations == 0


def ab_ratio(phi: Field, alpha: float) -> float:
    """``(||phi||_inf - alpha ||Delta phi||) / ||phi||`` (not clipped)."""
    pw = laplacian_power_norms(phi, 1)
    sup = float(np.max(np.abs(np.fft.ifftn(to_frequency(phi).values, norm="ortho"))))
    return (sup - alpha * pw[1]) / pw[0]


def _peaked_probe(grid: Grid, tau: float, cutoff: int, center: Sequence[int]) -> Field:
    """Band-limited resolvent profile ``1/(1 + tau |kappa|^4)`` peaked at a lattice site.

    For fixed alpha the extremal states of the ab-ratio lie in this family.
    """
    mask = grid.band_mask(cutoff)
    lam = grid.kappa_squared
    phase = np.zeros(grid.shape)
    for a in range(grid.d):
        phase = phase + 2 * np.pi * grid.frequency(a) * center[a] / grid.P
    coef = np.where(mask, np.exp(-1j * phase) / (1.0 + tau * lam ** 2), 0)
    return Field(grid, coef, FREQUENCY)


def _tau_range(grid: Grid, cutoff: int) -> tuple[float, float]:
    lam_min = (2 * np.pi / grid.L) ** 2
    lam_max = grid.d * (2 * np.pi * cutoff / grid.L) ** 2
    return 1e-3 / lam_max ** 2, 1e3 / lam_min ** 2


def ab_constants(alpha: float, grid: Grid, samples: int = 500, seed: int = 0,
                 cutoff: int | None = None) -> ABReport:
    """Smallest beta making the ab-inequality hold on the probe set (clipped at 0).

    Probes: the constant state, the resolvent-profile family over a log grid of
    ``tau`` refined by golden-section search, and ``samples`` random
    band-limited states.
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if grid.d > 3:
        raise GridError(f"the ab-inequality needs dimension <= 3, grid has {grid.d}")
    cutoff = grid.P // 4 if cutoff is None else cutoff
    best, witness = -np.inf, None

    def consider(phi):
        nonlocal best, witness
        r = ab_ratio(phi, alpha)
        if r > best:
            best, witness = r, phi
        return r

    consider(grid.constant(1.0))
    origin = (0,) * grid.d
    consider(_peaked_probe(grid, 0.0, cutoff, origin))
    lo, hi = np.log(_tau_range(grid, cutoff))
    us = np.linspace(lo, hi, 96)
    rs = [consider(_peaked_probe(grid, float(np.exp(u)), cutoff, origin)) for u in us]
    i = int(np.argmax(rs))
    a, b = us[max(i - 1, 0)], us[min(i + 1, len(us) - 1)]
    u_star, _ = golden_section_maximize(
        lambda u: ab_ratio(_peaked_probe(grid, float(np.exp(u)), cutoff, origin), alpha),
        a, b, xtol=1e-10)
    consider(_peaked_probe(grid, float(np.exp(u_star)), cutoff, origin))
    for i in range(samples):
        consider(random_bandlimited_state(grid, cutoff, [seed, 0, i], space=FREQUENCY))
    return ABReport(float(alpha), max(0.0, float(best)), samples, cutoff, seed, witness)


def certify_ab(alpha: float, grid: Grid, samples: int = 500, seed: int = 0,
               cutoff: int | None = None, rtol: float = 1e-12) -> ABCertificate:
    """Estimate beta on one probe set, then verify it on a fresh one.

    The fresh set draws new random states and resolvent profiles with random
    ``tau`` and random peak sites.  A probe violates the bound when
    ``||phi||_inf > (alpha ||Delta phi|| + beta ||phi||) (1 + rtol)``.
    """
    rep = ab_constants(alpha, grid, samples, seed, cutoff)
    cutoff = rep.cutoff
    rng = np.random.default_rng([seed, 1])
    lo, hi = np.log(_tau_range(grid, cutoff))
    violations, worst = 0, -np.inf
    for i in range(samples):
        if i % 2:
            phi = random_bandlimited_state(grid, cutoff, [seed, 1, i], space=FREQUENCY)
        else:
            tau = float(np.exp(rng.uniform(lo, hi)))
            center = rng.integers(0, grid.P, size=grid.d)
            phi = _peaked_probe(grid, tau, cutoff, center)
        pw = laplacian_power_norms(phi, 1)
        sup = float(np.max(np.abs(np.fft.ifftn(to_frequency(phi).values, norm="ortho"))))
        rhs = alpha * pw[1] + rep.beta * pw[0]
        worst = max(worst, (sup - alpha * pw[1]) / pw[0])
        if sup > rhs * (1 + rtol):
            violations += 1
    return ABCertificate(rep.alpha, rep.beta, samples, samples, violations, float(worst),
                         cutoff, seed, grid)


# --------------------------------------------------------------------------
# Lipschitz constant of t -> B(t) between graph-norm spaces


@dataclass
class LipschitzReport:
    value: float
    m: int
    pairs: list
    drive_norms: list
    envelope_lipschitz: float
    reference: float


def _time_pairs(T: float, count: int, rng) -> list[tuple[float, float]]:
    out = []
    for j in range(count):
        u = (j + rng.uniform()) / count
        delta = T * 10.0 ** (-3.0 * (1.0 - u))
        t = rng.uniform(0.0, T - delta) if T > delta else 0.0
        out.append((float(t), float(t + delta)))
    return out


def lipschitz_constant(tp: TimePotential, m: int, grid: Grid, pairs: int = 64,
                       seed: int = 0, budget: int = 64,
                       power_steps: int = 64) -> LipschitzReport:
    """Sampled sup of ``sum_{k=1}^m ||B(t') - B(t)||_(k,k-1) / |t' - t|``.

    Each operator norm is a witness-certified lower bound from
    :func:`operator_norm_estimate`; the same probe seed is reused for every
    pair, so for envelope-linear drives the quotients are exactly the
    envelope difference quotient times the drive norms reported alongside.
    """
    if pairs < 1 or m < 1:
        raise ValueError("need pairs >= 1 and m >= 1")
    system = System(grid, tp)
    rng = np.random.default_rng([seed, 7])
    T = tp.horizon

    def norm_sum(vals):
        if not np.any(vals):
            return [0.0] * m
        op = multiplication_operator(vals)
        return [operator_norm_estimate(op, grid, k, k - 1, budget, seed=seed * 1000 + k,
                                       power_steps=power_steps).value
                for k in range(1, m + 1)]

    rows = []
    for t, t2 in _time_pairs(T, pairs, rng):
        diff = system.potential(t2) - system.potential(t)
        q = sum(norm_sum(diff)) / (t2 - t)
        rows.append((t, t2, q))
    drive_norms = norm_sum(system.drive)
    lip = tp.envelope.lipschitz() if tp.drive is not None else 0.0
    value = max(r[2] for r in rows)
    return LipschitzReport(float(value), m, rows, drive_norms, lip,
                           float(lip * sum(drive_norms)))


# --------------------------------------------------------------------------
# binary potential tables: b"GNP1", int32 d, int32 P, then P^d float64 (row-major, LE)

_MAGIC = b"GNP1"
_HEADER = struct.Struct("<4sii")


def write_table(path, values: np.ndarray) -> None:
    values = np.asarray(values, dtype="<f8")
    d = values.ndim
    P = values.shape[0]
    if any(s != P for s in values.shape):
        raise ValueError("tables must be cubic")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, d, P))
        fh.write(np.ascontiguousarray(values).tobytes())


def read_table(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated header")
    magic, d, P = _HEADER.unpack_from(raw)
    if magic != _MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    if not 1 <= d <= 6 or P < 1:
        raise ValueError(f"{path}: bad header d={d} P={P}")
    body = raw[_HEADER.size:]
    if len(body) != 8 * P ** d:
        raise ValueError(f"{path}: expected {8 * P ** d} data bytes, found {len(body)}")
    return np.frombuffer(body, dtype="<f8").reshape((P,) * d).astype(float)
