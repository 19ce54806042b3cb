"""Probe-based verification of the quantitative operator inequalities.

Every check evaluates a ratio over a deterministic probe set (adversarial
states plus random band-limited states) and reports the largest value found
with the probe that produced it.  A probe *violates* the check when its ratio
exceeds the bound by more than a relative rounding allowance of 1e-12.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from math import comb, sqrt
from typing import Callable, Iterator, Optional

import numpy as np

from .grid import FREQUENCY, Field, Grid, GridSpec, bandlimit, random_bandlimited_state, to_position
from .norms import (
    l2_norm,
    laplacian_power_norms,
    interpolation_constant,
    multi_indices,
    sobolev_norm,
    sobolev_weight,
)
from .potentials import (
    ABCertificate,
    PotentialSpec,
    _peaked_probe,
    certify_ab,
    derivative_field,
    evaluate,
    kato_norm,
    kato_split,
    lift_one_body,
    lift_two_body,
    sobolev_kato_norm,
)

__all__ = [
    "KERNEL_TOL",
    "ROUNDING_RTOL",
    "InequalityReport",
    "Generator",
    "free_generator",
    "potential_generator",
    "check_kallman_rota",
    "check_kr_order",
    "check_equiv_norms",
    "check_relative_bound",
    "check_ag_equiv",
    "relative_bound_constant",
    "ab_pair",
    "equivalence_bounds",
    "two_mode_kr_ratio",
]

KERNEL_TOL = 1e-12
# ratios within this relative distance of the bound count as attaining it; this
# absorbs the last-bit rounding of checks whose bound is sharp (e.g. constant V)
ROUNDING_RTOL = 1e-12


@dataclass
class InequalityReport:
    name: str
    samples: int
    max_ratio: float
    bound: float
    violations: int
    skipped: int
    seed: int
    witness: Optional[Field] = dc_field(default=None, repr=False)
    params: dict = dc_field(default_factory=dict)
    ratio: Optional[Callable[[Field], Optional[float]]] = dc_field(default=None, repr=False,
                                                                  compare=False)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    @property
    def limit(self) -> float:
        """Largest ratio not counted as a violation."""
        return self.bound * (1 + ROUNDING_RTOL)

    def reevaluate(self) -> float:
        if self.witness is None or self.ratio is None:
            raise ValueError("report has no witness")
        return float(self.ratio(self.witness))

    def to_record(self) -> dict:
        return {
            "name": self.name,
            "samples": self.samples,
            "max_ratio": self.max_ratio,
            "bound": self.bound,
            "violations": self.violations,
            "skipped": self.skipped,
            "seed": self.seed,
            "passed": self.passed,
            "params": self.params,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True)


def _run(name: str, probes, ratio, bound: float, seed: int, params: dict) -> InequalityReport:
    best, witness = -np.inf, None
    limit = bound * (1 + ROUNDING_RTOL)
    samples = skipped = violations = 0
    for x in probes:
        samples += 1
        r = ratio(x)
        if r is None:
            skipped += 1
            continue
        if r > limit:
            violations += 1
        if r > best:
            best, witness = r, x
    if witness is None:
        best = float("nan")
    return InequalityReport(name, samples, float(best), float(bound), violations, skipped,
                            seed, witness, params, ratio)


# --------------------------------------------------------------------------
# generators


@dataclass(frozen=True)
class Generator:
    """Skew-adjoint ``A = -i H`` with ``H = -Delta + V``; only norms of powers are needed."""

    grid: Grid
    potential: Optional[np.ndarray] = None
    description: str = "free"

    def power_norms(self, x: Field, k: int) -> np.ndarray:
        """``[||x||, ||A x||, ..., ||A^k x||]``."""
        if self.potential is None or not np.any(self.potential):
            return laplacian_power_norms(x, k)
        g = self.grid
        out = np.empty(k + 1)
        y = to_position(x).values
        out[0] = np.sqrt(np.sum(np.abs(y) ** 2) * g.cell_volume)
        for j in range(1, k + 1):
            y = np.fft.ifftn(g.kappa_squared * np.fft.fftn(y, norm="ortho"),
                             norm="ortho") + self.potential * y
            out[j] = np.sqrt(np.sum(np.abs(y) ** 2) * g.cell_volume)
        return out


def free_generator(grid: Grid) -> Generator:
    return Generator(grid)


def potential_generator(grid: Grid, v) -> Generator:
    if isinstance(v, PotentialSpec):
        spec = grid.spec
        one = grid if spec.particles == 1 else Grid(spec.one_body())
        vals = lift_one_body(evaluate(v, one), spec.particles, grid).values
        desc = f"with_potential({v.kind})"
    else:
        vals = to_position(v).values if isinstance(v, Field) else np.asarray(v)
        desc = "with_potential"
    vals = np.real(vals).astype(float).reshape(grid.shape)
    return Generator(grid, vals, desc)


def _generator(grid: Grid, generator) -> Generator:
    if generator is None or generator == "free":
        return free_generator(grid)
    if isinstance(generator, Generator):
        return generator
    return potential_generator(grid, generator)


# --------------------------------------------------------------------------
# probe sets


def _coef_state(grid: Grid, entries) -> Field:
    coef = np.zeros(grid.shape, dtype=complex)
    for m, c in entries:
        coef[grid.frequency_index(m)] += c
    return Field(grid, coef, FREQUENCY)


def _axis_vec(grid: Grid, mm: int) -> list:
    return [mm] + [0] * (grid.d - 1)


def _adversarial_probes(grid: Grid, cutoff: int) -> Iterator[Field]:
    """Constant, plane waves, extreme two-mode mixtures and near-kernel states."""
    yield grid.constant(1.0)
    for mm in range(1, cutoff + 1):
        yield _coef_state(grid, [(_axis_vec(grid, mm), 1.0)])
        if grid.d > 1:
            yield _coef_state(grid, [([mm] * grid.d, 1.0)])
    hi = _axis_vec(grid, cutoff)
    lo = _axis_vec(grid, 1)
    for w in (1e-3, 1e-2, 0.1, 0.5, 0.9, 0.99):
        yield _coef_state(grid, [(lo, sqrt(1 - w)), (hi, sqrt(w))])
    for eps in (1e-4, 1e-2):
        yield _coef_state(grid, [([0] * grid.d, 1.0), (lo, eps)])
        yield _coef_state(grid, [([0] * grid.d, 1.0), (hi, eps)])


def _probes(grid: Grid, samples: int, seed: int, cutoff: int,
            adversarial: bool = True) -> Iterator[Field]:
    if adversarial:
        yield from _adversarial_probes(grid, cutoff)
    for i in range(samples):
        yield random_bandlimited_state(grid, cutoff, [seed, i], space=FREQUENCY)


# --------------------------------------------------------------------------
# interpolation inequalities


def two_mode_kr_ratio(lam1: float, lam2: float, w: float = 0.5) -> float:
    """Closed-form ratio ``||Ax||^2 / (||x|| ||A^2 x||)`` for a two-mode state.

    ``lam1, lam2`` are the eigenvalue moduli and ``w`` the squared weight of
    the second mode in a unit-norm state.
    """
    a2 = (1 - w) * lam1 ** 2 + w * lam2 ** 2
    a4 = (1 - w) * lam1 ** 4 + w * lam2 ** 4
    return a2 / np.sqrt(a4)


def check_kr_order(grid: Grid, k: int, samples: int = 1000, seed: int = 0,
                   generator="free", cutoff: int | None = None) -> InequalityReport:
    """``||A^k x||^((k+1)/k) <= 2^(k+1) ||x||^(1/k) ||A^(k+1) x||`` on the probe set."""
    if k < 1:
        raise ValueError("k must be >= 1")
    gen = _generator(grid, generator)
    cutoff = grid.P // 4 if cutoff is None else cutoff

    def ratio(x):
        pw = gen.power_norms(x, k + 1)
        if pw[k + 1] < KERNEL_TOL * pw[0]:
            return None
        return pw[k] ** ((k + 1) / k) / (pw[0] ** (1 / k) * pw[k + 1])

    name = "kallman_rota" if k == 1 else f"kr_order_{k}"
    return _run(name, _probes(grid, samples, seed, cutoff), ratio, 2.0 ** (k + 1), seed,
                {"k": k, "d": grid.d, "generator": gen.description, "cutoff": cutoff})


def check_kallman_rota(grid: Grid, generator="free", samples: int = 1000, seed: int = 0,
                       cutoff: int | None = None) -> InequalityReport:
    """``||Ax||^2 <= 4 ||x|| ||A^2 x||``; probes with ``A^2 x ~ 0`` are skipped."""
    return check_kr_order(grid, 1, samples, seed, generator, cutoff)


def check_equiv_norms(grid: Grid, m: int, samples: int = 1000, seed: int = 0,
                      generator="free", cutoff: int | None = None) -> InequalityReport:
    """``||x||_(m) <= C(m) (||A^m x|| + ||x||)`` with the interpolation constant C(m)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    gen = _generator(grid, generator)
    cutoff = grid.P // 4 if cutoff is None else cutoff

    def ratio(x):
        pw = gen.power_norms(x, m)
        return float(np.sum(pw)) / (pw[0] + pw[m])

    return _run(f"equiv_norms_{m}", _probes(grid, samples, seed, cutoff), ratio,
                interpolation_constant(m), seed, {"m": m, "d": grid.d, "generator": gen.description})


# --------------------------------------------------------------------------
# relative boundedness of lifted potentials


def _pair_multiplicity(n: int, order: int) -> int:
    """max over |mu| <= order in n dims of prod(mu_c + 1)."""
    return max(int(np.prod([c + 1 for c in mu])) for mu in multi_indices(n, order))


def relative_bound_constant(grid: Grid, m: int, alpha: float, beta: float,
                            two_body: bool = False) -> float:
    """Constant K with ``||(Gamma v) phi||_(2m) <= K ||v||_(2m, 2+inf) ||phi||_(2m+2)``.

    From the Kato split, the ab-inequality in each particle coordinate, the
    Leibniz rule (binomial factor at most ``C(2m, m)``) and the Fourier-weight
    comparison of ``||psi|| + ||Delta psi||`` with the Sobolev norms.
    """
    spec = grid.spec
    N, n, d = spec.particles, spec.dim_per_particle, grid.d
    B = max(alpha, beta, 1.0)
    lam2 = grid.kappa_squared ** 2
    w_ratio = sobolev_weight(grid, 2 * m) * (1.0 + lam2) / sobolev_weight(grid, 2 * m + 2)
    c_sob = sqrt(2 * comb(2 * m + d, d) * float(np.max(w_ratio)))
    if two_body:
        factor = N * (N - 1) / 2 * _pair_multiplicity(n, 2 * m)
    else:
        factor = N
    return float(factor * comb(2 * m, m) * B * c_sob)


def _nbody_grid(grid: Grid, N: int) -> tuple[Grid, Grid]:
    spec = grid.spec
    if spec.particles != 1:
        raise ValueError("pass the one-particle grid; N sets the particle count")
    one = grid
    full = grid if N == 1 else Grid(GridSpec(spec.dim_per_particle, N, spec.points_per_axis,
                                             spec.extent, spec.max_dimension))
    return one, full


def _localized_probes(grid: Grid, V: np.ndarray, cutoff: int) -> Iterator[Field]:
    """Resolvent-profile states peaked where ``|V|`` is largest and at the origin."""
    peak = np.unravel_index(int(np.argmax(np.abs(V))), grid.shape)
    centers = [tuple(int(i) for i in peak), (0,) * grid.d]
    lam_max = grid.d * (2 * np.pi * cutoff / grid.L) ** 2
    for c in centers:
        for s in (1e-3, 1e-1, 1.0, 10.0, 1e3):
            yield _peaked_probe(grid, s / lam_max ** 2, cutoff, c)


def check_relative_bound(grid: Grid, v: PotentialSpec, N: int = 1, m: int = 0,
                         samples: int = 500, seed: int = 0,
                         certificate: ABCertificate | None = None, alpha: float = 0.1,
                         two_body: bool = False) -> InequalityReport:
    """``||(Gamma v) phi||_(2m) <= K ||v||_(2m,2+inf) ||phi||_(2m+2)`` over fresh probes.

    ``grid`` is the one-particle grid.  ``beta`` comes from a two-pass
    certificate of the ab-inequality on that grid (computed here when not
    given).  With ``two_body`` the potential is an interaction
    ``v_int(x_i - x_j)``.  For ``m >= 1`` the potential is first projected to
    ``|m_i| < P/4`` so products with probes of cutoff ``P/4`` are alias-free.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    one, full = _nbody_grid(grid, N)
    cutoff = grid.P // 4
    if certificate is None:
        certificate = certify_ab(alpha, one, samples, seed, cutoff)
    if not certificate.certified:
        raise ValueError("ab-inequality constant is not certified on this grid")
    if certificate.cutoff < cutoff or certificate.grid.spec != one.spec:
        raise ValueError("certificate was issued for a different grid or cutoff")
    vf = evaluate(v, one)
    if m >= 1:
        vf = bandlimit(vf, cutoff - 1)
    knorm = sobolev_kato_norm(vf, 2 * m)
    if two_body:
        V = lift_two_body(vf, N, full).values
    else:
        V = lift_one_body(vf, N, full).values
    K = relative_bound_constant(full, m, certificate.alpha, certificate.beta, two_body)

    def ratio(phi):
        x = to_position(phi)
        lhs = sobolev_norm(x.with_values(V * x.values), 2 * m)
        rhs = K * knorm * sobolev_norm(phi, 2 * m + 2)
        if rhs == 0.0:
            return 0.0 if lhs == 0.0 else float("inf")
        return lhs / rhs

    def probes():
        yield from _localized_probes(full, V, cutoff)
        yield from _probes(full, samples, seed + 1, cutoff, adversarial=True)

    name = "relative_bound_interaction" if two_body else "relative_bound"
    return _run(name, probes(), ratio, 1.0, seed,
                {"kind": v.kind, "N": N, "m": m, "alpha": certificate.alpha,
                 "beta": certificate.beta, "constant": K, "sobolev_kato_norm": knorm})


# --------------------------------------------------------------------------
# equivalence of the A- and G-graph norms


def _split_terms(f: Field, alpha: float, beta: float) -> tuple[float, float]:
    """(alpha ||f1||, beta ||f1|| + ||f2||_inf) for the optimal clamp split of f."""
    _, M = kato_norm(f)
    dec = kato_split(f, M)
    l2 = l2_norm(dec.v1)
    return alpha * l2, beta * l2 + float(np.max(np.abs(dec.v2.values)))


def ab_pair(v: Field, N: int, m: int, alpha: float, beta: float) -> tuple[float, float]:
    """``(a, b)`` with ``||V x||_(k-1) <= a ||Delta^k x|| + b ||x||_(k-1)`` for k <= m.

    ``v`` is the one-particle potential, ``V = Gamma v``.  Order 1 follows
    from the Kato split and the ab-inequality; order 2 expands
    ``Delta(V x) = (Delta V) x + 2 grad V . grad x + V Delta x`` and uses
    ``||grad y|| <= (||y|| + ||Delta y||) / 2``.
    """
    if m not in (1, 2):
        raise ValueError("ab pairs are assembled for m in {1, 2}")
    a0, b0 = _split_terms(v, alpha, beta)
    a0, b0 = N * a0, N * b0
    if m == 1:
        return a0, b0
    n = v.grid.d
    d = n * N
    lap = sum(derivative_field(v, tuple(2 if c == a else 0 for c in range(n)))
              .values for a in range(n))
    aL, bL = _split_terms(Field(v.grid, lap), alpha, beta)
    aL, bL = N * aL, N * bL
    grads = [_split_terms(derivative_field(v, tuple(int(c == a) for c in range(n))), alpha,
                          beta) for a in range(n)]
    ag = max(g[0] for g in grads)
    bg = max(g[1] for g in grads)
    rd = sqrt(d)
    a = a0 + rd * ag
    b = max(b0 + bL + rd * bg, a0 + aL + rd * (ag + bg) + b0)
    return float(a), float(b)


def equivalence_bounds(a: float, b: float, m: int) -> tuple[float, float]:
    """Constants (U, D) with ``||x||_G(m) <= U ||x||_(m)`` and ``||x||_(m) <= D ||x||_G(m)``.

    Induction on the order: ``U_k = (1 + a + b) U_{k-1}`` and
    ``D_k = D_{k-1} (1 + b) / (1 - a)`` starting from ``U_0 = D_0 = 1``.
    """
    if a >= 1:
        raise ValueError(f"relative bound a = {a} must be < 1")
    return (1 + a + b) ** m, ((1 + b) / (1 - a)) ** m


def check_ag_equiv(grid: Grid, v: PotentialSpec, m: int, samples: int = 500, seed: int = 0,
                   N: int = 1, alpha: float = 0.05,
                   certificate: ABCertificate | None = None) -> InequalityReport:
    """Two-sided comparison of the graph norms of ``G = i Delta - i Gamma v`` and ``A = i Delta``.

    The reported ratio is ``max(r_up / U, r_down / D)`` with ``r_up =
    ||x||_G(m) / ||x||_(m)`` and ``r_down`` its reciprocal, so the bound is 1.
    The ab-constant is certified on the full lattice because the induction
    applies the first-order bound to ``G x``, which is not band-limited.
    """
    one, full = _nbody_grid(grid, N)
    if certificate is None:
        certificate = certify_ab(alpha, one, samples, seed, cutoff=grid.P // 2)
    if not certificate.certified or certificate.cutoff < grid.P // 2:
        raise ValueError("ab-inequality must be certified on the full lattice")
    cutoff = grid.P // 4
    vf = evaluate(v, one)
    if m >= 2:
        vf = bandlimit(vf, cutoff - 1)
    a, b = ab_pair(vf, N, m, certificate.alpha, certificate.beta)
    U, D = equivalence_bounds(a, b, m)
    G = potential_generator(full, lift_one_body(vf, N, full).values)

    def parts(x):
        gG = float(np.sum(G.power_norms(x, m)))
        gA = float(np.sum(laplacian_power_norms(x, m)))
        return gG / gA, gA / gG

    def ratio(x):
        up, down = parts(x)
        return max(up / U, down / D)

    rep = _run(f"ag_equiv_{m}", _probes(full, samples, seed, cutoff), ratio, 1.0, seed,
               {"m": m, "N": N, "kind": v.kind, "a": a, "b": b, "upper_bound": U,
                "lower_bound": D, "alpha": certificate.alpha, "beta": certificate.beta})
    ups, downs = zip(*(parts(x) for x in _probes(full, samples, seed, cutoff)))
    rep.params["max_upper_ratio"] = float(max(ups))
    rep.params["max_lower_ratio"] = float(max(downs))
    return rep
