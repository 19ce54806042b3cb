"""Configuration-driven experiment runner.

Usage::

    graphnorm run CONFIG.yaml [--seed N] [--output DIR]
    graphnorm list

A config is a YAML document (see ``CONFIG_SCHEMA``).  ``run`` writes, inside
the output directory only:

* ``config.resolved.json`` -- the config with every default filled in,
  written before any computation;
* one or more CSV tables (17 significant digits, fixed row order);
* ``reports.jsonl`` for experiments that produce inequality reports;
* ``summary.json`` -- pass/fail per check and the exit status.

Exit status: 0 all checks pass, 1 runtime failure, 2 malformed config,
3 at least one check failed.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

import jsonschema
import numpy as np
import yaml

from .grid import Grid, GridError, GridSpec, random_bandlimited_state
from .inequalities import (
    check_ag_equiv,
    check_equiv_norms,
    check_kr_order,
    check_relative_bound,
)
from .norms import MAX_GRAPH_ORDER, equivalence_constants, mixed_derivative_identity
from .potentials import (
    ENVELOPES,
    AliasingError,
    KINDS,
    _DEFAULTS as POTENTIAL_DEFAULTS,
    Envelope,
    PotentialSpec,
    System,
    TimePotential,
    certify_ab,
    evaluate,
    kato_norm,
    kato_norm_dense,
    lipschitz_constant,
    sobolev_kato_norm,
)
from .propagator import (
    DENSE_EIGEN,
    SPLIT_STEP,
    Partition,
    PropagatorConfig,
    cauchy_defect,
    growth_fit,
    km_constants,
    norm_trace,
)

log = logging.getLogger("graphnorm")

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG, EXIT_VIOLATIONS = 0, 1, 2, 3
EXPERIMENTS = ("propagate", "converge", "norms", "inequalities", "kato", "km")
FLOAT_FORMAT = "%.16e"
ENVELOPE_DEFAULTS = {
    "constant": {"value": 1.0},
    "linear_ramp": {"rate": 1.0},
    "sinusoid": {"amplitude": 1.0, "frequency": 1.0},
}

_potential_schema = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": list(KINDS)},
        "center": {"oneOf": [{"type": "number"},
                             {"type": "array", "items": {"type": "number"}}]},
        "epsilon": {"type": "number", "exclusiveMinimum": 0},
        "charge": {"type": "number"},
        "depth": {"type": "number"},
        "width": {"type": "number", "exclusiveMinimum": 0},
        "amplitude": {"type": "number"},
        "mode": {"oneOf": [{"type": "integer"},
                           {"type": "array", "items": {"type": "integer"}}]},
        "value": {"type": "number"},
        "path": {"type": "string"},
    },
    "additionalProperties": False,
}

CONFIG_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["experiment", "grid", "potential"],
    "additionalProperties": False,
    "properties": {
        "experiment": {"enum": list(EXPERIMENTS)},
        "seed": {"type": "integer", "minimum": 0},
        "output_dir": {"type": "string"},
        "grid": {
            "type": "object",
            "required": ["dim_per_particle", "points_per_axis", "extent"],
            "additionalProperties": False,
            "properties": {
                "dim_per_particle": {"type": "integer", "minimum": 1, "maximum": 3},
                "particles": {"type": "integer", "minimum": 1},
                "points_per_axis": {"type": "integer", "minimum": 8},
                "extent": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "potential": {
            "type": "object",
            "required": ["base"],
            "additionalProperties": False,
            "properties": {
                "horizon": {"type": "number", "exclusiveMinimum": 0},
                "base": _potential_schema,
                "drive": {"oneOf": [{"type": "null"}, _potential_schema]},
                "envelope": {
                    "type": "object",
                    "required": ["kind"],
                    "additionalProperties": False,
                    "properties": {
                        "kind": {"enum": list(ENVELOPES)},
                        "value": {"type": "number"},
                        "rate": {"type": "number"},
                        "amplitude": {"type": "number"},
                        "frequency": {"type": "number"},
                    },
                },
                "interaction": {"oneOf": [{"type": "null"}, _potential_schema]},
            },
        },
        "parameters": {"type": "object"},
    },
}

PARAMETER_DEFAULTS = {
    "propagate": {
        "partitions": 16, "step_method": SPLIT_STEP, "substeps": 16, "m_track": 2,
        "sample_times": 11, "probe_cutoff": None, "l2_tolerance": 1e-8,
    },
    "converge": {
        "k_list": [4, 8, 16, 32], "m": 1, "probes": 4, "step_method": DENSE_EIGEN,
        "substeps": 64, "order_min": 0.7, "order_max": 1.3,
    },
    "norms": {
        "orders": [1, 2], "samples": 500, "c_low_min": 0.01, "c_high_max": 100.0,
        "identity_tolerance": 1e-10,
    },
    "inequalities": {
        "checks": ["kallman_rota", "kr_order", "equiv_norms", "relative_bound", "ag_equiv"],
        "samples": 1000, "k_max": 3, "m_max": 3, "relative_orders": [0, 1],
        "ag_orders": [1, 2], "alpha": 0.1, "ag_alpha": 0.05, "relative_samples": 500,
    },
    "kato": {"orders": [0, 1, 2], "dense_points": 10000, "tolerance": 1e-4},
    "km": {
        "m": 1, "shift": 1.0, "time_pairs": 16, "probes": 64, "anchors": 1,
        "residual_max": 0.1, "factorization_tolerance": 1e-10, "lipschitz_pairs": 16,
    },
}

INTEGER_PARAMETERS = (
    "partitions", "substeps", "m_track", "sample_times", "m", "probes", "samples", "k_max",
    "m_max", "relative_samples", "dense_points", "time_pairs", "anchors", "lipschitz_pairs",
)


class ConfigError(ValueError):
    """The configuration is malformed or refers to invalid objects."""


# --------------------------------------------------------------------------
# configuration


def resolve_config(raw: dict, base_dir: Path | None = None, seed: int | None = None,
                   output: str | None = None) -> dict:
    """Validate ``raw`` and return a fully resolved copy (defaults filled in)."""
    try:
        jsonschema.validate(raw, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{path}: {exc.message}") from None
    cfg = copy.deepcopy(raw)
    if seed is not None:
        cfg["seed"] = seed
    cfg.setdefault("seed", 0)
    if output is not None:
        cfg["output_dir"] = output
    cfg.setdefault("output_dir", f"out_{cfg['experiment']}")
    cfg["grid"].setdefault("particles", 1)
    pot = cfg["potential"]
    pot.setdefault("horizon", 1.0)
    pot.setdefault("drive", None)
    pot.setdefault("interaction", None)
    pot.setdefault("envelope", {"kind": "constant"})
    env = pot["envelope"]
    for k, v in ENVELOPE_DEFAULTS[env["kind"]].items():
        env.setdefault(k, v)
    extra = set(env) - {"kind"} - set(ENVELOPE_DEFAULTS[env["kind"]])
    if extra:
        raise ConfigError(f"potential/envelope: parameters {sorted(extra)} do not apply "
                          f"to {env['kind']}")
    for key in ("base", "drive", "interaction"):
        p = pot[key]
        if p is None:
            continue
        extra = set(p) - {"kind", "center"} - set(POTENTIAL_DEFAULTS[p["kind"]])
        if extra:
            raise ConfigError(f"potential/{key}: parameters {sorted(extra)} do not apply "
                              f"to {p['kind']}")
        for k, v in POTENTIAL_DEFAULTS[p["kind"]].items():
            if v is not None:
                p.setdefault(k, v)
        if p["kind"] == "custom_table" and "path" in p and base_dir is not None:
            path = Path(p["path"])
            if not path.is_absolute():
                p["path"] = str((base_dir / path).resolve())
    defaults = PARAMETER_DEFAULTS[cfg["experiment"]]
    params = dict(cfg.get("parameters") or {})
    unknown = set(params) - set(defaults)
    if unknown:
        raise ConfigError(f"parameters: unknown keys {sorted(unknown)} for "
                          f"{cfg['experiment']}")
    for k, v in defaults.items():
        params.setdefault(k, copy.deepcopy(v))
    for k in INTEGER_PARAMETERS:
        if k in params and (not isinstance(params[k], int) or isinstance(params[k], bool)):
            raise ConfigError(f"parameters/{k}: expected an integer")
    cfg["parameters"] = params
    build_objects(cfg)  # surfaces invalid grids / potentials before running
    return cfg


def load_config(path, seed: int | None = None, output: str | None = None) -> dict:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return resolve_config(raw, path.parent, seed, output)


def _potential(d: dict | None) -> PotentialSpec | None:
    if d is None:
        return None
    d = dict(d)
    kind = d.pop("kind")
    center = d.pop("center", None)
    if isinstance(center, (int, float)):
        center = [center]
    if "mode" in d and isinstance(d["mode"], list):
        d["mode"] = tuple(d["mode"])
    return PotentialSpec(kind, d, center)


def build_objects(cfg: dict):
    """``(grid, time_potential, interaction)`` from a resolved config."""
    g = cfg["grid"]
    pot = cfg["potential"]
    try:
        spec = GridSpec(g["dim_per_particle"], g["particles"], g["points_per_axis"],
                        float(g["extent"]))
        env = dict(pot["envelope"])
        envelope = Envelope(env.pop("kind"), **env)
        tp = TimePotential(_potential(pot["base"]), _potential(pot["drive"]), envelope,
                           float(pot["horizon"]))
        interaction = _potential(pot["interaction"])
        grid = Grid(spec)
        one = grid if spec.particles == 1 else Grid(spec.one_body())
        for p in (tp.base, tp.drive, interaction):
            if p is not None:
                evaluate(p, one)
    except (GridError, ValueError, TypeError, OSError) as exc:
        raise ConfigError(str(exc)) from None
    if cfg["experiment"] in ("propagate", "converge", "km") and \
            cfg["parameters"].get("step_method", SPLIT_STEP) not in (SPLIT_STEP, DENSE_EIGEN):
        raise ConfigError("parameters/step_method: must be split_step or dense_eigen")
    return grid, tp, interaction


# --------------------------------------------------------------------------
# output helpers


def format_table(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return FLOAT_FORMAT % float(x)
    return str(x)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        return float(x) if np.isfinite(x) else str(float(x))
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


class Output:
    def __init__(self, root: Path):
        self.root = root
        root.mkdir(parents=True, exist_ok=True)

    def _path(self, name: str) -> Path:
        p = (self.root / name).resolve()
        if self.root.resolve() not in p.parents:
            raise ValueError(f"refusing to write outside the output directory: {name}")
        return p

    def table(self, name: str, header, rows):
        self._path(name).write_text(format_table(header, rows))

    def json(self, name: str, obj):
        self._path(name).write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")

    def jsonl(self, name: str, records):
        self._path(name).write_text(
            "".join(json.dumps(_jsonable(r), sort_keys=True) + "\n" for r in records))


def _check(name: str, passed: bool, value=None, limit=None) -> dict:
    return {"name": name, "passed": bool(passed), "value": value, "limit": limit}


# --------------------------------------------------------------------------
# experiments


def _propagator_config(p: dict, T: float, k: int, m_track: int = 2) -> PropagatorConfig:
    return PropagatorConfig(Partition(T, k), p["step_method"], p["substeps"], 1.0, m_track)


def run_propagate(cfg, grid, tp, interaction, out: Output):
    p = cfg["parameters"]
    system = System(grid, tp, interaction)
    T = tp.horizon
    pc = _propagator_config(p, T, p["partitions"], p["m_track"])
    cutoff = p["probe_cutoff"] or grid.P // 4
    f = random_bandlimited_state(grid, cutoff, [cfg["seed"], 0])
    times = np.linspace(0.0, T, p["sample_times"])
    tr = norm_trace(f, system, pc, times)
    m = p["m_track"]
    header = ["time", "l2"] + [f"graph_{j}" for j in range(m + 1)] + \
        [f"sobolev_{2 * j}" for j in range(m + 1)]
    rows = [[t, tr.l2[i], *tr.graph_norms[i], *tr.sobolev_norms[i]]
            for i, t in enumerate(tr.times)]
    out.table("trace.csv", header, rows)
    drift = float(np.max(np.abs(tr.l2 / tr.l2[0] - 1.0)))
    checks = [_check("l2_conserved", drift <= p["l2_tolerance"], drift, p["l2_tolerance"]),
              _check("norms_finite", bool(np.all(np.isfinite(tr.graph_norms))))]
    extra = {"l2_drift": drift}
    if tr.times.size >= 3:
        fit = growth_fit(tr, m)
        extra.update(growth_rate=fit.rate, growth_C_prime=fit.C_prime)
        bound = fit.C_prime * np.exp(fit.rate * tr.times)
        checks.append(_check("below_growth_envelope",
                             bool(np.all(tr.graph_norms[:, m] <= bound * (1 + 1e-12)))))
    return checks, extra


def run_converge(cfg, grid, tp, interaction, out: Output):
    p = cfg["parameters"]
    system = System(grid, tp, interaction)
    pc = _propagator_config(p, tp.horizon, 1)
    rep = cauchy_defect(system, grid, pc, p["k_list"], p["m"], p["probes"], cfg["seed"])
    rows = [[k, rep.defects[i], rep.raw_defects[i], rep.order]
            for i, k in enumerate(rep.k_list)]
    out.table("defect.csv", ["k", "defect", "raw_defect", "fitted_order"], rows)
    checks = [_check("defect_decreasing", rep.decreasing)]
    if not system.time_independent:
        checks.append(_check("fitted_order", p["order_min"] <= rep.order <= p["order_max"],
                             rep.order, [p["order_min"], p["order_max"]]))
    return checks, {"fitted_order": rep.order}


def run_norms(cfg, grid, tp, interaction, out: Output):
    p = cfg["parameters"]
    seed = cfg["seed"]
    rows, checks = [], []
    for m in p["orders"]:
        if not 0 <= m <= MAX_GRAPH_ORDER:
            raise ValueError(f"order {m} outside 0..{MAX_GRAPH_ORDER}")
        r = equivalence_constants(grid, m, p["samples"], seed)
        rows.append([m, r.samples, r.c_low, r.c_high, r.interpolation_low, r.interpolation_high,
                     r.interpolation_bound, r.pythagorean_low, r.pythagorean_high])
        checks.append(_check(f"sobolev_equivalence_{m}",
                             r.c_low > p["c_low_min"] and r.c_high < p["c_high_max"],
                             [r.c_low, r.c_high], [p["c_low_min"], p["c_high_max"]]))
        checks.append(_check(f"interpolation_bound_{m}", r.interpolation_high <= r.interpolation_bound,
                             r.interpolation_high, r.interpolation_bound))
    out.table("equivalence.csv",
              ["m", "samples", "c_low", "c_high", "interpolation_low", "interpolation_high", "interpolation_bound",
               "pythagorean_low", "pythagorean_high"], rows)
    worst = 0.0
    for i in range(p["samples"]):
        f = random_bandlimited_state(grid, grid.P // 4, [seed, 1, i])
        lhs, rhs = mixed_derivative_identity(f)
        worst = max(worst, abs(lhs - rhs) / rhs)
    checks.append(_check("mixed_derivative_identity", worst <= p["identity_tolerance"], worst,
                         p["identity_tolerance"]))
    return checks, {"mixed_derivative_max_rel_error": worst}


def run_inequalities(cfg, grid, tp, interaction, out: Output):
    p = cfg["parameters"]
    seed = cfg["seed"]
    reports = []
    unknown = set(p["checks"]) - set(PARAMETER_DEFAULTS["inequalities"]["checks"])
    if unknown:
        raise ValueError(f"unknown checks {sorted(unknown)}")
    N = grid.spec.particles
    one = grid if N == 1 else Grid(grid.spec.one_body())
    if "kallman_rota" in p["checks"]:
        reports.append(check_kr_order(grid, 1, p["samples"], seed))
        rep = check_kr_order(grid, 1, p["samples"], seed, generator=tp.base)
        rep.name = "kallman_rota_with_potential"
        reports.append(rep)
    if "kr_order" in p["checks"]:
        for k in range(2, p["k_max"] + 1):
            reports.append(check_kr_order(grid, k, p["samples"], seed))
    if "equiv_norms" in p["checks"]:
        for m in range(1, p["m_max"] + 1):
            reports.append(check_equiv_norms(grid, m, p["samples"], seed))
    if "relative_bound" in p["checks"]:
        cert = certify_ab(p["alpha"], one, p["relative_samples"], seed)
        for m in p["relative_orders"]:
            rep = check_relative_bound(one, tp.base, N, m, p["relative_samples"], seed,
                                       certificate=cert)
            rep.name = f"{rep.name}_{m}"
            reports.append(rep)
            if interaction is not None and N >= 2:
                rep = check_relative_bound(one, interaction, N, m, p["relative_samples"],
                                           seed, certificate=cert, two_body=True)
                rep.name = f"{rep.name}_{m}"
                reports.append(rep)
    if "ag_equiv" in p["checks"]:
        cert = certify_ab(p["ag_alpha"], one, p["relative_samples"], seed, cutoff=one.P // 2)
        for m in p["ag_orders"]:
            reports.append(check_ag_equiv(one, tp.base, m, p["relative_samples"], seed, N=N,
                                          certificate=cert))
    rows = [[r.name, r.samples, r.max_ratio, r.bound, r.violations, r.skipped, r.seed]
            for r in reports]
    out.table("inequalities.csv",
              ["name", "samples", "max_ratio", "bound", "violations", "skipped", "seed"], rows)
    out.jsonl("reports.jsonl", [r.to_record() for r in reports])
    checks = [_check(r.name, r.passed, r.max_ratio, r.bound) for r in reports]
    return checks, {"reports": len(reports)}


def run_kato(cfg, grid, tp, interaction, out: Output):
    p = cfg["parameters"]
    N = grid.spec.particles
    one = grid if N == 1 else Grid(grid.spec.one_body())
    rows, checks = [], []
    named = [("base", tp.base), ("drive", tp.drive), ("interaction", interaction)]
    for label, spec in named:
        if spec is None:
            continue
        v = evaluate(spec, one)
        val, M = kato_norm(v)
        dval, dM = kato_norm_dense(v, p["dense_points"])
        gap = abs(val - dval) / max(dval, 1e-300)
        sk = []
        for m in p["orders"]:
            try:
                sk.append(sobolev_kato_norm(v, m))
            except AliasingError:
                sk.append(float("nan"))
        rows.append([label, spec.kind, val, M, dval, dM, gap, *sk])
        checks.append(_check(f"golden_vs_dense_{label}", gap <= p["tolerance"], gap,
                             p["tolerance"]))
    out.table("kato.csv", ["potential", "kind", "kato_norm", "M_star", "dense_norm",
                           "dense_M", "rel_gap"] + [f"sobolev_kato_{m}" for m in p["orders"]],
              rows)
    return checks, {}


def run_km(cfg, grid, tp, interaction, out: Output):
    p = cfg["parameters"]
    seed = cfg["seed"]
    system = System(grid, tp, interaction)
    rep = km_constants(system, grid, p["m"], p["shift"], p["time_pairs"], p["probes"], seed,
                       anchors=p["anchors"])
    rows = [[t, t2, t2 - t, k] for t, t2, k in rep.pairs]
    out.table("km.csv", ["t", "t_prime", "delta", "norm_K"], rows)
    lip = lipschitz_constant(tp, p["m"], grid, p["lipschitz_pairs"], seed)
    extra = {"slope": rep.slope, "residual": rep.residual, "C_m": rep.C_m,
             "C_m_upper": rep.C_m_upper, "L_m": lip.value, "budget": rep.C_m * lip.value,
             "factorization_error": rep.factorization_error}
    checks = []
    if rep.time_independent:
        checks.append(_check("K_vanishes", max(r[2] for r in rep.pairs) <= 1e-10,
                             max(r[2] for r in rep.pairs), 1e-10))
    else:
        checks.append(_check("linear_fit_residual", rep.residual <= p["residual_max"],
                             rep.residual, p["residual_max"]))
    if p["m"] == 1:
        checks.append(_check("K1_factorization",
                             rep.factorization_error <= p["factorization_tolerance"],
                             rep.factorization_error, p["factorization_tolerance"]))
    return checks, extra


RUNNERS = {
    "propagate": run_propagate,
    "converge": run_converge,
    "norms": run_norms,
    "inequalities": run_inequalities,
    "kato": run_kato,
    "km": run_km,
}


def run(config_path, seed: int | None = None, output: str | None = None) -> int:
    """Run one experiment; returns the exit status."""
    try:
        cfg = load_config(config_path, seed, output)
    except ConfigError as exc:
        log.error("malformed config: %s", exc)
        return EXIT_CONFIG
    out = Output(Path(cfg["output_dir"]))
    out.json("config.resolved.json", cfg)
    grid, tp, interaction = build_objects(cfg)
    try:
        checks, extra = RUNNERS[cfg["experiment"]](cfg, grid, tp, interaction, out)
    except Exception as exc:  # noqa: BLE001 -- reported through the exit status
        log.error("%s failed: %s: %s", cfg["experiment"], type(exc).__name__, exc)
        out.json("summary.json", {"experiment": cfg["experiment"], "status": "error",
                                  "error": f"{type(exc).__name__}: {exc}",
                                  "exit_code": EXIT_RUNTIME, "checks": []})
        return EXIT_RUNTIME
    ok = all(c["passed"] for c in checks)
    code = EXIT_OK if ok else EXIT_VIOLATIONS
    out.json("summary.json", {"experiment": cfg["experiment"], "seed": cfg["seed"],
                              "status": "ok" if ok else "violations", "exit_code": code,
                              "checks": checks, "results": extra})
    return code


def list_catalog() -> str:
    lines = ["potentials:"]
    for kind in KINDS:
        prm = ", ".join(f"{k}={v}" for k, v in POTENTIAL_DEFAULTS[kind].items())
        lines.append(f"  {kind}({prm})")
    lines.append("envelopes:")
    for kind, prm in ENVELOPE_DEFAULTS.items():
        lines.append(f"  {kind}(" + ", ".join(f"{k}={v}" for k, v in prm.items()) + ")")
    lines.append("experiments:")
    for exp in EXPERIMENTS:
        prm = ", ".join(f"{k}={v}" for k, v in PARAMETER_DEFAULTS[exp].items())
        lines.append(f"  {exp}: {prm}")
    return "\n".join(lines) + "\n"


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="graphnorm", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run the experiment described by a YAML config")
    p_run.add_argument("config")
    p_run.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_run.add_argument("--output", default=None, help="override the output directory")
    sub.add_parser("list", help="print potentials, envelopes, experiments and defaults")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    if args.command == "list":
        sys.stdout.write(list_catalog())
        return EXIT_OK
    return run(args.config, args.seed, args.output)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
