"""Experiment CLI: deterministic runners over JSON configs with CSV output.

Subcommands: dimension, measure, curve, doubling, bg, reproduce. Configs are
strict JSON (version 1, unknown fields rejected); every run writes a CSV per
cell family plus a JSON result record with the config hash, and re-running a
config with the same seed and a single worker is byte-identical.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import math
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import chart, comparison, curves, measure
from .spaces import (
    BoxRegion,
    LinearSubspace,
    MinkowskiSpace,
    PiecewiseLinearCurve,
    PointCloudRegion,
    SubspaceCubeRegion,
    restrict_to_subspace,
)

SUITES = ("minkowski-subspaces", "volume-consistency", "doubling", "bishop-gromov")


class ConfigError(ValueError):
    """Invalid configuration; message names the offending field."""


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def write_csv(path, header, rows):
    with open(path, "w") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(_fmt(row[h]) for h in header) + "\n")


def config_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


# ---------------------------------------------------------------------------
# Config validation

_COMMON_KEYS = {"version", "mode", "experiment", "seed", "workers", "out", "expect"}
_MODE_KEYS = {
    "dimension": {"space", "region", "delta_grid", "N_grid", "generators"},
    "measure": {"space", "region", "N", "delta", "generators", "lower"},
    "curve": {"space", "vertices", "tol", "delta_grid"},
    "doubling": {"metric", "neighborhood", "pairs", "t_slices", "density_check",
                 "sandwich_C"},
    "bg": {"lattice", "Rstar_default"},
}


def _check_keys(obj: dict, allowed, context: str):
    unknown = set(obj) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown field(s) {sorted(unknown)} in {context}")


def validate_config(cfg: dict, mode: str) -> dict:
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    if cfg.get("version") != 1:
        raise ConfigError("field 'version' must be 1")
    if "mode" in cfg and cfg["mode"] != mode:
        raise ConfigError(f"field 'mode' is {cfg['mode']!r}, subcommand is {mode!r}")
    _check_keys(cfg, _COMMON_KEYS | _MODE_KEYS[mode], "config root")
    if "delta_grid" in cfg and isinstance(cfg["delta_grid"], dict):
        dg = cfg["delta_grid"]
        _check_keys(dg, {"start", "factor", "count"}, "delta_grid")
        if not 0.0 < dg["factor"] < 1.0:
            raise ConfigError("field 'delta_grid.factor' must lie in (0, 1)")
        if dg["count"] < 1:
            raise ConfigError("field 'delta_grid.count' must be >= 1")
    return cfg


def geometric_grid(spec) -> list:
    if isinstance(spec, list):
        return [float(d) for d in spec]
    return [spec["start"] * spec["factor"] ** i for i in range(spec["count"])]


def build_space(spec: dict) -> MinkowskiSpace:
    _check_keys(spec, {"type", "n", "C"}, "space")
    if spec.get("type", "minkowski") != "minkowski":
        raise ConfigError(f"unknown space type {spec.get('type')!r}")
    return MinkowskiSpace(int(spec["n"]), float(spec.get("C", 1.0)))


def build_region(spec: dict, space: MinkowskiSpace):
    kind = spec.get("kind")
    if kind == "box":
        _check_keys(spec, {"kind", "lo", "hi"}, "region")
        return BoxRegion(space, spec["lo"], spec["hi"])
    if kind == "subspaceCube":
        _check_keys(spec, {"kind", "basis", "half_side"}, "region")
        sub = LinearSubspace(space, np.asarray(spec["basis"], dtype=float))
        return SubspaceCubeRegion(restrict_to_subspace(sub),
                                  float(spec.get("half_side", 1.0)))
    if kind == "pointCloud":
        _check_keys(spec, {"kind", "points"}, "region")
        return PointCloudRegion(space, spec["points"])
    if kind == "curveImage":
        _check_keys(spec, {"kind", "vertices"}, "region")
        from .spaces import CurveRegion
        return CurveRegion(PiecewiseLinearCurve(space, spec["vertices"]))
    raise ConfigError(f"unknown region kind {kind!r}")


# ---------------------------------------------------------------------------
# Runners


def run_dimension(cfg: dict, seed: int) -> dict:
    space = build_space(cfg["space"])
    region = build_region(cfg["region"], space)
    est = measure.estimate_dimension(
        space, region, geometric_grid(cfg["delta_grid"]),
        [float(N) for N in cfg["N_grid"]],
        generators=cfg.get("generators"), seed=seed)
    rows = [{"generator": g, "delta": d, "N": N, "cost": c, "verified": v}
            for g, d, N, c, v in est.series.entries]
    summary = {"value": est.value, "bracket_lo": est.bracket[0],
               "bracket_hi": est.bracket[1]}
    return {"rows": rows,
            "header": ["generator", "delta", "N", "cost", "verified"],
            "summary": summary}


def run_measure(cfg: dict, seed: int) -> dict:
    space = build_space(cfg["space"])
    region = build_region(cfg["region"], space)
    N = float(cfg["N"])
    delta = float(cfg["delta"])
    upper = measure.upper_measure(space, region, N, delta,
                                  generators=cfg.get("generators"), seed=seed)
    summary = {"upper": upper, "N": N, "delta": delta}
    if cfg.get("lower"):
        lspec = cfg["lower"]
        _check_keys(lspec, {"sample_budget", "probes", "scale"}, "lower")
        if isinstance(region, SubspaceCubeRegion):
            mass = measure.uniform_on_cube(region)
        elif isinstance(region, BoxRegion):
            mass = measure.uniform_on_box(region)
        else:
            raise ConfigError("field 'lower' supports box and subspaceCube regions")
        summary["lower"] = measure.lower_measure(
            region.space, region, N, mass,
            sample_budget=int(lspec.get("sample_budget", 200_000)),
            probes=int(lspec.get("probes", 200)),
            scale=float(lspec.get("scale", 0.15)), seed=seed)
    rows = [dict(summary)]
    return {"rows": rows, "header": sorted(rows[0]), "summary": summary}


def run_curve(cfg: dict, seed: int) -> dict:
    space = build_space(cfg["space"])
    curve = PiecewiseLinearCurve(space, np.asarray(cfg["vertices"], dtype=float))
    tol = float(cfg.get("tol", 1e-6))
    L, trace = curves.tau_length(curve, tol=tol, return_trace=True)
    summary = {"L_tau": L, "null": curves.is_null_curve(curve)}
    rows = [{"level": lv, "mesh": mesh, "sum": s} for lv, mesh, s in trace.levels]
    if cfg.get("delta_grid"):
        cmp_rec = curves.compare_length_measure(curve, geometric_grid(cfg["delta_grid"]),
                                                tol=tol)
        summary["V1_finest"] = min(cmp_rec["V1upper"].values())
    return {"rows": rows, "header": ["level", "mesh", "sum"], "summary": summary}


def run_doubling(cfg: dict, seed: int) -> dict:
    mspec = dict(cfg["metric"])
    _check_keys(mspec, {"name", "n", "lo", "hi", "params"}, "metric")
    metric = chart.metric_field(mspec["name"], n=int(mspec.get("n", 2)),
                                lo=mspec.get("lo"), hi=mspec.get("hi"),
                                **mspec.get("params", {}))
    nspec = dict(cfg["neighborhood"])
    _check_keys(nspec, {"B", "Z_lo", "Z_hi", "a", "b", "V_lo", "V_hi", "C"},
                "neighborhood")
    nbhd = chart.CylindricalNeighborhood(**nspec)
    sandwich_C = float(cfg.get("sandwich_C", max(nbhd.C, 1.0)))
    sandwich = chart.verify_cone_sandwich(metric, sandwich_C)
    rec = chart.doubling_constant(metric, nbhd, pairs=int(cfg.get("pairs", 8)),
                                  seed=seed, t_slices=int(cfg.get("t_slices", 400)))
    summary = {"L_empirical": rec["L_empirical"], "L_analytic": rec["L_analytic"],
               "lam": rec["lam"], "sandwich_verified": sandwich.verified,
               "dim_bound": chart.dimension_bound_from_doubling(rec["L_empirical"],
                                                                rec["lam"])}
    rows = [{"ratio": r} for r in rec["ratios"]]
    if cfg.get("density_check"):
        dspec = cfg["density_check"]
        _check_keys(dspec, {"base_point", "h0", "halvings"}, "density_check")
        dens = chart.volume_density_check(metric, dspec["base_point"],
                                          float(dspec["h0"]),
                                          halvings=int(dspec.get("halvings", 4)))
        summary["density_final_ratio"] = dens[-1]["ratio"]
        rows = [{"ratio": r["ratio"]} for r in dens] + rows
    return {"rows": rows, "header": ["ratio"], "summary": summary}


def run_bg(cfg: dict, seed: int) -> dict:
    rstar_default = float(cfg.get("Rstar_default", 2.0))
    rows = []
    ok = True
    for cell in cfg["lattice"]:
        _check_keys(cell, {"K", "N", "r", "Rstar"}, "lattice cell")
        K, N, r = float(cell["K"]), float(cell["N"]), float(cell["r"])
        Rstar = float(cell.get("Rstar", rstar_default))
        L = comparison.tcd_doubling_constant(K, N, Rstar if K < 0 else math.inf)
        ratio = comparison.bg_ratio_bound(K, N, r, 2.0 * r)
        holds = ratio >= 1.0 / L - 1e-12
        ok = ok and holds
        rows.append({"K": K, "N": N, "Rstar": Rstar, "L": L,
                     "bg_ratio_r_2r": ratio, "holds": holds})
    summary = {"all_hold": ok, "cells": len(rows)}
    return {"rows": rows,
            "header": ["K", "N", "Rstar", "L", "bg_ratio_r_2r", "holds"],
            "summary": summary}


_RUNNERS = {"dimension": run_dimension, "measure": run_measure, "curve": run_curve,
            "doubling": run_doubling, "bg": run_bg}


def _check_expect(expect: dict, summary: dict) -> bool:
    """Compare summary values against {'field': {'value': v, 'tol': t}} clauses."""
    for key, clause in expect.items():
        got = summary.get(key)
        if isinstance(clause, dict):
            if got is None or abs(float(got) - float(clause["value"])) > float(clause["tol"]):
                return False
        elif got != clause:
            return False
    return True


def run_experiment(cfg: dict, mode: str, seed: int | None = None,
                   out_dir: str | None = None, workers: int = 1) -> dict:
    cfg = validate_config(cfg, mode)
    seed = int(cfg.get("seed", 0)) if seed is None else int(seed)
    result = _RUNNERS[mode](cfg, seed)
    passed = True
    if cfg.get("expect"):
        passed = _check_expect(cfg["expect"], result["summary"])
    record = {
        "experiment": cfg.get("experiment", mode),
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "config_hash": config_hash(cfg),
        "mode": mode,
        "seed": seed,
        "summary": result["summary"],
        "passed": passed,
    }
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        stem = record["experiment"]
        write_csv(out / f"{stem}.csv", result["header"], result["rows"])
        with open(out / f"{stem}.json", "w") as f:
            json.dump(record, f, indent=2, sort_keys=True)
    return record


def reproduce_suite(name: str, seed: int | None = None,
                    out_dir: str | None = None) -> list:
    if name not in SUITES:
        raise ConfigError(f"unknown suite {name!r}; available: {', '.join(SUITES)}")
    text = resources.files("lorvol").joinpath(f"suites/{name}.json").read_text()
    bundle = json.loads(text)
    records = []
    for cfg in bundle["configs"]:
        mode = cfg["mode"]
        records.append(run_experiment(cfg, mode, seed=seed, out_dir=out_dir))
    return records


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="lorvol",
        description="Diamond-cover measures, dimension estimates and doubling "
                    "constants on model Lorentzian spaces")
    parser.add_argument("--config", type=str, help="path to a JSON experiment config")
    parser.add_argument("--seed", type=int, default=None, help="master seed override")
    parser.add_argument("--workers", type=int, default=1,
                        help="worker count (1 gives bit-stable output)")
    parser.add_argument("--out", type=str, default=None, help="output directory")
    sub = parser.add_subparsers(dest="command", required=True)
    for mode in _RUNNERS:
        sub.add_parser(mode, help=f"run a {mode} experiment from --config")
    rp = sub.add_parser("reproduce", help="run a shipped experiment bundle")
    rp.add_argument("suite", choices=SUITES)
    args = parser.parse_args(argv)

    try:
        if args.command == "reproduce":
            records = reproduce_suite(args.suite, seed=args.seed, out_dir=args.out)
        else:
            if not args.config:
                print("error: --config is required for this subcommand", file=sys.stderr)
                return 2
            with open(args.config) as f:
                cfg = json.load(f)
            records = [run_experiment(cfg, args.command, seed=args.seed,
                                      out_dir=args.out, workers=args.workers)]
    except (ConfigError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    failed = [r for r in records if not r["passed"]]
    for r in records:
        status = "PASS" if r["passed"] else "FAIL"
        print(f"[{status}] {r['experiment']}: {json.dumps(r['summary'], default=str)}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
