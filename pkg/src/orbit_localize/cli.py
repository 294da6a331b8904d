"""Configuration-driven command-line front end.

One JSON config file captures a whole run: algebra, orbit parameter,
multiplicity mode, evaluation grid, oracle settings, output format.  All
randomness is seeded through the config (or --seed), and outputs contain no
timestamps or machine state, so identical configs produce byte-identical
result files.

Subcommands: eval, verify, calibrate, oracle, cycle-limit.
Exit codes: 0 success, 2 configuration error, 3 degenerate-only grid,
4 verification failure.

The only environment knob is ORBIT_LOCALIZE_THREADS, a cap on concurrent
grid evaluation; file writes are always single-threaded and ordered.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import geometry_sl2 as geo
from .algebra import AlgebraError, build_algebra, element
from .localize import OrbitSpec, fourier_grid, fourier_value, make_orbit
from .oracle import (
    CalibrationError,
    calibrate,
    damped_oscillatory_integral,
    haar_orbit_sample,
    mc_fourier_integral,
    split_orbit_carrier,
)
from .suites import SUITE_NAMES, SuiteSettings, run_suite

__all__ = ["main", "RunConfig", "load_config"]

RESULT_VERSION = 1

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DEGENERATE = 3
EXIT_VERIFY = 4


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GridAxis:
    start: float
    stop: float
    steps: int
    direction: Optional[tuple[float, ...]]  # coordinates over the algebra basis


@dataclass(frozen=True)
class RunConfig:
    family: str
    n: int
    weight: tuple[float, ...]
    mode: Optional[str]
    s0: int
    multiplicities: Optional[dict]
    axes: tuple[GridAxis, ...]
    seed: Optional[int]
    mc_samples: int
    eps_schedule: tuple[float, ...]
    scale_log2: int
    out_format: str
    out_path: Optional[str]
    raw: dict


def _require(cfg: dict, key: str, context: str) -> object:
    if key not in cfg:
        raise ConfigError(f"missing {context}.{key}" if context else f"missing {key} block")
    return cfg[key]


def load_config(path: str) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")

    algebra = _require(raw, "algebra", "")
    family = _require(algebra, "family", "algebra")
    n = int(_require(algebra, "n", "algebra"))
    weight = tuple(float(v) for v in _require(raw, "weight", ""))
    mode = raw.get("mode")
    s0 = int(raw.get("s0", 1))
    mults = raw.get("multiplicities")

    axes = []
    grid = raw.get("grid", {})
    for i, axis in enumerate(grid.get("axes", [])):
        if "steps" not in axis:
            raise ConfigError(f"missing grid.axes[{i}].steps")
        steps = int(axis["steps"])
        if steps < 1:
            raise ConfigError(f"grid.axes[{i}].steps must be >= 1")
        direction = axis.get("direction")
        axes.append(
            GridAxis(
                start=float(axis.get("start", 0.0)),
                stop=float(axis.get("stop", 0.0)),
                steps=steps,
                direction=tuple(float(c) for c in direction) if direction else None,
            )
        )

    oracle = raw.get("oracle", {})
    seed = oracle.get("seed")
    if seed is not None:
        seed = int(seed)
    eps = tuple(float(e) for e in oracle.get("eps_schedule", (0.2, 0.1, 0.05, 0.025)))
    output = raw.get("output", {})
    out_format = output.get("format", "csv")
    if out_format not in ("csv", "json"):
        raise ConfigError("output.format must be csv or json")
    return RunConfig(
        family=family,
        n=n,
        weight=weight,
        mode=mode,
        s0=s0,
        multiplicities=mults,
        axes=tuple(axes),
        seed=seed,
        mc_samples=int(oracle.get("samples", 200_000)),
        eps_schedule=eps,
        scale_log2=int(oracle.get("scale_schedule_log2", 20)),
        out_format=out_format,
        out_path=output.get("path"),
        raw=raw,
    )


def _build_orbit(cfg: RunConfig) -> OrbitSpec:
    spec = build_algebra(cfg.family, cfg.n)
    return make_orbit(
        spec, cfg.weight, mode=cfg.mode, s0=cfg.s0,
        user_multiplicities=cfg.multiplicities,
    )


def _grid_points(cfg: RunConfig, orbit: OrbitSpec):
    """Cartesian grid; default axis directions are the real Cartan basis."""
    spec = orbit.algebra
    axes = cfg.axes
    if not axes:
        raise ConfigError("missing grid block (no axes)")
    directions = []
    for i, axis in enumerate(axes):
        if axis.direction is None:
            if i >= spec.rank:
                raise ConfigError(
                    f"grid.axes[{i}] needs an explicit direction beyond the rank"
                )
            directions.append(orbit.cartan.real_basis[i].coords)
        else:
            if len(axis.direction) != spec.dim:
                raise ConfigError(
                    f"grid.axes[{i}].direction needs {spec.dim} coordinates"
                )
            directions.append(np.asarray(axis.direction, dtype=float))
    ranges = [np.linspace(a.start, a.stop, a.steps) for a in axes]
    coords_list, points = [], []
    for combo in itertools.product(*ranges):
        vec = np.zeros(spec.dim)
        for c, d in zip(combo, directions):
            vec = vec + c * d
        coords_list.append(tuple(float(c) for c in combo))
        points.append(element(spec, vec))
    return coords_list, points


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_text(path: Optional[str], text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _json_dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("ORBIT_LOCALIZE_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_eval(cfg: RunConfig, out: Optional[str], fmt: str) -> int:
    orbit = _build_orbit(cfg)
    coords_list, points = _grid_points(cfg, orbit)
    results = fourier_grid(orbit, points, threads=_threads())

    n_axes = len(cfg.axes)
    if fmt == "csv":
        header = [f"x{i}" for i in range(n_axes)]
        header += ["re_f", "im_f", "degenerate", "mode", "s0", "version"]
        lines = [",".join(header)]
        for coords, res in zip(coords_list, results):
            row = [_fmt(c) for c in coords]
            row += [
                _fmt(res.value.real) if not res.degenerate else "nan",
                _fmt(res.value.imag) if not res.degenerate else "nan",
                "1" if res.degenerate else "0",
                orbit.mode,
                str(orbit.s0),
                str(RESULT_VERSION),
            ]
            lines.append(",".join(row))
        _write_text(out, "\n".join(lines) + "\n")
    else:
        rows = []
        for coords, res in zip(coords_list, results):
            rows.append({
                "x": list(coords),
                "re_f": None if res.degenerate else res.value.real,
                "im_f": None if res.degenerate else res.value.imag,
                "degenerate": res.degenerate,
                "conjugacy": res.conjugacy,
                "terms": [
                    {
                        "label": t.label,
                        "re_exponent": t.exponent.real,
                        "im_exponent": t.exponent.imag,
                        "re_denominator": t.denominator.real,
                        "im_denominator": t.denominator.imag,
                        "multiplicity": t.multiplicity,
                        "re_value": t.value.real,
                        "im_value": t.value.imag,
                    }
                    for t in res.terms
                ],
            })
        _write_text(out, _json_dump({
            "config": cfg.raw,
            "mode": orbit.mode,
            "s0": orbit.s0,
            "rows": rows,
            "version": RESULT_VERSION,
        }))
    if results and all(r.degenerate for r in results):
        return EXIT_DEGENERATE
    return EXIT_OK


def cmd_verify(cfg: RunConfig, suite: str, out: Optional[str],
               seed_override: Optional[int]) -> int:
    if suite not in SUITE_NAMES + ("all",):
        raise ConfigError(f"unknown suite {suite!r}")
    if suite in ("oracle", "all") and cfg.seed is None and seed_override is None:
        raise ConfigError("missing oracle.seed (required for oracle runs)")
    settings = SuiteSettings(
        family=cfg.family,
        n=cfg.n,
        weight=cfg.weight,
        mode=cfg.mode,
        s0=cfg.s0,
        seed=seed_override if seed_override is not None else (cfg.seed or 20240801),
        mc_samples=cfg.mc_samples,
        eps_schedule=cfg.eps_schedule,
        user_multiplicities=cfg.multiplicities,
    )
    checks = run_suite(suite, settings)
    width = max(len(c.name) for c in checks)
    lines = []
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        lines.append(
            f"{status}  {c.name:<{width}}  residual={c.residual:.3e}"
            f"  threshold={c.threshold:.3e}"
        )
    report = "\n".join(lines) + "\n"
    sys.stdout.write(report)
    if out:
        _write_text(out, _json_dump({
            "suite": suite,
            "checks": [
                {
                    "name": c.name,
                    "residual": c.residual,
                    "threshold": c.threshold,
                    "passed": c.passed,
                }
                for c in checks
            ],
            "passed": all(c.passed for c in checks),
            "config": cfg.raw,
        }))
    return EXIT_OK if all(c.passed for c in checks) else EXIT_VERIFY


def cmd_calibrate(cfg: RunConfig, config_path: str, out: Optional[str],
                  seed_override: Optional[int]) -> int:
    seed = seed_override if seed_override is not None else cfg.seed
    if "oracle" not in cfg.raw:
        raise ConfigError("missing oracle block")
    if seed is None:
        raise ConfigError("missing oracle.seed")
    orbit = _build_orbit(cfg)
    reference = cfg.raw["oracle"].get("reference")
    if reference is not None:
        x0 = element(orbit.algebra, np.asarray(reference, dtype=float))
    else:
        x0 = _default_reference(orbit)
    result = calibrate(orbit, x0, seed, cfg.mc_samples)

    target = Path(out) if out else Path(config_path).with_suffix(".calibrated.json")
    if target.resolve() == Path(config_path).resolve():
        raise ConfigError("calibration output would overwrite the input config")
    updated = dict(cfg.raw)
    updated["s0"] = result.sign
    updated["calibration"] = {
        "liouville_const_re": result.liouville_const.real,
        "liouville_const_im": result.liouville_const.imag,
        "s0": result.sign,
        "provenance": {
            "seed": result.seed,
            "samples": result.count,
            "stderr": result.stderr,
            "reference": [float(c) for c in x0.coords],
        },
    }
    target.write_text(_json_dump(updated))
    sys.stdout.write(
        f"calibration written to {target.name}: "
        f"const=({result.liouville_const.real!r}, {result.liouville_const.imag!r}) "
        f"s0={result.sign}\n"
    )
    return EXIT_OK


def _default_reference(orbit: OrbitSpec):
    spec = orbit.algebra
    vec = np.zeros(spec.dim)
    for k, h in enumerate(orbit.cartan.real_basis):
        vec = vec + (0.7 + 0.31 * k) * h.coords
    return element(spec, vec)


def cmd_oracle(cfg: RunConfig, out: Optional[str],
               seed_override: Optional[int]) -> int:
    seed = seed_override if seed_override is not None else cfg.seed
    if seed is None:
        raise ConfigError("missing oracle.seed")
    orbit = _build_orbit(cfg)
    coords_list, points = _grid_points(cfg, orbit)

    if orbit.algebra.family == "su":
        cal = calibrate(orbit, _default_reference(orbit), seed, cfg.mc_samples)
        shared = haar_orbit_sample(orbit, seed + 1, cfg.mc_samples)
        lines = ["x_coords,re_formula,im_formula,re_mc,im_mc,stderr,agree_3sigma"]
        for coords, x in zip(coords_list, points):
            try:
                fv = fourier_value(orbit, x).value
            except AlgebraError:
                continue
            est = mc_fourier_integral(
                orbit, x, 0, 0, scale=cal.liouville_const, samples=shared
            )
            sigma = float(np.hypot(
                est.stderr,
                abs(est.mean) * cal.stderr / abs(cal.liouville_const),
            ))
            agree = abs(est.mean - fv) <= 3.0 * sigma
            lines.append(",".join([
                ";".join(_fmt(c) for c in coords),
                _fmt(fv.real), _fmt(fv.imag),
                _fmt(est.mean.real), _fmt(est.mean.imag),
                _fmt(sigma), "1" if agree else "0",
            ]))
        _write_text(out, "\n".join(lines) + "\n")
        return EXIT_OK

    usable = None
    for coords, x in zip(coords_list, points):
        try:
            res = fourier_value(orbit, x)
        except AlgebraError:
            continue
        if res.conjugacy == "cartan" and not res.degenerate:
            usable = (coords, x, res)
            break
    if usable is None:
        return EXIT_DEGENERATE
    coords, x, res = usable
    seq = damped_oscillatory_integral(orbit, x, cfg.eps_schedule)
    lines = ["eps,re_estimate,im_estimate"]
    for eps, v in zip(seq.eps_schedule, seq.estimates):
        lines.append(",".join([_fmt(eps), _fmt(v.real), _fmt(v.imag)]))
    lines.append(f"extrapolated,{_fmt(seq.extrapolated.real)},{_fmt(seq.extrapolated.imag)}")
    lines.append(f"formula,{_fmt(res.value.real)},{_fmt(res.value.imag)}")
    _write_text(out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_cycle_limit(cfg: RunConfig, out: Optional[str],
                    seed_override: Optional[int]) -> int:
    if (cfg.family, cfg.n) != ("sl_real", 2):
        raise ConfigError("cycle-limit requires the sl(2,R) model")
    seed = seed_override if seed_override is not None else cfg.seed
    if seed is None:
        raise ConfigError("missing oracle.seed")
    radius = abs(cfg.weight[0])
    lam = 8j * radius
    spec = geo.model_algebra()
    rng = np.random.Generator(np.random.Philox(key=seed))
    count = min(cfg.mc_samples, 500)
    samples = [
        element(spec, 1j * split_orbit_carrier(
            radius, rng.uniform(-3.0, 3.0), rng.uniform(0.0, 2.0 * np.pi)
        ))
        for _ in range(count)
    ]
    schedule = tuple(2.0 ** (-k) for k in range(cfg.scale_log2 + 1))
    report = geo.cycle_scaling_limit(lam, schedule, samples)
    lines = ["s,base_defect,moment_defect"]
    for s, b, m in zip(report.s_schedule, report.base_defects,
                       report.moment_defects):
        lines.append(",".join([_fmt(s), _fmt(b), _fmt(m)]))
    lines.append(f"identity_at_one,{int(report.identity_at_one)},")
    lines.append(f"at_floor,{int(report.at_floor)},")
    lines.append(f"slope,{_fmt(report.slope) if np.isfinite(report.slope) else 'nan'},")
    _write_text(out, "\n".join(lines) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="orbit-localize",
        description="Fixed-point evaluation and verification of orbit Fourier transforms",
    )
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("eval", "verify", "calibrate", "oracle", "cycle-limit"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="JSON run configuration")
        sp.add_argument("--out", default=None, help="output file (default: stdout)")
        sp.add_argument("--format", default=None, choices=("csv", "json"))
        sp.add_argument("--seed", default=None, type=int, help="seed override")
        if name == "verify":
            sp.add_argument("--suite", default="all",
                            choices=SUITE_NAMES + ("all",))
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        fmt = args.format or cfg.out_format
        out = args.out or cfg.out_path
        if args.command == "eval":
            return cmd_eval(cfg, out, fmt)
        if args.command == "verify":
            return cmd_verify(cfg, args.suite, out, args.seed)
        if args.command == "calibrate":
            return cmd_calibrate(cfg, args.config, out, args.seed)
        if args.command == "oracle":
            return cmd_oracle(cfg, out, args.seed)
        if args.command == "cycle-limit":
            return cmd_cycle_limit(cfg, out, args.seed)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, CalibrationError, AlgebraError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
