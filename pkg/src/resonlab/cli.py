"""
Command-line front end.

``resonlab scan``      scan sheets and write resonances.csv, curve.json, report.json
``resonlab verify``    run the checks named in a recipe and write report.json
``resonlab fixtures``  check the Bessel golden file or rewrite the evaluation grid

Exit codes: 0 success, 1 configuration or input error, 2 incomplete scan,
3 a verification criterion failed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import counting, fixtures
from .complexfn import NU_MAX
from .radial import RadialPotential

EXIT_OK, EXIT_CONFIG, EXIT_INCOMPLETE, EXIT_FAILED = 0, 1, 2, 3

DIMENSION_HELP = """\
Units: step radii and heights are physical; internally every channel works
in the rescaled variable lambda*R with heights V*R^2 (R = outermost radius).
Resonances are reported in physical lambda.
"""


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    dimension: int
    steps: list
    sheets: list
    r_max: float
    tolerances: dict
    seed: int
    out_dir: str
    nu_max: float = NU_MAX
    exclusion_radius: float | None = None
    workers: int | None = None
    checks: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    def potential(self) -> RadialPotential:
        return RadialPotential(self.dimension, tuple(self.steps))

    def scan_options(self) -> dict:
        return {
            "tol": self.tolerances["newton"],
            "winding_tol": self.tolerances["winding"],
            "seed": self.seed,
            "workers": self.workers,
            "exclusion_radius": self.exclusion_radius,
        }


def _require(obj: dict, key: str, kind, where: str = ""):
    name = f"{where}{key}"
    if key not in obj:
        raise ConfigError(f"missing required field '{name}'")
    value = obj[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ConfigError(f"field '{name}' must be a finite number, got {value!r}")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"field '{name}' must be an integer, got {value!r}")
        return value
    if not isinstance(value, kind):
        raise ConfigError(f"field '{name}' has the wrong type ({type(value).__name__})")
    return value


KNOWN_KEYS = {"dimension", "steps", "sheets", "r_max", "nu_max", "exclusion_radius", "tolerances",
              "seed", "out_dir", "workers", "checks"}
KNOWN_CHECKS = {"lower_bound", "zworski", "symmetry", "seeds", "jensen", "channel_count"}


def parse_config(data: dict) -> RunConfig:
    """Validate a decoded config; every error names the offending field."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    d = _require(data, "dimension", int)
    if d < 1:
        raise ConfigError(f"field 'dimension' must be >= 1, got {d}")
    raw_steps = _require(data, "steps", list)
    if not raw_steps:
        raise ConfigError("field 'steps' must list at least one step")
    steps = []
    for i, st in enumerate(raw_steps):
        where = f"steps[{i}]."
        if not isinstance(st, dict):
            raise ConfigError(f"field 'steps[{i}]' must be an object with radius and height")
        r = _require(st, "radius", float, where)
        h = _require(st, "height", float, where)
        if r <= 0:
            raise ConfigError(f"field '{where}radius' must be positive, got {r}")
        if steps and r <= steps[-1][0]:
            raise ConfigError(f"field '{where}radius' must exceed the previous radius")
        steps.append((r, h))
    sheets = _require(data, "sheets", list)
    if not sheets:
        raise ConfigError("field 'sheets' must not be empty")
    for i, m in enumerate(sheets):
        if isinstance(m, bool) or not isinstance(m, int):
            raise ConfigError(f"field 'sheets[{i}]' must be an integer")
        if m == 0:
            raise ConfigError(f"field 'sheets[{i}]' must be nonzero (sheet 0 is physical)")
    r_max = _require(data, "r_max", float)
    if r_max <= 0:
        raise ConfigError(f"field 'r_max' must be positive, got {r_max}")
    nu_max = float(_require(data, "nu_max", float)) if "nu_max" in data else NU_MAX
    if not 0 <= nu_max <= NU_MAX:
        raise ConfigError(f"field 'nu_max' must lie in [0, {NU_MAX:g}]")
    excl = None
    if data.get("exclusion_radius") is not None:
        excl = _require(data, "exclusion_radius", float)
        if excl < 0:
            raise ConfigError("field 'exclusion_radius' must be nonnegative")
    tol = _require(data, "tolerances", dict)
    tolerances = {}
    for key in ("winding", "newton"):
        v = _require(tol, key, float, "tolerances.")
        if v <= 0:
            raise ConfigError(f"field 'tolerances.{key}' must be positive")
        tolerances[key] = v
    seed = _require(data, "seed", int)
    out_dir = _require(data, "out_dir", str)
    workers = None
    if data.get("workers") is not None:
        workers = _require(data, "workers", int)
        if workers < 1:
            raise ConfigError("field 'workers' must be >= 1")
    checks = data.get("checks", [])
    if not isinstance(checks, list) or any(c not in KNOWN_CHECKS for c in checks):
        raise ConfigError(f"field 'checks' must be a list drawn from {sorted(KNOWN_CHECKS)}")
    extras = {k: v for k, v in data.items() if k not in KNOWN_KEYS}
    try:
        RadialPotential(d, tuple(steps))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return RunConfig(d, steps, sheets, r_max, tolerances, seed, out_dir, nu_max, excl, workers, checks, extras)


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return parse_config(data)


def _dump(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=False) + "\n")


def _scan_all(cfg: RunConfig, sheets) -> dict:
    pot = cfg.potential()
    out = {}
    for m in sheets:
        res = counting.scan_sheet(pot, m, cfg.r_max, cfg.nu_max, **cfg.scan_options())
        # odd dimensions collapse sheets; keep the first request for each distinct sheet
        out.setdefault(res.sheet, res)
    return out


def _curve_for(res: counting.ResonanceSet, r_max: float) -> counting.CountingCurve:
    curve = counting.counting_function(res, counting.dyadic_radii(r_max))
    try:
        counting.order_of_growth(curve)
    except ValueError:
        pass
    return curve


def _scan_checks(cfg: RunConfig, sets: dict, curves: dict) -> list:
    reports = []
    d = cfg.dimension
    wanted = cfg.checks or (["zworski"] if d == 1 else ["lower_bound", "symmetry"])
    for name in wanted:
        if name == "lower_bound" and d >= 2:
            for m, curve in curves.items():
                if curve.fitted_order is None:
                    reports.append(counting.CheckReport(f"lower_bound_d{d}_m{m}", "SKIPPED", {}, {},
                                                        "too few nonzero counts for an order fit"))
                    continue
                rep = counting.verify_lower_bound(curve, d, cfg.extras.get("order_tol", 0.15))
                rep.name = f"lower_bound_d{d}_m{m}"
                reports.append(rep)
        elif name == "zworski" and d == 1:
            for m, curve in curves.items():
                rep = counting.zworski_1d_check(curve, 2 * cfg.potential().support_radius)
                reports.append(rep)
        elif name == "symmetry":
            if d % 2 == 1:
                for m, res in sets.items():
                    rep = counting.symmetry_check(res, res)
                    rep.name = f"symmetry_self_m{m}"
                    reports.append(rep)
            else:
                for m in sorted(sets):
                    if m > 0 and -m in sets:
                        rep = counting.symmetry_check(sets[m], sets[-m])
                        rep.name = f"symmetry_m{m}_vs_m{-m}"
                        reports.append(rep)
    return reports


def _channel_checks(cfg: RunConfig) -> list:
    pot = cfg.potential()
    opts = {"tol": cfg.tolerances["newton"], "winding_tol": cfg.tolerances["winding"], "seed": cfg.seed}
    reports = []
    for name in cfg.checks:
        if name == "seeds":
            spec = cfg.extras.get("seeds", {})
            reports.append(counting.seed_fidelity_check(
                pot, spec.get("nu", 40), spec.get("m", 1), h_margin=spec.get("h_margin", 0.15),
                max_iter=spec.get("max_iter", 8), residual=spec.get("residual", 1e-10),
                min_fraction=spec.get("min_fraction", 0.9), tol=cfg.tolerances["newton"]))
        elif name == "jensen":
            spec = cfg.extras.get("jensen", {})
            reports.append(counting.jensen_check(
                pot, spec.get("nu", 20), spec.get("m", 1), spec.get("r_lo", 20.0), spec.get("r_hi", 160.0),
                spec.get("max_gap", 0.3), **opts))
        elif name == "channel_count":
            spec = cfg.extras.get("channel_count", {})
            for nu in spec.get("orders", [30, 40]):
                for m in spec.get("sheets", [1, -1]):
                    reports.append(counting.channel_zero_count_check(
                        pot, nu, m, spec.get("radius_factor", 1.25), spec.get("epsilon", 0.1), **opts))
    return reports


def _write_scan_outputs(cfg: RunConfig, out_dir: Path, sets: dict, curves: dict, reports: list) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = [e for m in sorted(sets) for e in sets[m].entries]
    counting.write_resonances(entries, out_dir / "resonances.csv")
    checks = {r.name: r.status for r in reports}
    for i, (m, curve) in enumerate(curves.items()):
        if i == 0:
            counting.write_curve(curve, out_dir / "curve.json", checks)
        if len(curves) > 1:
            counting.write_curve(curve, out_dir / f"curve_sheet{m}.json", checks)


def _report(reports, sets=None) -> dict:
    out = {"criteria": [r.to_json() for r in reports]}
    if sets is not None:
        out["scans"] = [sets[m].summary() for m in sorted(sets)]
    return out


def cmd_scan(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.rmax is not None:
        if args.rmax <= 0:
            print("config error: --rmax must be positive", file=sys.stderr)
            return EXIT_CONFIG
        cfg.r_max = args.rmax
    if args.workers is not None:
        cfg.workers = args.workers
    sheets = [args.sheet] if args.sheet is not None else cfg.sheets
    if 0 in sheets:
        print("config error: --sheet must be nonzero", file=sys.stderr)
        return EXIT_CONFIG
    out_dir = Path(args.out_dir or cfg.out_dir)
    try:
        sets = _scan_all(cfg, sheets)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    curves = {m: _curve_for(res, cfg.r_max) for m, res in sets.items()}
    reports = _scan_checks(cfg, sets, curves)
    _write_scan_outputs(cfg, out_dir, sets, curves, reports)
    report = _report(reports, sets)
    if all(not s.entries for s in sets.values()):
        report["notes"] = ["zero resonances found"]
    _dump(report, out_dir / "report.json")
    n = sum(len(s.entries) for s in sets.values())
    print(f"{n} resonance entries written to {out_dir / 'resonances.csv'}")
    if any(s.incomplete for s in sets.values()):
        print("scan incomplete: see report.json failures", file=sys.stderr)
        return EXIT_INCOMPLETE
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.workers is not None:
        cfg.workers = args.workers
    out_dir = Path(args.out_dir or cfg.out_dir)
    sheet_checks = {"lower_bound", "zworski", "symmetry"}
    needs_scan = not cfg.checks or bool(sheet_checks & set(cfg.checks))
    sets, reports = None, []
    try:
        if needs_scan:
            sets = _scan_all(cfg, cfg.sheets)
            curves = {m: _curve_for(res, cfg.r_max) for m, res in sets.items()}
            reports += _scan_checks(cfg, sets, curves)
            _write_scan_outputs(cfg, out_dir, sets, curves, reports)
        reports += _channel_checks(cfg)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out_dir.mkdir(parents=True, exist_ok=True)
    _dump(_report(reports, sets), out_dir / "report.json")
    for r in reports:
        print(f"{r.status:7s} {r.name} {json.dumps(r.measured)}")
    if sets is not None and any(s.incomplete for s in sets.values()):
        return EXIT_INCOMPLETE
    return EXIT_OK if all(r.status in (counting.PASS, "SKIPPED") for r in reports) else EXIT_FAILED


def cmd_fixtures(args) -> int:
    if args.mode == "check":
        path = Path(args.path) if args.path else fixtures.GOLDEN_PATH
        try:
            rep = fixtures.check_golden(path, rtol=args.rtol)
        except fixtures.FixtureFormatError as exc:
            print(f"fixture error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except OSError as exc:
            print(f"fixture error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        print(f"checked {rep.n_checked} golden values at rtol={rep.rtol:g}: "
              f"{len(rep.failures)} failures")
        for err, rec, _ in rep.worst:
            print(f"  line {rec.lineno}: {rec.kind} nu={rec.nu:g} z={rec.z} rel_err={err:.3g}")
        return EXIT_OK if rep.ok else EXIT_CONFIG
    path = Path(args.path) if args.path else fixtures.GRID_PATH
    if not 0 < args.nu_max <= NU_MAX:
        print(f"--nu-max must lie in (0, {NU_MAX:g}]", file=sys.stderr)
        return EXIT_CONFIG
    grid = fixtures.make_grid(args.nu_max)
    fixtures.write_grid(path, grid)
    print(f"wrote {len(grid)} grid points to {path}; golden values are regenerated offline")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="resonlab", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter,
                                epilog=DIMENSION_HELP)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("scan", help="scan sheets for resonances", epilog=DIMENSION_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    s.add_argument("--config", required=True)
    s.add_argument("--sheet", type=int, help="scan only this sheet")
    s.add_argument("--rmax", type=float, help="override r_max")
    s.add_argument("--out-dir", help="override out_dir")
    s.add_argument("--workers", type=int, help="worker processes (default from config, else all cores)")
    s.set_defaults(func=cmd_scan)

    v = sub.add_parser("verify", help="run the checks of a recipe", epilog=DIMENSION_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    v.add_argument("--config", required=True)
    v.add_argument("--out-dir", help="override out_dir")
    v.add_argument("--workers", type=int)
    v.set_defaults(func=cmd_verify)

    f = sub.add_parser("fixtures", help="Bessel golden-value fixtures")
    f.add_argument("mode", choices=["check", "regen-grid"])
    f.add_argument("--path", help="golden file (check) or grid file (regen-grid)")
    f.add_argument("--nu-max", type=float, default=NU_MAX)
    f.add_argument("--rtol", type=float, default=1e-10)
    f.set_defaults(func=cmd_fixtures)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
