"""Command-line front end.

Subcommands classify, average, orbits and sweep drive the full pipeline
from a JSON config file. Every command writes a summary.json into the
output directory; orbits and sweep additionally emit orbit_<i>.csv traces
with columns t,x,y,z at 17 significant digits. Output is deterministic:
re-running a command with the same config produces byte-identical files.

Exit codes: 0 ok, 1 config error, 2 hypothesis violation, 3 oracle
mismatch, 4 shooting shortfall.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from enum import Enum
from pathlib import Path

import numpy as np

from .averaging import average_first, average_second
from .closed_form import (
    HypothesisViolated,
    OrbitCount,
    classify,
    f_closed,
    g_closed,
    predicted_roots,
)
from .config import ConfigError, RunConfig, load_config, to_dict
from .jerk import EquilibriumKind, classify_equilibrium, equilibria
from .normal_form import jerk_standard_form, unfold
from .shooting import (
    NoReturn,
    PeriodicOrbitRecord,
    SeedInvalid,
    ShootingDiverged,
    StepLimitExceeded,
    StepUnderflow,
    period_trace,
    shoot_orbit,
    sweep_epsilon,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_HYPOTHESIS = 2
EXIT_ORACLE = 3
EXIT_SHOOTING = 4

ORACLE_TOL = 1e-8
GRID_R = (0.5, 8.0)
GRID_W = (-2.0, 2.0)
GRID_N = 20
TRACE_SAMPLES = 512

_SHOOT_ERRORS = (ShootingDiverged, NoReturn, SeedInvalid,
                 StepLimitExceeded, StepUnderflow)


def _jsonable(obj):
    """Recursively convert numbers, arrays and enums to JSON-safe values."""
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _record_doc(rec: PeriodicOrbitRecord) -> dict:
    return {
        "eps": rec.eps,
        "section_point": list(rec.section_point),
        "period": rec.period,
        "residual": rec.residual,
        "floquet": rec.floquet,
        "seed": list(rec.seed),
    }


def _write_summary(out_dir: Path, doc: dict, args) -> None:
    text = json.dumps(_jsonable(doc), sort_keys=True, indent=2) + "\n"
    (out_dir / "summary.json").write_text(text, encoding="utf-8")
    if args.json:
        sys.stdout.write(text)


def _say(args, message: str) -> None:
    if not args.quiet and not args.json:
        print(message)


def _write_trace(path: Path, t: np.ndarray, states: np.ndarray) -> None:
    lines = ["t,x,y,z"]
    for ti, row in zip(t, states):
        lines.append(",".join(format(float(v), ".17g")
                              for v in (ti, row[0], row[1], row[2])))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _require_unfolding(cfg: RunConfig):
    if cfg.unfolding is None:
        raise ConfigError("this command needs an 'unfolding' block in the config")
    return cfg.unfolding


def cmd_classify(cfg: RunConfig, out_dir: Path, args) -> int:
    doc: dict = {"command": "classify", "config": to_dict(cfg)}
    if cfg.params is not None:
        points = []
        zero_hopf = False
        for point in equilibria(cfg.params):
            cls = classify_equilibrium(cfg.params, point)
            zero_hopf = zero_hopf or cls.kind is EquilibriumKind.ZERO_HOPF
            points.append({
                "point": list(cls.point),
                "eigenvalues": cls.eigenvalues,
                "kind": cls.kind,
            })
        doc["equilibria"] = points
        doc["verdict"] = ("zero-Hopf equilibrium at the origin" if zero_hopf
                          else "no zero-Hopf equilibrium")
        _say(args, f"verdict: {doc['verdict']}")
        _write_summary(out_dir, doc, args)
        return EXIT_OK

    u = _require_unfolding(cfg)
    base = unfold(u, 0.0)
    cls = classify_equilibrium(base, (0.0, 0.0, 0.0))
    doc["base_point"] = {
        "params": {"a": base.a, "b": base.b, "c": base.c},
        "eigenvalues": cls.eigenvalues,
        "kind": cls.kind,
    }
    if cfg.eps is not None:
        p = unfold(u, cfg.eps)
        doc["unfolded"] = {"eps": cfg.eps, "a": p.a, "b": p.b, "c": p.c}
    try:
        label = classify(u.a2, u.b2, u.delta)
    except HypothesisViolated as exc:
        doc["error"] = {"kind": "HypothesisViolated", "reason": str(exc)}
        _say(args, f"hypothesis violated: {exc}")
        _write_summary(out_dir, doc, args)
        return EXIT_HYPOTHESIS
    prediction = predicted_roots(u.a2, u.b2, u.delta)
    doc["case"] = label
    doc["roots"] = [list(root) for root in prediction.roots]
    doc["jacobian_determinants"] = list(prediction.jac_dets)
    if prediction.degenerate_reason is not None:
        doc["degenerate_reason"] = prediction.degenerate_reason
    _say(args, f"case: {label.value}, roots: {doc['roots']}")
    _write_summary(out_dir, doc, args)
    return EXIT_OK


def cmd_average(cfg: RunConfig, out_dir: Path, args) -> int:
    u = _require_unfolding(cfg)
    sys_first = jerk_standard_form(u)
    slice_u = replace(u, a1=0.0, b1=0.0)
    sys_second = jerk_standard_form(slice_u)

    r_grid = np.linspace(GRID_R[0], GRID_R[1], GRID_N)
    w_grid = np.linspace(GRID_W[0], GRID_W[1], GRID_N)
    rows = ["r,w,f1_num,f2_num,f1_closed,f2_closed,"
            "g1_num,g2_num,g1_closed,g2_closed"]
    dev_first = 0.0
    dev_second = 0.0
    for r in r_grid:
        for w in w_grid:
            z = np.array([r, w])
            f_num = average_first(sys_first, z, cfg.quadrature)
            f_ref = f_closed(r, w, u.a1, u.b1, u.delta)
            g_num = average_second(sys_second, z, cfg.quadrature)
            g_ref = g_closed(r, w, u.a2, u.b2, u.delta)
            dev_first = max(dev_first, float(np.max(np.abs(f_num - f_ref))))
            dev_second = max(dev_second, float(np.max(np.abs(g_num - g_ref))))
            rows.append(",".join(format(float(v), ".17g") for v in
                                 (r, w, f_num[0], f_num[1], f_ref[0], f_ref[1],
                                  g_num[0], g_num[1], g_ref[0], g_ref[1])))
    (out_dir / "average_table.csv").write_text("\n".join(rows) + "\n",
                                               encoding="utf-8")

    ok = max(dev_first, dev_second) <= ORACLE_TOL
    doc = {
        "command": "average",
        "config": to_dict(cfg),
        "grid": {"r": [GRID_R[0], GRID_R[1], GRID_N],
                 "w": [GRID_W[0], GRID_W[1], GRID_N]},
        "max_abs_dev_first": dev_first,
        "max_abs_dev_second": dev_second,
        "tolerance": ORACLE_TOL,
        "oracle_ok": ok,
        "table": "average_table.csv",
    }
    if u.a1 != 0.0 or u.b1 != 0.0:
        doc["second_order_note"] = (
            "second-order comparison evaluated at a1 = b1 = 0; the closed "
            "form is defined on that slice")
    _say(args, f"max deviation: first {dev_first:.3e}, second {dev_second:.3e} "
               f"(tolerance {ORACLE_TOL:g})")
    _write_summary(out_dir, doc, args)
    return EXIT_OK if ok else EXIT_ORACLE


def cmd_orbits(cfg: RunConfig, out_dir: Path, args) -> int:
    u = _require_unfolding(cfg)
    if cfg.eps is None:
        raise ConfigError("orbits needs 'eps'; use the sweep command for eps_list")
    doc: dict = {"command": "orbits", "config": to_dict(cfg)}
    try:
        label = classify(u.a2, u.b2, u.delta)
    except HypothesisViolated as exc:
        doc["error"] = {"kind": "HypothesisViolated", "reason": str(exc)}
        _say(args, f"hypothesis violated: {exc}")
        _write_summary(out_dir, doc, args)
        return EXIT_HYPOTHESIS
    prediction = predicted_roots(u.a2, u.b2, u.delta)
    doc["case"] = label
    if prediction.count is OrbitCount.DEGENERATE:
        doc["error"] = {"kind": "DegeneratePrediction",
                        "reason": prediction.degenerate_reason}
        _say(args, f"degenerate prediction: {prediction.degenerate_reason}")
        _write_summary(out_dir, doc, args)
        return EXIT_HYPOTHESIS

    p = unfold(u, cfg.eps)
    orbits = []
    failures = {}
    for i, root in enumerate(prediction.roots):
        try:
            rec = shoot_orbit(u, cfg.eps, root, cfg.integrator)
        except _SHOOT_ERRORS as exc:
            failures[str(i)] = f"{type(exc).__name__}: {exc}"
            _say(args, f"orbit {i}: failed ({type(exc).__name__})")
            continue
        trace_name = f"orbit_{i}.csv"
        t, states = period_trace(p, rec.section_point, rec.period,
                                 cfg.integrator, TRACE_SAMPLES)
        _write_trace(out_dir / trace_name, t, states)
        entry = _record_doc(rec)
        entry["root"] = list(root)
        entry["jac_det"] = prediction.jac_dets[i]
        entry["trace"] = trace_name
        orbits.append(entry)
        _say(args, f"orbit {i}: period {rec.period:.12g}, "
                   f"residual {rec.residual:.3e}")

    doc["orbits"] = orbits
    doc["failures"] = failures
    doc["predicted_count"] = len(prediction.roots)
    doc["located_count"] = len(orbits)
    _write_summary(out_dir, doc, args)
    return EXIT_OK if len(orbits) >= len(prediction.roots) else EXIT_SHOOTING


def cmd_sweep(cfg: RunConfig, out_dir: Path, args) -> int:
    u = _require_unfolding(cfg)
    if cfg.eps_list is None:
        raise ConfigError("sweep needs 'eps_list' in the config")
    doc: dict = {"command": "sweep", "config": to_dict(cfg)}
    try:
        result = sweep_epsilon(u, cfg.eps_list, cfg.integrator)
    except HypothesisViolated as exc:
        doc["error"] = {"kind": "HypothesisViolated", "reason": str(exc)}
        _say(args, f"hypothesis violated: {exc}")
        _write_summary(out_dir, doc, args)
        return EXIT_HYPOTHESIS

    any_failure = False
    entries = []
    for entry in result.entries:
        eps_dir = out_dir / "sweep" / str(entry.eps)
        eps_dir.mkdir(parents=True, exist_ok=True)
        p = unfold(u, entry.eps)
        records = {}
        for i, rec in sorted(entry.records.items()):
            trace_name = f"orbit_{i}.csv"
            t, states = period_trace(p, rec.section_point, rec.period,
                                     cfg.integrator, TRACE_SAMPLES)
            _write_trace(eps_dir / trace_name, t, states)
            rec_doc = _record_doc(rec)
            rec_doc["trace"] = f"sweep/{entry.eps}/{trace_name}"
            records[str(i)] = rec_doc
        failures = {str(i): msg for i, msg in sorted(entry.failures.items())}
        any_failure = any_failure or bool(failures)
        entries.append({"eps": entry.eps, "records": records,
                        "failures": failures})
        _say(args, f"eps {entry.eps}: {len(records)} orbit(s), "
                   f"{len(failures)} failure(s)")

    doc["roots"] = [list(root) for root in result.roots]
    doc["entries"] = entries
    doc["amp_slopes"] = {str(i): s for i, s in sorted(result.amp_slopes.items())}
    doc["seed_error_slopes"] = {str(i): s for i, s in
                                sorted(result.seed_error_slopes.items())}
    doc["max_coords"] = {str(i): vals for i, vals in
                         sorted(result.max_coords.items())}
    doc["monotone"] = result.monotone
    _say(args, f"amplitude slopes: {doc['amp_slopes']}, "
               f"monotone: {result.monotone}")
    _write_summary(out_dir, doc, args)
    return EXIT_OK if not any_failure else EXIT_SHOOTING


_COMMANDS = {
    "classify": cmd_classify,
    "average": cmd_average,
    "orbits": cmd_orbits,
    "sweep": cmd_sweep,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="averager",
        description="Periodic orbits of a zero-Hopf jerk system by averaging "
                    "and Poincare-section shooting.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("classify", "equilibria, eigenvalues, case label and predicted roots"),
        ("average", "numeric averaged functions against the closed forms"),
        ("orbits", "shoot every predicted orbit and emit trace files"),
        ("sweep", "repeat orbit location over a decreasing eps list"),
    ]:
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="JSON config file")
        cmd.add_argument("--out", default=None,
                         help="output directory (overrides config output_dir)")
        cmd.add_argument("--quiet", action="store_true",
                         help="suppress progress lines on stdout")
        cmd.add_argument("--json", action="store_true",
                         help="print the summary document to stdout")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = load_config(args.config)
        out_dir = Path(args.out if args.out is not None else cfg.output_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        return _COMMANDS[args.command](cfg, out_dir, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HypothesisViolated as exc:
        print(f"hypothesis violated: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS


if __name__ == "__main__":
    sys.exit(main())
