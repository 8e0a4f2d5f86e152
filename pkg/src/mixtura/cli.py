"""Command-line entry point: scenario orchestration and persistence.

    mixtura <simulate|linearize|equivalence|lagrangian-check|convergence>
            --config <path> [--out <dir>] [--force]

Exit codes: 0 success, 1 config error, 2 numerical failure (a diagnostic
JSON is written next to the other outputs).  Floating-point output carries
17 significant digits so every value round-trips.  Existing output files
are never overwritten without --force.  The output directory resolves as
--out, then $MIXTURA_OUT, then [output] dir from the config.
"""

import argparse
import hashlib
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, load_config
from .discretization import Grid1D
from .dynamics import (EntropicState, PicardError, PositivityError, SimConfig,
                       TimeSeriesRecord, initial_state, run)
from .lagrangian import remainder_scaling_sweep, v0_identity_residual
from .linear_analysis import assemble_constant, spectrum
from .model import ConvergenceError, equilibrium_coefficients, phi, psi
from .model import EntropicPoint, PointState

NUMERICAL_ERRORS = (PicardError, PositivityError, ConvergenceError)


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_series_csv(records, path: Path):
    lines = [TimeSeriesRecord.CSV_HEADER]
    for rec in records:
        lines.append(",".join(_fmt(v) for v in rec.as_row()))
    path.write_text("\n".join(lines) + "\n")


def _write_json(payload, path: Path):
    path.write_text(json.dumps(payload, indent=2) + "\n")


def _resolve_out(args, settings) -> Path:
    if args.out:
        return Path(args.out)
    env = os.environ.get("MIXTURA_OUT")
    if env:
        return Path(env)
    return settings.out_dir


def _check_overwrite(paths, force: bool):
    clashes = [str(p) for p in paths if p.exists()]
    if clashes and not force:
        raise ConfigError(
            "refusing to overwrite existing outputs (use --force): "
            + ", ".join(clashes))


def _manifest(config_path: Path, outputs, t0: float, status: int) -> dict:
    return {
        "config_sha256": hashlib.sha256(config_path.read_bytes()).hexdigest(),
        "artifact_version": __version__,
        "outputs": [str(p) for p in outputs],
        "wall_clock_seconds": time.perf_counter() - t0,
        "exit_status": status,
    }


def _finish(out_dir: Path, config_path: Path, outputs, t0: float) -> int:
    manifest_path = out_dir / "manifest.json"
    _write_json(_manifest(config_path, outputs + [manifest_path], t0, 0),
                manifest_path)
    return 0


def _numerical_failure(out_dir: Path, exc) -> int:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, PositivityError):
        payload["location"] = exc.location
        payload["time"] = exc.time
    _write_json(payload, out_dir / "diagnostic.json")
    print(f"numerical failure: {exc}", file=sys.stderr)
    return 2


def cmd_simulate(args) -> int:
    settings = load_config(args.config)
    out_dir = _resolve_out(args, settings)
    out_dir.mkdir(parents=True, exist_ok=True)
    series = out_dir / "series.csv"
    final = out_dir / "final_state.json"
    _check_overwrite([series, final], args.force)
    t0 = time.perf_counter()
    try:
        state, records = run(settings.sim)
    except NUMERICAL_ERRORS as exc:
        return _numerical_failure(out_dir, exc)
    write_series_csv(records, series)
    cfg = settings.sim
    payload = {
        "t": records[-1].t,
        "formulation": cfg.formulation,
        "grid": {"n": cfg.grid.n, "length": cfg.grid.length, "bc": cfg.grid.bc},
    }
    if isinstance(state, EntropicState):
        payload["fields"] = {"rho": state.rho.tolist(), "u": state.u.tolist(),
                             "h": state.h.tolist()}
    else:
        payload["fields"] = {"rho1": state.rho1.tolist(),
                             "rho2": state.rho2.tolist(),
                             "u": state.u.tolist()}
    _write_json(payload, final)
    return _finish(out_dir, Path(args.config), [series, final], t0)


def cmd_linearize(args) -> int:
    settings = load_config(args.config)
    out_dir = _resolve_out(args, settings)
    out_dir.mkdir(parents=True, exist_ok=True)
    target = out_dir / "spectrum.json"
    _check_overwrite([target], args.force)
    t0 = time.perf_counter()
    cfg = settings.sim
    coeffs = equilibrium_coefficients(cfg.rho1_star, cfg.rho2_star, cfg.params)
    op = assemble_constant(coeffs, cfg.grid, cfg.params)
    report = spectrum(op)
    _write_json(report.to_json_dict(), target)
    return _finish(out_dir, Path(args.config), [target], t0)


def cmd_equivalence(args) -> int:
    settings = load_config(args.config)
    out_dir = _resolve_out(args, settings)
    out_dir.mkdir(parents=True, exist_ok=True)
    target = out_dir / "equivalence.csv"
    _check_overwrite([target], args.force)
    t0 = time.perf_counter()
    cfg = settings.sim
    rows = []
    prev = None
    try:
        for level in range(2):
            n = cfg.grid.n * (2 ** level)
            dt = cfg.dt / (4 ** level)
            diff = _equivalence_diff(cfg, n, dt)
            total = max(diff.values())
            ratio = prev / total if prev is not None else float("nan")
            rows.append((n, dt, diff["rho"], diff["u"], diff["h"], total, ratio))
            prev = total
    except NUMERICAL_ERRORS as exc:
        return _numerical_failure(out_dir, exc)
    lines = ["n,dt,linf_rho,linf_u,linf_h,linf_total,ratio"]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    target.write_text("\n".join(lines) + "\n")
    return _finish(out_dir, Path(args.config), [target], t0)


def _equivalence_diff(cfg: SimConfig, n: int, dt: float) -> dict:
    """Run both formulations from Psi-consistent data; max nodal differences."""
    from dataclasses import replace

    grid = Grid1D(n=n, length=cfg.grid.length, bc=cfg.grid.bc)
    ent_cfg = replace(cfg, grid=grid, dt=dt, formulation="entropic")
    prim_cfg = replace(cfg, grid=grid, dt=dt, formulation="primitive")
    ent_state, _ = run(ent_cfg)
    prim_state, _ = run(prim_cfg)
    ent_h = ent_state.h
    prim_h = np.asarray(psi(PointState(prim_state.rho1, prim_state.rho2),
                            cfg.params).h)
    return {
        "rho": float(np.max(np.abs(ent_state.rho - prim_state.rho))),
        "u": float(np.max(np.abs(ent_state.u_at_nodes() - prim_state.u))),
        "h": float(np.max(np.abs(ent_h - prim_h))),
    }


def cmd_lagrangian_check(args) -> int:
    settings = load_config(args.config)
    out_dir = _resolve_out(args, settings)
    out_dir.mkdir(parents=True, exist_ok=True)
    target = out_dir / "lagrangian.json"
    _check_overwrite([target], args.force)
    t0 = time.perf_counter()
    cfg = settings.sim
    identity = v0_identity_residual(seed=cfg.seed)
    sweep = remainder_scaling_sweep(cfg.params, cfg.grid)
    payload = {
        "v0_identity_max_residual": identity,
        "zero_history_max": sweep["zero_history_max"],
        "slopes": sweep["slopes"],
        "ok": bool(identity <= 1e-13
                   and sweep["zero_history_max"] == 0.0
                   and all(s >= 1.9 for s in sweep["slopes"].values())),
    }
    _write_json(payload, target)
    return _finish(out_dir, Path(args.config), [target], t0)


def cmd_convergence(args) -> int:
    settings = load_config(args.config)
    out_dir = _resolve_out(args, settings)
    out_dir.mkdir(parents=True, exist_ok=True)
    target = out_dir / "convergence.csv"
    _check_overwrite([target], args.force)
    t0 = time.perf_counter()
    from dataclasses import replace

    from .mms import spatial_convergence, temporal_convergence

    ns = (32, 64, 128)
    cfg = replace(settings.sim, formulation="primitive",
                  grid=Grid1D(n=ns[0], length=settings.sim.grid.length,
                              bc=settings.sim.grid.bc))
    fine = replace(cfg, grid=Grid1D(n=ns[-1], length=cfg.grid.length,
                                    bc=cfg.grid.bc))
    try:
        srows, sorders = spatial_convergence(cfg, ns=ns)
        trows, torders = temporal_convergence(fine)
    except NUMERICAL_ERRORS as exc:
        return _numerical_failure(out_dir, exc)
    lines = ["study,n,dt,l2_total,observed_order"]
    for k, row in enumerate(srows):
        order = sorders[k - 1] if k else float("nan")
        lines.append("spatial," + ",".join(
            _fmt(v) for v in (row["n"], row["dt"], row["l2_total"], order)))
    for k, row in enumerate(trows):
        order = torders[k - 1] if k else float("nan")
        lines.append("temporal," + ",".join(
            _fmt(v) for v in (row["n"], row["dt"], row["l2_total"], order)))
    target.write_text("\n".join(lines) + "\n")
    return _finish(out_dir, Path(args.config), [target], t0)


COMMANDS = {
    "simulate": cmd_simulate,
    "linearize": cmd_linearize,
    "equivalence": cmd_equivalence,
    "lagrangian-check": cmd_lagrangian_check,
    "convergence": cmd_convergence,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mixtura",
        description="Two-component mixture flow: simulation and analysis")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to config file")
        p.add_argument("--out", default=None, help="output directory override")
        p.add_argument("--force", action="store_true",
                       help="overwrite existing outputs")
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
