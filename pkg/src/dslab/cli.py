"""Command-line surface: JSON-configured runs with machine-readable outputs.

One config file drives one command:

    dslab <command> --config run.json [--out DIR] [--format csv|json]

Commands: solve, trajectory, profile, sweep, fv, verify.  The config is a
single JSON document with a "command" field, a "problem" block, an optional
"output" block and one command-specific block; unknown keys anywhere are
rejected.  Outputs are byte-deterministic: fixed field order, floats at 17
significant digits in CSV, sorted keys in JSON.

Exit codes: 0 success, 2 config validation, 3 numerical failure,
4 unsupported configuration (u_- <= u_+).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from .bumps import Bump, SpaceTimeBump
from .errors import ConfigError, DslabError, InvalidProblem, UnsupportedConfiguration
from .fv import FvConfig, measure_concentration, simulate
from .limits import extrapolate_sigma, run_sweep
from .profile import GridSpec, ProfileConfig, solve_profile
from .riemann import (
    RiemannProblem,
    rh_residual,
    shock_state,
    solve_delta_shock,
)
from .weak import exact_measure_solution, phi_l1, weak_residual

COMMANDS = ("solve", "trajectory", "profile", "sweep", "fv", "verify")

_PROBLEM_KEYS = {"v_minus", "v_plus", "u_minus", "u_plus", "alpha", "k"}
_OUTPUT_KEYS = {"dir", "format"}
_BLOCK_KEYS = {
    "solve": {"t_grid_max", "t_grid_points"},
    "trajectory": {"t_max", "points"},
    "profile": {
        "epsilon", "R", "count", "cluster_fraction", "cluster_halfwidth",
        "grading", "fp_tol", "fp_max_iter", "theta", "quad_order",
    },
    "sweep": {"epsilons", "count", "eta", "fp_tol", "psi"},
    "fv": {
        "x_lo", "x_hi", "cells", "cfl", "t_end", "floor",
        "snapshot_times", "window_halfwidth",
    },
    "verify": {"phis", "panels", "order", "speed_factor"},
}
_PSI_KEYS = {"width", "kind", "plateau_halfwidth", "center"}
_PHI_KEYS = {
    "x_center", "x_width", "t_center", "t_width", "kind", "plateau_halfwidth",
}


def _check_keys(block, allowed, where):
    unknown = set(block) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {where}")


def _fmt(x):
    """17-significant-digit float formatting for CSV (lossless round-trip)."""
    return format(float(x), ".17g")


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) if isinstance(x, (int, float, np.floating)) else x
                             for x in row])


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_table(out_dir, name, fmt, header, rows):
    if fmt == "csv":
        path = out_dir / f"{name}.csv"
        _write_csv(path, header, rows)
    else:
        path = out_dir / f"{name}.json"
        _write_json(path, [dict(zip(header, map(float, row))) for row in rows])
    return path


def load_config(path):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    command = raw.get("command")
    if command not in COMMANDS:
        raise ConfigError(f"command must be one of {COMMANDS}, got {command!r}")
    allowed = {"command", "problem", "output", command}
    _check_keys(raw, allowed, "top level")
    if "problem" not in raw:
        raise ConfigError("missing 'problem' block")
    _check_keys(raw["problem"], _PROBLEM_KEYS, "'problem'")
    _check_keys(raw.get("output", {}), _OUTPUT_KEYS, "'output'")
    _check_keys(raw.get(command, {}), _BLOCK_KEYS[command], f"'{command}'")
    return raw


def build_problem(block):
    try:
        return RiemannProblem(
            v_minus=float(block["v_minus"]),
            v_plus=float(block["v_plus"]),
            u_minus=float(block["u_minus"]),
            u_plus=float(block["u_plus"]),
            alpha=float(block.get("alpha", 0.0)),
            k=int(block.get("k", 1)),
        )
    except KeyError as exc:
        raise ConfigError(f"problem block missing {exc}") from exc
    except InvalidProblem as exc:
        raise ConfigError(f"invalid problem: {exc}") from exc


def _params_dict(params):
    return {"sigma": params.sigma, "w0": params.w0, "u_delta": params.u_delta}


def _cmd_solve(problem, block, out_dir, fmt):
    params = solve_delta_shock(problem)
    t_max = float(block.get("t_grid_max", 10.0))
    n = int(block.get("t_grid_points", 200))
    grid = np.linspace(0.0, t_max, n)
    worst = [0.0, 0.0, 0.0]
    for t in grid:
        r = rh_residual(problem, params, float(t))
        worst = [max(w, abs(x)) for w, x in zip(worst, r)]
    payload = {
        "params": _params_dict(params),
        "entropy_bracket": {
            "lower": problem.u_plus**problem.k,
            "upper": problem.u_minus**problem.k,
        },
        "rh_residual_max": {
            "r1": worst[0], "r2": worst[1], "r3": worst[2],
            "t_grid": [0.0, t_max], "points": n,
        },
    }
    header = ["sigma", "w0", "u_delta", "rh_r1_max", "rh_r2_max", "rh_r3_max"]
    row = [params.sigma, params.w0, params.u_delta, *worst]
    files = [_write_table(out_dir, "solve", fmt, header, [row])]
    path = out_dir / "solve_summary.json"
    _write_json(path, payload)
    files.append(path)
    print(
        f"sigma={params.sigma!r} w0={params.w0!r} u_delta={params.u_delta!r} "
        f"max|rh|={max(worst):.3e}"
    )
    return files


def _cmd_trajectory(problem, block, out_dir, fmt):
    params = solve_delta_shock(problem)
    t_max = float(block.get("t_max", 5.0))
    points = int(block.get("points", 101))
    if t_max <= 0 or points < 2:
        raise ConfigError("trajectory needs t_max > 0 and points >= 2")
    rows = []
    for t in np.linspace(0.0, t_max, points):
        st = shock_state(params, problem.alpha, problem.k, float(t))
        rows.append([st.t, st.x, st.w, st.u_front])
    files = [_write_table(out_dir, "trajectory", fmt, ["t", "x", "w", "u_front"], rows)]
    print(f"trajectory: {points} states up to t={t_max}")
    return files


def _profile_config(block):
    grid = GridSpec(
        count=int(block.get("count", 2001)),
        cluster_fraction=float(block.get("cluster_fraction", 0.6)),
        cluster_halfwidth=(
            None if block.get("cluster_halfwidth") is None
            else float(block["cluster_halfwidth"])
        ),
        grading=float(block.get("grading", 4.0)),
    )
    return ProfileConfig(
        epsilon=float(block["epsilon"]),
        R=None if block.get("R") is None else float(block["R"]),
        grid=grid,
        fp_tol=float(block.get("fp_tol", 1e-10)),
        fp_max_iter=int(block.get("fp_max_iter", 5000)),
        theta=float(block.get("theta", 0.5)),
        quad_order=int(block.get("quad_order", 2)),
    )


def _cmd_profile(problem, block, out_dir, fmt):
    if "epsilon" not in block:
        raise ConfigError("profile block needs 'epsilon'")
    try:
        config = _profile_config(block)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad profile block: {exc}") from exc
    prof = solve_profile(problem, config)
    rows = list(zip(prof.xi, prof.u, prof.v))
    files = [_write_table(out_dir, "profile", fmt, ["xi", "u", "v"], rows)]
    summary = {
        "epsilon": prof.epsilon,
        "R": prof.R,
        "xi_sigma": prof.xi_sigma,
        "iterations": prof.iterations,
        "converged": prof.converged,
        "residual": prof.residual,
        "ode_residual": prof.ode_residual,
        "nodes": len(prof.xi),
    }
    path = out_dir / "profile_summary.json"
    _write_json(path, summary)
    files.append(path)
    print(
        f"profile eps={prof.epsilon}: xi_sigma={prof.xi_sigma!r} "
        f"iters={prof.iterations} ode_residual={prof.ode_residual:.3e}"
    )
    return files


def _cmd_sweep(problem, block, out_dir, fmt):
    if "epsilons" not in block:
        raise ConfigError("sweep block needs 'epsilons'")
    epsilons = [float(e) for e in block["epsilons"]]
    psi = None
    if "psi" in block:
        _check_keys(block["psi"], _PSI_KEYS, "'sweep.psi'")
        params = solve_delta_shock(problem)
        p = block["psi"]
        psi = Bump(
            center=float(p.get("center", params.sigma)),
            width=float(p["width"]),
            kind=p.get("kind", "bump"),
            plateau_halfwidth=float(p.get("plateau_halfwidth", 0.0)),
        )
    try:
        report, _profiles = run_sweep(
            problem,
            epsilons,
            grid=GridSpec(count=int(block.get("count", 2001))),
            eta=None if block.get("eta") is None else float(block["eta"]),
            psi=psi,
            fp_tol=float(block.get("fp_tol", 1e-10)),
        )
    except ValueError as exc:
        raise ConfigError(f"bad sweep block: {exc}") from exc
    est = extrapolate_sigma(report)
    header = ["epsilon", "xi_sigma", "dev_left", "dev_right", "weight", "momentum_weight"]
    rows = [
        [r.epsilon, r.xi_sigma, r.deviations.left, r.deviations.right,
         r.weight_estimate, r.momentum_weight_estimate]
        for r in report.records
    ]
    files = [_write_table(out_dir, "sweep", fmt, header, rows)]
    summary = {
        "eta": report.eta,
        "exact": _params_dict(report.exact),
        "sigma_estimate": {
            "raw": est.raw,
            "richardson": est.richardson,
            "extrapolated": est.extrapolated,
        },
        "records": [
            {
                "epsilon": r.epsilon,
                "xi_sigma": r.xi_sigma,
                "xs_resolution": r.xs_resolution,
                "dev_left_u": r.deviations.left_u,
                "dev_left_v": r.deviations.left_v,
                "dev_right_u": r.deviations.right_u,
                "dev_right_v": r.deviations.right_v,
                "slope": r.deviations.slope,
                "weight_estimate": r.weight_estimate,
                "momentum_weight_estimate": r.momentum_weight_estimate,
            }
            for r in report.records
        ],
    }
    path = out_dir / "sweep_summary.json"
    _write_json(path, summary)
    files.append(path)
    print(
        f"sweep over {len(epsilons)} epsilons: sigma_raw={est.raw!r} "
        f"richardson={est.richardson!r}"
    )
    return files


def _cmd_fv(problem, block, out_dir, fmt):
    for key in ("x_lo", "x_hi", "cells"):
        if key not in block:
            raise ConfigError(f"fv block needs '{key}'")
    try:
        config = FvConfig(
            x_lo=float(block["x_lo"]),
            x_hi=float(block["x_hi"]),
            cells=int(block["cells"]),
            cfl=float(block.get("cfl", 0.45)),
            t_end=float(block.get("t_end", 1.0)),
            floor=None if block.get("floor") is None else float(block["floor"]),
            snapshot_times=tuple(float(s) for s in block.get("snapshot_times", ())),
        )
    except ValueError as exc:
        raise ConfigError(f"bad fv block: {exc}") from exc
    run = simulate(problem, config)
    files = []
    for i, snap in enumerate(run.snapshots):
        rows = list(zip(snap.x, snap.v, snap.m, snap.u))
        files.append(
            _write_table(out_dir, f"fv_snapshot_{i:03d}", fmt, ["x", "v", "m", "u"], rows)
        )
    final = run.snapshots[-1]
    params = solve_delta_shock(problem)
    exact = shock_state(params, problem.alpha, problem.k, final.t)
    window = float(block.get("window_halfwidth", 0.5))
    try:
        x_hat, w_hat = measure_concentration(final, problem, window)
        concentration = {
            "x_hat": x_hat,
            "w_hat": w_hat,
            "x_exact": exact.x,
            "w_exact": exact.w,
            "x_error": abs(x_hat - exact.x),
            "w_relative_error": abs(w_hat - exact.w) / exact.w if exact.w else math.nan,
            "cell_width": (config.x_hi - config.x_lo) / config.cells,
        }
    except ValueError as exc:
        concentration = {"error": str(exc)}
    d = run.diagnostics
    summary = {
        "snapshots": [s.t for s in run.snapshots],
        "steps": d.steps,
        "mass_initial": d.mass_initial,
        "mass_final": d.mass_final,
        "boundary_mass_outflow": d.boundary_mass_outflow,
        "momentum_final": d.momentum_final,
        "momentum_expected": d.momentum_expected,
        "concentration": concentration,
    }
    path = out_dir / "fv_summary.json"
    _write_json(path, summary)
    files.append(path)
    msg = concentration.get("x_hat", "n/a")
    print(f"fv: {d.steps} steps to t={final.t}; x_hat={msg!r}")
    return files


def _cmd_verify(problem, block, out_dir, fmt):
    if "phis" not in block or not block["phis"]:
        raise ConfigError("verify block needs a non-empty 'phis' list")
    params = solve_delta_shock(problem)
    speed = float(block.get("speed_factor", 1.0))
    solution = exact_measure_solution(problem, params, speed_factor=speed)
    panels = int(block.get("panels", 8))
    order = int(block.get("order", 10))
    rows = []
    for i, spec in enumerate(block["phis"]):
        _check_keys(spec, _PHI_KEYS, f"'verify.phis[{i}]'")
        try:
            phi = SpaceTimeBump(
                Bump(
                    center=float(spec["x_center"]),
                    width=float(spec["x_width"]),
                    kind=spec.get("kind", "bump"),
                    plateau_halfwidth=float(spec.get("plateau_halfwidth", 0.0)),
                ),
                Bump(center=float(spec["t_center"]), width=float(spec["t_width"])),
            )
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad phi spec #{i}: {exc}") from exc
        r_mass, r_mom = weak_residual(solution, problem, phi, panels=panels, order=order)
        norm = phi_l1(phi, panels=panels, order=order)
        rows.append([i, r_mass, r_mom, norm, r_mass / norm, r_mom / norm])
    header = ["phi", "r_mass", "r_momentum", "phi_l1", "r_mass_normalized",
              "r_momentum_normalized"]
    files = [_write_table(out_dir, "verify", fmt, header, rows)]
    worst = max(max(abs(r[4]), abs(r[5])) for r in rows)
    path = out_dir / "verify_summary.json"
    _write_json(path, {"speed_factor": speed, "worst_normalized_residual": worst,
                       "panels": panels, "order": order})
    files.append(path)
    print(f"verify: {len(rows)} test functions, worst normalized residual {worst:.3e}")
    return files


_DISPATCH = {
    "solve": _cmd_solve,
    "trajectory": _cmd_trajectory,
    "profile": _cmd_profile,
    "sweep": _cmd_sweep,
    "fv": _cmd_fv,
    "verify": _cmd_verify,
}


def run(command, config, out_dir=None, fmt=None):
    """Dispatch one validated config; returns the list of files written."""
    output = config.get("output", {})
    out_dir = Path(out_dir if out_dir is not None else output.get("dir", "."))
    fmt = fmt if fmt is not None else output.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format must be 'csv' or 'json', got {fmt!r}")
    out_dir.mkdir(parents=True, exist_ok=True)
    problem = build_problem(config["problem"])
    return _DISPATCH[command](problem, config.get(command, {}), out_dir, fmt)


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="dslab",
        description="Delta-shock laboratory for damped zero-pressure gas dynamics",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="path to the JSON run config")
    parser.add_argument("--out", default=None, help="output directory (overrides config)")
    parser.add_argument("--format", default=None, choices=("csv", "json"),
                        help="output format (overrides config)")
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
        if config["command"] != args.command:
            raise ConfigError(
                f"config command {config['command']!r} does not match "
                f"CLI command {args.command!r}"
            )
        files = run(args.command, config, args.out, args.format)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except UnsupportedConfiguration as exc:
        print(f"unsupported configuration: {exc}", file=sys.stderr)
        return 4
    except (DslabError, OverflowError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    for f in files:
        print(f"wrote {f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
