"""Command-line interface: bounds, simulate, controllability, fixedpoints.

Every subcommand takes --config PATH or --preset NAME plus --out DIR and
emits deterministic CSV/JSON carrying the config hash.  Exit codes: 0 on
success, 2 on invalid configuration, 3 on numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .basis import block_decomposition, build_basis
from .config import PRESETS, RunConfig, load_config
from .controllability import controllability_report, fixed_point_analysis, is_kick_stationary
from .dynamics import PERIOD, TimeSeries, make_kick, run_strategy
from .errors import ConfigError, NumericalError
from .operators import (
    DensityMatrix,
    embed_density,
    embed_operator,
    h0_matrix,
    observable_matrix,
    thermal_state,
)
from .output import write_csv, write_json
from .target import TargetState, bound_sweep, build_target

BOUNDS_HEADER = [
    "process",
    "j_max",
    "T_K",
    "optimal",
    "linear",
    "duration_linear",
    "duration_linear_longest",
]

SERIES_HEADER = ["t_over_Trot", "expectation", "projection", "kick_flag"]


def cmd_bounds(config: RunConfig) -> list[str]:
    """Kinematical bound tables: one CSV per temperature."""
    paths = []
    chash = config.config_hash()
    for temperature in config.temperatures_k:
        rows = bound_sweep(
            config.sweep_j_values(),
            [temperature],
            config.process,
            b_cm=config.molecule.b_cm,
            kb_cm_per_k=config.kb_cm_per_k,
            z_mode=config.z_mode,
            renormalize=config.renormalize,
            threshold=config.threshold,
        )
        path = os.path.join(config.out_dir, f"bounds_{config.process}_T{temperature:g}K.csv")
        write_csv(
            path,
            BOUNDS_HEADER,
            (
                [r.kind, r.j_max, r.temperature_k, r.optimal, r.linear, r.duration_linear, r.duration_linear_longest]
                for r in rows
            ),
            chash,
        )
        paths.append(path)
    return paths


def _series_rows(series: TimeSeries):
    proj = series.projection
    for k, t in enumerate(series.times):
        p = float("nan") if proj is None else proj[k]
        yield [t / PERIOD, series.expectation[k], p, int(series.kick_flags[k])]


def _run_one_mode(config: RunConfig, mode: str):
    """One strategy run: control space ("idealized") or enlarged space ("physical").

    Both modes drive on, and report, the control-space observable, so the
    pair of runs measures how well the truncated propagation tracks the
    enlarged one.  Only the kick differs: in physical mode it is the
    exponential of the observable built on the enlarged basis.
    """
    control_basis = build_basis(config.j_max)
    control_rho0 = thermal_state(
        control_basis, config.beta, z_mode=config.z_mode, renormalize=config.renormalize
    )
    control_obs = observable_matrix(control_basis, config.process)
    blocks = block_decomposition(control_basis, config.process)
    target = build_target(control_rho0, control_obs, blocks)

    if mode == "idealized":
        basis = control_basis
        rho0 = control_rho0
        observable = control_obs
        leak_guard = None
    else:
        basis = build_basis(config.j_sim)
        rho0 = thermal_state(basis, config.beta, z_mode=config.z_mode, renormalize=config.renormalize)
        observable = embed_operator(control_obs, basis)
        leak_guard = config.j_sim - 2
        target = TargetState(
            rho=embed_density(target.rho, basis),
            scope=target.scope,
            observable=observable,
            achieved=target.achieved,
            blocks=None,
        )
    h0 = h0_matrix(basis)
    kick = make_kick(basis, config.process, config.kick_amplitude, mode=mode)

    record, series = run_strategy(
        rho0,
        config.strategy,
        kick,
        h0,
        target=target,
        observable=observable,
        max_kicks=config.max_kicks,
        gain_tol=config.gain_tol,
        duration_threshold=config.threshold,
        leak_guard_j=leak_guard,
    )
    return record, series, target


def cmd_simulate(config: RunConfig) -> list[str]:
    """Run the configured strategy in the control space and the enlarged space."""
    paths = []
    chash = config.config_hash()
    for mode in ("idealized", "physical"):
        record, series, target = _run_one_mode(config, mode)
        series_path = os.path.join(config.out_dir, f"timeseries_{mode}.csv")
        write_csv(series_path, SERIES_HEADER, _series_rows(series), chash)
        payload = record.to_jsonable()
        payload["mode"] = mode
        payload["linear_bound"] = target.achieved
        train_path = os.path.join(config.out_dir, f"train_{mode}.json")
        write_json(train_path, payload, chash)
        paths.extend([series_path, train_path])
    return paths


def cmd_controllability(config: RunConfig, j_values: list[int] | None = None) -> list[str]:
    """Lie-algebra dimension reports; the CSV reproduces the reference table layout."""
    values = j_values if j_values else [1, 2, 3]
    if any(j < 1 for j in values):
        raise ConfigError(f"controllability needs j_max >= 1, got {values}")
    reports = [controllability_report(j, config.process) for j in values]
    chash = config.config_hash()
    json_path = os.path.join(config.out_dir, f"controllability_{config.process}.json")
    write_json(json_path, {"reports": [r.to_jsonable() for r in reports]}, chash)
    csv_path = os.path.join(config.out_dir, f"controllability_{config.process}.csv")
    write_csv(
        csv_path,
        ["j_max", "dim_L", "D", "D_prime"],
        ([r.j_max, r.dim_l, r.dim_required, r.dim_required_restricted] for r in reports),
        chash,
    )
    return [json_path, csv_path]


def cmd_fixedpoints(config: RunConfig, force: bool = False) -> list[str]:
    """Fixed-point span analysis of the greedy iteration for the configured process."""
    n = (config.j_max + 1) ** 2
    if n > 12 and not force:
        raise ConfigError(
            f"fixed-point analysis scales with N^2 and N={n} exceeds 12; pass --force to run anyway"
        )
    basis = build_basis(config.j_max)
    h0 = h0_matrix(basis)
    obs = observable_matrix(basis, config.process)
    kick = make_kick(basis, config.process, config.kick_amplitude)
    report = fixed_point_analysis(h0, obs, kick)

    rho0 = thermal_state(basis, config.beta, z_mode=config.z_mode, renormalize=config.renormalize)
    blocks = block_decomposition(basis, config.process)
    target = build_target(rho0, obs, blocks)
    mixed = DensityMatrix(basis, np.eye(n, dtype=complex) / n)
    payload = report.to_jsonable()
    payload.update(
        {
            "process": config.process,
            "j_max": config.j_max,
            "target_is_stationary": is_kick_stationary(target.rho, h0, obs, kick),
            "maximally_mixed_is_stationary": is_kick_stationary(mixed, h0, obs, kick),
        }
    )
    path = os.path.join(config.out_dir, f"fixedpoints_{config.process}.json")
    write_json(path, payload, config.config_hash())
    return [path]


def _add_common(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--config", metavar="PATH", help="JSON config file")
    source.add_argument("--preset", metavar="NAME", help=f"named preset, one of {sorted(PRESETS)}")
    parser.add_argument("--out", metavar="DIR", help="output directory (overrides the config)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rotorkick",
        description="Greedy pulse-train control of thermal rigid rotors",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_bounds = sub.add_parser("bounds", help="kinematical bound and duration tables")
    _add_common(p_bounds)

    p_sim = sub.add_parser("simulate", help="run the pulse-train strategy in both spaces")
    _add_common(p_sim)

    p_ctrl = sub.add_parser("controllability", help="Lie-algebra dimension reports")
    _add_common(p_ctrl)
    p_ctrl.add_argument("--j-max", type=int, nargs="+", metavar="J", help="cutoffs to analyze (default: 1 2 3)")

    p_fix = sub.add_parser("fixedpoints", help="fixed-point span analysis")
    _add_common(p_fix)
    p_fix.add_argument("--force", action="store_true", help="run despite a large basis dimension")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config, args.preset)
        if args.out:
            config = config.with_overrides(out_dir=args.out)
        if args.command == "bounds":
            paths = cmd_bounds(config)
        elif args.command == "simulate":
            paths = cmd_simulate(config)
        elif args.command == "controllability":
            paths = cmd_controllability(config, args.j_max)
        else:
            paths = cmd_fixedpoints(config, force=args.force)
    except ValueError as exc:  # ConfigError and invalid-parameter errors
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        target = getattr(exc, "filename", None)
        print(f"i/o failure{f' on {target!r}' if target else ''}: {exc}", file=sys.stderr)
        return 1
    for path in paths:
        print(path)
    return 0


def main_entry() -> None:
    sys.exit(main())
