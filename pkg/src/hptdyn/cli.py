"""Command-line front end: validation, payoffs, fields, trajectories,
equilibria, estimation, and NFG conversion over HPT JSON files."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import dynamics, egta, hptio, legacy, nfg, payoff
from .tables import (
    AsymmetricHpt,
    CapacityError,
    InvalidTableError,
    SymmetricHpt,
    UnsupportedShapeError,
    as_profile,
    validate_hpt,
)

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_IO = 2

SEED_ENV_VAR = "HPTDYN_SEED"


def _parse_profile(text: str, strategies: int) -> np.ndarray:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise ValueError(f"cannot parse profile {text!r}: {exc}") from exc
    return as_profile(values, strategies)


def _parse_start(text: str, table) -> tuple[np.ndarray, ...]:
    parts = text.split(";")
    if isinstance(table, SymmetricHpt):
        if len(parts) != 1:
            raise ValueError("symmetric tables take a single start profile")
        return (_parse_profile(parts[0], table.strategies),)
    if len(parts) != 2:
        raise ValueError("asymmetric tables take 'x1,..;y1,..' start profiles")
    return (_parse_profile(parts[0], table.strategies),
            _parse_profile(parts[1], table.strategies))


def _plot_coords(components) -> list[float]:
    coords: list[float] = []
    for comp in components:
        comp = np.asarray(comp, dtype=float)
        if comp.shape[-1] == 2:
            coords.append(float(comp[0]))
        else:
            coords.extend(float(v) for v in comp)
    return coords


def cmd_validate(args) -> int:
    table = hptio.load_hpt(args.hpt)
    report = validate_hpt(table)
    print(str(report))
    return EXIT_OK if report.ok else EXIT_DOMAIN


def cmd_payoff(args) -> int:
    table = hptio.load_hpt(args.hpt)
    if isinstance(table, SymmetricHpt):
        if args.profile2:
            raise ValueError("--profile2 is only for asymmetric tables")
        x = _parse_profile(args.profile, table.strategies)
        if args.method == "ours":
            values = payoff.expected_payoff_symmetric(table, x)
        else:
            result = legacy.legacy_expected_payoff(table, x)
            values = result.values
            if result.degenerate.any():
                flagged = [int(i) for i in np.flatnonzero(result.degenerate)]
                print(f"warning: degenerate legacy components (x_i = 0): {flagged}",
                      file=sys.stderr)
        print(hptio.dump_json([float(v) for v in values]), end="")
        return EXIT_OK
    if not args.profile2:
        raise ValueError("asymmetric tables need --profile2")
    x = _parse_profile(args.profile, table.strategies)
    y = _parse_profile(args.profile2, table.strategies)
    if args.method == "ours":
        f1, f2 = payoff.expected_payoff_asymmetric(table, x, y)
    else:
        pair = legacy.decompose_asymmetric(table)
        r1 = legacy.legacy_expected_payoff(pair.pop1_table, x)
        r2 = legacy.legacy_expected_payoff(pair.pop2_table, y)
        f1, f2 = r1.values, r2.values
        degenerate = [int(i) for i in np.flatnonzero(r1.degenerate | r2.degenerate)]
        if degenerate:
            print(f"warning: degenerate legacy components (weight 0): {degenerate}",
                  file=sys.stderr)
    print(hptio.dump_json([[float(v) for v in f1], [float(v) for v in f2]]), end="")
    return EXIT_OK


def cmd_field(args) -> int:
    table = hptio.load_hpt(args.hpt)
    field = dynamics.direction_field(table, args.resolution, method=args.method)
    doc = {
        "axes": list(field.axes),
        "points": [
            {"state": [float(v) for v in field.states[p]],
             "velocity": [float(v) for v in field.velocities[p]]}
            for p in range(field.num_points)
        ],
    }
    hptio.dump_json(doc, args.out)
    print(f"wrote {field.num_points} field points to {args.out}")
    return EXIT_OK


def cmd_trajectory(args) -> int:
    table = hptio.load_hpt(args.hpt)
    start = _parse_start(args.start, table)
    trajectory = dynamics.integrate_trajectory(table, start, args.horizon, args.step,
                                               method=args.method)
    k = table.strategies
    if isinstance(table, AsymmetricHpt):
        axes = ["x1", "y1"] if k == 2 else (
            [f"x{i + 1}" for i in range(k)] + [f"y{i + 1}" for i in range(k)])
    else:
        axes = ["x1"] if k == 2 else [f"x{i + 1}" for i in range(k)]
    doc = {
        "axes": axes,
        "step": trajectory.step,
        "points": [
            {"t": float(trajectory.times[s]),
             "state": _plot_coords(trajectory.state_at(s))}
            for s in range(trajectory.num_samples)
        ],
    }
    hptio.dump_json(doc, args.out)
    print(f"wrote {trajectory.num_samples} samples to {args.out}")
    return EXIT_OK


def cmd_equilibria(args) -> int:
    table = hptio.load_hpt(args.hpt)
    search = dynamics.find_equilibria(table, method=args.method)
    doc = [
        {
            "state": _plot_coords(eq.components),
            "residual": float(eq.residual),
            "classification": eq.classification,
            "eigenvalue_real_parts": eq.real_parts,
        }
        for eq in search.equilibria
    ]
    text = hptio.dump_json(doc, args.out)
    if args.out:
        print(f"wrote {len(doc)} equilibria to {args.out}")
    else:
        print(text, end="")
    print(f"seeds: {search.seeds_total}, converged: {search.seeds_converged},"
          f" dropped: {search.seeds_dropped}", file=sys.stderr)
    return EXIT_OK


def _load_wolfpack_config(args) -> egta.WolfpackConfig:
    overrides = {}
    if args.config:
        try:
            overrides = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except OSError as exc:
            raise hptio.HptFileError(f"cannot read {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise hptio.HptFileError(
                f"{args.config}: invalid JSON at line {exc.lineno} column {exc.colno}") from exc
        if not isinstance(overrides, dict):
            raise hptio.HptFileError("wolfpack config must be a JSON object")
        for key in ("sheep_start",):
            if key in overrides and overrides[key] is not None:
                overrides[key] = tuple(overrides[key])
        if "wolf_starts" in overrides and overrides["wolf_starts"] is not None:
            overrides["wolf_starts"] = tuple(tuple(w) for w in overrides["wolf_starts"])
    seed = args.seed
    if seed is None:
        seed = int(os.environ.get(SEED_ENV_VAR, overrides.get("rng_seed", 0)))
    overrides["rng_seed"] = seed
    try:
        return egta.WolfpackConfig(**overrides)
    except TypeError as exc:
        raise hptio.HptFileError(f"bad wolfpack config: {exc}") from exc


def cmd_estimate(args) -> int:
    if args.env != "wolfpack":
        raise ValueError(f"unknown environment {args.env!r} (available: wolfpack)")
    config = _load_wolfpack_config(args)
    if args.replay:
        records = egta.read_episode_log(args.replay)
    else:
        records = list(egta.wolfpack_episode_source(config, args.episodes))
    if args.log:
        egta.write_episode_log(records, args.log)
    estimate = egta.estimate_hpt(
        records, shape=(1, 1, 2),
        min_visits=args.min_visits, window=args.window, tolerance=args.tolerance,
        discard_timeouts=args.discard_timeouts)
    names = (egta.WOLF_STRATEGY_NAMES, egta.WOLF_STRATEGY_NAMES)
    table = AsymmetricHpt(1, 1, 2, estimate.table.counts1, estimate.table.counts2,
                          estimate.table.payoffs1, estimate.table.payoffs2, names)
    hptio.save_hpt(table, args.out)
    report_path = args.report or (str(args.out) + ".report.json")
    report = {
        "episodes_used": estimate.episodes_used,
        "converged": estimate.converged,
        "row_visits": [int(v) for v in estimate.counts_per_row],
        "unestimated_rows": estimate.unestimated_rows,
        "timeouts_seen": estimate.timeouts_seen,
        "timeouts_discarded": estimate.timeouts_discarded,
        "rng_seed": config.rng_seed,
    }
    hptio.dump_json(report, report_path)
    print(f"wrote table to {args.out}, report to {report_path}")
    if estimate.unestimated_rows:
        print(f"warning: rows never visited: {estimate.unestimated_rows}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


def cmd_convert(args) -> int:
    game = hptio.load_nfg(args.nfg)
    split = [int(v) for v in args.split.split(",")]
    if len(split) == 1:
        table = nfg.nfg_to_hpt_symmetric(game, split[0])
    elif len(split) == 2:
        table = nfg.nfg_to_hpt_asymmetric(game, split[0], split[1])
    else:
        raise ValueError("--split takes 'n' (one population) or 'm,n' (two)")
    hptio.save_hpt(table, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_export_csv(args) -> int:
    table = hptio.load_hpt(args.hpt)
    Path(args.out).write_text(hptio.hpt_to_csv(table), encoding="utf-8")
    print(f"wrote {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hptdyn",
        description="Heuristic payoff tables: exact payoffs, replicator dynamics,"
                    " equilibria, and empirical estimation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check an HPT file against the table invariants")
    p.add_argument("--hpt", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("payoff", help="expected payoff vector(s) at a mixed profile")
    p.add_argument("--hpt", required=True)
    p.add_argument("--profile", required=True, help="comma-separated weights, e.g. 0.5,0.5")
    p.add_argument("--profile2", help="second population's profile (asymmetric tables)")
    p.add_argument("--method", choices=("ours", "legacy"), default="ours")
    p.set_defaults(func=cmd_payoff)

    p = sub.add_parser("field", help="sample the replicator direction field on a lattice")
    p.add_argument("--hpt", required=True)
    p.add_argument("--resolution", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--method", choices=("ours", "legacy"), default="ours")
    p.set_defaults(func=cmd_field)

    p = sub.add_parser("trajectory", help="integrate one replicator trajectory")
    p.add_argument("--hpt", required=True)
    p.add_argument("--start", required=True, help="start state, e.g. 0.5,0.5;0.5,0.5")
    p.add_argument("--horizon", type=float, default=200.0)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--out", required=True)
    p.add_argument("--method", choices=("ours", "legacy"), default="ours")
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser("equilibria", help="find and classify stationary points")
    p.add_argument("--hpt", required=True)
    p.add_argument("--method", choices=("ours", "legacy"), default="ours")
    p.add_argument("--out")
    p.set_defaults(func=cmd_equilibria)

    p = sub.add_parser("estimate", help="estimate an HPT from simulated episodes")
    p.add_argument("--env", default="wolfpack")
    p.add_argument("--config", help="JSON file with environment overrides")
    p.add_argument("--episodes", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, help=f"base seed (default: ${SEED_ENV_VAR} or 0)")
    p.add_argument("--report", help="diagnostics path (default: OUT.report.json)")
    p.add_argument("--log", help="write episodes as newline-delimited JSON")
    p.add_argument("--replay", help="re-estimate from an episode log instead of simulating")
    p.add_argument("--min-visits", type=int, default=50)
    p.add_argument("--window", type=int, default=50)
    p.add_argument("--tolerance", type=float, default=1e-3)
    p.add_argument("--discard-timeouts", action="store_true")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("convert", help="compress an NFG tensor into an HPT")
    p.add_argument("--nfg", required=True)
    p.add_argument("--split", required=True, help="'n' for one population, 'm,n' for two")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("export-csv", help="flatten an HPT to CSV for spreadsheets")
    p.add_argument("--hpt", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_csv)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (hptio.HptFileError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (InvalidTableError, UnsupportedShapeError, CapacityError,
            nfg.SymmetryError, dynamics.IntegrationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
