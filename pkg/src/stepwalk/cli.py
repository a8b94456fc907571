"""Command-line interface.

Subcommands: simulate (one trajectory to CSV), ensemble (per-trajectory
summary CSV), verify <kind> (theorem verification report JSON), weights
(martingale-weight table CSV).

Exit codes: 0 all checks passed, 1 a verification check failed,
2 usage/config/domain error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .distributions import parse_distribution
from .engine import simulate_trajectory, write_trajectory_csv
from .errors import StepwalkError
from .harness import (
    ExperimentConfig,
    ExperimentKind,
    Tolerances,
    verify,
    write_ensemble_csv,
)
from .martingale import weights, write_weights_csv
from .model import WalkParams

EXIT_PASS = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


def _add_walk_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--p", type=float, help="sign-keep probability")
    parser.add_argument("--alpha", type=float, help="reinforcement probability")
    parser.add_argument("--dist", type=str,
                        help="innovation law, e.g. rademacher:0.7, uniform:-1:1, "
                             "gaussian:0:1, discrete:1,3@0.5,0.5")
    parser.add_argument("--seed", type=int, default=0, help="64-bit seed")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stepwalk",
        description="Simulate step-reinforced random walks and verify their limit theorems.")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="generate one trajectory as CSV")
    _add_walk_flags(sim)
    sim.add_argument("--n", type=int, required=True, help="horizon")
    sim.add_argument("--out", type=str, required=True, help="output CSV path")

    ens = sub.add_parser("ensemble", help="per-trajectory summary CSV for an ensemble")
    _add_walk_flags(ens)
    ens.add_argument("--n", type=int, help="horizon")
    ens.add_argument("--ensemble", type=int, help="number of trajectories")
    ens.add_argument("--config", type=str, help="JSON experiment config (flags override)")
    ens.add_argument("--out", type=str, required=True, help="output CSV path")

    ver = sub.add_parser("verify", help="run a theorem-verification experiment")
    ver.add_argument("kind", choices=[k.value for k in ExperimentKind],
                     help="experiment to run")
    _add_walk_flags(ver)
    ver.add_argument("--n", type=int, help="horizon")
    ver.add_argument("--ensemble", type=int, help="number of trajectories")
    ver.add_argument("--theta", type=float, help="memory-cutoff fraction (gradual_clt)")
    ver.add_argument("--ks-level", type=float, help="KS significance level")
    ver.add_argument("--var-tol", type=float, help="variance-check tolerance")
    ver.add_argument("--config", type=str, help="JSON experiment config (flags override)")
    ver.add_argument("--out", type=str, help="report JSON path (default stdout)")

    wts = sub.add_parser("weights", help="martingale weight table a_n, A_n, v_n as CSV")
    wts.add_argument("--a", type=float, required=True, help="memory index in (-1, 1)")
    wts.add_argument("--n", type=int, required=True, help="table length")
    wts.add_argument("--out", type=str, required=True, help="output CSV path")
    return parser


def _merge_config(args: argparse.Namespace, kind: str) -> ExperimentConfig:
    data: dict = {}
    if args.config:
        with open(args.config) as fh:
            data = json.load(fh)
    for key, val in (("p", args.p), ("alpha", args.alpha), ("dist", args.dist),
                     ("n", args.n), ("ensemble", args.ensemble),
                     ("theta", getattr(args, "theta", None))):
        if val is not None:
            data[key] = val
    if args.seed is not None and ("seed" not in data or args.seed != 0):
        data.setdefault("seed", args.seed)
        if args.seed != 0:
            data["seed"] = args.seed
    data["kind"] = kind
    tol = dict(data.get("tolerances") or {})
    if getattr(args, "ks_level", None) is not None:
        tol["ks_level"] = args.ks_level
    if getattr(args, "var_tol", None) is not None:
        tol["var_tol"] = args.var_tol
    if tol:
        data["tolerances"] = tol
    if data.get("kind") != "gradual_clt":
        data.pop("theta", None)
    return ExperimentConfig.from_dict(data)


def _require(args: argparse.Namespace, names: list[str]) -> None:
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise StepwalkError(f"missing required flags: {', '.join('--' + n for n in missing)}")


def _cmd_simulate(args: argparse.Namespace) -> int:
    _require(args, ["p", "alpha", "dist"])
    params = WalkParams(p=args.p, alpha=args.alpha, dist=parse_distribution(args.dist))
    traj = simulate_trajectory(params, args.n, seed=args.seed)
    write_trajectory_csv(traj, args.out)
    return EXIT_PASS


def _cmd_ensemble(args: argparse.Namespace) -> int:
    if not args.config:
        _require(args, ["p", "alpha", "dist", "n", "ensemble"])
    # kind is irrelevant to the summary CSV; slln keeps validation happy
    config = _merge_config(args, "slln")
    write_ensemble_csv(config, args.out)
    return EXIT_PASS


def _cmd_verify(args: argparse.Namespace) -> int:
    if not args.config and args.kind != "weights_diag":
        _require(args, ["p", "alpha", "dist", "n", "ensemble"])
    if args.kind == "weights_diag" and not args.config:
        # the weights diagnostic needs no walk parameters; fill inert ones
        for name, default in (("p", 0.5), ("alpha", 0.5), ("dist", "rademacher:0.5"),
                              ("n", 1), ("ensemble", 1)):
            if getattr(args, name, None) is None:
                setattr(args, name, default)
    config = _merge_config(args, args.kind)
    report = verify(config)
    text = report.to_json()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_PASS if report.passed else EXIT_CHECK_FAILED


def _cmd_weights(args: argparse.Namespace) -> int:
    write_weights_csv(weights(args.a, args.n), args.out)
    return EXIT_PASS


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors already; normalize others
        return EXIT_USAGE if exc.code not in (0,) else 0
    handlers = {"simulate": _cmd_simulate, "ensemble": _cmd_ensemble,
                "verify": _cmd_verify, "weights": _cmd_weights}
    try:
        return handlers[args.command](args)
    except (StepwalkError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
