"""Command-line entry point.

Verbs:
    profile      emit the explicit standing-wave profile and its functionals
    groundstate  run the Nehari-manifold minimization
    evolve       time-evolve a (perturbed) profile
    run          execute an experiment config file
    validate     check an experiment config file without running it
    sweep        run an experiment config across a parameter range
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .errors import DnlsError
from .experiments import (
    SWEEP_PARAMS,
    ExperimentConfig,
    parse_config,
    run_experiment,
    sweep,
    validate_config,
)


def _add_common(sub):
    sub.add_argument("--out", default="out", help="output directory (default: out)")
    sub.add_argument("--seed", type=int, default=0, help="RNG seed (default: 0)")
    sub.add_argument("--quiet", action="store_true", help="suppress progress output")


def _add_physics(sub):
    sub.add_argument("--omega", type=float, default=1.0)
    sub.add_argument("--alpha", type=float, default=0.0)
    sub.add_argument("--grid-length", type=float, default=20.0)
    sub.add_argument("--grid-n", type=int, default=2001)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="dnls",
        description="Half-line derivative NLS laboratory: profiles, ground "
                    "states, evolution, blow-up and stability experiments.",
    )
    sp = ap.add_subparsers(dest="verb", required=True)

    p = sp.add_parser("profile", help="emit the explicit standing-wave profile")
    _add_physics(p)
    p.add_argument("--name", default="profile")
    _add_common(p)

    p = sp.add_parser("groundstate", help="Nehari-manifold minimization")
    _add_physics(p)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--name", default="groundstate")
    _add_common(p)

    p = sp.add_parser("evolve", help="time-evolve a (perturbed) profile")
    _add_physics(p)
    p.add_argument("--dt", type=float, default=5e-4)
    p.add_argument("--t-end", type=float, default=10.0)
    p.add_argument("--delta", type=float, default=0.0,
                   help="perturbation amplitude (0 = exact profile)")
    p.add_argument("--sample-every", type=int, default=20)
    p.add_argument("--name", default="evolve")
    _add_common(p)

    p = sp.add_parser("run", help="execute an experiment config file")
    p.add_argument("config")
    _add_common(p)

    p = sp.add_parser("validate", help="check an experiment config file")
    p.add_argument("config")
    _add_common(p)

    p = sp.add_parser("sweep", help="run a config across a parameter range")
    p.add_argument("config")
    p.add_argument("--param", required=True, choices=SWEEP_PARAMS)
    p.add_argument("--values", required=True,
                   help="comma-separated list, e.g. 0.5,1,2")
    _add_common(p)

    return ap


def _config_from_args(args, kind: str) -> ExperimentConfig:
    kw = dict(
        name=args.name, kind=kind, omega=args.omega, alpha=args.alpha,
        grid_length=args.grid_length, grid_n=args.grid_n,
        output_dir=args.out, rng_seed=args.seed,
    )
    if kind == "groundstate":
        kw["tol"] = args.tol
    if kind == "evolve":
        kw.update(dt=args.dt, t_end=args.t_end, delta=args.delta,
                  sample_every=args.sample_every)
    return ExperimentConfig(**kw)


def _report(summary, quiet: bool) -> int:
    if not quiet:
        for a in summary.assertions:
            flag = "PASS" if a.passed else "FAIL"
            print(f"[{flag}] {summary.name}: {a.name} = {a.value:.6g} ({a.tolerance})")
        print(f"{'PASS' if summary.passed else 'FAIL'} {summary.name} "
              f"({summary.kind}); artifacts: "
              + ", ".join(str(p) for p in summary.artifacts))
    return 0 if summary.passed else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.ERROR if args.quiet else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.verb in ("profile", "groundstate", "evolve"):
            cfg = _config_from_args(args, args.verb)
            return _report(run_experiment(cfg), args.quiet)

        if args.verb == "run":
            cfg = parse_config(args.config)
            cfg = _override_output(cfg, args)
            return _report(run_experiment(cfg), args.quiet)

        if args.verb == "validate":
            cfg = parse_config(args.config)
            diag = validate_config(cfg)
            if not args.quiet or diag["errors"]:
                print(json.dumps(diag, indent=2))
            return 1 if diag["errors"] else 0

        if args.verb == "sweep":
            cfg = parse_config(args.config)
            cfg = _override_output(cfg, args)
            values = [float(s) for s in args.values.split(",") if s.strip()]
            summaries = sweep(cfg, args.param, values)
            code = 0
            for s in summaries:
                code |= _report(s, args.quiet)
            return code
    except DnlsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


def _override_output(cfg: ExperimentConfig, args) -> ExperimentConfig:
    from dataclasses import replace

    out = {}
    if args.out != "out":
        out["output_dir"] = args.out
    if args.seed != 0:
        out["rng_seed"] = args.seed
    return replace(cfg, **out) if out else cfg


if __name__ == "__main__":
    sys.exit(main())
