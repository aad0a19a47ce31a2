"""Command-line front end: ``mcpamap eval | solve | sweep``.

Standard output carries data only (``key=value`` lines or CSV); diagnostics
go to standard error. Exit codes:

====  ==========================================================
0     success
1     unexpected internal error
2     usage error, bad instance record or power outside the model
3     infeasible instance or unrepairable PA overload
4     exhaustive search refused by the enumeration size guard
5     configuration file could not be parsed
====  ==========================================================
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .config import load_config
from .errors import (
    ConfigParseError,
    DomainError,
    InfeasibleInstanceError,
    InfeasibleMappingError,
    MappingError,
    OverloadError,
    ResourceLimitError,
)
from .oracle import MAX_ENUMERATION, exhaustive_search
from .powermodel import PRESETS, Variant, d2_input_power, d_input_power, input_power, preset
from .problemcore import MappingInstance, static_mapping, total_input_power
from .relaxsolver import SolverOptions, dynamic_map
from .simulation import run_experiment

__all__ = ["main", "build_parser", "EXIT_OK", "EXIT_USAGE", "EXIT_INFEASIBLE",
           "EXIT_RESOURCE", "EXIT_CONFIG"]

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_RESOURCE = 4
EXIT_CONFIG = 5


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _global_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--preset", choices=sorted(PRESETS), help="PA model preset")
    common.add_argument("--seed", type=int, help="random seed")
    common.add_argument("--slots", type=int, help="Monte Carlo slots per cell")
    common.add_argument("--out", help="output path ('-' for stdout)")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = argparse.ArgumentParser(
        prog="mcpamap",
        description="Carrier-to-MCPA mapping: power model, single-slot solver and sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", parents=[common], help="evaluate the PA input power model")
    ev.add_argument("--pout", type=float, required=True, help="PA output power in watts")
    for name in ("alpha", "beta", "gamma", "p_th", "p_max", "p_sta", "p_slp"):
        ev.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float,
                        help=f"override {name}")
    ev.add_argument("--variant", choices=[v.value for v in Variant])

    so = sub.add_parser("solve", parents=[common], help="map the carriers of one slot")
    so.add_argument("record", help="instance record, e.g. 'n_pa=2 k=2 powers=20,0,20,0'")
    so.add_argument("--algo", choices=("static", "dynamic", "exhaustive"), default="dynamic")
    so.add_argument("--tol", type=float, default=1e-8)
    so.add_argument("--max-iters", type=int, default=10_000)
    so.add_argument("--restarts", type=int, default=5)
    so.add_argument("--no-prune", action="store_true",
                    help="exhaustive: enumerate every labelled mapping")
    so.add_argument("--max-enumeration", type=int, default=MAX_ENUMERATION,
                    help="exhaustive without pruning: refuse larger raw spaces")

    sw = sub.add_parser("sweep", parents=[common], help="run a Monte Carlo sweep to CSV")
    sw.add_argument("config", help="config file, or the name of a shipped one (exp1, exp2, ...)")
    sw.add_argument("-q", "--quiet", action="store_true", help="no progress on stderr")
    return parser


def _model(args):
    params = preset(args.preset or "exp1")
    overrides = {
        k: getattr(args, k)
        for k in ("alpha", "beta", "gamma", "p_th", "p_max", "p_sta", "p_slp", "variant")
        if getattr(args, k, None) is not None
    }
    return params.replace(**overrides) if overrides else params


def cmd_eval(args, out) -> int:
    params = _model(args)
    p = args.pout
    print(f"p_in_w={_fmt(input_power(params, p))}", file=out)
    if params.variant is Variant.DOHERTY and params.p_th < p < params.p_max:
        print(f"d_p_in={_fmt(d_input_power(params, p))}", file=out)
        print(f"d2_p_in={_fmt(d2_input_power(params, p))}", file=out)
    return EXIT_OK


def cmd_solve(args, out) -> int:
    params = _model(args)
    try:
        instance = MappingInstance.from_record(args.record)
    except InfeasibleInstanceError:
        raise
    except ValueError as exc:
        raise _UsageError(str(exc)) from None

    if args.algo == "static":
        mapping = static_mapping(instance)
    elif args.algo == "exhaustive":
        result = exhaustive_search(
            instance, params,
            prune_symmetry=not args.no_prune,
            max_enumeration=args.max_enumeration,
        )
        mapping = result.best_mapping
        print(f"{result.mappings_examined} mappings examined", file=sys.stderr)
    else:
        options = SolverOptions(
            tol=args.tol, max_iters=args.max_iters, restarts=args.restarts,
            seed=args.seed if args.seed is not None else 0,
        )
        mapping = dynamic_map(instance, params, options)
    total = total_input_power(instance, mapping, params)

    print(f"algorithm={args.algo}", file=out)
    print("assignment=" + ",".join(str(j + 1) for j in mapping.assignment), file=out)
    print(f"total_w={_fmt(total)}", file=out)
    return EXIT_OK


def cmd_sweep(args, out) -> int:
    cfg = load_config(args.config)
    changes = {}
    if args.preset is not None:
        changes.update(preset=args.preset, params=())
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.slots is not None:
        changes["slots"] = args.slots
    experiment = cfg.to_experiment(**changes)

    target = args.out if args.out is not None else cfg.out
    if not args.quiet:
        print(
            f"{experiment.name}: {len(experiment.profiles)} profiles x "
            f"{len(experiment.p_grid)} p-values x {experiment.slots} slots",
            file=sys.stderr,
        )
    start = time.perf_counter()
    metrics = run_experiment(experiment)
    text = metrics.to_csv()
    if target is None or target == "-":
        out.write(text)
    else:
        Path(target).write_text(text)
    if not args.quiet:
        where = "stdout" if target in (None, "-") else target
        print(
            f"wrote {len(metrics.cells)} rows to {where} in {time.perf_counter() - start:.1f} s",
            file=sys.stderr,
        )
    return EXIT_OK


class _UsageError(Exception):
    pass


_COMMANDS = {"eval": cmd_eval, "solve": cmd_solve, "sweep": cmd_sweep}


def main(argv=None, out=None) -> int:
    """Run the CLI and return its exit code.

    Args:
        argv: arguments without the program name; defaults to ``sys.argv[1:]``.
        out: data stream; defaults to ``sys.stdout``.
    """
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args, out)
    except ConfigParseError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (InfeasibleInstanceError, InfeasibleMappingError, OverloadError) as exc:
        print(f"error: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (DomainError, MappingError, _UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
