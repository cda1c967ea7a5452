"""Command-line front end.

Subcommands: ``sweep``, ``single``, ``tomo`` (tomographic sweep) and
``selftest`` (closed-form oracle grid).  Exit codes: 0 success, 2 bad
configuration, 3 oracle mismatch.
"""

import argparse
import sys
import time

from .config import ConfigError, read_config_file, resolve
from .sweep import ORACLE_TOL, OracleMismatch, oracle_grid, report_to_text, run_single, run_sweep, to_csv, to_json

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ORACLE = 3


def _common(parser):
    parser.add_argument("--config", metavar="PATH", help="flat key=value configuration file")
    parser.add_argument("--epsilon", type=float, help="single epsilon value")
    parser.add_argument("--epsilon-grid", metavar="START:STOP:STEP", help="epsilon grid, stop inclusive")
    parser.add_argument("--fidelity", type=float, metavar="F", help="flip fidelity F")
    parser.add_argument("--visibility", type=float, metavar="V", help="Werner visibility of the input state")
    parser.add_argument("--counts", type=int, metavar="N", help="coincidences per tomography setting")
    parser.add_argument("--reps", type=int, metavar="R", help="Monte Carlo repetitions")
    parser.add_argument("--seed", type=int, metavar="S")
    parser.add_argument("--mode", choices=("analytic", "tomographic"))
    parser.add_argument("--format", choices=("csv", "json"))
    parser.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    parser.add_argument("--workers", type=int, default=1, metavar="W", help="processes for grid points (default: 1)")


def build_parser():
    parser = argparse.ArgumentParser(prog="nmcollide", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("sweep", "epsilon sweep (analytic by default)"),
        ("single", "diagnostic report for one epsilon"),
        ("tomo", "epsilon sweep through simulated tomography"),
    ]:
        _common(sub.add_parser(name, help=help_))
    sub.add_parser("selftest", help="check the simulated pipeline against the closed forms")
    return parser


def _resolve(args, forced=None):
    layers = [read_config_file(args.config)] if args.config else []
    cli = {
        "epsilon_grid": args.epsilon_grid,
        "epsilon": args.epsilon,
        "fidelity": args.fidelity,
        "visibility": args.visibility,
        "counts": args.counts,
        "reps": args.reps,
        "seed": args.seed,
        "mode": args.mode,
        "format": args.format,
    }
    layers.append(cli)
    if forced:
        layers.append(forced)
    return resolve(*layers)


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _selftest():
    t0 = time.perf_counter()
    worst = oracle_grid()
    ok = worst <= ORACLE_TOL
    status = "PASS" if ok else "FAIL"
    print(f"closed-form oracle grid: max residual {worst:.3e} (tol {ORACLE_TOL:g}) "
          f"in {time.perf_counter() - t0:.3f}s {status}")
    return EXIT_OK if ok else EXIT_ORACLE


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "selftest":
        return _selftest()
    try:
        forced = {"mode": "tomographic"} if args.command == "tomo" else None
        config = _resolve(args, forced)
        if args.command == "single":
            if len(config.epsilon_grid) != 1:
                raise ConfigError("epsilon", "single needs exactly one epsilon (use --epsilon)")
            report = run_single(
                config.epsilon_grid[0], config.fidelity, config.visibility,
                config.mode, config.counts, config.reps, config.seed,
            )
            res = report["closed_form_residual"]
            _emit(report_to_text(report, config.format), args.out)
            if res is not None and res > ORACLE_TOL:
                print(f"closed-form residual {res:.3e} exceeds {ORACLE_TOL:g}", file=sys.stderr)
                return EXIT_ORACLE
            return EXIT_OK
        if args.workers < 1:
            raise ConfigError("workers", "must be at least 1")
        rows = run_sweep(config, workers=args.workers)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OracleMismatch as exc:
        print(f"oracle mismatch: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    text = to_csv(rows, config) if config.format == "csv" else to_json(rows, config)
    _emit(text, args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
