"""Command-line entry point.

Subcommands::

    kdvflow run      --config <path> --out <dir> [--verbose]
    kdvflow converge --config <path> --steps <h1,h2,...> --ref <h> --out <dir>
    kdvflow compare  --configs <p1,p2,...> --out <dir>

Exit codes: 0 success, 2 configuration error, 3 step failure,
4 study abort.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .harness import ConfigError, StudyError, compare, convergence_study, load_config, run
from .integrators import StepFailureError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_STEP_FAILURE = 3
EXIT_STUDY_ABORT = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kdvflow",
        description="Invariant-preserving KdV simulations on a trigonometric basis",
    )
    parser.add_argument("--verbose", action="store_true", help="per-step logs")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one simulation")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", required=True)

    p_conv = sub.add_parser("converge", help="convergence study over step sizes")
    p_conv.add_argument("--config", required=True)
    p_conv.add_argument("--steps", required=True, help="comma-separated step sizes")
    p_conv.add_argument("--ref", required=True, type=float, help="reference step size")
    p_conv.add_argument("--out", required=True)

    p_cmp = sub.add_parser("compare", help="run several configs on one problem")
    p_cmp.add_argument("--configs", required=True, help="comma-separated config paths")
    p_cmp.add_argument("--out", required=True)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "run":
            report = run(load_config(args.config), out_dir=args.out)
            print(
                f"ok: {len(report.series) - 1} steps, max drifts "
                f"mass {report.max_rel_drift['mass']:.3e} "
                f"momentum {report.max_rel_drift['momentum']:.3e} "
                f"energy {report.max_rel_drift['energy']:.3e}"
            )
        elif args.command == "converge":
            try:
                steps = [float(s) for s in args.steps.split(",") if s.strip()]
            except ValueError:
                raise ConfigError(f"bad --steps list: {args.steps!r}") from None
            rows = convergence_study(
                load_config(args.config), steps, args.ref, out_dir=args.out
            )
            for h, err, order in rows:
                print(f"h={h:g} error={err:.6e} order={order:.3f}")
        elif args.command == "compare":
            paths = [p for p in args.configs.split(",") if p.strip()]
            configs = [load_config(p) for p in paths]
            reports = compare(configs, out_dir=args.out)
            for label, rep in reports.items():
                print(
                    f"{label}: max drifts mass {rep.max_rel_drift['mass']:.3e} "
                    f"momentum {rep.max_rel_drift['momentum']:.3e} "
                    f"energy {rep.max_rel_drift['energy']:.3e}"
                )
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except StepFailureError as err:
        where = f" at step {err.step_index} (t={err.t})" if err.step_index else ""
        print(f"step failure{where}: {err}", file=sys.stderr)
        return EXIT_STEP_FAILURE
    except StudyError as err:
        print(f"study aborted: {err}", file=sys.stderr)
        return EXIT_STUDY_ABORT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
