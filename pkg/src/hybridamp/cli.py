"""Command line entry point: ``hybridamp run|figure2|validate``."""

import argparse
import os
import sys

from .harness import (
    ConfigError,
    ExperimentError,
    figure2_config,
    format_config,
    load_config,
    run_experiment,
    write_report,
)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="hybridamp",
        description="Spectral efficiency of hybrid beamforming with different amplifier placements.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the experiment described by a config file")
    run.add_argument("--config", required=True)
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--per-realization", action="store_true", help="also write realizations.csv")
    run.add_argument("--workers", type=int, default=1)

    fig = sub.add_parser("figure2", help="run a built-in preset (a: full rank, b: rank deficient)")
    fig.add_argument("--variant", required=True, choices=["a", "b"])
    fig.add_argument("--out", required=True, help="output directory")
    fig.add_argument("--realizations", type=int, default=None)
    fig.add_argument("--seed", type=int, default=None)
    fig.add_argument("--per-realization", action="store_true")
    fig.add_argument("--workers", type=int, default=1)

    val = sub.add_parser("validate", help="check a config file without running it")
    val.add_argument("--config", required=True)
    return parser


def _run(config, out, per_realization, workers):
    report = run_experiment(config, workers=workers)
    write_report(report, out, per_realization=per_realization)
    with open(os.path.join(out, "config.txt"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_config(config))
    if report.failures:
        print(f"{len(report.failures)} realization(s) excluded, see provenance.json", file=sys.stderr)
    print(os.path.join(out, "summary.csv"))


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2

    try:
        if args.command == "validate":
            load_config(args.config).validate()
            print(f"{args.config}: ok")
        elif args.command == "run":
            _run(load_config(args.config), args.out, args.per_realization, args.workers)
        else:
            overrides = {}
            if args.realizations is not None:
                overrides["n_realizations"] = args.realizations
            if args.seed is not None:
                overrides["master_seed"] = args.seed
            _run(figure2_config(args.variant, **overrides), args.out, args.per_realization, args.workers)
    except ConfigError as exc:
        print(f"hybridamp: invalid config: {exc}", file=sys.stderr)
        return 2
    except (ExperimentError, OSError) as exc:
        print(f"hybridamp: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
