"""Command line entry point: ``knowtopo VERB --config run.json [overrides]``.

Exit status is 0 on success, 2 if any task failed, 1 on config or input
errors.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .errors import ConfigInvalid, InputUnreadable
from .pipeline import VERBS, RunConfig, parse_periods, run_pipeline

log = logging.getLogger("knowtopo")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="knowtopo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)
    helps = {
        "build": "build networks and write edge lists",
        "persist": "compute Betti numbers, cell counts and persistence diagrams",
        "distances": "persistence plus cross-field and knowledge/collaboration diagram distances",
        "baselines": "persistence plus ER/BA/WS null models and t-tests",
        "measures": "persistence plus classical network measures and correlations",
        "all": "every stage",
    }
    for verb in VERBS:
        p = sub.add_parser(verb, help=helps[verb])
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--records", help="JSON Lines record file (instead of, or overriding, the config)")
        p.add_argument("--output", help="output directory")
        p.add_argument("--workers", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--fields", help="comma-separated field list")
        p.add_argument("--periods", help="inclusive range START:END")
        p.add_argument("--granularity", choices=("yearly", "monthly"))
        p.add_argument("--homology-cap", type=int)
        p.add_argument("--cell-budget", type=int)
        p.add_argument("--drop-isolates", action="store_true", default=None)
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    if args.config:
        cfg = RunConfig.load(args.config)
    elif args.records:
        cfg = RunConfig(records=args.records)
    else:
        raise ConfigInvalid("either --config or --records is required")
    if args.records:
        cfg.records, cfg.manifest = args.records, None
    if args.output:
        cfg.output = args.output
    if args.workers is not None:
        cfg.workers = args.workers
    if args.seed is not None:
        cfg.seed = args.seed
    if args.fields:
        cfg.fields = [f for f in args.fields.split(",") if f]
    if args.periods:
        try:
            cfg.periods = parse_periods(args.periods)
        except ValueError as exc:
            raise ConfigInvalid(str(exc)) from exc
    if args.granularity:
        cfg.granularity = args.granularity
    if args.homology_cap is not None:
        cfg.homology_cap = args.homology_cap
        cfg.cell_cap = args.homology_cap + 1
    if args.cell_budget is not None:
        cfg.cell_budget = args.cell_budget
    if args.drop_isolates:
        cfg.drop_isolates = True
    return cfg.validate()


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = config_from_args(args)
        report = run_pipeline(cfg, args.verb)
    except (ConfigInvalid, InputUnreadable) as exc:
        print(f"knowtopo: error: {exc}", file=sys.stderr)
        return 1
    counts = report.manifest["task_counts"]
    print(
        f"{args.verb}: {len(report.tasks)} tasks "
        f"({counts['ok']} ok, {counts['degraded']} degraded, {counts['failed']} failed), "
        f"{len(report.files)} files in {report.output_dir}"
    )
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
