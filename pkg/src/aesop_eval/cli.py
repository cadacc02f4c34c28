"""Command line entry point: ``aesop-eval <subcommand>``.

Exit codes: 0 success, 1 usage or configuration error, 2 unreadable or
malformed input.
"""

from __future__ import annotations

import argparse
import json
import logging
import shutil
import sys

from .adapters import FORMATS, TripletFormatError, convert_file
from .corpus import CorpusError, read_corpus, write_corpus
from .entities import EntitySetParseError
from .metric import ALL_METRICS, AssignmentMode, AssignmentWeights, MetricConfig, Normalization
from .perturbation import PerturbationConfig, build_catalog, perturb_corpus
from .reporting import (
    compare_side_by_side,
    correlate_variants,
    evaluate_corpus,
    read_report_json,
    write_report_csv,
    write_report_json,
)
from .text import TokenizerConfig

log = logging.getLogger("aesop_eval")

EXIT_USAGE = 1
EXIT_INPUT = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_metric_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--metric", action="append", dest="metrics", metavar="NAME",
                   help=f"metric to report (repeatable); one of {', '.join(ALL_METRICS)}")
    p.add_argument("--assignment", choices=[m.value for m in AssignmentMode], default="multiprop")
    p.add_argument("--norm", choices=[n.value for n in Normalization], default="max")
    p.add_argument("--name-weight", type=float, default=0.9)
    p.add_argument("--no-type-in-assignment", action="store_true",
                   help="leave the entity type out of the multiprop assignment matrix")
    p.add_argument("--no-lowercase", action="store_true")
    p.add_argument("--keep-punctuation", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="aesop-eval", description="Entity-set extraction evaluation.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("evaluate", help="score predictions against gold")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    _add_metric_options(p)
    p.add_argument("--report", help="write the JSON report here")
    p.add_argument("--csv", help="write per-sample scores as CSV")

    p = sub.add_parser("convert", help="triplet dataset to entity-set corpus")
    p.add_argument("--format", required=True, choices=FORMATS)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("perturb", help="swap property values for a grounding check")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--no-text-match", action="store_true")
    p.add_argument("--log", help="change log path (default: <out>.changes.jsonl)")

    p = sub.add_parser("correlate", help="correlate metrics of an evaluate report")
    p.add_argument("--report", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--metric", action="append", dest="metrics", metavar="NAME")
    p.add_argument("--scatter-csv")

    p = sub.add_parser("compare", help="side-by-side comparison of two predictions")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred-a", required=True)
    p.add_argument("--pred-b", required=True)
    _add_metric_options(p)
    p.add_argument("--report", required=True)
    return parser


def _config(args) -> MetricConfig:
    try:
        weights = AssignmentWeights.from_name_weight(args.name_weight)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return MetricConfig(
        assignment_mode=AssignmentMode(args.assignment),
        normalization=Normalization(args.norm),
        weights=weights,
        tokenizer=TokenizerConfig(lowercase=not args.no_lowercase, strip_punctuation=not args.keep_punctuation),
        type_in_assignment=not args.no_type_in_assignment,
    )


def _check_metric_names(names):
    if names:
        unknown = [n for n in names if n not in ALL_METRICS]
        if unknown:
            raise UsageError(f"unknown metric(s): {', '.join(unknown)}")


def cmd_evaluate(args) -> int:
    _check_metric_names(args.metrics)
    report = evaluate_corpus(args.gold, args.pred, _config(args), args.metrics)
    if args.report:
        write_report_json(report, args.report)
    if args.csv:
        write_report_csv(report, args.csv)
    width = max(len(m) for m in report.metrics)
    for name in report.metrics:
        print(f"{name:<{width}}  {100 * report.aggregate[name]:7.2f}")
    print(f"evaluated {report.evaluated} samples, skipped {report.skipped}")
    return 0


def cmd_convert(args) -> int:
    warnings = convert_file(args.input, args.out, args.format)
    print(f"wrote {args.out} ({len(warnings)} warnings)")
    return 0


def cmd_perturb(args) -> int:
    try:
        config = PerturbationConfig(seed=args.seed, rate=args.rate, require_text_match=not args.no_text_match)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    corpus = read_corpus(args.input)
    perturbed, changes = perturb_corpus(corpus, build_catalog(corpus), config)
    if changes:
        write_corpus(perturbed, args.out)
    else:
        shutil.copyfile(args.input, args.out)
    log_path = args.log or f"{args.out}.changes.jsonl"
    with open(log_path, "w", encoding="utf-8", newline="\n") as fh:
        for change in changes:
            fh.write(json.dumps(change.to_dict(), ensure_ascii=False) + "\n")
    print(f"wrote {args.out}: {len(changes)} values changed; log {log_path}")
    return 0


def cmd_correlate(args) -> int:
    report = read_report_json(args.report)
    _check_metric_names(args.metrics)
    try:
        corr = correlate_variants(report, args.metrics)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    write_report_json(corr, args.out)
    if args.scatter_csv:
        corr.write_scatter_csv(args.scatter_csv)
    print(f"wrote {args.out} ({len(corr.metrics)} metrics, {len(corr.sample_ids)} samples)")
    return 0


def cmd_compare(args) -> int:
    _check_metric_names(args.metrics)
    comp = compare_side_by_side(args.gold, args.pred_a, args.pred_b, _config(args), args.metrics)
    write_report_json(comp, args.report)
    for name in comp.metrics:
        s = comp.summary[name]
        print(f"{name}: A preferred {s['a_preferred_pct']:.1f}% (a={s['a']} b={s['b']} ties={s['ties']})")
    return 0


COMMANDS = {
    "evaluate": cmd_evaluate,
    "convert": cmd_convert,
    "perturb": cmd_perturb,
    "correlate": cmd_correlate,
    "compare": cmd_compare,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"aesop-eval: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CorpusError, EntitySetParseError, TripletFormatError, OSError) as exc:
        print(f"aesop-eval: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
