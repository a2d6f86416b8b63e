"""Command-line interface: fit, predict, eval and explain subcommands.

Exit codes: 0 success, 1 usage error, 2 data or model error.
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from . import induction
from .dataset import DataError, build_system, load_matrix, load_table
from .evaluate import cross_validate, summary_line, write_report_csv
from .fuzzy import ConnectiveConfig
from .inference import score_batch
from .fuzzy import EPSILON
from .rules import ModelFormatError, load_ruleset, render_rule, save_ruleset
from .setcover import DEFAULT_NODE_BUDGET, InfeasibleCoverError

_TNORMS = {"min": "minimum", "luk": "lukasiewicz"}
_IMPLICATORS = {"luk": "lukasiewicz", "kd": "kleene_dienes"}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _add_fit_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("csv", "keel"), default="csv")
    parser.add_argument("--decision", default=None,
                        help="decision column name or index (default: last column)")
    parser.add_argument("--tnorm", choices=sorted(_TNORMS), default="min")
    parser.add_argument("--implicator", choices=sorted(_IMPLICATORS), default="luk")
    parser.add_argument("--solver", choices=("exact", "greedy"), default="exact")
    parser.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET)


def _build_parser() -> _Parser:
    parser = _Parser(prog="fuzzyrules",
                     description="Learn and apply minimal fuzzy rulesets.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="learn a ruleset from a training table")
    p_fit.add_argument("--train", required=True)
    p_fit.add_argument("--out", required=True)
    _add_fit_options(p_fit)

    p_pred = sub.add_parser("predict", help="classify rows with a saved model")
    p_pred.add_argument("--model", required=True)
    p_pred.add_argument("--data", required=True)
    p_pred.add_argument("--out", required=True)
    p_pred.add_argument("--format", choices=("csv", "keel"), default="csv")
    p_pred.add_argument("--decision", default=None)

    p_eval = sub.add_parser("eval", help="cross-validate on a dataset")
    p_eval.add_argument("--data", required=True)
    p_eval.add_argument("--folds", type=int, default=10)
    p_eval.add_argument("--seed", type=int, required=True)
    p_eval.add_argument("--report", default=None)
    p_eval.add_argument("--jobs", type=int, default=1)
    p_eval.add_argument("--timings", action="store_true",
                        help="include wall-clock columns in the report "
                             "(breaks byte-identical reports)")
    _add_fit_options(p_eval)

    p_exp = sub.add_parser("explain", help="print the rules of a saved model")
    p_exp.add_argument("--model", required=True)
    return parser


def _config(args) -> ConnectiveConfig:
    return ConnectiveConfig(_TNORMS[args.tnorm], _IMPLICATORS[args.implicator])


def _cmd_fit(args) -> int:
    table = load_table(args.train, format=args.format, decision=args.decision)
    if len(set(table.labels)) < 2:
        raise DataError("training data needs at least two decision classes")
    system = build_system(table)
    ruleset = induction.fit(system, _config(args), solver=args.solver,
                            node_budget=args.node_budget)
    save_ruleset(ruleset, args.out)
    flag = "optimal" if ruleset.solver_optimal else "not proven minimal"
    print(f"wrote {args.out}: {len(ruleset)} rules "
          f"({sum(r.length for r in ruleset.rules)} conditions, selection {flag})")
    return 0


def _load_prediction_rows(args, arity: int) -> np.ndarray:
    """Accept tables shaped like the training data (decision column present,
    ignored) or bare feature tables with exactly the model's arity."""
    table = None
    try:
        table = load_table(args.data, format=args.format, decision=args.decision)
    except DataError:
        pass
    if table is not None and table.n_attributes == arity:
        return table.values
    values, _ = load_matrix(args.data, format=args.format)
    if values.shape[1] != arity:
        raise DataError(
            f"model expects {arity} condition columns; "
            f"{args.data} provides {values.shape[1]}"
            + (" after removing the decision column" if table is not None else "")
        )
    return values


def _cmd_predict(args) -> int:
    ruleset = load_ruleset(args.model)
    rows = _load_prediction_rows(args, len(ruleset.attribute_names))
    scores = score_batch(ruleset, rows)
    best = scores.argmax(axis=1) if scores.size else np.zeros(0, dtype=int)
    fallback = (scores <= EPSILON).all(axis=1) if scores.size else np.zeros(0, dtype=bool)
    best[fallback] = ruleset.majority_class
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row_index", "predicted_label"]
                        + [f"score_{lab}" for lab in ruleset.class_labels])
        for i in range(scores.shape[0]):
            writer.writerow([i, ruleset.class_labels[best[i]]]
                            + [f"{s:.12g}" for s in scores[i]])
    print(f"wrote {args.out}: {scores.shape[0]} predictions")
    return 0


def _cmd_eval(args) -> int:
    report = cross_validate(
        args.data, args.folds, args.seed, _config(args),
        format=args.format, decision=args.decision,
        solver=args.solver, node_budget=args.node_budget,
        jobs=args.jobs, dataset_name=args.data,
    )
    if args.report:
        write_report_csv(report, args.report, include_timings=args.timings)
    print(summary_line(report))
    return 0


def _cmd_explain(args) -> int:
    ruleset = load_ruleset(args.model)
    labels = ", ".join(ruleset.class_labels)
    print(f"rules: {len(ruleset)}  attributes: {len(ruleset.attribute_names)}  "
          f"classes: {len(ruleset.class_labels)} ({labels})")
    print(f"connectives: tnorm={ruleset.config.tnorm} "
          f"implicator={ruleset.config.implicator}")
    print(f"majority class: {ruleset.class_labels[ruleset.majority_class]}")
    print(f"selection proven minimal: {'yes' if ruleset.solver_optimal else 'no'}")
    for i, rule in enumerate(ruleset.rules, start=1):
        print(f"{i:3d}. {render_rule(rule, ruleset.attribute_names, ruleset.class_labels)}")
    lengths = [rule.length for rule in ruleset.rules]
    if lengths:
        print(f"rule length: mean {np.mean(lengths):.2f} std {np.std(lengths):.2f}")
    return 0


_COMMANDS = {
    "fit": _cmd_fit,
    "predict": _cmd_predict,
    "eval": _cmd_eval,
    "explain": _cmd_explain,
}


def cli(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (DataError, ModelFormatError, InfeasibleCoverError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
