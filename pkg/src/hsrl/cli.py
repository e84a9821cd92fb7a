"""Command line entry point: ``compress``, ``embed``, ``evaluate`` and ``sweep``."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time

from . import __version__
from .evaluation import (
    SWEEP_PARAMETERS,
    compression_report,
    evaluate_link_prediction,
    format_table,
    sweep,
    write_compression_report,
    write_report_tsv,
    write_significance_tsv,
    write_sweep_tsv,
)
from .graph import GraphError, load_edge_list
from .kernels import DEFAULT_BACKEND, get_backend
from .learners import LEARNERS, LINE_ORDERS, LearnerConfig, save_embeddings
from .louvain import hierarchical_sampling, save_hierarchy
from .pipeline import run_hsrl

log = logging.getLogger("hsrl")


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # one-line diagnostics instead of the usage dump
        self.exit(2, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _non_negative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def _add_common(p: argparse.ArgumentParser, multi_input: bool = False) -> None:
    if multi_input:
        p.add_argument("--input", "-i", required=True, action="append", help="edge list (repeatable)")
    else:
        p.add_argument("--input", "-i", required=True, help="edge list file")
    p.add_argument("--output", "-o", default="out", help="output directory (default: out)")
    p.add_argument("--seed", type=_non_negative_int, default=0)
    p.add_argument("--levels", "-K", type=_non_negative_int, default=3, help="maximum compression levels")
    p.add_argument("--default-weight", type=float, default=1.0, help="weight of edges given without one")


def _add_learner(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("learner")
    g.add_argument("--learner", choices=LEARNERS, default="deepwalk")
    g.add_argument("--dim", "-d", type=_positive_int, default=64)
    g.add_argument("--walks", type=_positive_int, default=10, help="walks per node")
    g.add_argument("--walk-length", type=_positive_int, default=40)
    g.add_argument("--window", type=_positive_int, default=5)
    g.add_argument("--lr", type=float, default=0.025, help="initial learning rate")
    g.add_argument("--negative", type=_positive_int, default=5, help="negative samples per positive")
    g.add_argument("--p", type=float, default=1.0, help="node2vec return parameter")
    g.add_argument("--q", type=float, default=1.0, help="node2vec in-out parameter")
    g.add_argument("--line-order", choices=LINE_ORDERS, default="both")
    g.add_argument("--epochs", type=_positive_int, default=1, help="passes over the walk corpus")
    g.add_argument("--line-samples", type=_positive_int, default=None, help="LINE edge samples (default 100*|E|)")
    g.add_argument("--backend", choices=("auto", "cython", "python"), default="auto")
    g.add_argument("--workers", type=_positive_int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hsrl", description="Hierarchical community-compression node embeddings.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default="WARNING", choices=("DEBUG", "INFO", "WARNING", "ERROR"))
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("compress", help="build the community hierarchy and its compression report")
    _add_common(p)
    p.add_argument("--dot", action="store_true", help="also write Graphviz files per level")

    p = sub.add_parser("embed", help="learn per-level embeddings and concatenate them")
    _add_common(p)
    _add_learner(p)
    p.add_argument("--dot", action="store_true")

    p = sub.add_parser("evaluate", help="repeated link-prediction runs against the base learner")
    _add_common(p, multi_input=True)
    _add_learner(p)
    p.add_argument("--reps", type=_positive_int, default=20)
    p.add_argument("--ratio", type=float, default=0.8, help="fraction of edges kept for training")

    p = sub.add_parser("sweep", help="AUC as a function of one parameter")
    _add_common(p)
    _add_learner(p)
    p.add_argument("--param", choices=SWEEP_PARAMETERS, required=True)
    p.add_argument("--values", required=True, help="comma-separated values, e.g. 8,16,32,64")
    p.add_argument("--reps", type=_positive_int, default=5)
    p.add_argument("--ratio", type=float, default=0.8)
    return parser


def _learner_config(args) -> LearnerConfig:
    return LearnerConfig(
        dim=args.dim,
        walks_per_node=args.walks,
        walk_length=args.walk_length,
        window=args.window,
        learning_rate=args.lr,
        negative=args.negative,
        p=args.p,
        q=args.q,
        line_order=args.line_order,
        epochs=args.epochs,
        line_samples=args.line_samples,
        seed=args.seed,
    )


def _validate(args) -> LearnerConfig | None:
    inputs = args.input if isinstance(args.input, list) else [args.input]
    for path in inputs:
        if not os.path.isfile(path) or not os.access(path, os.R_OK):
            raise CliError(f"cannot read input file {path!r}")
    if os.path.exists(args.output) and not os.path.isdir(args.output):
        raise CliError(f"output path {args.output!r} exists and is not a directory")
    if hasattr(args, "ratio") and not 0 < args.ratio < 1:
        raise CliError("--ratio must lie in (0, 1)")
    if args.default_weight < 0:
        raise CliError("--default-weight must be non-negative")
    cfg = None
    if hasattr(args, "learner"):
        try:
            cfg = _learner_config(args)
            get_backend(args.backend)
        except ValueError as exc:
            raise CliError(str(exc)) from None
        if args.learner == "line" and args.line_order == "both" and args.dim % 2:
            raise CliError("--line-order both needs an even --dim")
    return cfg


def _manifest(args, extra: dict) -> dict:
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("log_level",)}
    backend = getattr(args, "backend", "auto")
    params["backend"] = DEFAULT_BACKEND if backend == "auto" else backend
    return {"version": __version__, "command": args.command, "parameters": params, **extra}


def _write_json(path, data) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_compress(args) -> None:
    g = load_edge_list(args.input, args.default_weight)
    h = hierarchical_sampling(g, args.levels, seed=args.seed)
    save_hierarchy(h, args.output, write_dot=args.dot)
    write_compression_report(compression_report(h), os.path.join(args.output, "compression.tsv"))
    _write_json(
        os.path.join(args.output, "manifest.json"),
        _manifest(args, {"hierarchy_seed": args.seed, "achieved_levels": h.achieved_levels,
                         "node_counts": h.node_counts()}),
    )


def cmd_embed(args, cfg: LearnerConfig) -> None:
    g = load_edge_list(args.input, args.default_weight)
    backend = None if args.backend == "auto" else args.backend
    result = run_hsrl(g, args.levels, cfg, args.learner, backend=backend, workers=args.workers)
    h = result.hierarchy
    save_hierarchy(h, args.output, write_dot=args.dot)
    write_compression_report(compression_report(h), os.path.join(args.output, "compression.tsv"))
    for k, Z in enumerate(result.per_level):
        labels = g.node_labels() if k == 0 else None
        save_embeddings(Z, labels, os.path.join(args.output, f"level{k}.emb"))
    save_embeddings(result.final, g.node_labels(), os.path.join(args.output, "embeddings.emb"))
    _write_json(
        os.path.join(args.output, "manifest.json"),
        _manifest(args, {"level_seeds": [cfg.seed + k for k in range(h.achieved_levels + 1)],
                         "achieved_levels": h.achieved_levels,
                         "final_dim": int(result.final.shape[1])}),
    )
    _write_json(os.path.join(args.output, "timings.json"), result.timings)


def cmd_evaluate(args, cfg: LearnerConfig) -> None:
    backend = None if args.backend == "auto" else args.backend
    seeds = [args.seed + r for r in range(args.reps)]
    reports, timings = [], {}
    for path in args.input:
        g = load_edge_list(path, args.default_weight)
        name = os.path.splitext(os.path.basename(path))[0]
        report = evaluate_link_prediction(
            g, args.learner, cfg, args.levels, args.ratio, args.reps, seeds=seeds,
            dataset=name, backend=backend, workers=args.workers,
        )
        reports.append(report)
        timings[name] = report.timings
        log.info("%s: %s", name, {m: round(report.mean(m), 4) for m in report.aucs})
    table = format_table(reports)
    with open(os.path.join(args.output, "report.txt"), "w", encoding="utf-8") as fh:
        fh.write(table)
    write_report_tsv(reports, os.path.join(args.output, "aucs.tsv"))
    write_significance_tsv(reports, os.path.join(args.output, "significance.tsv"))
    with open(os.path.join(args.output, "compression.tsv"), "w", encoding="utf-8") as fh:
        fh.write("dataset\tseed\tlevel\tnodes\tedges\tnode_ratio\tedge_ratio\n")
        for r in reports:
            for seed, rows in zip(r.seeds, r.compression):
                for c in rows:
                    fh.write(f"{r.dataset}\t{seed}\t{c.level}\t{c.nodes}\t{c.edges}"
                             f"\t{c.node_ratio:.6f}\t{c.edge_ratio:.6f}\n")
    _write_json(os.path.join(args.output, "manifest.json"), _manifest(args, {"rep_seeds": seeds}))
    _write_json(os.path.join(args.output, "timings.json"), timings)
    sys.stdout.write(table)


def cmd_sweep(args, cfg: LearnerConfig) -> None:
    try:
        values = [int(v) for v in args.values.split(",") if v.strip()]
    except ValueError:
        raise CliError(f"--values must be comma-separated integers, got {args.values!r}") from None
    if not values or min(values) < (1 if args.param == "dim" else 0):
        raise CliError(f"invalid --values for {args.param}")
    if args.param == "dim" and args.learner == "line" and args.line_order == "both" and any(v % 2 for v in values):
        raise CliError("--line-order both needs even dimensions")
    backend = None if args.backend == "auto" else args.backend
    g = load_edge_list(args.input, args.default_weight)
    rows = sweep(g, args.param, values, args.learner, cfg, args.levels, args.ratio, args.reps,
                 backend=backend, workers=args.workers)
    write_sweep_tsv(args.param, rows, os.path.join(args.output, "sweep.tsv"))
    _write_json(os.path.join(args.output, "manifest.json"),
                _manifest(args, {"rep_seeds": list(range(args.reps)), "values": values}))


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=args.log_level, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _validate(args)
        os.makedirs(args.output, exist_ok=True)
        t0 = time.perf_counter()
        if args.command == "compress":
            cmd_compress(args)
        elif args.command == "embed":
            cmd_embed(args, cfg)
        elif args.command == "evaluate":
            cmd_evaluate(args, cfg)
        else:
            cmd_sweep(args, cfg)
        log.info("%s finished in %.2fs", args.command, time.perf_counter() - t0)
    except CliError as exc:
        sys.stderr.write(f"hsrl: error: {exc}\n")
        return 2
    except (GraphError, ValueError, OSError) as exc:
        sys.stderr.write(f"hsrl: error: {exc}\n")
        return 1
    return 0


def main() -> None:
    sys.exit(run())
