"""Command-line interface: ``catshap gen|rank|select|eval|bench``.

Exit codes: 0 on success, 1 on I/O or data errors, 2 on invalid options.
Errors are also written to stderr as a one-line JSON object.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import bench, report, synth
from .dataset import DatasetError, IngestOptions, load_csv
from .entropy import base_label, resolve_base
from .metrics import recall_at_k, redundancy_rate
from .ranking import epsilon_grid, svfr, svfs, svfs_sweep
from .shapley import ApproxConfig, compute_shapley

logger = logging.getLogger("catshap")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _bin_spec(text: str) -> tuple[str, int]:
    col, sep, k = text.rpartition(":")
    if not sep or not col:
        raise argparse.ArgumentTypeError(f"expected COL:K, got {text!r}")
    try:
        return col, int(k)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected COL:K, got {text!r}") from None


def _add_ingest(p):
    p.add_argument("--input", required=True, help="CSV file with a header row")
    p.add_argument("--drop-columns", default="", help="comma-separated columns to ignore")
    p.add_argument("--missing-token", default="", help="string marking a missing value")
    p.add_argument("--drop-missing", action="store_true", help="drop rows holding the missing token")
    p.add_argument("--bin", action="append", type=_bin_spec, default=[], metavar="COL:K",
                   help="equal-width binning of a numeric column (repeatable)")
    p.add_argument("--max-rows", type=int, default=None)


def _add_scoring(p):
    p.add_argument("--approx", default="full", help="full | bounded:K | sampled:N")
    p.add_argument("--seed", type=int, default=0, help="seed of the sampled estimator")
    p.add_argument("--base", default="2", choices=["2", "e", "10"], help="logarithm base")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: available CPUs); results do not depend on it")
    p.add_argument("--output", default="-", help="output path, '-' for stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="catshap", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a synthetic dataset with planted groups")
    p.add_argument("--groups", type=_int_list, default=[4, 4, 3], help="group sizes, e.g. 4,4,3")
    p.add_argument("--independent", type=int, default=1)
    p.add_argument("--arity", type=int, default=4)
    p.add_argument("--rows", type=int, default=10000)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True, help="CSV path; the sidecar goes next to it")
    p.add_argument("--sidecar", default=None, help="group-label JSON path")

    p = sub.add_parser("rank", help="rank features with SVFR")
    _add_ingest(p)
    p.add_argument("--method", default="svfr", choices=["svfr"])
    p.add_argument("--cap", type=int, default=None, help="stop after this many ranks")
    _add_scoring(p)

    p = sub.add_parser("select", help="select features with SVFS")
    _add_ingest(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--epsilon", type=float)
    g.add_argument("--sweep", metavar="E1:E2:STEP")
    _add_scoring(p)

    p = sub.add_parser("eval", help="redundancy rate or recall@k")
    esub = p.add_subparsers(dest="metric", required=True, parser_class=_Parser)
    r = esub.add_parser("redundancy")
    _add_ingest(r)
    r.add_argument("--features", required=True, help="comma-separated indices or names")
    r.add_argument("--output", default="-")
    r = esub.add_parser("recall")
    r.add_argument("--reference", required=True)
    r.add_argument("--candidate", required=True)
    r.add_argument("--k", type=_int_list, default=[1, 3, 5])
    r.add_argument("--output", default="-", help="JSON output; the table always goes to stdout")

    p = sub.add_parser("bench", help="run-time scaling measurements")
    p.add_argument("axis", choices=["features", "rows"])
    p.add_argument("--method", default="sampled:50", help="full | bounded:K | sampled:N")
    p.add_argument("--sizes", type=_int_list, default=None)
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--rows", type=int, default=1000, help="rows per dataset (features axis)")
    p.add_argument("--features", type=int, default=10, help="features per dataset (rows axis)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--output", required=True, help="CSV path")
    p.add_argument("--gnuplot", default=None, help="optional whitespace-separated data file")
    return parser


def _ingest(args) -> IngestOptions:
    drop = [c.strip() for c in args.drop_columns.split(",") if c.strip()]
    return IngestOptions(
        drop_columns=drop,
        missing_token=args.missing_token,
        drop_missing=args.drop_missing,
        bins=dict(args.bin),
        max_rows=args.max_rows,
    )


def _threads(args) -> int:
    t = args.threads if args.threads is not None else (os.cpu_count() or 1)
    if t < 1:
        raise UsageError("--threads must be >= 1")
    return t


def _emit(text: str, output: str) -> None:
    if output == "-":
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


def _scores(args, ds):
    try:
        config = ApproxConfig.parse(args.approx, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    base = resolve_base(args.base)
    logger.info("scoring %d features x %d rows with %s (base %s)",
                ds.n_features, ds.n_rows, config, base_label(base))
    return compute_shapley(ds, config, base, n_jobs=_threads(args))


def cmd_gen(args) -> int:
    spec = synth.SynthSpec(
        tuple((size, args.noise) for size in args.groups),
        args.independent, args.arity, args.rows, args.seed,
    )
    data = synth.generate(spec)
    sidecar = synth.save(data, args.output, args.sidecar)
    logger.info("wrote %s and %s (seed %d)", args.output, sidecar, data.seed)
    return 0


def cmd_rank(args) -> int:
    if args.cap is not None and args.cap < 1:
        raise UsageError("--cap must be >= 1")
    ds = load_csv(args.input, _ingest(args))
    scores = _scores(args, ds)
    result = svfr(ds, scores, cap=args.cap)
    _emit(report.dumps(report.ranking_to_dict(result, ds)), args.output)
    return 0


def cmd_select(args) -> int:
    if args.epsilon is not None:
        if args.epsilon < 0:
            raise UsageError("--epsilon must be non-negative")
        epsilons = None
    else:
        try:
            lo, hi, step = (float(v) for v in args.sweep.split(":"))
            epsilons = epsilon_grid(lo, hi, step)
        except ValueError as exc:
            raise UsageError(f"invalid --sweep {args.sweep!r}: {exc}") from None
        if lo < 0:
            raise UsageError("epsilon must be non-negative")
    ds = load_csv(args.input, _ingest(args))
    scores = _scores(args, ds)
    if epsilons is None:
        doc = report.ranking_to_dict(svfs(ds, args.epsilon, scores), ds)
    else:
        results = svfs_sweep(ds, epsilons, scores)
        doc = {
            "schema": report.SCHEMA_VERSION,
            "kind": "sweep",
            "config": {"base": base_label(scores.base), "approx": str(scores.config)},
            "results": [report.ranking_to_dict(r, ds) for r in results],
        }
    _emit(report.dumps(doc), args.output)
    return 0


def cmd_eval(args) -> int:
    if args.metric == "redundancy":
        ds = load_csv(args.input, _ingest(args))
        feats = []
        for tok in args.features.split(","):
            tok = tok.strip()
            if tok:
                feats.append(ds.index_of(int(tok) if tok.lstrip("-").isdigit() else tok))
        try:
            rep = redundancy_rate(ds, feats)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        _emit(report.dumps(report.redundancy_to_dict(rep, ds, feats)), args.output)
        return 0

    ref, ref_doc = report.load_order(args.reference)
    cand, cand_doc = report.load_order(args.candidate)
    fp_ref = ref_doc.get("dataset", {}).get("fingerprint")
    fp_cand = cand_doc.get("dataset", {}).get("fingerprint")
    if fp_ref != fp_cand:
        raise UsageError(f"rankings come from different datasets ({fp_ref} vs {fp_cand})")
    rows = []
    for k in args.k:
        try:
            rows.append({"k": k, "recall": recall_at_k(ref, cand, k)})
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    label = cand_doc.get("config", {}).get("approx", "candidate")
    header = "".join(f"k = {r['k']:<6}" for r in rows)
    line = "".join(f"{r['recall']:<10.2f}" for r in rows)
    sys.stdout.write(f"{'':<14}{header}\n{label:<14}{line}\n")
    if args.output != "-":
        doc = {"schema": report.SCHEMA_VERSION, "kind": "recall", "candidate": label,
               "dataset_fingerprint": fp_ref, "recall": rows}
        _emit(report.dumps(doc), args.output)
    return 0


def cmd_bench(args) -> int:
    try:
        config = ApproxConfig.parse(args.method, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.reps < 1:
        raise UsageError("--reps must be >= 1")
    if args.axis == "features":
        sizes = args.sizes or ([10, 12, 14, 16] if config.method == "full" else [10, 20, 30, 40])
        rep = bench.bench_features(sizes, config, args.reps,
                                   bench.synthetic_family(args.rows, seed=args.seed), args.threads)
    else:
        sizes = args.sizes or [500, 1000, 2000, 4000]
        rep = bench.bench_rows(sizes, config, args.reps, args.features, args.threads, args.seed)
    rep.write_csv(args.output)
    if args.gnuplot:
        rep.write_gnuplot(args.gnuplot)
    if len(rep.rows) > 1:
        logger.info("log-log slope %.2f", rep.slope())
    return 0


COMMANDS = {"gen": cmd_gen, "rank": cmd_rank, "select": cmd_select,
            "eval": cmd_eval, "bench": cmd_bench}


def _fail(code: int, kind: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message, "exit_code": code}) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        return _fail(2, "usage", str(exc))
    logging.basicConfig(stream=sys.stderr, level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        return _fail(2, "config", str(exc))
    except (OSError, DatasetError, json.JSONDecodeError) as exc:
        return _fail(1, "io", str(exc))
    except ValueError as exc:
        return _fail(2, "config", str(exc))


if __name__ == "__main__":
    sys.exit(main())
