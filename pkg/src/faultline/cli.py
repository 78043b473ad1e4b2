"""faultline command-line interface.

Subcommands mirror the pipeline stages: ingest -> classify -> query ->
extract-features -> train -> rank -> eval/ablate -> serve.
"""

import argparse
import json
import sys
from pathlib import Path

from .corpus import ingest, load_index, save_index
from .errors import FaultlineError
from .evaluate import (ablation, format_ablation_table,
                       format_comparison_table, prepare_reports, run_eval)
from .features import FEATURE_NAMES, FeatureVector, FixHistory, extract_features_all
from .llm import make_provider
from .query import Provenance, Query, ShotMode, construct_query
from .ranker import RankingModel, rank
from .reports import Category, classify, load_reports

FEATURES_HEADER = "# faultline features v1"


def _shot_mode(value: str) -> ShotMode:
    return ShotMode.ZERO_SHOT if str(value) == "0" else ShotMode.ONE_SHOT


def load_corpora(corpus_dir) -> dict:
    """Load every *.idx.json under a directory, keyed by (project, version)."""
    corpora = {}
    for path in sorted(Path(corpus_dir).glob("*.idx.json")):
        bundle = load_index(path)
        corpora[(bundle.project, bundle.version)] = bundle
    if not corpora:
        raise FaultlineError(f"no *.idx.json files under {corpus_dir}")
    return corpora


def cmd_ingest(args) -> int:
    bundle, report = ingest(args.root, args.project, args.version,
                            extensions=tuple(args.ext or [".java"]))
    save_index(bundle, args.out)
    for path, reason in report.skipped:
        print(f"warning: skipped {path}: {reason}", file=sys.stderr)
    print(f"indexed {len(bundle.records)} files "
          f"({len(bundle.graph.edges)} call edges) -> {args.out}")
    return 0


def cmd_classify(args) -> int:
    for report in load_reports(args.reports):
        print(f"{report.report_id}\t{classify(report).value}")
    return 0


def cmd_query(args) -> int:
    bundle = load_index(args.index)
    provider = make_provider(args.provider, args.fixtures)
    shot_mode = _shot_mode(args.shots)
    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        for report in load_reports(args.reports):
            query = construct_query(report, provider, bundle, shot_mode)
            out.write(json.dumps({
                "report_id": report.report_id,
                "entities": list(query.entities),
                "category": query.category.value,
                "provenance": query.provenance.value,
            }) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def load_queries(path) -> dict:
    queries = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        queries[obj["report_id"]] = Query(
            entities=tuple(obj["entities"]),
            category=Category(obj["category"]),
            provenance=Provenance(obj["provenance"]),
        )
    return queries


def write_features(path, rows) -> None:
    """rows: iterable of (report_id, category, [(file_id, FeatureVector)])."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(FEATURES_HEADER + "\n")
        for report_id, category, file_rows in rows:
            fh.write(f"# report {report_id} category {category.value}\n")
            for file_id, fv in file_rows:
                values = "\t".join(f"{v:.12g}" for v in fv.as_array())
                fh.write(f"{report_id}\t{file_id}\t{values}\n")


def read_features(path):
    """Parse a features file -> {report_id: (Category, [(file_id, fv)])}."""
    out: dict = {}
    category = None
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("# report "):
            parts = line.split()
            category = Category(parts[4])
            out[parts[2]] = (category, [])
            continue
        if not line or line.startswith("#"):
            continue
        cells = line.split("\t")
        report_id, file_id = cells[0], cells[1]
        values = [float(c) for c in cells[2:2 + len(FEATURE_NAMES)]]
        out[report_id][1].append((file_id, FeatureVector.from_array(values)))
    return out


def cmd_extract_features(args) -> int:
    bundle = load_index(args.index)
    reports = load_reports(args.reports)
    queries = load_queries(args.queries)
    key = (bundle.project, bundle.version)
    in_corpus = [r for r in reports if (r.project, r.version) == key]
    history = FixHistory(in_corpus)
    rows = []
    for report in in_corpus:
        if report.report_id not in queries:
            print(f"warning: no query for {report.report_id}, skipping",
                  file=sys.stderr)
            continue
        query = queries[report.report_id]
        features = extract_features_all(report, query, bundle, history)
        rows.append((report.report_id, query.category,
                     [(fid, features[fid]) for fid in bundle.file_ids]))
    write_features(args.out, rows)
    print(f"wrote features for {len(rows)} reports -> {args.out}")
    return 0


def cmd_train(args) -> int:
    from .ranker import DEFAULT_SUBSETS, TrainingInstance, fit, parse_subset

    feature_rows = read_features(args.features)
    fixed = {r.report_id: frozenset(r.fixed_files)
             for r in load_reports(args.reports)}
    instances: dict = {}
    for report_id, (category, file_rows) in feature_rows.items():
        relevant = fixed.get(report_id, frozenset())
        for file_id, fv in file_rows:
            instances.setdefault(category, []).append(TrainingInstance(
                query_id=report_id, file_id=file_id, features=fv,
                relevance=1 if file_id in relevant else 0))
    subsets = dict(DEFAULT_SUBSETS)
    if args.subset:
        chosen = parse_subset(args.subset)
        subsets = {c: chosen for c in subsets}
    per_category = {}
    for category in sorted(instances, key=lambda c: c.value):
        per_category[category] = fit(
            instances[category], subsets[category],
            c=args.c, epochs=args.epochs, seed=args.seed)
    model = RankingModel(per_category)
    model.save(args.out)
    print(f"trained {len(per_category)} category model(s) -> {args.out}")
    return 0


def cmd_rank(args) -> int:
    model = RankingModel.load(args.model)
    feature_rows = read_features(args.features)
    for report_id, (category, file_rows) in feature_rows.items():
        ranked = rank(model, category, dict(file_rows))
        for pos, (fid, score) in enumerate(ranked[:args.top], 1):
            print(f"{report_id}\t{pos}\t{fid}\t{score:.6f}")
    return 0


def cmd_eval(args) -> int:
    reports = load_reports(args.dataset)
    if not reports:
        print("error: empty dataset", file=sys.stderr)
        return 2
    corpora = load_corpora(args.corpus_dir)
    provider = make_provider(args.provider, args.fixtures)
    model = RankingModel.load(args.model)
    outcome = run_eval(reports, corpora, provider, model,
                       _shot_mode(args.shots))
    doc = outcome.as_dict()
    if args.out:
        Path(args.out).write_text(json.dumps(doc, indent=1), encoding="utf-8")
    if args.table:
        print(format_comparison_table(outcome), end="")
    elif not args.out:
        print(json.dumps(doc, indent=1))
    return 0


def cmd_ablate(args) -> int:
    reports = load_reports(args.dataset)
    if not reports:
        print("error: empty dataset", file=sys.stderr)
        return 2
    corpora = load_corpora(args.corpus_dir)
    provider = make_provider(args.provider, args.fixtures)
    prepared, _ = prepare_reports(reports, corpora, provider,
                                  _shot_mode(args.shots))
    table = ablation(prepared, seed=args.seed)
    if args.out:
        doc = {label: {c.value: r.as_dict() for c, r in row.items()}
               for label, row in table.items()}
        Path(args.out).write_text(json.dumps(doc, indent=1), encoding="utf-8")
    print(format_ablation_table(table), end="")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    corpora = load_corpora(args.corpus_dir)
    provider = make_provider(args.provider, args.fixtures)
    model = RankingModel.load(args.model)
    app = create_app(corpora, model, provider, store_path=args.store,
                     max_cycles=args.max_cycles)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="faultline",
        description="IR-based fault localization with LLM-built queries")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="index a source tree")
    p.add_argument("--root", required=True)
    p.add_argument("--project", required=True)
    p.add_argument("--version", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--ext", action="append",
                   help="source extension(s) to scan (default: .java)")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("classify", help="print report_id<TAB>category")
    p.add_argument("--reports", required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("query", help="construct entity queries via the LLM")
    p.add_argument("--reports", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--provider", default="mock", choices=["mock", "http"])
    p.add_argument("--fixtures", help="mock reply fixture JSON")
    p.add_argument("--shots", default="1", choices=["0", "1"])
    p.add_argument("--out")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("extract-features", help="compute f1..f7 per (report, file)")
    p.add_argument("--reports", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_extract_features)

    p = sub.add_parser("train", help="fit per-category ranking models")
    p.add_argument("--features", required=True)
    p.add_argument("--reports", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--subset", help="feature subset, e.g. TS,CL,CG or ALL")
    p.add_argument("--c", type=float, default=0.01)
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("rank", help="rank candidates from a features file")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--top", type=int, default=10)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("eval", help="end-to-end evaluation over a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--corpus-dir", required=True)
    p.add_argument("--provider", default="mock", choices=["mock", "http"])
    p.add_argument("--fixtures")
    p.add_argument("--model", required=True)
    p.add_argument("--out")
    p.add_argument("--table", action="store_true")
    p.add_argument("--shots", default="1", choices=["0", "1"])
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("ablate", help="feature-subset ablation table")
    p.add_argument("--dataset", required=True)
    p.add_argument("--corpus-dir", required=True)
    p.add_argument("--provider", default="mock", choices=["mock", "http"])
    p.add_argument("--fixtures")
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--shots", default="1", choices=["0", "1"])
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("serve", help="run the localization session service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--corpus-dir", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--provider", default="mock", choices=["mock", "http"])
    p.add_argument("--fixtures")
    p.add_argument("--store", default="faultline-sessions.db")
    p.add_argument("--max-cycles", type=int, default=1)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FaultlineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
