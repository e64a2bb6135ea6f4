"""Command-line front door.

Exit codes: 0 success, 1 usage error, 2 data or format error.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import benchmark
from .config import load_config
from .corpus import alphabet_stats, build_index, load_corpus_jsonl, load_index, save_index
from .engine import Engine, SearchOptions, SearchRequest
from .interest import (
    UserProfile,
    WeightMatrix,
    fit,
    kfold_evaluate,
    load_model,
    load_samples_jsonl,
    save_model,
)
from .snapshots import SnapshotError
from .wordspace import (
    VectorFormatError,
    build_codebook,
    directional_associate,
    load_embeddings,
    nearest_neighbors,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="ifind", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    index = sub.add_parser("index", help="build and inspect index snapshots")
    index_sub = index.add_subparsers(dest="index_command", required=True)
    build = index_sub.add_parser("build")
    build.add_argument("--corpus", required=True, help="corpus JSON Lines file")
    build.add_argument("--out", required=True, help="index snapshot output path")
    build.add_argument("--max-labels", type=int, default=8,
                       help="labels to extract for items without curated labels")
    stats = index_sub.add_parser("stats")
    stats.add_argument("index", help="index snapshot path")

    search = sub.add_parser("search", help="run one query against an index")
    search.add_argument("--index", required=True)
    search.add_argument("--model", default=None)
    search.add_argument("--vectors", default=None)
    search.add_argument("--profile", default=None, help="comma-separated profile factors")
    search.add_argument("--no-predict", action="store_true")
    search.add_argument("--no-assoc", action="store_true")
    search.add_argument("--threshold", type=float, default=0.5)
    search.add_argument("--max-results", type=int, default=10)
    search.add_argument("text")

    model = sub.add_parser("model", help="fit and evaluate the interest model")
    model_sub = model.add_subparsers(dest="model_command", required=True)
    mfit = model_sub.add_parser("fit")
    mfit.add_argument("--samples", required=True, help="training samples JSON Lines file")
    mfit.add_argument("--out", required=True)
    mfit.add_argument("--alpha", type=float, default=1.0)
    meval = model_sub.add_parser("eval")
    meval.add_argument("--samples", required=True)
    meval.add_argument("--folds", type=int, required=True)
    meval.add_argument("--top", type=int, required=True)
    meval.add_argument("--seed", type=int, default=0)

    assoc = sub.add_parser("assoc", help="compare open vs directional association")
    assoc.add_argument("--vectors", required=True)
    assoc.add_argument("--labels-from", required=True, help="index snapshot providing the codebook")
    assoc.add_argument("-n", type=int, default=4)
    assoc.add_argument("word")

    bench = sub.add_parser("bench", help="run the benchmark suites")
    bench_sub = bench.add_subparsers(dest="bench_command", required=True)
    bm = bench_sub.add_parser("matchers")
    bm.add_argument("--corpus-size", type=int, default=2000, help="number of items")
    bm.add_argument("--labels-per-item", type=int, default=5)
    bm.add_argument("--alphabet-size", type=int, default=350)
    bm.add_argument("--queries", type=int, default=50)
    bm.add_argument("--seed", type=int, default=42)
    bm.add_argument("--threshold", type=float, default=0.5)
    bm.add_argument("--out", required=True, help="output directory")
    bp = bench_sub.add_parser("predict")
    bp.add_argument("--samples", default=None, help="JSON Lines samples; synthetic when omitted")
    bp.add_argument("--size", type=int, default=200)
    bp.add_argument("--folds", type=int, default=5)
    bp.add_argument("--seed", type=int, default=42)
    bp.add_argument("--out", required=True)
    bl = bench_sub.add_parser("pipeline")
    bl.add_argument("--seed", type=int, default=42)
    bl.add_argument("--out", required=True)

    srv = sub.add_parser("serve", help="start the HTTP service")
    srv.add_argument("--config", default=None, help="key=value configuration file")
    srv.add_argument("--host", default=None)
    srv.add_argument("--port", type=int, default=None)
    return parser


def _cmd_index(args) -> int:
    if args.index_command == "build":
        items = load_corpus_jsonl(args.corpus, max_labels=args.max_labels)
        corpus = build_index(items)
        save_index(corpus, args.out)
        keywords, alphabet = alphabet_stats(corpus)
        print(f"indexed {len(corpus.items)} items, {keywords} keywords, {alphabet} characters")
        return 0
    corpus = load_index(args.index)
    keywords, alphabet = alphabet_stats(corpus)
    print(f"items: {len(corpus.items)}")
    print(f"keyword_count: {keywords}")
    print(f"alphabet_size: {alphabet}")
    return 0


def _cmd_search(args) -> int:
    corpus = load_index(args.index)
    params = weights = None
    if args.model:
        params, weights, _profiles = load_model(args.model)
    table = codebook = None
    if args.vectors:
        table = load_embeddings(args.vectors)
        if corpus.keyword_index:
            codebook, _missing = build_codebook(table, sorted(corpus.keyword_index))
    profile = None
    if args.profile:
        factors = [f.strip() for f in args.profile.split(",") if f.strip()]
        if factors:
            profile = UserProfile(frozenset(factors))
    engine = Engine(corpus, params=params, weights=weights, table=table, codebook=codebook)
    options = SearchOptions(
        use_prediction=not args.no_predict and params is not None and profile is not None,
        use_word2vec=not args.no_assoc and table is not None,
        max_results=args.max_results,
        threshold=args.threshold,
    )
    response = engine.search(SearchRequest(args.text, profile, options))
    if response.predicted_interests:
        print("predicted interests: " + ", ".join(response.predicted_interests))
    for expanded, labels in response.expansions.items():
        print(f"expansion {expanded}: " + ", ".join(labels))
    print(f"{'rank':>4}  {'score':>10}  {'prov':<4}  {'item':<16}  title")
    for rank, r in enumerate(response.results, 1):
        print(f"{rank:>4}  {r.score:>10.4f}  {r.provenance:<4}  {r.item_id:<16}  {r.title}")
    return 0


def _cmd_model(args) -> int:
    samples = load_samples_jsonl(args.samples)
    if args.model_command == "fit":
        factors = sorted({h for t in samples for h in t.profile.factors})
        interests = sorted({k for t in samples for k in t.chosen_interests})
        params = fit(samples, interests, factors, args.alpha)
        save_model(args.out, params, WeightMatrix.for_model(params))
        print(f"fitted {len(interests)} interests over {len(factors)} factors "
              f"from {len(samples)} samples")
        return 0
    per_fold, (mean_p, mean_r) = kfold_evaluate(samples, args.folds, args.top, seed=args.seed)
    for i, (p, r) in enumerate(per_fold):
        print(f"fold {i}: precision={p:.4f} recall={r:.4f}")
    print(f"mean:   precision={mean_p:.4f} recall={mean_r:.4f}")
    return 0


def _cmd_assoc(args) -> int:
    table = load_embeddings(args.vectors)
    corpus = load_index(args.labels_from)
    codebook, missing = build_codebook(table, sorted(corpus.keyword_index))
    if missing:
        print(f"note: {len(missing)} corpus labels are absent from the vector table")
    open_assoc = nearest_neighbors(args.word, table, args.n)
    directional = directional_associate(args.word, table, codebook, args.n)
    if open_assoc is None:
        print(f"word {args.word!r} is not in the vector table; no expansion")
        return 0
    print(f"word: {args.word}")
    print(f"{'open association':<32}  directional association")
    for i in range(max(len(open_assoc.neighbors), len(directional))):
        left = ""
        if i < len(open_assoc.neighbors):
            w, d = open_assoc.neighbors[i]
            left = f"{w} ({d:.3f})"
        right = directional[i] if i < len(directional) else ""
        print(f"{left:<32}  {right}")
    return 0


def _cmd_bench(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    if args.bench_command == "matchers":
        corpus = benchmark.gen_corpus(
            args.corpus_size,
            args.labels_per_item,
            benchmark.cjk_alphabet(args.alphabet_size),
            args.seed,
        )
        rows = benchmark.run_matcher_bench(corpus, args.queries, args.seed, args.threshold)
        out = os.path.join(args.out, "matchers.csv")
        benchmark.write_matchers_csv(rows, out)
        for r in rows:
            print(f"{r['algorithm']:<6} accuracy={r['accuracy_pct']:6.2f}% "
                  f"mean={r['mean_response_ms']:.3f} ms")
        print(f"wrote {out}")
        return 0
    if args.bench_command == "predict":
        if args.samples:
            samples = load_samples_jsonl(args.samples)
        else:
            samples, _, _ = benchmark.gen_interest_dataset(args.size, args.seed)
        rows = benchmark.run_predict_bench(samples, args.folds, tuple(range(1, 11)), args.seed)
        out = os.path.join(args.out, "predict.csv")
        benchmark.write_predict_csv(rows, out)
        print(f"wrote {out}")
        return 0
    fixture = benchmark.gen_pipeline_fixture(args.seed)
    rows = benchmark.run_pipeline_bench(fixture)
    out = os.path.join(args.out, "pipeline.csv")
    benchmark.write_pipeline_csv(rows, out)
    for r in rows:
        print(f"{r['analysis']:<12} max_results={r['max_results']} "
              f"{r['variant']:<20} accuracy={r['accuracy']:.3f}")
    print(f"wrote {out}")
    return 0


def _cmd_serve(args) -> int:
    from .service import serve

    config = load_config(args.config)
    if args.host:
        config.host = args.host
    if args.port:
        config.port = args.port
    problems = config.validate()
    if problems:
        for p in problems:
            print(f"configuration error: {p}", file=sys.stderr)
        return 2
    serve(config)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    handlers = {
        "index": _cmd_index,
        "search": _cmd_search,
        "model": _cmd_model,
        "assoc": _cmd_assoc,
        "bench": _cmd_bench,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except (SnapshotError, VectorFormatError) as exc:
        print(f"format error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
