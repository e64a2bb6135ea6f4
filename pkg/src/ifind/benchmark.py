"""Benchmark harness: synthetic data generators plus three reproductions.

The matcher bench compares inverse filtering against a full brute-force
scan and the exact-matcher baselines on perturbed keyword queries.  The
predictor bench sweeps the number of predicted interests through k-fold
cross validation and replays incremental feedback.  The pipeline bench
measures end-to-end hit rates with and without interest prediction, and
across the three association modes.  Everything is seed-deterministic;
only timing columns vary between runs.
"""

from __future__ import annotations

import csv
import random
import time
from dataclasses import dataclass

from .corpus import Corpus, Item, Keyword, build_index
from .engine import Engine, SearchOptions, SearchRequest
from .interest import (
    FeedbackEvent,
    ModelParams,
    TrainingSample,
    UserProfile,
    WeightMatrix,
    evaluate,
    feedback_update,
    fit,
    kfold_evaluate,
    predict,
)
from .matching import (
    MatchHit,
    Query,
    baseline_match_keywords,
    brute_force_match_keywords,
    if_match_keywords,
)
from .wordspace import EmbeddingTable, LabelCodebook, build_codebook

DEFAULT_CUTOFF = 10  # a query succeeds when the original keyword is in the top 10 returned


def cjk_alphabet(n: int) -> str:
    """The first n characters of the common ideograph block."""
    return "".join(chr(0x4E00 + i) for i in range(n))


def _zipf_weights(size: int, s: float) -> list[float]:
    return [1.0 / (rank + 1) ** s for rank in range(size)]


def gen_corpus(
    n_items: int,
    n_labels_per_item: int,
    alphabet: str,
    seed: int,
    zipf_s: float = 0.5,
    lengths: tuple[int, ...] = (3, 3, 4, 4, 5),
) -> Corpus:
    """Deterministic synthetic corpus.

    Keyword characters follow a Zipf-like rank distribution over the
    alphabet, so the distinct-character count saturates while the keyword
    count keeps growing linearly.  Every item gets its own distinct labels.
    """
    if n_items < 1:
        raise ValueError(f"n_items must be >= 1, got {n_items}")
    rng = random.Random(seed)
    chars = list(alphabet)
    weights = _zipf_weights(len(chars), zipf_s)
    needed = n_items * n_labels_per_item
    pool: list[str] = []
    seen: set[str] = set()
    while len(pool) < needed:
        kw = "".join(rng.choices(chars, weights=weights, k=rng.choice(lengths)))
        if kw not in seen:
            seen.add(kw)
            pool.append(kw)
    items = []
    for i in range(n_items):
        labels = pool[i * n_labels_per_item : (i + 1) * n_labels_per_item]
        items.append(
            Item(
                id=f"item{i:05d}",
                title=f"Item {i}",
                labels=tuple(Keyword(kw) for kw in labels),
            )
        )
    return build_index(items)


@dataclass(frozen=True)
class PerturbedQuery:
    """An inquiry text containing one keyword in an inexact form."""

    original: str
    text: str
    perturbation: str  # DELETE or SUBSTITUTE
    seed: int

    def __post_init__(self):
        if self.perturbation not in ("DELETE", "SUBSTITUTE"):
            raise ValueError(f"unknown perturbation {self.perturbation!r}")


def gen_queries(
    corpus: Corpus,
    n_queries: int,
    seed: int,
    modes: tuple[str, ...] = ("DELETE", "SUBSTITUTE"),
) -> list[PerturbedQuery]:
    """Perturbed inquiry texts: one keyword with a character deleted or
    substituted, embedded between two short filler runs."""
    rng = random.Random(seed)
    keywords = sorted(kw for kw in corpus.keyword_index if len(kw) >= 2)
    if not keywords:
        raise ValueError("corpus has no keyword of length >= 2 to perturb")
    alphabet = sorted(corpus.char_index)
    queries = []
    for i in range(n_queries):
        kw = rng.choice(keywords)
        mode = modes[i % len(modes)]
        pos = rng.randrange(len(kw))
        if mode == "DELETE":
            perturbed = kw[:pos] + kw[pos + 1 :]
        else:
            other = rng.choice([c for c in alphabet if c != kw[pos]])
            perturbed = kw[:pos] + other + kw[pos + 1 :]
        left = "".join(rng.choices(alphabet, k=rng.choice((2, 3))))
        right = "".join(rng.choices(alphabet, k=rng.choice((2, 3))))
        queries.append(PerturbedQuery(kw, f"{left} {perturbed} {right}", mode, seed))
    return queries


_MATCHERS = {
    "IF": if_match_keywords,
    "BRUTE": brute_force_match_keywords,
    "KMP": lambda q, c: baseline_match_keywords(q, c, "kmp"),
    "BM": lambda q, c: baseline_match_keywords(q, c, "bm"),
}


def _top_keywords(hits: list[MatchHit], cutoff: int) -> set[str]:
    ranked = sorted(hits, key=lambda h: (-len(h.keyword) / (h.distance + 1), h.distance, h.keyword))
    return {h.keyword for h in ranked[:cutoff]}


def run_matcher_bench(
    corpus: Corpus,
    n_queries: int,
    seed: int,
    threshold: float = 0.5,
    cutoff: int = DEFAULT_CUTOFF,
    modes: tuple[str, ...] = ("DELETE", "SUBSTITUTE"),
) -> list[dict]:
    """Accuracy and mean latency per algorithm over one perturbed query set.

    A query succeeds when its original keyword appears among the top
    ``cutoff`` keywords the algorithm returns.  The first query is a
    discarded warm-up; timing is wall-clock per whole-query search.
    """
    queries = gen_queries(corpus, n_queries + 1, seed, modes)
    warmup, timed = queries[0], queries[1:]
    rows = []
    for name, matcher in _MATCHERS.items():
        matcher(Query(warmup.text, threshold), corpus)
        successes = 0
        elapsed = 0.0
        for pq in timed:
            t0 = time.perf_counter()
            hits = matcher(Query(pq.text, threshold), corpus)
            elapsed += time.perf_counter() - t0
            if pq.original in _top_keywords(hits, cutoff):
                successes += 1
        rows.append(
            {
                "algorithm": name,
                "accuracy_pct": 100.0 * successes / len(timed),
                "mean_response_ms": 1000.0 * elapsed / len(timed),
                "n_queries": len(timed),
                "top_cutoff": cutoff,
            }
        )
    return rows


def _accuracy_chunk(args) -> dict[str, int]:
    corpus, queries, threshold, cutoff = args
    successes = {name: 0 for name in _MATCHERS}
    for pq in queries:
        query = Query(pq.text, threshold)
        for name, matcher in _MATCHERS.items():
            if pq.original in _top_keywords(matcher(query, corpus), cutoff):
                successes[name] += 1
    return successes


def run_matcher_accuracy(
    corpus: Corpus,
    n_queries: int,
    seed: int,
    threshold: float = 0.5,
    cutoff: int = DEFAULT_CUTOFF,
    modes: tuple[str, ...] = ("DELETE", "SUBSTITUTE"),
    workers: int = 2,
) -> list[dict]:
    """Accuracy-only variant of the matcher bench, fanned out over worker
    processes.  No timing columns: parallel scheduling would make them
    meaningless.  Uses the same query set as run_matcher_bench minus its
    warm-up query, so accuracies agree between the two."""
    from concurrent.futures import ProcessPoolExecutor

    queries = gen_queries(corpus, n_queries + 1, seed, modes)[1:]
    chunk = max(1, (len(queries) + workers - 1) // workers)
    jobs = [
        (corpus, queries[i : i + chunk], threshold, cutoff)
        for i in range(0, len(queries), chunk)
    ]
    totals = {name: 0 for name in _MATCHERS}
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for result in pool.map(_accuracy_chunk, jobs):
            for name, count in result.items():
                totals[name] += count
    return [
        {
            "algorithm": name,
            "accuracy_pct": 100.0 * totals[name] / len(queries),
            "n_queries": len(queries),
            "top_cutoff": cutoff,
        }
        for name in _MATCHERS
    ]


def write_matchers_csv(rows: list[dict], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["algorithm", "accuracy_pct", "mean_response_ms", "n_queries", "top_cutoff"])
        for r in rows:
            writer.writerow(
                [
                    r["algorithm"],
                    f"{r['accuracy_pct']:.2f}",
                    f"{r['mean_response_ms']:.3f}",
                    r["n_queries"],
                    r["top_cutoff"],
                ]
            )


def gen_interest_dataset(
    n_samples: int,
    seed: int,
    n_factors: int = 20,
    n_interests: int = 15,
    profile_size: tuple[int, int] = (5, 8),
    n_chosen: int = 10,
    noise: float = 0.5,
) -> tuple[list[TrainingSample], list[str], list[str]]:
    """Synthetic profile -> interest samples with learnable structure.

    A fixed factor/interest affinity table is drawn once from the seed; each
    sample picks 5 to 8 factors and chooses the 10 interests with the highest
    noisy summed affinity, mirroring the subject-selection protocol.
    """
    rng = random.Random(seed)
    factors = [f"factor{i:02d}" for i in range(n_factors)]
    interests = [f"interest{i:02d}" for i in range(n_interests)]
    affinity = {(h, k): rng.random() for h in factors for k in interests}
    samples = []
    for _ in range(n_samples):
        profile = frozenset(rng.sample(factors, rng.randint(*profile_size)))
        noisy = [
            (-(sum(affinity[(h, k)] for h in profile) + rng.gauss(0.0, noise)), k)
            for k in interests
        ]
        noisy.sort()
        chosen = frozenset(k for _, k in noisy[:n_chosen])
        samples.append(TrainingSample(UserProfile(profile), chosen))
    return samples, factors, interests


def run_predict_bench(
    samples: list[TrainingSample],
    folds: int,
    top_m_sweep: tuple[int, ...],
    seed: int,
    feedback_batches: int = 3,
    feedback_top_m: int = 5,
) -> list[dict]:
    """Precision/recall curves over the top_m sweep plus the incremental
    feedback series.

    The feedback series fits on a 70% split, then replays the held-out
    users' accept/reject judgments of their own top-5 predictions in
    batches, measuring precision@5 for those same users after each batch —
    the personalization loop, not a generalization test.  Each user
    accumulates feedback into their own weight state: accepts never demote
    an interest and rejects only demote interests the user did not choose,
    so the per-user (hence mean) precision never drops as batches grow.
    """
    rows = []
    for top_m in top_m_sweep:
        per_fold, (mean_p, mean_r) = kfold_evaluate(samples, folds, top_m, seed=seed)
        for i, (p, r) in enumerate(per_fold):
            rows.append({"series": "kfold", "top_m": top_m, "fold": str(i),
                         "batch": "", "events": "", "precision": p, "recall": r})
        rows.append({"series": "kfold", "top_m": top_m, "fold": "mean",
                     "batch": "", "events": "", "precision": mean_p, "recall": mean_r})

    order = list(range(len(samples)))
    random.Random(seed + 1).shuffle(order)
    cut = max(1, int(0.7 * len(samples)))
    train = [samples[i] for i in order[:cut]]
    test = [samples[i] for i in order[cut:]] or train
    factors = sorted({h for t in samples for h in t.profile.factors})
    interests = sorted({k for t in samples for k in t.chosen_interests})
    params = fit(train, interests, factors)
    per_user = [WeightMatrix.for_model(params) for _ in test]

    def _measure() -> tuple[float, float]:
        p_sum = r_sum = 0.0
        for sample, weights in zip(test, per_user):
            p, r = evaluate(params, weights, [sample], feedback_top_m)
            p_sum += p
            r_sum += r
        return p_sum / len(test), r_sum / len(test)

    events = 0
    p, r = _measure()
    rows.append({"series": "feedback", "top_m": feedback_top_m, "fold": "",
                 "batch": 0, "events": events, "precision": p, "recall": r})
    for batch in range(1, feedback_batches + 1):
        for i, sample in enumerate(test):
            weights = per_user[i]
            for k, _ in predict(sample.profile, params, weights, feedback_top_m):
                signal = 1 if k in sample.chosen_interests else 0
                weights = feedback_update(weights, FeedbackEvent(sample.profile, k, signal))
                events += 1
            per_user[i] = weights
        p, r = _measure()
        rows.append({"series": "feedback", "top_m": feedback_top_m, "fold": "",
                     "batch": batch, "events": events, "precision": p, "recall": r})
    return rows


def write_predict_csv(rows: list[dict], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["series", "top_m", "fold", "batch", "events", "precision", "recall"])
        for r in rows:
            writer.writerow(
                [
                    r["series"],
                    r["top_m"],
                    r["fold"],
                    r["batch"],
                    r["events"],
                    f"{r['precision']:.6f}",
                    f"{r['recall']:.6f}",
                ]
            )


@dataclass(frozen=True)
class PipelineSample:
    """One end-to-end case: inquiry text, optional profile, ground truth."""

    text: str
    profile: UserProfile | None
    target: str


@dataclass
class PipelineFixture:
    corpus_prediction: Corpus
    params: ModelParams
    prediction_samples: list[PipelineSample]
    corpus_association: Corpus
    table: EmbeddingTable
    codebook: LabelCodebook
    association_samples: list[PipelineSample]


_NAMES = ("tom", "emma", "anna", "jack", "lily", "noah")
_PAIR_INTERESTS = {
    ("boy", "summer"): "swim",
    ("boy", "winter"): "soccer",
    ("girl", "evening"): "piano",
    ("girl", "indoor"): "paint",
    ("boy", "indoor"): "chess",
    ("girl", "summer"): "dance",
}


def gen_pipeline_fixture(seed: int = 0, repeats: int = 3) -> PipelineFixture:
    """Two controlled corpora for the end-to-end benches.

    Prediction part: items come in name families sharing one generic label,
    distinguishable only by an interest label; queries mention the family
    name, so the target is reachable in a small result window only when the
    profile predicts its interest.  Association part: targets are labeled
    with words sharing no character with the query word, reachable only by
    landing on the label through the vector space; decoy words surround each
    query word so open-domain association expands into dead ends.
    """
    interests = sorted(_PAIR_INTERESTS.values())
    factors = sorted({f for pair in _PAIR_INTERESTS for f in pair})
    items = [
        Item(
            id=f"{name}-{interest}",
            title=f"{name.title()} {interest.title()} Story",
            labels=(Keyword(name), Keyword(interest)),
        )
        for name in _NAMES
        for interest in interests
    ]
    corpus_prediction = build_index(items)
    train = [
        TrainingSample(UserProfile(frozenset(pair)), frozenset({interest}))
        for pair, interest in _PAIR_INTERESTS.items()
        for _ in range(repeats)
    ]
    params = fit(train, interests, factors)
    prediction_samples = []
    for name in _NAMES:
        for pair, interest in _PAIR_INTERESTS.items():
            prediction_samples.append(
                PipelineSample(
                    text=f"stories about {name}",
                    profile=UserProfile(frozenset(pair)),
                    target=f"{name}-{interest}",
                )
            )

    labels = ("bolu", "gira", "mepo")
    centers = {"bolu": (0.0, 0.0), "gira": (10.0, 0.0), "mepo": (0.0, 10.0)}
    query_words = {"bolu": "styk", "gira": "wxzn", "mepo": "cdfh"}
    offsets = ((0.3, 0.05), (0.35, -0.05), (0.4, 0.1), (0.45, -0.1))
    entries: dict[str, tuple[float, float]] = {}
    for label in labels:
        cx, cy = centers[label]
        qx, qy = cx + 1.2, cy
        entries[label] = (cx, cy)
        entries[query_words[label]] = (qx, qy)
        for j, (dx, dy) in enumerate(offsets):
            entries[f"{query_words[label]}{j}"] = (qx + dx, qy + dy)
    table = EmbeddingTable(2, {w: list(v) for w, v in entries.items()})
    syn_items = [
        Item(id=f"syn-{label}", title=f"Synonym {label}", labels=(Keyword(label),))
        for label in labels
    ]
    corpus_association = build_index(syn_items)
    codebook, _ = build_codebook(table, list(labels))
    association_samples = []
    for label in labels:
        association_samples.append(PipelineSample(query_words[label], None, f"syn-{label}"))
        association_samples.append(PipelineSample(label, None, f"syn-{label}"))
    return PipelineFixture(
        corpus_prediction,
        params,
        prediction_samples,
        corpus_association,
        table,
        codebook,
        association_samples,
    )


def _hit_rate(engine: Engine, samples: list[PipelineSample], options: SearchOptions) -> float:
    hits = 0
    for sample in samples:
        response = engine.search(SearchRequest(sample.text, sample.profile, options))
        if any(r.item_id == sample.target for r in response.results):
            hits += 1
    return hits / len(samples)


def run_pipeline_bench(
    fixture: PipelineFixture, max_results_sweep: tuple[int, ...] = (4, 5)
) -> list[dict]:
    """End-to-end hit rates: prediction on/off, and association
    none/open/directional."""
    rows = []
    pred_engine = Engine(fixture.corpus_prediction, fixture.params)
    for mr in max_results_sweep:
        for variant, use_pred in (("without_prediction", False), ("with_prediction", True)):
            opts = SearchOptions(
                use_prediction=use_pred, use_word2vec=False, max_results=mr
            )
            rows.append(
                {
                    "analysis": "prediction",
                    "max_results": mr,
                    "variant": variant,
                    "accuracy": _hit_rate(pred_engine, fixture.prediction_samples, opts),
                }
            )
    assoc_engine = Engine(
        fixture.corpus_association, table=fixture.table, codebook=fixture.codebook
    )
    assoc_modes = (
        ("assoc_none", False, "directional"),
        ("assoc_open", True, "open"),
        ("assoc_directional", True, "directional"),
    )
    for mr in max_results_sweep:
        for variant, use_w2v, mode in assoc_modes:
            opts = SearchOptions(
                use_prediction=False,
                use_word2vec=use_w2v,
                assoc_mode=mode,
                expansion_n=1,
                max_results=mr,
            )
            rows.append(
                {
                    "analysis": "association",
                    "max_results": mr,
                    "variant": variant,
                    "accuracy": _hit_rate(assoc_engine, fixture.association_samples, opts),
                }
            )
    return rows


def write_pipeline_csv(rows: list[dict], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["analysis", "max_results", "variant", "accuracy"])
        for r in rows:
            writer.writerow(
                [r["analysis"], r["max_results"], r["variant"], f"{r['accuracy']:.6f}"]
            )
