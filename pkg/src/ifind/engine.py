"""The personalized search pipeline.

One request fans out into two inverse-filtering searches: the explicit list
from the user's (optionally association-expanded) input text, and the
predicted list from the interest keywords inferred for the user's profile.
The two lists merge under three rules: strong explicit matches keep the top
tier, items found by both routes earn a combination bonus, and the output is
truncated.  Accepted or rejected results feed back into the interest model
through the per-edge weight update, correlated to the originating request by
a bounded journal.
"""

from __future__ import annotations

import threading
from collections import OrderedDict
from dataclasses import dataclass, field

from .corpus import Corpus, tokenize
from .interest import (
    DEFAULT_TH1,
    DEFAULT_TH2,
    FeedbackEvent,
    ModelParams,
    UserProfile,
    WeightMatrix,
    feedback_update,
    predict,
)
from .matching import Query, RankedResult, if_search
from .wordspace import EmbeddingTable, LabelCodebook, directional_associate, nearest_neighbors


class ConfigurationError(RuntimeError):
    """The request needs a component the engine was not given."""


class StaleFeedbackError(KeyError):
    """Feedback referenced a request_id the journal no longer holds."""


@dataclass(frozen=True)
class SearchOptions:
    use_prediction: bool = True
    use_word2vec: bool = True
    max_results: int = 10
    threshold: float = 0.5
    expansion_n: int = 4
    top_interests: int = 4
    assoc_mode: str = "directional"

    def __post_init__(self):
        if self.max_results < 1:
            raise ValueError(f"max_results must be >= 1, got {self.max_results}")
        if not 0 < self.threshold <= 1:
            raise ValueError(f"threshold must be in (0, 1], got {self.threshold}")
        if self.assoc_mode not in ("directional", "open"):
            raise ValueError(f"assoc_mode must be directional or open, got {self.assoc_mode!r}")


@dataclass(frozen=True)
class SearchRequest:
    text: str
    profile: UserProfile | None = None
    options: SearchOptions = field(default_factory=SearchOptions)


@dataclass(frozen=True)
class ResultEntry:
    item_id: str
    title: str
    score: float
    provenance: str  # EXP, PRE, or BOTH


@dataclass(frozen=True)
class SearchResponse:
    results: tuple[ResultEntry, ...]
    predicted_interests: tuple[str, ...]
    expansions: dict[str, list[str]]
    request_id: str


def merge(
    l_exp: list[RankedResult],
    l_pre: list[RankedResult],
    max_results: int,
    beta: float = 1.0,
    gamma: float = 0.8,
) -> list[tuple[str, float, str]]:
    """Combine the explicit and predicted result lists.

    final(m) = s_exp + s_pre + beta * min(s_exp, s_pre) for items on both
    lists; explicit items scoring within gamma of the best explicit score
    form a tier ranked above everything else; output is truncated.  Returns
    (item_id, final_score, provenance) tuples.
    """
    s_exp = {r.item_id: r.score for r in l_exp}
    s_pre = {r.item_id: r.score for r in l_pre}
    max_exp = max(s_exp.values(), default=0.0)
    rows = []
    for item_id in set(s_exp) | set(s_pre):
        se = s_exp.get(item_id, 0.0)
        sp = s_pre.get(item_id, 0.0)
        both = item_id in s_exp and item_id in s_pre
        final = se + sp + (beta * min(se, sp) if both else 0.0)
        tiered = item_id in s_exp and se >= gamma * max_exp
        provenance = "BOTH" if both else ("EXP" if item_id in s_exp else "PRE")
        rows.append((not tiered, -final, item_id, final, provenance))
    rows.sort()
    return [(item_id, final, prov) for _, _, item_id, final, prov in rows[:max_results]]


@dataclass
class _RequestRecord:
    profile: UserProfile | None
    interests: tuple[str, ...]
    contributors: dict[str, frozenset[str]]
    seen: set[tuple[str, int]] = field(default_factory=set)


class Engine:
    """Holds the immutable search state plus the mutable feedback side.

    Searches read a consistent snapshot of (corpus, params, weights) taken at
    entry; feedback updates serialize through one lock and swap in fresh
    weight values, so readers see either the old or the new weights whole.
    """

    def __init__(
        self,
        corpus: Corpus,
        params: ModelParams | None = None,
        weights: WeightMatrix | None = None,
        table: EmbeddingTable | None = None,
        codebook: LabelCodebook | None = None,
        th1: float = DEFAULT_TH1,
        th2: float = DEFAULT_TH2,
        beta: float = 1.0,
        gamma: float = 0.8,
        journal_size: int = 10_000,
    ):
        self.corpus = corpus
        self.params = params
        self.weights = weights if weights is not None else (
            WeightMatrix.for_model(params) if params is not None else None
        )
        self.table = table
        self.codebook = codebook
        self.th1 = th1
        self.th2 = th2
        self.beta = beta
        self.gamma = gamma
        self._journal: OrderedDict[str, _RequestRecord] = OrderedDict()
        self._journal_size = journal_size
        self._counter = 0
        self._lock = threading.Lock()

    def _expand(self, word: str, mode: str, n: int) -> list[str]:
        if self.table is None:
            return []
        if mode == "directional":
            if self.codebook is None:
                return []
            return directional_associate(word, self.table, self.codebook, n)
        assoc = nearest_neighbors(word, self.table, n)
        return [w for w, _ in assoc.neighbors] if assoc else []

    def search(self, request: SearchRequest) -> SearchResponse:
        corpus, params, weights = self.corpus, self.params, self.weights
        opts = request.options
        if not request.text and request.profile is None:
            raise ValueError("search needs a non-empty text or a profile")
        predicts = opts.use_prediction and request.profile is not None
        if predicts and params is None:
            raise ConfigurationError("prediction requested but no interest model is loaded")

        expansions: dict[str, list[str]] = {}
        exp_text = request.text
        if opts.use_word2vec and request.text:
            extra: list[str] = []
            for token in dict.fromkeys(tokenize(request.text)):
                labels = self._expand(token, opts.assoc_mode, opts.expansion_n)
                if labels:
                    expansions[token] = labels
                    extra.extend(lb for lb in labels if lb != token)
            if extra:
                exp_text = request.text + " " + " ".join(extra)

        l_exp = (
            if_search(Query(exp_text, opts.threshold), corpus) if exp_text else []
        )

        l_pre: list[RankedResult] = []
        interests: tuple[str, ...] = ()
        terms_by_interest: dict[str, set[str]] = {}
        if predicts:
            ranked = predict(request.profile, params, weights, opts.top_interests)
            interests = tuple(k for k, _ in ranked)
            pre_terms: list[str] = []
            for k in interests:
                terms = [k]
                if opts.use_word2vec:
                    terms += [lb for lb in self._expand(k, opts.assoc_mode, opts.expansion_n) if lb != k]
                terms_by_interest[k] = {t.lower() for t in terms}
                pre_terms.extend(terms)
            pre_query = " ".join(dict.fromkeys(pre_terms))
            if pre_query:
                l_pre = if_search(Query(pre_query, opts.threshold), corpus)

        merged = merge(l_exp, l_pre, opts.max_results, self.beta, self.gamma)
        results = tuple(
            ResultEntry(item_id, corpus.items[item_id].title, score, prov)
            for item_id, score, prov in merged
        )

        contributors: dict[str, frozenset[str]] = {}
        matched_by_item = {r.item_id: {h.keyword for h in r.hits} for r in l_pre}
        for item_id, matched in matched_by_item.items():
            who = frozenset(
                k for k, terms in terms_by_interest.items() if terms & matched
            )
            if who:
                contributors[item_id] = who

        with self._lock:
            self._counter += 1
            request_id = f"q{self._counter:08d}"
            self._journal[request_id] = _RequestRecord(
                request.profile, interests, contributors
            )
            while len(self._journal) > self._journal_size:
                self._journal.popitem(last=False)

        return SearchResponse(results, interests, expansions, request_id)

    def record_feedback(self, request_id: str, item_id: str, accept: bool) -> bool:
        """Route one accept/reject judgment back into the interest model.

        Each interest that contributed to retrieving the item gets a
        feedback event for the request's profile.  Returns False when
        nothing changed: the item came only from the explicit route, or this
        (request, item, signal) was already applied.  Unknown request ids
        raise StaleFeedbackError.
        """
        signal = 1 if accept else 0
        with self._lock:
            record = self._journal.get(request_id)
            if record is None:
                raise StaleFeedbackError(request_id)
            if (item_id, signal) in record.seen:
                return False
            record.seen.add((item_id, signal))
            interests = record.contributors.get(item_id)
            if not interests or record.profile is None or self.weights is None:
                return False
            weights = self.weights
            for k in sorted(interests):
                weights = feedback_update(
                    weights, FeedbackEvent(record.profile, k, signal), self.th1, self.th2
                )
            self.weights = weights
            return True
