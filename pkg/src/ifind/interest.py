"""Bipartite Bayesian network for user interest prediction.

Profile factors (age range, gender, hobby, time, scene, ...) form the
observed layer; interest keywords form the predicted layer.  Fitting counts
factor/interest co-occurrences over training samples into conditional tables
P(factor | interest) plus interest priors, with additive smoothing.
Prediction scores each interest with the naive-Bayes log sum, shifted by a
per-edge feedback weight that accept/reject events nudge up or down without
ever touching the fitted probabilities.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass

from .snapshots import SnapshotError, read_snapshot, write_snapshot

MODEL_MAGIC = "IFIND-MODEL"
MODEL_VERSION = "v1"

DEFAULT_TH1 = 0.1
DEFAULT_TH2 = 0.1
DEFAULT_W_MAX = 5.0


@dataclass(frozen=True)
class UserProfile:
    """The observed factor keywords describing one user."""

    factors: frozenset[str]

    def __post_init__(self):
        if not self.factors:
            raise ValueError("profile must contain at least one factor")

    @classmethod
    def of(cls, *factors: str) -> UserProfile:
        return cls(frozenset(factors))


@dataclass(frozen=True)
class TrainingSample:
    profile: UserProfile
    chosen_interests: frozenset[str]

    def __post_init__(self):
        if not self.chosen_interests:
            raise ValueError("training sample must choose at least one interest")

    @property
    def n_t(self) -> int:
        return len(self.profile.factors)


@dataclass(frozen=True)
class FeedbackEvent:
    """One binary judgment: the user accepted (1) or rejected (0) an
    interest prediction made for this profile."""

    profile: UserProfile
    interest: str
    signal: int

    def __post_init__(self):
        if self.signal not in (0, 1):
            raise ValueError(f"feedback signal must be 0 or 1, got {self.signal}")


def _check_vocab(name: str, vocab) -> tuple[str, ...]:
    items = tuple(vocab)
    if not items:
        raise ValueError(f"{name} vocabulary must be non-empty")
    if len(set(items)) != len(items):
        raise ValueError(f"{name} vocabulary contains duplicates")
    return items


@dataclass(frozen=True)
class ModelParams:
    """Fitted tables: cond[interest][factor] = P(factor | interest), plus
    the interest priors.  Immutable after fitting."""

    factors: tuple[str, ...]
    interests: tuple[str, ...]
    cond: dict[str, dict[str, float]]
    prior: dict[str, float]
    alpha: float


class WeightMatrix:
    """Per-edge feedback weights, default 0, clamped to [-w_max, +w_max].

    Known vocabularies, when given, reject events that reference tokens the
    model has never seen.  Updates are functional: the instance never mutates.
    """

    def __init__(
        self,
        values: dict[tuple[str, str], float] | None = None,
        w_max: float = DEFAULT_W_MAX,
        factors: frozenset[str] | None = None,
        interests: frozenset[str] | None = None,
    ):
        if w_max <= 0:
            raise ValueError(f"w_max must be positive, got {w_max}")
        self.w_max = w_max
        self.factors = factors
        self.interests = interests
        self._values: dict[tuple[str, str], float] = dict(values or {})
        for key, v in self._values.items():
            if not math.isfinite(v):
                raise ValueError(f"weight for {key} is not finite")

    @classmethod
    def for_model(cls, params: ModelParams, w_max: float = DEFAULT_W_MAX) -> WeightMatrix:
        return cls(w_max=w_max, factors=frozenset(params.factors),
                   interests=frozenset(params.interests))

    def get(self, factor: str, interest: str) -> float:
        return self._values.get((factor, interest), 0.0)

    def entries(self) -> dict[tuple[str, str], float]:
        return dict(self._values)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightMatrix):
            return NotImplemented
        return self.w_max == other.w_max and self._values == other._values


def fit(
    samples: list[TrainingSample],
    interests,
    factors,
    alpha: float = 1.0,
) -> ModelParams:
    """Estimate the network tables by co-occurrence counting.

    P(h | k) = (#samples choosing k whose profile contains h + alpha)
             / (sum of profile sizes over samples choosing k + alpha * |factors|)

    P(k) = (#samples choosing k + alpha)
         / (total interest choices across samples + alpha * |interests|)

    The prior denominator counts interest-choice events, not samples, so the
    priors sum to one even when samples choose several interests (with one
    choice per sample the two denominators coincide).  alpha = 0 gives the
    raw (unsmoothed) estimates; an interest chosen by no sample then gets
    all-zero conditionals rather than a division by zero.
    """
    if not samples:
        raise ValueError("samples must be non-empty")
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    factor_vocab = _check_vocab("factor", factors)
    interest_vocab = _check_vocab("interest", interests)
    factor_set = set(factor_vocab)
    interest_set = set(interest_vocab)
    for sample in samples:
        for h in sample.profile.factors:
            if h not in factor_set:
                raise ValueError(f"unknown profile factor: {h!r}")
        for k in sample.chosen_interests:
            if k not in interest_set:
                raise ValueError(f"unknown interest: {k!r}")

    cond: dict[str, dict[str, float]] = {}
    prior: dict[str, float] = {}
    total_choices = sum(len(t.chosen_interests) for t in samples)
    prior_denom = total_choices + alpha * len(interest_vocab)
    for k in interest_vocab:
        chosen = [t for t in samples if k in t.chosen_interests]
        denom = sum(t.n_t for t in chosen) + alpha * len(factor_vocab)
        row = {}
        for h in factor_vocab:
            num = sum(1 for t in chosen if h in t.profile.factors) + alpha
            row[h] = num / denom if denom > 0 else 0.0
        cond[k] = row
        prior[k] = (len(chosen) + alpha) / prior_denom if prior_denom > 0 else 0.0
    return ModelParams(factor_vocab, interest_vocab, cond, prior, alpha)


def _log(p: float) -> float:
    return math.log(p) if p > 0 else -math.inf


def predict(
    profile: UserProfile,
    params: ModelParams,
    weights: WeightMatrix | None = None,
    top_m: int = 4,
) -> list[tuple[str, float]]:
    """Rank interests for a profile.

    score(k) = ln P(k) + sum over profile factors h of [ln P(h|k) + w(h, k)].
    Ties break lexicographically; the result is the top_m best.
    """
    if top_m < 1:
        raise ValueError(f"top_m must be >= 1, got {top_m}")
    if not profile.factors:
        raise ValueError("profile must contain at least one factor")
    known = set(params.factors)
    for h in profile.factors:
        if h not in known:
            raise ValueError(f"unknown profile factor: {h!r}")
    scored = []
    for k in params.interests:
        s = _log(params.prior[k])
        row = params.cond[k]
        for h in profile.factors:
            s += _log(row[h])
            if weights is not None:
                s += weights.get(h, k)
        scored.append((k, s))
    scored.sort(key=lambda ks: (-ks[1], ks[0]))
    return scored[:top_m]


def feedback_update(
    weights: WeightMatrix,
    event: FeedbackEvent,
    th1: float = DEFAULT_TH1,
    th2: float = DEFAULT_TH2,
) -> WeightMatrix:
    """Apply one binary feedback event, returning new weights.

    Every factor in the event's profile has its edge to the event's interest
    moved by +th1 on accept or -th2 on reject, then clamped to
    [-w_max, +w_max].  No other entry changes; the input is not modified.
    """
    if th1 <= 0 or th2 <= 0:
        raise ValueError("th1 and th2 must be positive")
    if weights.interests is not None and event.interest not in weights.interests:
        raise ValueError(f"unknown interest: {event.interest!r}")
    if weights.factors is not None:
        for h in event.profile.factors:
            if h not in weights.factors:
                raise ValueError(f"unknown profile factor: {h!r}")
    values = weights.entries()
    delta = th1 if event.signal == 1 else -th2
    for h in event.profile.factors:
        key = (h, event.interest)
        moved = values.get(key, 0.0) + delta
        values[key] = max(-weights.w_max, min(weights.w_max, moved))
    return WeightMatrix(values, weights.w_max, weights.factors, weights.interests)


def evaluate(
    params: ModelParams,
    weights: WeightMatrix | None,
    test_samples: list[TrainingSample],
    top_m: int,
) -> tuple[float, float]:
    """Mean precision and recall of top_m predictions over test samples."""
    if not test_samples:
        raise ValueError("test_samples must be non-empty")
    precision = 0.0
    recall = 0.0
    for sample in test_samples:
        predicted = {k for k, _ in predict(sample.profile, params, weights, top_m)}
        overlap = len(predicted & sample.chosen_interests)
        precision += overlap / top_m
        recall += overlap / len(sample.chosen_interests)
    n = len(test_samples)
    return precision / n, recall / n


def kfold_evaluate(
    samples: list[TrainingSample],
    folds: int,
    top_m: int,
    alpha: float = 1.0,
    seed: int = 0,
    shuffle: bool = True,
) -> tuple[list[tuple[float, float]], tuple[float, float]]:
    """K-fold cross validation with a seed-deterministic fold assignment.

    Vocabularies are taken from the full sample set so held-out tokens are
    known at fit time.  With ``shuffle`` off, folds are contiguous chunks of
    the given order.  Returns per-fold (precision, recall) plus the mean.
    """
    if folds < 2:
        raise ValueError(f"folds must be >= 2, got {folds}")
    if len(samples) < folds:
        raise ValueError(f"need at least {folds} samples for {folds} folds, got {len(samples)}")
    factors = sorted({h for t in samples for h in t.profile.factors})
    interests = sorted({k for t in samples for k in t.chosen_interests})
    order = list(range(len(samples)))
    if shuffle:
        random.Random(seed).shuffle(order)
        assignment = [set(order[f::folds]) for f in range(folds)]
    else:
        bounds = [round(f * len(samples) / folds) for f in range(folds + 1)]
        assignment = [set(order[bounds[f] : bounds[f + 1]]) for f in range(folds)]
    per_fold = []
    for f in range(folds):
        held = assignment[f]
        train = [samples[i] for i in range(len(samples)) if i not in held]
        test = [samples[i] for i in sorted(held)]
        params = fit(train, interests, factors, alpha)
        per_fold.append(evaluate(params, None, test, top_m))
    mean_p = sum(p for p, _ in per_fold) / folds
    mean_r = sum(r for _, r in per_fold) / folds
    return per_fold, (mean_p, mean_r)


def save_model(
    path: str,
    params: ModelParams,
    weights: WeightMatrix,
    profiles: dict[str, list[str]] | None = None,
) -> None:
    """Persist fitted tables, feedback weights, and stored user profiles."""
    nested: dict[str, dict[str, float]] = {}
    for (h, k), v in weights.entries().items():
        nested.setdefault(h, {})[k] = v
    payload = {
        "alpha": params.alpha,
        "factors": list(params.factors),
        "interests": list(params.interests),
        "cond": params.cond,
        "prior": params.prior,
        "weights": {"w_max": weights.w_max, "entries": nested},
        "profiles": {u: sorted(fs) for u, fs in (profiles or {}).items()},
    }
    write_snapshot(path, MODEL_MAGIC, MODEL_VERSION, payload)


def load_model(path: str) -> tuple[ModelParams, WeightMatrix, dict[str, list[str]]]:
    payload = read_snapshot(path, MODEL_MAGIC, MODEL_VERSION)
    try:
        params = ModelParams(
            factors=tuple(payload["factors"]),
            interests=tuple(payload["interests"]),
            cond={k: dict(row) for k, row in payload["cond"].items()},
            prior=dict(payload["prior"]),
            alpha=payload["alpha"],
        )
        w = payload["weights"]
        values = {
            (h, k): v for h, row in w["entries"].items() for k, v in row.items()
        }
        weights = WeightMatrix(
            values,
            w_max=w["w_max"],
            factors=frozenset(params.factors),
            interests=frozenset(params.interests),
        )
        profiles = {u: list(fs) for u, fs in payload.get("profiles", {}).items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise SnapshotError(f"model snapshot has malformed fields: {exc}") from exc
    return params, weights, profiles


def load_samples_jsonl(path: str) -> list[TrainingSample]:
    """Read training samples from JSON Lines:
    {"profile": [factor, ...], "interests": [interest, ...]}."""
    samples = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
                samples.append(
                    TrainingSample(
                        UserProfile(frozenset(rec["profile"])),
                        frozenset(rec["interests"]),
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise SnapshotError(f"{path}:{lineno}: bad sample record: {exc}") from exc
    return samples
