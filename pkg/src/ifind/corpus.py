"""Labeled item corpus and the two hash indexes behind inverse filtering.

An item carries a list of representative keywords (labels).  Indexing builds
two maps: ``char_index`` from each character to the keywords containing it,
and ``keyword_index`` from each keyword to the items labeled with it.  The
character map is what makes candidate screening cheap: for character-heavy
scripts the alphabet saturates while the keyword count keeps growing, so a
query's characters select a small slice of the keyword set.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field

from .snapshots import SnapshotError, read_snapshot, write_snapshot

INDEX_MAGIC = "IFIND-INDEX"
INDEX_VERSION = "v1"

_WORD_RUN = re.compile(r"\w+", re.UNICODE)

# Script ranges treated as non-delimited (no spaces between words):
# Han + extension A, Hiragana, Katakana, Hangul syllables.
_NON_DELIMITED_RANGES = (
    (0x3040, 0x30FF),
    (0x3400, 0x4DBF),
    (0x4E00, 0x9FFF),
    (0xAC00, 0xD7AF),
)


def _is_non_delimited_char(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _NON_DELIMITED_RANGES)


@dataclass(frozen=True)
class Keyword:
    """A label text with its extraction weight (TF-IDF score, >= 0)."""

    text: str
    weight: float = 1.0

    def __post_init__(self):
        if not self.text:
            raise ValueError("keyword text must be non-empty")
        if self.weight < 0:
            raise ValueError(f"keyword weight must be >= 0, got {self.weight}")


@dataclass(frozen=True)
class Item:
    """A searchable record: unique id, title, and its label keywords."""

    id: str
    title: str
    labels: tuple[Keyword, ...]
    content: str | None = None


def tokenize(text: str, n: int = 2, delimited: bool | None = None) -> list[str]:
    """Split text into tokens.

    Delimiter-separated runs (Latin and friends) are lowercased whole words;
    runs in scripts without word delimiters become overlapping character
    n-grams.  ``delimited`` forces one mode for every run; the default
    detects per character.
    """
    if n < 1:
        raise ValueError(f"n-gram size must be >= 1, got {n}")
    tokens: list[str] = []
    for run in _WORD_RUN.findall(text):
        if delimited is True:
            tokens.append(run.lower())
            continue
        if delimited is False or any(_is_non_delimited_char(c) for c in run):
            run = run.lower()
            if len(run) <= n:
                tokens.append(run)
            else:
                tokens.extend(run[i : i + n] for i in range(len(run) - n + 1))
        else:
            tokens.append(run.lower())
    return tokens


def extract_keywords(
    docs: list[tuple[str, str]], max_per_doc: int, n: int = 2
) -> dict[str, list[Keyword]]:
    """Pick each document's top keywords by TF-IDF.

    weight(t, d) = tf(t, d) * ln((1 + N) / (1 + df(t))) with raw term counts
    and add-one smoothed document frequency.  Per document the ``max_per_doc``
    heaviest tokens are kept, weight ties broken lexicographically, and the
    returned lists are sorted by descending weight.
    """
    if not docs:
        raise ValueError("docs must be non-empty")
    if max_per_doc < 1:
        raise ValueError(f"max_per_doc must be >= 1, got {max_per_doc}")
    counts: dict[str, Counter[str]] = {}
    df: Counter[str] = Counter()
    for doc_id, content in docs:
        tf = Counter(tokenize(content, n=n))
        counts[doc_id] = tf
        df.update(tf.keys())
    n_docs = len(docs)
    out: dict[str, list[Keyword]] = {}
    for doc_id, _ in docs:
        tf = counts[doc_id]
        scored = [
            (tf[t] * math.log((1 + n_docs) / (1 + df[t])), t) for t in tf
        ]
        scored.sort(key=lambda wt: (-wt[0], wt[1]))
        out[doc_id] = [Keyword(t, w) for w, t in scored[:max_per_doc]]
    return out


class Corpus:
    """An immutable indexed corpus.

    ``char_index`` maps every character to the set of keyword texts that
    contain it; ``keyword_index`` maps every keyword text to the set of item
    ids labeled with it.  Both are derived purely from the item set, so
    rebuilding from ``items`` reproduces them exactly.
    """

    def __init__(
        self,
        items: dict[str, Item],
        char_index: dict[str, set[str]],
        keyword_index: dict[str, set[str]],
        alphabet_size: int,
    ):
        self.items = items
        self.char_index = char_index
        self.keyword_index = keyword_index
        self.alphabet_size = alphabet_size

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Corpus):
            return NotImplemented
        return (
            self.items == other.items
            and self.char_index == other.char_index
            and self.keyword_index == other.keyword_index
            and self.alphabet_size == other.alphabet_size
        )

    def __repr__(self) -> str:
        return (
            f"Corpus(items={len(self.items)}, keywords={len(self.keyword_index)}, "
            f"alphabet={self.alphabet_size})"
        )


def _normalize_labels(item: Item) -> tuple[Keyword, ...]:
    """Case-fold label texts and drop duplicates, keeping first occurrence."""
    seen: dict[str, Keyword] = {}
    for kw in item.labels:
        folded = kw.text.lower()
        if folded not in seen:
            seen[folded] = Keyword(folded, kw.weight)
    return tuple(seen.values())


def build_index(items: list[Item], allow_empty: bool = True) -> Corpus:
    """Build both hash indexes over the item set.

    Duplicate item ids and items with no labels are rejected.  The result is
    a pure function of the item set: item order does not matter.
    """
    if not items and not allow_empty:
        raise ValueError("refusing to build an index over zero items")
    by_id: dict[str, Item] = {}
    for item in items:
        if item.id in by_id:
            raise ValueError(f"duplicate item id: {item.id!r}")
        labels = _normalize_labels(item)
        if not labels:
            raise ValueError(f"item {item.id!r} has no labels and would be unreachable")
        by_id[item.id] = Item(item.id, item.title, labels, item.content)

    char_index: dict[str, set[str]] = {}
    keyword_index: dict[str, set[str]] = {}
    for item in by_id.values():
        for kw in item.labels:
            keyword_index.setdefault(kw.text, set()).add(item.id)
            for ch in kw.text:
                char_index.setdefault(ch, set()).add(kw.text)
    return Corpus(by_id, char_index, keyword_index, len(char_index))


def alphabet_stats(corpus: Corpus) -> tuple[int, int]:
    """(keyword count, distinct character count) of the indexed keywords."""
    return len(corpus.keyword_index), corpus.alphabet_size


def load_corpus_jsonl(
    path: str, max_labels: int = 8, extract_missing: bool = True
) -> list[Item]:
    """Read items from JSON Lines: {"id", "title", "labels": [...], "content"?}.

    Records with an empty label list fall back to TF-IDF extraction over the
    contents of all records, when ``extract_missing`` is set.
    """
    import json

    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SnapshotError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            if "id" not in rec:
                raise SnapshotError(f"{path}:{lineno}: record has no 'id'")
            records.append(rec)

    extracted: dict[str, list[Keyword]] = {}
    if extract_missing:
        docs = [(r["id"], r["content"]) for r in records if r.get("content")]
        if docs:
            extracted = extract_keywords(docs, max_per_doc=max_labels)

    items = []
    for rec in records:
        labels = [Keyword(t) for t in rec.get("labels", [])]
        if not labels:
            labels = list(extracted.get(rec["id"], []))
        items.append(
            Item(
                id=str(rec["id"]),
                title=rec.get("title", ""),
                labels=tuple(labels),
                content=rec.get("content"),
            )
        )
    return items


def _corpus_payload(corpus: Corpus) -> dict:
    return {
        "items": [
            {
                "id": item.id,
                "title": item.title,
                "labels": [[kw.text, kw.weight] for kw in item.labels],
                "content": item.content,
            }
            for _, item in sorted(corpus.items.items())
        ],
        "char_index": {c: sorted(kws) for c, kws in corpus.char_index.items()},
        "keyword_index": {k: sorted(ids) for k, ids in corpus.keyword_index.items()},
        "alphabet_size": corpus.alphabet_size,
    }


def save_index(corpus: Corpus, path: str) -> None:
    write_snapshot(path, INDEX_MAGIC, INDEX_VERSION, _corpus_payload(corpus))


def load_index(path: str) -> Corpus:
    """Load a corpus snapshot, verifying the stored indexes against the items."""
    payload = read_snapshot(path, INDEX_MAGIC, INDEX_VERSION)
    try:
        items = [
            Item(
                id=rec["id"],
                title=rec["title"],
                labels=tuple(Keyword(t, w) for t, w in rec["labels"]),
                content=rec.get("content"),
            )
            for rec in payload["items"]
        ]
        stored_chars = {c: set(kws) for c, kws in payload["char_index"].items()}
        stored_keywords = {k: set(ids) for k, ids in payload["keyword_index"].items()}
        stored_alpha = payload["alphabet_size"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SnapshotError(f"index snapshot has malformed fields: {exc}") from exc
    corpus = build_index(items)
    if (
        corpus.char_index != stored_chars
        or corpus.keyword_index != stored_keywords
        or corpus.alphabet_size != stored_alpha
    ):
        raise SnapshotError("index snapshot is inconsistent with its own item set")
    return corpus
