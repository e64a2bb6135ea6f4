"""Approximate keyword matching by inverse filtering.

Instead of scanning a large text for each keyword, the query text is small
and the keyword set is large, so the roles are flipped: the query's
characters screen the keyword set down to candidates through the character
index, and only candidates pay for the sliding-window DTW comparison.

Ranking sums, per item, length(keyword) / (distance + 1) over that item's
matched keywords.  The +1 smooths the denominator so exact matches (distance
0) score highest and finite.  KMP and Boyer-Moore exact matchers plus a
deletion-variant fuzzy baseline are included for benchmark comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .corpus import Corpus


@dataclass(frozen=True)
class Query:
    """Search input: the text X and the minimum normalized similarity."""

    text: str
    threshold: float = 0.5

    def __post_init__(self):
        if not 0 < self.threshold <= 1:
            raise ValueError(f"threshold must be in (0, 1], got {self.threshold}")


@dataclass(frozen=True)
class MatchHit:
    """A keyword's best window in X: half-open offsets and DTW distance."""

    keyword: str
    window: tuple[int, int]
    distance: int


@dataclass(frozen=True)
class RankedResult:
    item_id: str
    score: float
    hits: tuple[MatchHit, ...]


def dtw_distance(a: str, b: str) -> int:
    """Dynamic time warping distance between two character sequences.

    Local cost is 0 for equal characters, 1 otherwise;
    D(i, j) = cost(a_i, b_j) + min(D(i-1, j), D(i, j-1), D(i-1, j-1)),
    with the first row and column accumulating along their only path.
    Warping may repeat characters at zero cost, so unequal strings can be at
    distance 0 (e.g. "ab" vs "aabb").
    """
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        raise ValueError("dtw_distance is undefined for empty strings")
    prev = [0] * lb
    acc = 0
    a0 = a[0]
    for j in range(lb):
        if a0 != b[j]:
            acc += 1
        prev[j] = acc
    cur = [0] * lb
    for i in range(1, la):
        ai = a[i]
        left = prev[0] + (0 if ai == b[0] else 1)
        cur[0] = left
        for j in range(1, lb):
            up = prev[j]
            diag = prev[j - 1]
            best = diag if diag < up else up
            if left < best:
                best = left
            left = best + (0 if ai == b[j] else 1)
            cur[j] = left
        prev, cur = cur, prev
    return prev[lb - 1]


def candidates(query: Query, char_index: dict[str, set[str]]) -> set[str]:
    """Keywords sharing at least one character with the query text."""
    out: set[str] = set()
    for ch in set(query.text.lower()):
        hit = char_index.get(ch)
        if hit:
            out |= hit
    return out


def _accept_cap(keyword: str, threshold: float) -> int:
    """Largest DTW distance an accepted hit may have.

    1 / (dist + 1) >= threshold bounds dist by 1/threshold - 1, and the
    shared-character guard bounds it by len(keyword) - 1 (a window where
    every character mismatches costs at least len(keyword), so requiring one
    exact alignment keeps character screening lossless at any threshold).
    """
    return min(len(keyword) - 1, math.floor(1.0 / threshold - 1.0 + 1e-9))


def _window_dtw(keyword: str, x: str, start: int, width: int, bound: int) -> int | None:
    """dtw_distance(keyword, x[start:start+width]), abandoning early.

    Row minima of the cumulative table never decrease, so once a row's
    minimum exceeds ``bound`` no window alignment can come back under it and
    the window is reported as None (unusable), never a wrong distance.
    """
    end = start + width
    prev = [0] * width
    acc = 0
    a0 = keyword[0]
    for j in range(width):
        if a0 != x[start + j]:
            acc += 1
        prev[j] = acc
    if min(prev) > bound:
        return None
    cur = [0] * width
    for i in range(1, len(keyword)):
        ai = keyword[i]
        left = prev[0] + (0 if ai == x[start] else 1)
        cur[0] = left
        row_min = left
        for j in range(1, width):
            up = prev[j]
            diag = prev[j - 1]
            best = diag if diag < up else up
            if left < best:
                best = left
            left = best + (0 if ai == x[start + j] else 1)
            cur[j] = left
            if left < row_min:
                row_min = left
        if row_min > bound:
            return None
        prev, cur = cur, prev
    return prev[width - 1]


def _best_window(keyword: str, x: str, cap: int) -> tuple[int, int, int] | None:
    """Minimum-distance window of width len(keyword) +/- 1 over x.

    Returns (distance, start, width) with distance <= cap, or None when no
    window qualifies; ties prefer the leftmost start, then the narrowest
    window.  Windows provably above the cap are skipped without changing
    which hit wins.
    """
    lx = len(x)
    if lx == 0 or cap < 0:
        return None
    lk = len(keyword)
    widths = sorted({max(1, min(lx, w)) for w in (lk - 1, lk, lk + 1)})
    best: tuple[int, int, int] | None = None
    bound = cap
    for width in widths:
        for start in range(lx - width + 1):
            dist = _window_dtw(keyword, x, start, width, bound)
            if dist is None or dist > cap:
                continue
            cand = (dist, start, width)
            if best is None or cand < best:
                best = cand
                bound = best[0]
    return best


def match_keyword(keyword: str, query: Query) -> MatchHit | None:
    """Best approximate occurrence of one keyword in the query text.

    Windows of width len(keyword) +/- 1 slide over the text; the minimum
    DTW distance wins, leftmost on ties.  The hit is accepted when
    1 / (distance + 1) reaches the threshold and at least one character
    aligned exactly (distance < len(keyword)).
    """
    if not keyword:
        raise ValueError("keyword must be non-empty")
    found = _best_window(keyword, query.text.lower(), _accept_cap(keyword, query.threshold))
    if found is None:
        return None
    dist, start, width = found
    return MatchHit(keyword, (start, start + width), dist)


def _hit_set(x: str, threshold: float, keywords) -> dict[str, MatchHit]:
    """Match each keyword against x; keep accepted hits keyed by keyword."""
    hits: dict[str, MatchHit] = {}
    for kw in keywords:
        found = _best_window(kw, x, _accept_cap(kw, threshold))
        if found is not None:
            dist, start, width = found
            hits[kw] = MatchHit(kw, (start, start + width), dist)
    return hits


def _rank_items(hits: dict[str, MatchHit], corpus: Corpus) -> list[RankedResult]:
    """Aggregate keyword hits into per-item scores, descending."""
    per_item: dict[str, list[MatchHit]] = {}
    for kw in sorted(hits):
        hit = hits[kw]
        for item_id in corpus.keyword_index.get(kw, ()):
            per_item.setdefault(item_id, []).append(hit)
    results = [
        RankedResult(
            item_id,
            sum(len(h.keyword) / (h.distance + 1) for h in item_hits),
            tuple(item_hits),
        )
        for item_id, item_hits in per_item.items()
    ]
    results.sort(key=lambda r: (-r.score, r.item_id))
    return results


def _require_text(query: Query) -> str:
    if not query.text:
        raise ValueError("query text must be non-empty")
    return query.text.lower()


def if_search(query: Query, corpus: Corpus) -> list[RankedResult]:
    """Inverse-filtering search: screen candidates by shared characters
    through the character index, then DTW-match only those."""
    x = _require_text(query)
    cand = candidates(query, corpus.char_index)
    return _rank_items(_hit_set(x, query.threshold, sorted(cand)), corpus)


def brute_force_search(query: Query, corpus: Corpus) -> list[RankedResult]:
    """Ground-truth oracle: identical contract to if_search but DTW-matches
    every indexed keyword with no candidate screening."""
    x = _require_text(query)
    return _rank_items(_hit_set(x, query.threshold, sorted(corpus.keyword_index)), corpus)


def if_match_keywords(query: Query, corpus: Corpus) -> list[MatchHit]:
    """Keyword-level hits of if_search, ranked by (distance, keyword)."""
    x = _require_text(query)
    hits = _hit_set(x, query.threshold, sorted(candidates(query, corpus.char_index)))
    return sorted(hits.values(), key=lambda h: (h.distance, h.keyword))


def brute_force_match_keywords(query: Query, corpus: Corpus) -> list[MatchHit]:
    x = _require_text(query)
    hits = _hit_set(x, query.threshold, sorted(corpus.keyword_index))
    return sorted(hits.values(), key=lambda h: (h.distance, h.keyword))


def kmp_find(pattern: str, text: str) -> list[int]:
    """All start offsets of exact occurrences, via the KMP failure function."""
    if not pattern:
        raise ValueError("pattern must be non-empty")
    m = len(pattern)
    fail = [0] * m
    k = 0
    for i in range(1, m):
        while k > 0 and pattern[i] != pattern[k]:
            k = fail[k - 1]
        if pattern[i] == pattern[k]:
            k += 1
        fail[i] = k
    out = []
    j = 0
    for i, ch in enumerate(text):
        while j > 0 and ch != pattern[j]:
            j = fail[j - 1]
        if ch == pattern[j]:
            j += 1
        if j == m:
            out.append(i - m + 1)
            j = fail[j - 1]
    return out


def _bm_good_suffix(pattern: str) -> list[int]:
    """shift[j]: safe shift when a mismatch occurs with pattern[j:] matched."""
    m = len(pattern)
    shift = [0] * (m + 1)
    border = [0] * (m + 1)
    i, j = m, m + 1
    border[i] = j
    while i > 0:
        while j <= m and pattern[i - 1] != pattern[j - 1]:
            if shift[j] == 0:
                shift[j] = j - i
            j = border[j]
        i -= 1
        j -= 1
        border[i] = j
    j = border[0]
    for i in range(m + 1):
        if shift[i] == 0:
            shift[i] = j
        if i == j:
            j = border[j]
    return shift


def bm_find(pattern: str, text: str) -> list[int]:
    """All start offsets of exact occurrences, via Boyer-Moore with the
    bad-character and good-suffix rules."""
    if not pattern:
        raise ValueError("pattern must be non-empty")
    m, n = len(pattern), len(text)
    if m > n:
        return []
    last = {c: i for i, c in enumerate(pattern)}
    shift = _bm_good_suffix(pattern)
    out = []
    s = 0
    while s <= n - m:
        j = m - 1
        while j >= 0 and pattern[j] == text[s + j]:
            j -= 1
        if j < 0:
            out.append(s)
            s += shift[0]
        else:
            bad = j - last.get(text[s + j], -1)
            s += max(shift[j + 1], bad, 1)
    return out


def deletion_variants(keyword: str) -> list[str]:
    """Unique single-character-deletion forms of the keyword, non-empty."""
    seen = []
    for i in range(len(keyword)):
        v = keyword[:i] + keyword[i + 1 :]
        if v and v not in seen:
            seen.append(v)
    return seen


_FINDERS = {"kmp": kmp_find, "bm": bm_find}


def _baseline_hit(keyword: str, x: str, finder) -> MatchHit | None:
    """Exact-occurrence hit of the keyword or any deletion variant of it.

    The full keyword counts as distance 0, a variant as distance 1; the
    leftmost occurrence wins and distance 0 beats distance 1.
    """
    occ = finder(keyword, x)
    if occ:
        return MatchHit(keyword, (occ[0], occ[0] + len(keyword)), 0)
    best: tuple[int, str] | None = None
    for variant in deletion_variants(keyword):
        occ = finder(variant, x)
        if occ and (best is None or occ[0] < best[0]):
            best = (occ[0], variant)
    if best is None:
        return None
    return MatchHit(keyword, (best[0], best[0] + len(best[1])), 1)


def baseline_match_keywords(query: Query, corpus: Corpus, algo: str) -> list[MatchHit]:
    """Keyword-level hits of the exact-matcher baseline."""
    x = _require_text(query)
    try:
        finder = _FINDERS[algo.lower()]
    except KeyError:
        raise ValueError(f"unknown baseline algorithm {algo!r}, expected kmp or bm")
    threshold = query.threshold
    hits = []
    for kw in sorted(corpus.keyword_index):
        hit = _baseline_hit(kw, x, finder)
        if hit is not None and 1.0 / (hit.distance + 1) >= threshold:
            hits.append(hit)
    return sorted(hits, key=lambda h: (h.distance, h.keyword))


def baseline_fuzzy_search(query: Query, corpus: Corpus, algo: str) -> list[RankedResult]:
    """Fuzzy search built on an exact matcher: each keyword is searched for
    along with its single-character-deletion variants, then ranked exactly
    like if_search."""
    hits = {h.keyword: h for h in baseline_match_keywords(query, corpus, algo)}
    return _rank_items(hits, corpus)
