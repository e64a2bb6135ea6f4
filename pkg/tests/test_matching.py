import functools
import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ifind.benchmark import cjk_alphabet, gen_corpus, gen_queries
from ifind.corpus import Item, Keyword, build_index
from ifind.matching import (
    Query,
    baseline_fuzzy_search,
    baseline_match_keywords,
    bm_find,
    brute_force_search,
    candidates,
    deletion_variants,
    dtw_distance,
    if_search,
    kmp_find,
    match_keyword,
)


def dtw_reference(a: str, b: str) -> int:
    """Plain recursive form of the warping recurrence (independent oracle)."""

    @functools.lru_cache(maxsize=None)
    def d(i: int, j: int) -> int:
        cost = 0 if a[i] == b[j] else 1
        if i == 0 and j == 0:
            return cost
        if i == 0:
            return cost + d(0, j - 1)
        if j == 0:
            return cost + d(i - 1, 0)
        return cost + min(d(i - 1, j), d(i, j - 1), d(i - 1, j - 1))

    return d(len(a) - 1, len(b) - 1)


class TestDtw:
    def test_identical(self):
        assert dtw_distance("abc", "abc") == 0

    def test_one_substitution(self):
        assert dtw_distance("abc", "axc") == 1

    def test_warping_repeat_is_free(self):
        # Repeating a matching character costs nothing.
        assert dtw_distance("ab", "aabb") == 0
        assert dtw_distance("aa", "a") == 0

    def test_interleaved_repeat_is_not_free(self):
        # "ab" against "abab" must still pay for the middle inversion;
        # confirmed against the recursive reference.
        assert dtw_distance("ab", "abab") == dtw_reference("ab", "abab") == 1

    def test_empty_operand(self):
        with pytest.raises(ValueError):
            dtw_distance("", "a")
        with pytest.raises(ValueError):
            dtw_distance("a", "")

    @given(
        st.text(alphabet="abc", min_size=1, max_size=8),
        st.text(alphabet="abc", min_size=1, max_size=8),
    )
    @settings(max_examples=300, deadline=None)
    def test_matches_recursive_reference(self, a, b):
        assert dtw_distance(a, b) == dtw_reference(a, b)

    @given(
        st.text(alphabet="abcd", min_size=1, max_size=8),
        st.text(alphabet="abcd", min_size=1, max_size=8),
    )
    @settings(max_examples=300, deadline=None)
    def test_metric_sanity(self, a, b):
        assert dtw_distance(a, a) == 0
        assert dtw_distance(a, b) == dtw_distance(b, a)
        assert dtw_distance(a, b) <= len(a) + len(b)


class TestCandidates:
    def test_disjoint_alphabets(self):
        corpus = build_index([Item("A", "", (Keyword("cat"),))])
        assert candidates(Query("xyz"), corpus.char_index) == set()

    def test_shared_characters(self):
        corpus = build_index(
            [Item("A", "", (Keyword("cat"),)), Item("B", "", (Keyword("dog"),))]
        )
        assert candidates(Query("cot"), corpus.char_index) == {"cat", "dog"}

    def test_single_character_query(self):
        corpus = build_index(
            [Item("A", "", (Keyword("aa"), Keyword("ab"), Keyword("bb")))]
        )
        assert candidates(Query("a"), corpus.char_index) == {"aa", "ab"}

    def test_exactly_the_sharing_keywords(self):
        rng = random.Random(3)
        keywords = {"".join(rng.choices("abcdef", k=rng.randint(1, 4))) + str(i) for i in range(40)}
        corpus = build_index(
            [Item(f"i{i}", "", (Keyword(kw),)) for i, kw in enumerate(sorted(keywords))]
        )
        for _ in range(20):
            text = "".join(rng.choices("abcdefgh", k=rng.randint(1, 6)))
            got = candidates(Query(text), corpus.char_index)
            want = {kw for kw in corpus.keyword_index if set(kw) & set(text)}
            assert got == want


class TestMatchKeyword:
    def test_exact_substring(self):
        hit = match_keyword("cat", Query("the cat ran", 0.5))
        assert hit is not None
        assert hit.window == (4, 7) and hit.distance == 0

    def test_one_substitution_at_threshold(self):
        hit = match_keyword("cat", Query("the cot ran", 0.5))
        assert hit is not None
        assert hit.distance == 1

    def test_no_hit(self):
        assert match_keyword("cat", Query("dog", 0.5)) is None

    def test_leftmost_window_on_ties(self):
        hit = match_keyword("cat", Query("cat and cat", 0.5))
        assert hit is not None
        assert hit.window == (0, 3)

    def test_tighter_threshold_rejects_distance_one(self):
        assert match_keyword("cat", Query("the cot ran", 0.6)) is None

    def test_case_folded_match(self):
        hit = match_keyword("cat", Query("The CAT ran", 0.5))
        assert hit is not None and hit.distance == 0

    def test_empty_keyword(self):
        with pytest.raises(ValueError):
            match_keyword("", Query("x", 0.5))

    def test_all_mismatch_window_never_hits(self):
        # A single-character keyword sharing nothing with the text must not
        # match, or character screening would lose hits.
        assert match_keyword("z", Query("abc", 0.5)) is None


class TestIfSearch:
    def test_single_exact_match_score(self):
        corpus = build_index([Item("A", "", (Keyword("cat"),))])
        (result,) = if_search(Query("cat", 0.5), corpus)
        assert result.item_id == "A" and result.score == 3.0

    def test_no_shared_characters(self):
        corpus = build_index([Item("A", "", (Keyword("cat"),))])
        assert if_search(Query("xyz", 0.5), corpus) == []

    def test_two_label_score_sum(self):
        corpus = build_index([Item("A", "", (Keyword("cat"), Keyword("hat")))])
        (result,) = if_search(Query("a cat hat", 0.5), corpus)
        assert result.score == 6.0

    def test_empty_query_rejected(self):
        corpus = build_index([Item("A", "", (Keyword("cat"),))])
        with pytest.raises(ValueError):
            if_search(Query("", 0.5), corpus)

    def test_results_sorted_score_then_id(self):
        corpus = build_index(
            [
                Item("B", "", (Keyword("cat"),)),
                Item("A", "", (Keyword("cat"),)),
                Item("C", "", (Keyword("cat"), Keyword("hat"))),
            ]
        )
        results = if_search(Query("cat hat", 0.5), corpus)
        assert [r.item_id for r in results] == ["C", "A", "B"]

    def test_adding_matched_keyword_never_lowers_score(self):
        one = build_index([Item("A", "", (Keyword("cat"),))])
        two = build_index([Item("A", "", (Keyword("cat"), Keyword("hat")))])
        (r1,) = if_search(Query("cat hat", 0.5), one)
        (r2,) = if_search(Query("cat hat", 0.5), two)
        assert r2.score >= r1.score


class TestFilteringLosslessness:
    def test_equivalence_on_random_corpora(self):
        for seed in range(6):
            corpus = gen_corpus(40, 4, cjk_alphabet(120), seed=seed)
            for pq in gen_queries(corpus, 8, seed=seed + 100):
                assert if_search(Query(pq.text), corpus) == brute_force_search(
                    Query(pq.text), corpus
                )

    def test_equivalence_with_single_character_keywords(self):
        # The degenerate case that forces the shared-character guard.
        corpus = build_index(
            [Item("A", "", (Keyword("a"),)), Item("B", "", (Keyword("xy"),))]
        )
        for text in ("b", "ab", "zq", "axy"):
            q = Query(text, 0.5)
            assert if_search(q, corpus) == brute_force_search(q, corpus)

    def test_equivalence_across_thresholds(self):
        corpus = gen_corpus(30, 4, "abcdefghij", seed=9)
        for pq in gen_queries(corpus, 6, seed=10):
            for threshold in (0.25, 0.4, 0.5, 0.75, 1.0):
                q = Query(pq.text, threshold)
                assert if_search(q, corpus) == brute_force_search(q, corpus)


def naive_find(pattern: str, text: str) -> list[int]:
    return [
        i for i in range(len(text) - len(pattern) + 1) if text[i : i + len(pattern)] == pattern
    ]


class TestExactMatchers:
    def test_overlapping_occurrences(self):
        assert kmp_find("ab", "abab") == [0, 2]
        assert bm_find("ab", "abab") == [0, 2]

    def test_pattern_longer_than_text(self):
        assert kmp_find("aaa", "aa") == []
        assert bm_find("aaa", "aa") == []

    def test_empty_pattern_rejected(self):
        with pytest.raises(ValueError):
            kmp_find("", "abc")
        with pytest.raises(ValueError):
            bm_find("", "abc")

    def test_exhaustive_binary_alphabet(self):
        strings = [
            "".join(s)
            for length in range(1, 9)
            for s in itertools.product("ab", repeat=length)
        ]
        for pattern in strings:
            for text in strings:
                want = naive_find(pattern, text)
                assert kmp_find(pattern, text) == want
                assert bm_find(pattern, text) == want

    @given(
        st.text(alphabet="abc", min_size=1, max_size=6),
        st.text(alphabet="abc", min_size=0, max_size=30),
    )
    @settings(max_examples=300, deadline=None)
    def test_random_agreement_with_naive(self, pattern, text):
        want = naive_find(pattern, text)
        assert kmp_find(pattern, text) == want
        assert bm_find(pattern, text) == want


class TestBaseline:
    def test_deletion_variant_hits(self):
        corpus = build_index([Item("A", "", (Keyword("cat"),))])
        (result,) = baseline_fuzzy_search(Query("the ct ran", 0.5), corpus, "kmp")
        assert result.hits[0].distance == 1
        assert result.score == pytest.approx(1.5)

    def test_substitution_not_covered(self):
        corpus = build_index([Item("A", "", (Keyword("cat"),))])
        assert baseline_fuzzy_search(Query("the cot ran", 0.5), corpus, "kmp") == []

    def test_deletion_variants_enumeration(self):
        assert deletion_variants("cat") == ["at", "ct", "ca"]
        assert deletion_variants("a") == []
        assert deletion_variants("aa") == ["a"]

    def test_exact_queries_agree_with_if_search_top1(self, animal_corpus):
        for text in ("my cat here", "a dog barks"):
            exact = if_search(Query(text, 0.5), animal_corpus)
            for algo in ("kmp", "bm"):
                base = baseline_fuzzy_search(Query(text, 0.5), animal_corpus, algo)
                assert base[0].item_id == exact[0].item_id

    def test_kmp_and_bm_baselines_identical(self):
        corpus = gen_corpus(30, 4, "abcdefgh", seed=21)
        for pq in gen_queries(corpus, 10, seed=22):
            q = Query(pq.text)
            assert baseline_match_keywords(q, corpus, "kmp") == baseline_match_keywords(
                q, corpus, "bm"
            )

    def test_unknown_algorithm(self, animal_corpus):
        with pytest.raises(ValueError):
            baseline_fuzzy_search(Query("cat", 0.5), animal_corpus, "rabin-karp")
