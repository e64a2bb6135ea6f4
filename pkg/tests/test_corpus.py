import json
import math
import random

import pytest

from ifind.corpus import (
    Item,
    Keyword,
    alphabet_stats,
    build_index,
    extract_keywords,
    load_corpus_jsonl,
    load_index,
    save_index,
    tokenize,
)
from ifind.snapshots import SnapshotError, SnapshotVersionError


class TestTokenize:
    def test_empty_input(self):
        assert tokenize("") == []

    def test_delimiter_split(self):
        assert tokenize("red fox") == ["red", "fox"]

    def test_punctuation_and_case(self):
        assert tokenize("Red, fox!") == ["red", "fox"]

    def test_forced_ngrams(self):
        assert tokenize("abcd", n=2, delimited=False) == ["ab", "bc", "cd"]

    def test_cjk_bigrams_by_default(self):
        assert tokenize("一二三四") == ["一二", "二三", "三四"]

    def test_cjk_run_shorter_than_n(self):
        assert tokenize("一") == ["一"]

    def test_mixed_scripts(self):
        assert tokenize("read 一二三") == ["read", "一二", "二三"]

    def test_trigram_size(self):
        assert tokenize("abcd", n=3, delimited=False) == ["abc", "bcd"]

    def test_bad_n(self):
        with pytest.raises(ValueError):
            tokenize("abc", n=0)


class TestExtractKeywords:
    def test_ubiquitous_term_weight_zero(self):
        out = extract_keywords([("a", "cat"), ("b", "cat"), ("c", "cat")], 3)
        for kws in out.values():
            assert kws[0].text == "cat"
            assert kws[0].weight == 0.0

    def test_single_doc_tie_prefers_lexicographic(self):
        out = extract_keywords([("d1", "cat cat dog")], 1)
        assert [(k.text, k.weight) for k in out["d1"]] == [("cat", 0.0)]

    def test_three_doc_weight(self):
        out = extract_keywords([("d1", "cat dog"), ("d2", "cat"), ("d3", "fish")], 5)
        (kw,) = out["d3"]
        assert kw.text == "fish"
        assert kw.weight == pytest.approx(math.log(2), abs=1e-12)

    def test_sorted_by_descending_weight(self):
        out = extract_keywords([("d1", "rare rare rare shared"), ("d2", "shared")], 5)
        weights = [k.weight for k in out["d1"]]
        assert weights == sorted(weights, reverse=True)
        assert out["d1"][0].text == "rare"

    def test_empty_doc_gives_empty_list(self):
        out = extract_keywords([("d1", "cat"), ("d2", "")], 3)
        assert out["d2"] == []

    def test_preconditions(self):
        with pytest.raises(ValueError):
            extract_keywords([], 3)
        with pytest.raises(ValueError):
            extract_keywords([("d", "x")], 0)


class TestBuildIndex:
    def test_single_item(self):
        corpus = build_index([Item("A", "a", (Keyword("cat"),))])
        assert corpus.char_index == {"c": {"cat"}, "a": {"cat"}, "t": {"cat"}}
        assert corpus.keyword_index == {"cat": {"A"}}
        assert corpus.alphabet_size == 3

    def test_empty_default_allowed(self):
        corpus = build_index([])
        assert corpus.items == {} and corpus.char_index == {} and corpus.keyword_index == {}

    def test_empty_rejected_by_flag(self):
        with pytest.raises(ValueError):
            build_index([], allow_empty=False)

    def test_shared_label(self):
        corpus = build_index(
            [Item("A", "a", (Keyword("sun"),)), Item("B", "b", (Keyword("sun"),))]
        )
        assert corpus.keyword_index["sun"] == {"A", "B"}

    def test_duplicate_id_rejected_naming_id(self):
        items = [Item("dup", "a", (Keyword("x"),)), Item("dup", "b", (Keyword("y"),))]
        with pytest.raises(ValueError, match="dup"):
            build_index(items)

    def test_empty_labels_rejected(self):
        with pytest.raises(ValueError, match="no labels"):
            build_index([Item("A", "a", ())])

    def test_label_case_folding_and_dedupe(self):
        corpus = build_index([Item("A", "a", (Keyword("Cat"), Keyword("cat"), Keyword("CAT")))])
        assert corpus.keyword_index == {"cat": {"A"}}
        assert len(corpus.items["A"].labels) == 1

    def test_order_insensitive(self):
        items = [
            Item(f"i{k}", f"t{k}", (Keyword(f"kw{k}"), Keyword(f"shared{k % 3}")))
            for k in range(20)
        ]
        base = build_index(items)
        rng = random.Random(5)
        for _ in range(5):
            shuffled = items[:]
            rng.shuffle(shuffled)
            assert build_index(shuffled) == base

    def test_char_index_sound_and_complete(self):
        rng = random.Random(11)
        items = [
            Item(
                f"i{k}",
                "",
                tuple(
                    Keyword("".join(rng.choices("abcdef", k=rng.randint(1, 4))) + str(j))
                    for j in range(3)
                ),
            )
            for k in range(30)
        ]
        corpus = build_index(items)
        for kw in corpus.keyword_index:
            for ch in kw:
                assert kw in corpus.char_index[ch]
        for ch, kws in corpus.char_index.items():
            for kw in kws:
                assert ch in kw

    def test_keyword_index_inverts_labels(self):
        items = [
            Item("A", "", (Keyword("x"), Keyword("y"))),
            Item("B", "", (Keyword("y"),)),
        ]
        corpus = build_index(items)
        for kw, ids in corpus.keyword_index.items():
            for item_id in ids:
                assert kw in {lb.text for lb in corpus.items[item_id].labels}
        for item in corpus.items.values():
            for lb in item.labels:
                assert item.id in corpus.keyword_index[lb.text]


class TestAlphabetStats:
    def test_two_keywords(self):
        corpus = build_index([Item("A", "", (Keyword("ab"), Keyword("bc")))])
        assert alphabet_stats(corpus) == (2, 3)

    def test_empty(self):
        assert alphabet_stats(build_index([])) == (0, 0)

    def test_repeated_character(self):
        corpus = build_index([Item("A", "", (Keyword("aaa"),))])
        assert alphabet_stats(corpus) == (1, 1)

    def test_alphabet_grows_sublinearly(self):
        from ifind.benchmark import cjk_alphabet, gen_corpus

        alphabet = cjk_alphabet(350)
        small = gen_corpus(200, 5, alphabet, seed=3)   # 1000 keywords
        large = gen_corpus(400, 5, alphabet, seed=3)   # 2000 keywords
        n_small, a_small = alphabet_stats(small)
        n_large, a_large = alphabet_stats(large)
        assert n_small == 1000 and n_large == 2000
        assert a_large < 2 * a_small


class TestSnapshots:
    def _corpus(self):
        return build_index(
            [
                Item("A", "Cats", (Keyword("cat", 0.5), Keyword("hat")), content="cat cat"),
                Item("B", "Dogs", (Keyword("dog"),)),
            ]
        )

    def test_round_trip_identity(self, tmp_path):
        corpus = self._corpus()
        path = tmp_path / "index.snap"
        save_index(corpus, str(path))
        assert load_index(str(path)) == corpus

    def test_reserialization_byte_identical(self, tmp_path):
        corpus = self._corpus()
        first = tmp_path / "a.snap"
        second = tmp_path / "b.snap"
        save_index(corpus, str(first))
        save_index(load_index(str(first)), str(second))
        assert first.read_bytes() == second.read_bytes()

    def test_truncated_file_is_format_error(self, tmp_path):
        path = tmp_path / "index.snap"
        save_index(self._corpus(), str(path))
        path.write_text("IFIND-INDEX v1\n")
        with pytest.raises(SnapshotError):
            load_index(str(path))

    def test_unknown_version_names_both(self, tmp_path):
        path = tmp_path / "index.snap"
        save_index(self._corpus(), str(path))
        body = path.read_text().splitlines()[1]
        path.write_text("IFIND-INDEX v9\n" + body + "\n")
        with pytest.raises(SnapshotVersionError, match="v9") as exc:
            load_index(str(path))
        assert "v1" in str(exc.value)

    def test_wrong_magic(self, tmp_path):
        path = tmp_path / "index.snap"
        path.write_text("SOMETHING-ELSE v1\n{}\n")
        with pytest.raises(SnapshotError):
            load_index(str(path))

    def test_tampered_index_detected(self, tmp_path):
        path = tmp_path / "index.snap"
        save_index(self._corpus(), str(path))
        header, body = path.read_text().split("\n", 1)
        payload = json.loads(body)
        payload["keyword_index"]["cat"] = ["B"]
        path.write_text(header + "\n" + json.dumps(payload, sort_keys=True) + "\n")
        with pytest.raises(SnapshotError, match="inconsistent"):
            load_index(str(path))


class TestCorpusJsonl:
    def test_basic_load(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text(
            '{"id": "A", "title": "Cats", "labels": ["cat", "hat"]}\n'
            '{"id": "B", "title": "Dogs", "labels": ["dog"], "content": "dogs bark"}\n',
            encoding="utf-8",
        )
        items = load_corpus_jsonl(str(path))
        assert [i.id for i in items] == ["A", "B"]
        assert [lb.text for lb in items[0].labels] == ["cat", "hat"]

    def test_extraction_fallback(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text(
            '{"id": "A", "title": "", "labels": [], "content": "alpha alpha beta"}\n'
            '{"id": "B", "title": "", "labels": [], "content": "gamma beta"}\n',
            encoding="utf-8",
        )
        items = load_corpus_jsonl(str(path), max_labels=1)
        assert [lb.text for lb in items[0].labels] == ["alpha"]
        assert [lb.text for lb in items[1].labels] == ["gamma"]

    def test_bad_json_names_line(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text('{"id": "A", "labels": ["x"]}\nnot json\n', encoding="utf-8")
        with pytest.raises(SnapshotError, match=":2"):
            load_corpus_jsonl(str(path))
