"""Corpus ingestion, vocabulary, and frequency-table tests."""

import collections

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curriculum.corpus import (
    Corpus,
    build_vocabulary,
    corpus_from_pairs,
    frequency_table,
    ingest,
    ingest_tsv,
    write_vocabulary,
)
from curriculum.errors import (
    AlignmentError,
    EmptyCorpusError,
    InvalidFrequencyError,
    ValidationError,
)


def write_pair(tmp_path, source_lines, target_lines):
    src = tmp_path / "src.txt"
    tgt = tmp_path / "tgt.txt"
    src.write_text("\n".join(source_lines) + "\n", encoding="utf-8")
    tgt.write_text("\n".join(target_lines) + "\n", encoding="utf-8")
    return src, tgt


class TestIngest:
    def test_basic_tokenization(self, tmp_path):
        src, tgt = write_pair(tmp_path, ["a b", "c"], ["x y", "z"])
        corpus = ingest(src, tgt, max_length=200)
        assert corpus.M == 2
        assert corpus.samples[0].source_tokens == ("a", "b")
        assert corpus.samples[0].target_tokens == ("x", "y")
        assert corpus.samples[1].id == 1

    def test_line_count_mismatch(self, tmp_path):
        src, tgt = write_pair(tmp_path, ["a", "b", "c"], ["x", "y"])
        with pytest.raises(AlignmentError):
            ingest(src, tgt)

    def test_source_longer_than_max_length_dropped(self, tmp_path):
        long_line = " ".join(["tok"] * 201)
        src, tgt = write_pair(tmp_path, ["a b", long_line], ["x", "y"])
        corpus = ingest(src, tgt, max_length=200)
        assert corpus.M == 1
        assert corpus.samples[0].source_tokens == ("a", "b")

    def test_exactly_max_length_kept(self, tmp_path):
        line = " ".join(["tok"] * 200)
        src, tgt = write_pair(tmp_path, [line], ["x"])
        assert ingest(src, tgt, max_length=200).M == 1

    def test_empty_sides_dropped_and_ids_dense(self, tmp_path):
        src, tgt = write_pair(tmp_path, ["a", "", "b c", "d"], ["x", "y", "", "w"])
        corpus = ingest(src, tgt)
        assert [s.id for s in corpus] == [0, 1]
        assert corpus.samples[0].source_tokens == ("a",)
        assert corpus.samples[1].source_tokens == ("d",)

    def test_all_filtered_is_empty_corpus_error(self, tmp_path):
        src, tgt = write_pair(tmp_path, [""], ["x"])
        with pytest.raises(EmptyCorpusError):
            ingest(src, tgt)

    def test_unreadable_file_is_os_error(self, tmp_path):
        with pytest.raises(OSError):
            ingest(tmp_path / "missing.txt", tmp_path / "missing2.txt")

    def test_tsv_ingestion(self, tmp_path):
        path = tmp_path / "pairs.tsv"
        path.write_text("a b\tx y\nc\tz\n", encoding="utf-8")
        corpus = ingest_tsv(path)
        assert corpus.M == 2
        assert corpus.samples[1].target_tokens == ("z",)

    def test_tsv_without_tab_is_alignment_error(self, tmp_path):
        path = tmp_path / "pairs.tsv"
        path.write_text("a b x y\n", encoding="utf-8")
        with pytest.raises(AlignmentError):
            ingest_tsv(path)

    def test_bad_max_length_rejected(self, tmp_path):
        src, tgt = write_pair(tmp_path, ["a"], ["x"])
        with pytest.raises(ValidationError):
            ingest(src, tgt, max_length=0)


def corpus_with_counts(counts: dict[str, int]) -> Corpus:
    """One-token-per-sentence corpus realizing the requested source counts."""
    pairs = []
    for token, count in sorted(counts.items()):
        pairs.extend(([token], ["t"]) for _ in range(count))
    return corpus_from_pairs(pairs)


class TestVocabulary:
    def test_min_count_threshold(self):
        corpus = corpus_with_counts({"a": 6, "b": 5, "c": 4})
        vocab = build_vocabulary(corpus, max_size=20_000, min_count=5)
        assert set(vocab.entries) == {"a", "b"}
        assert vocab.unk_count == 4
        assert vocab.total_token_count == 15

    def test_count_tie_breaks_lexicographically(self):
        corpus = corpus_with_counts({"y": 7, "x": 7})
        vocab = build_vocabulary(corpus, max_size=1, min_count=1)
        assert set(vocab.entries) == {"x"}
        assert vocab.unk_count == 7

    def test_tie_break_matches_enumeration_oracle(self):
        # Oracle: enumerate all (count desc, token asc) orderings directly.
        counts = {"d": 3, "b": 5, "a": 3, "c": 5, "e": 1}
        corpus = corpus_with_counts(counts)
        expected_order = sorted(counts, key=lambda t: (-counts[t], t))
        for max_size in range(1, 6):
            vocab = build_vocabulary(corpus, max_size=max_size, min_count=1)
            assert set(vocab.entries) == set(expected_order[:max_size])
            # indices follow the same deterministic order
            by_index = sorted(vocab.entries, key=lambda t: vocab.entries[t][0])
            assert by_index == expected_order[:max_size]

    def test_retained_plus_unk_covers_total(self):
        corpus = corpus_with_counts({"a": 9, "b": 2, "c": 1})
        vocab = build_vocabulary(corpus, max_size=2, min_count=2)
        retained = sum(c for _, c in vocab.entries.values())
        assert retained + vocab.unk_count == vocab.total_token_count == 12

    def test_parameter_validation(self):
        corpus = corpus_with_counts({"a": 1})
        with pytest.raises(ValidationError):
            build_vocabulary(corpus, max_size=0)
        with pytest.raises(ValidationError):
            build_vocabulary(corpus, min_count=0)

    def test_write_format_descending_count_unk_last(self, tmp_path):
        corpus = corpus_with_counts({"a": 6, "b": 8, "c": 1})
        vocab = build_vocabulary(corpus, max_size=10, min_count=2)
        path = tmp_path / "vocab.tsv"
        write_vocabulary(vocab, path)
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines == ["b\t8", "a\t6", "<unk>\t1"]


class TestFrequencyTable:
    def test_hand_counted_frequencies(self):
        corpus = corpus_from_pairs([(["a", "b"], ["x", "y"]), (["a"], ["z"])])
        vocab = build_vocabulary(corpus, max_size=10, min_count=1)
        table = frequency_table(corpus, vocab)
        assert table.frequencies["a"] == pytest.approx(2 / 3, abs=1e-12)
        assert table.frequencies["b"] == pytest.approx(1 / 3, abs=1e-12)
        assert table.unk_frequency == 0.0

    def test_single_sentence(self):
        corpus = corpus_from_pairs([(["a"], ["x"])])
        vocab = build_vocabulary(corpus, max_size=10, min_count=1)
        table = frequency_table(corpus, vocab)
        assert table.frequencies["a"] == 1.0

    def test_unk_aggregation(self):
        corpus = corpus_from_pairs([(["a", "b"], ["x", "y"]), (["a"], ["z"])])
        vocab = build_vocabulary(corpus, max_size=1, min_count=1)  # retains only a
        table = frequency_table(corpus, vocab)
        assert table.frequencies["a"] == pytest.approx(2 / 3, abs=1e-12)
        assert "b" not in table.frequencies
        assert table.unk_frequency == pytest.approx(1 / 3, abs=1e-12)
        assert table.lookup("b") == table.unk_frequency

    def test_lookup_without_unk_mass_raises(self):
        corpus = corpus_from_pairs([(["a"], ["x"])])
        vocab = build_vocabulary(corpus, max_size=10, min_count=1)
        table = frequency_table(corpus, vocab)
        with pytest.raises(InvalidFrequencyError):
            table.lookup("zzz")

    def test_determinism(self):
        pairs = [(["a", "b", "b"], ["x"]), (["c"], ["y"]), (["a"], ["z"])]
        t1 = frequency_table(
            corpus_from_pairs(pairs), build_vocabulary(corpus_from_pairs(pairs), 2, 1)
        )
        t2 = frequency_table(
            corpus_from_pairs(pairs), build_vocabulary(corpus_from_pairs(pairs), 2, 1)
        )
        assert t1.frequencies == t2.frequencies
        assert t1.unk_frequency == t2.unk_frequency


@st.composite
def random_corpora(draw):
    tokens = st.text(alphabet="abcdef", min_size=1, max_size=3)
    sentence = st.lists(tokens, min_size=1, max_size=8)
    pairs = draw(
        st.lists(st.tuples(sentence, sentence), min_size=1, max_size=24)
    )
    return corpus_from_pairs(pairs)


class TestCorpusProperties:
    @settings(max_examples=60, deadline=None)
    @given(random_corpora(), st.integers(1, 10), st.integers(1, 3))
    def test_frequencies_sum_to_one(self, corpus, max_size, min_count):
        vocab = build_vocabulary(corpus, max_size=max_size, min_count=min_count)
        table = frequency_table(corpus, vocab)
        total_mass = sum(table.frequencies.values()) + table.unk_frequency
        assert total_mass == pytest.approx(1.0, abs=1e-9)
        n_total = sum(len(s.source_tokens) for s in corpus)
        assert table.total_token_count == n_total

    @settings(max_examples=40, deadline=None)
    @given(random_corpora())
    def test_every_stored_frequency_positive(self, corpus):
        vocab = build_vocabulary(corpus, max_size=4, min_count=1)
        table = frequency_table(corpus, vocab)
        assert all(p > 0 for p in table.frequencies.values())

    def test_filtering_invariance(self, tmp_path):
        lines = ["a", "a b c d e", "x y", "", "p q r"]
        targets = ["1", "2", "3", "4", "5"]
        src, tgt = write_pair(tmp_path, lines, targets)
        corpus = ingest(src, tgt, max_length=3)
        assert all(1 <= len(s.source_tokens) <= 3 for s in corpus)

    def test_pipeline_deterministic_from_same_bytes(self, tmp_path):
        src, tgt = write_pair(tmp_path, ["a b b", "c a"], ["x", "y z"])

        def run():
            corpus = ingest(src, tgt)
            vocab = build_vocabulary(corpus, max_size=2, min_count=1)
            return frequency_table(corpus, vocab)

        first, second = run(), run()
        assert first.frequencies == second.frequencies
        assert first.unk_frequency == second.unk_frequency
