"""Parallel-corpus ingestion, vocabulary construction, and relative word frequencies.

Input is pre-tokenized text (whitespace-separated tokens, one sentence per
line), either as two aligned files or as a single TSV with
``source<TAB>target`` per line.  All counting is done on the source side;
frequencies are relative counts over the raw corpus, with the mass of
tokens dropped from the vocabulary folded into a single unk symbol so that
every sentence remains scorable.
"""

from __future__ import annotations

import collections
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .errors import (
    AlignmentError,
    EmptyCorpusError,
    InvalidFrequencyError,
    ValidationError,
)

UNK_TOKEN = "<unk>"

DEFAULT_MAX_LENGTH = 200
DEFAULT_VOCAB_SIZE = 20_000
DEFAULT_MIN_COUNT = 5


@dataclass(frozen=True, slots=True)
class ParallelSample:
    """One aligned sentence pair; ids are dense 0..M-1 within a corpus."""

    id: int
    source_tokens: tuple[str, ...]
    target_tokens: tuple[str, ...]

    @property
    def token_cost(self) -> int:
        """Combined token count (source + target), the batching cost unit."""
        return len(self.source_tokens) + len(self.target_tokens)


@dataclass(frozen=True)
class Corpus:
    samples: tuple[ParallelSample, ...]

    def __post_init__(self) -> None:
        if not self.samples:
            raise EmptyCorpusError("corpus must contain at least one sample")

    @property
    def M(self) -> int:
        return len(self.samples)

    def __iter__(self) -> Iterator[ParallelSample]:
        return iter(self.samples)

    def __len__(self) -> int:
        return len(self.samples)


def corpus_from_pairs(pairs: Iterable[tuple[Iterable[str], Iterable[str]]]) -> Corpus:
    """Build a corpus from in-memory token pairs, assigning dense ids."""
    samples = tuple(
        ParallelSample(i, tuple(src), tuple(tgt)) for i, (src, tgt) in enumerate(pairs)
    )
    return Corpus(samples)


def _filtered_pairs(
    lines: Iterable[tuple[str, str]], max_length: int
) -> Iterator[tuple[list[str], list[str]]]:
    for source_line, target_line in lines:
        source = source_line.split()
        target = target_line.split()
        if not source or not target:
            continue
        if len(source) > max_length:
            continue
        yield source, target


def ingest(
    source_path: str | Path,
    target_path: str | Path,
    max_length: int = DEFAULT_MAX_LENGTH,
) -> Corpus:
    """Read two aligned one-sentence-per-line files into a corpus.

    Pairs where either side is empty, or where the source exceeds
    ``max_length`` tokens, are dropped; ids are assigned in file order
    after filtering.

    Raises:
        AlignmentError: the files have different line counts.
        EmptyCorpusError: no pair survived filtering.
        OSError: a file cannot be read.
    """
    if max_length < 1:
        raise ValidationError(f"max_length must be >= 1, got {max_length}")
    source_lines = Path(source_path).read_text(encoding="utf-8").splitlines()
    target_lines = Path(target_path).read_text(encoding="utf-8").splitlines()
    if len(source_lines) != len(target_lines):
        raise AlignmentError(
            f"line count mismatch: {source_path} has {len(source_lines)} lines, "
            f"{target_path} has {len(target_lines)}"
        )
    return corpus_from_pairs(
        _filtered_pairs(zip(source_lines, target_lines), max_length)
    )


def ingest_tsv(path: str | Path, max_length: int = DEFAULT_MAX_LENGTH) -> Corpus:
    """Read a single TSV file with ``source<TAB>target`` per line."""
    if max_length < 1:
        raise ValidationError(f"max_length must be >= 1, got {max_length}")
    pairs = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        left, sep, right = line.partition("\t")
        if not sep:
            raise AlignmentError(f"TSV line without a tab separator: {line!r}")
        pairs.append((left, right))
    return corpus_from_pairs(_filtered_pairs(pairs, max_length))


@dataclass(frozen=True)
class Vocabulary:
    """Retained source-side tokens with dense indices and raw counts.

    Dropped-token occurrences are aggregated under ``unk_token`` so that
    retained counts plus the unk count always equal ``total_token_count``.
    """

    entries: Mapping[str, tuple[int, int]]  # token -> (index, count)
    unk_count: int
    total_token_count: int
    unk_token: str = UNK_TOKEN

    def __contains__(self, token: str) -> bool:
        return token in self.entries

    def __len__(self) -> int:
        return len(self.entries)


def build_vocabulary(
    corpus: Corpus,
    max_size: int = DEFAULT_VOCAB_SIZE,
    min_count: int = DEFAULT_MIN_COUNT,
) -> Vocabulary:
    """Retain the ``max_size`` most frequent source tokens with count >= ``min_count``.

    Ties on count break lexicographically (smaller token first) for
    determinism; all dropped occurrences aggregate into the unk count.
    """
    if max_size < 1:
        raise ValidationError(f"max_size must be >= 1, got {max_size}")
    if min_count < 1:
        raise ValidationError(f"min_count must be >= 1, got {min_count}")
    counts = source_token_counts(corpus)
    total = sum(counts.values())
    eligible = [(tok, c) for tok, c in counts.items() if c >= min_count]
    eligible.sort(key=lambda item: (-item[1], item[0]))
    retained = eligible[:max_size]
    entries = {tok: (index, c) for index, (tok, c) in enumerate(retained)}
    unk_count = total - sum(c for _, c in retained)
    return Vocabulary(entries=entries, unk_count=unk_count, total_token_count=total)


def source_token_counts(corpus: Corpus) -> collections.Counter[str]:
    counts: collections.Counter[str] = collections.Counter()
    for sample in corpus:
        counts.update(sample.source_tokens)
    return counts


@dataclass(frozen=True)
class FrequencyTable:
    """Relative source-side word frequencies; masses sum to 1.

    Out-of-vocabulary tokens share ``unk_frequency`` (the aggregate mass of
    all dropped tokens).  A zero unk frequency means the vocabulary covered
    the whole corpus, and looking up an unknown token is an error.
    """

    frequencies: Mapping[str, float]
    unk_frequency: float
    unk_token: str = UNK_TOKEN
    total_token_count: int = 0

    def lookup(self, token: str) -> float:
        p = self.frequencies.get(token)
        if p is None:
            p = self.unk_frequency
        if p <= 0.0:
            raise InvalidFrequencyError(
                f"token {token!r} has no positive relative frequency"
            )
        return p


def frequency_table(corpus: Corpus, vocab: Vocabulary) -> FrequencyTable:
    """Relative frequencies count(w)/N_total over the corpus source side.

    ``vocab`` decides membership; counts always come from ``corpus`` itself,
    so a vocabulary built on a superset corpus is acceptable.  Tokens absent
    from the vocabulary contribute to the shared unk mass.
    """
    counts = source_token_counts(corpus)
    total = sum(counts.values())
    frequencies: dict[str, float] = {}
    retained_mass = 0
    for token, count in counts.items():
        if token in vocab.entries:
            frequencies[token] = count / total
            retained_mass += count
    unk_frequency = (total - retained_mass) / total
    return FrequencyTable(
        frequencies=frequencies,
        unk_frequency=unk_frequency,
        total_token_count=total,
    )


def write_vocabulary(vocab: Vocabulary, path: str | Path) -> None:
    """Write ``token<TAB>count`` lines, descending count, unk last."""
    rows = sorted(vocab.entries.items(), key=lambda item: item[1][0])
    with open(path, "w", encoding="utf-8") as fp:
        for token, (_, count) in rows:
            fp.write(f"{token}\t{count}\n")
        fp.write(f"{vocab.unk_token}\t{vocab.unk_count}\n")
