"""Per-sample difficulty scores and their empirical-CDF ranks.

Scoring runs in two phases so large corpora stream through cheaply:

1. corpus-level prerequisites (the relative-frequency table for rarity;
   nothing for length) are computed once;
2. sentence-level scoring is an independent, order-preserving map over
   samples, followed by one sorted pass that converts raw scores to
   empirical-CDF ranks in (0, 1].

``plan_scoring`` exposes that split explicitly; ``score_corpus`` executes
the plan and is bit-identical to a naive per-sample loop.

Raw score conventions: sentence length is the source token count (a count,
reported as a float); sentence rarity is the negative sum of natural-log
unigram probabilities of the source tokens (nats), so rarer and longer
sentences both score higher.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .corpus import (
    Corpus,
    DEFAULT_MIN_COUNT,
    DEFAULT_VOCAB_SIZE,
    FrequencyTable,
    ParallelSample,
    build_vocabulary,
    frequency_table,
)
from .errors import FormatError, InvalidScoreError, ValidationError


class MetricKind(enum.Enum):
    SENTENCE_LENGTH = "length"
    SENTENCE_RARITY = "rarity"


class CorpusStat(enum.Enum):
    """Corpus-level prerequisites a metric may depend on."""

    FREQUENCY_TABLE = "frequency_table"


@dataclass(frozen=True)
class DifficultyMetric:
    """A difficulty scoring function plus its corpus-level dependencies.

    Rarity needs a frequency table (built with the given vocabulary
    parameters unless one is supplied to ``score_corpus``); length needs
    nothing beyond the sentence itself.
    """

    kind: MetricKind
    vocab_size: int = DEFAULT_VOCAB_SIZE
    min_count: int = DEFAULT_MIN_COUNT

    @property
    def dependencies(self) -> frozenset[CorpusStat]:
        if self.kind is MetricKind.SENTENCE_RARITY:
            return frozenset({CorpusStat.FREQUENCY_TABLE})
        return frozenset()

    @property
    def name(self) -> str:
        return self.kind.value

    @staticmethod
    def length() -> "DifficultyMetric":
        return DifficultyMetric(kind=MetricKind.SENTENCE_LENGTH)

    @staticmethod
    def rarity(
        vocab_size: int = DEFAULT_VOCAB_SIZE, min_count: int = DEFAULT_MIN_COUNT
    ) -> "DifficultyMetric":
        return DifficultyMetric(
            kind=MetricKind.SENTENCE_RARITY, vocab_size=vocab_size, min_count=min_count
        )

    @staticmethod
    def by_name(name: str, **kwargs) -> "DifficultyMetric":
        for kind in MetricKind:
            if kind.value == name:
                return DifficultyMetric(kind=kind, **kwargs)
        raise ValidationError(f"unknown difficulty metric {name!r}")


def score_length(sample: ParallelSample) -> float:
    """Source token count as a real number."""
    return float(len(sample.source_tokens))


def score_rarity(sample: ParallelSample, freq: FrequencyTable) -> float:
    """Negative sum of log unigram probabilities of the source tokens.

    Natural log, double precision.  Strictly positive unless every token
    carries probability 1.  Tokens missing from the table resolve through
    the unk frequency; a zero or absent frequency raises
    InvalidFrequencyError.
    """
    total = 0.0
    for token in sample.source_tokens:
        total += math.log(freq.lookup(token))
    return -total


def compute_cdf(raw_scores: Sequence[float]) -> list[float]:
    """Empirical CDF with inclusive tie-sharing: cdf(i) = |{j : raw(j) <= raw(i)}| / M.

    Output values lie on the grid {k/M : 1 <= k <= M}; equal raw scores get
    equal ranks and the maximum is exactly 1.
    """
    if len(raw_scores) == 0:
        raise ValidationError("cannot compute the CDF of an empty score sequence")
    scores = np.asarray(raw_scores, dtype=np.float64)
    if not np.all(np.isfinite(scores)):
        raise InvalidScoreError("difficulty scores must be finite")
    counts = np.searchsorted(np.sort(scores), scores, side="right")
    return (counts / len(scores)).tolist()


@dataclass(frozen=True)
class ScoredSample:
    sample_id: int
    raw_score: float
    cdf: float


class ScoredCorpus:
    """Raw difficulty scores and CDF ranks, indexed by sample id.

    Also serves as the read-only view loaded back from a scored-corpus
    file, in which case ``corpus`` is None.  ``order`` is the canonical
    easiest-first permutation (ascending cdf, ties by ascending id) that
    gated sampling indexes into.
    """

    def __init__(
        self,
        metric_name: str,
        raw: Sequence[float],
        cdf: Sequence[float],
        corpus: Corpus | None = None,
    ):
        self.metric_name = metric_name
        self.raw = np.asarray(raw, dtype=np.float64)
        self.cdf = np.asarray(cdf, dtype=np.float64)
        if self.raw.shape != self.cdf.shape or self.raw.ndim != 1:
            raise ValidationError("raw and cdf must be equal-length 1-d sequences")
        if self.M == 0:
            raise ValidationError("a scored corpus cannot be empty")
        self.corpus = corpus
        ids = np.arange(self.M)
        self._order = np.lexsort((ids, self.cdf))
        self._sorted_cdf = self.cdf[self._order]

    @property
    def M(self) -> int:
        return int(self.raw.shape[0])

    @property
    def order(self) -> np.ndarray:
        """Sample ids sorted by (cdf, id) ascending."""
        return self._order

    @property
    def sorted_cdf(self) -> np.ndarray:
        return self._sorted_cdf

    @property
    def scores(self) -> list[ScoredSample]:
        return [
            ScoredSample(i, float(self.raw[i]), float(self.cdf[i]))
            for i in range(self.M)
        ]

    def eligible_count(self, c: float) -> int:
        """Number of samples with cdf <= c."""
        return int(np.searchsorted(self._sorted_cdf, c, side="right"))


@dataclass(frozen=True)
class ScoringPlan:
    """Execution plan for one metric: corpus-level stats, then a sentence map."""

    metric: DifficultyMetric
    corpus_stats: frozenset[CorpusStat]
    sentence_scorer: Callable[[ParallelSample, dict], float]


def _length_scorer(sample: ParallelSample, stats: dict) -> float:
    return float(len(sample.source_tokens))


def _rarity_scorer(sample: ParallelSample, stats: dict) -> float:
    log_p: dict[str, float] = stats["log_frequencies"]
    unk_log_p: float | None = stats["unk_log_frequency"]
    freq: FrequencyTable = stats[CorpusStat.FREQUENCY_TABLE]
    total = 0.0
    for token in sample.source_tokens:
        lp = log_p.get(token, unk_log_p)
        if lp is None:
            # No unk mass: fall through to the strict lookup for the error.
            lp = math.log(freq.lookup(token))
        total += lp
    return -total


def plan_scoring(metric: DifficultyMetric) -> ScoringPlan:
    scorer = (
        _length_scorer
        if metric.kind is MetricKind.SENTENCE_LENGTH
        else _rarity_scorer
    )
    return ScoringPlan(
        metric=metric, corpus_stats=metric.dependencies, sentence_scorer=scorer
    )


def _resolve_stats(
    corpus: Corpus, plan: ScoringPlan, freq: FrequencyTable | None
) -> dict:
    stats: dict = {}
    if CorpusStat.FREQUENCY_TABLE in plan.corpus_stats:
        if freq is None:
            vocab = build_vocabulary(
                corpus, max_size=plan.metric.vocab_size, min_count=plan.metric.min_count
            )
            freq = frequency_table(corpus, vocab)
        stats[CorpusStat.FREQUENCY_TABLE] = freq
        stats["log_frequencies"] = {
            token: math.log(p) for token, p in freq.frequencies.items()
        }
        stats["unk_log_frequency"] = (
            math.log(freq.unk_frequency) if freq.unk_frequency > 0.0 else None
        )
    return stats


def score_corpus(
    corpus: Corpus,
    metric: DifficultyMetric,
    freq: FrequencyTable | None = None,
) -> ScoredCorpus:
    """Score every sample and attach empirical-CDF ranks.

    Executes the two-phase plan: corpus-level prerequisites once, then the
    sentence-level map in sample order, then the CDF reduction.  The result
    is bit-identical to calling the per-sample scorers in a plain loop.
    """
    plan = plan_scoring(metric)
    stats = _resolve_stats(corpus, plan, freq)
    raw = [plan.sentence_scorer(sample, stats) for sample in corpus.samples]
    cdf = compute_cdf(raw)
    return ScoredCorpus(metric_name=metric.name, raw=raw, cdf=cdf, corpus=corpus)


# Scored-corpus file format: a header line `# metric=<name> M=<count>`,
# then one record per line, `id<TAB>raw_score<TAB>cdf`, both reals printed
# with 9 significant digits.  This file is the contract between the score
# and sample/train commands and the external binding.

def save_scored(scored: ScoredCorpus, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        fp.write(f"# metric={scored.metric_name} M={scored.M}\n")
        for i in range(scored.M):
            fp.write(f"{i}\t{scored.raw[i]:.9g}\t{scored.cdf[i]:.9g}\n")


def load_scored(path: str | Path) -> ScoredCorpus:
    """Read a scored-corpus file back into a corpus-less ScoredCorpus view."""
    with open(path, "r", encoding="utf-8") as fp:
        header = fp.readline()
        if not header.startswith("# metric="):
            raise FormatError("missing scored-corpus header", line=1)
        try:
            metric_part, m_part = header[2:].split()
            metric_name = metric_part.split("=", 1)[1]
            declared_m = int(m_part.split("=", 1)[1])
        except (ValueError, IndexError) as exc:
            raise FormatError(f"malformed header: {header!r}", line=1) from exc
        raw = np.empty(declared_m, dtype=np.float64)
        cdf = np.empty(declared_m, dtype=np.float64)
        count = 0
        for line_no, line in enumerate(fp, start=2):
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise FormatError(
                    f"expected id<TAB>raw<TAB>cdf, got {line!r}", line=line_no
                )
            try:
                sample_id = int(parts[0])
                raw_value = float(parts[1])
                cdf_value = float(parts[2])
            except ValueError as exc:
                raise FormatError(f"unparseable record {line!r}", line=line_no) from exc
            if sample_id != count:
                raise FormatError(
                    f"ids must be dense and ascending, got {sample_id}", line=line_no
                )
            if count >= declared_m:
                raise FormatError(
                    f"more records than the declared M={declared_m}", line=line_no
                )
            raw[count] = raw_value
            cdf[count] = cdf_value
            count += 1
        if count != declared_m:
            raise FormatError(
                f"header declared M={declared_m} but file has {count} records"
            )
    return ScoredCorpus(metric_name=metric_name, raw=raw, cdf=cdf, corpus=None)
