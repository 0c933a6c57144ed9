"""Scoring throughput and memory measurement on synthetic corpora.

Throughput is wall-clock sentences/sec over the sentence-scoring map alone
(the favorable reading); an end-to-end figure including corpus-level
statistics and the CDF pass is reported alongside.  Peak memory comes from
the OS allocator statistic (ru_maxrss), which is an estimate of the
process-wide high-water mark, not a per-phase measurement.
"""

from __future__ import annotations

import os
import platform
import resource
import time
from dataclasses import dataclass

import numpy as np

from .corpus import Corpus, ParallelSample
from .difficulty import (
    DifficultyMetric,
    ScoredCorpus,
    compute_cdf,
    plan_scoring,
    _resolve_stats,
)


def synthetic_corpus(
    n_sentences: int,
    seed: int = 0,
    vocab_size: int = 50_000,
    zipf_exponent: float = 1.1,
    length_range: tuple[int, int] = (3, 30),
) -> Corpus:
    """Zipfian synthetic corpus sized for throughput runs; deterministic in seed.

    Token strings are shared across samples, so memory stays proportional
    to token references rather than distinct strings.
    """
    rng = np.random.default_rng(seed)
    ranks = np.arange(1, vocab_size + 1, dtype=np.float64)
    probs = ranks**-zipf_exponent
    probs /= probs.sum()
    lo, hi = length_range
    lengths = rng.integers(lo, hi + 1, size=n_sentences)
    flat = rng.choice(vocab_size, size=int(lengths.sum()), p=probs)
    tokens = [f"w{i}" for i in range(vocab_size)]
    samples = []
    offset = 0
    for i in range(n_sentences):
        length = lengths[i]
        ids = flat[offset : offset + length]
        offset += length
        source = tuple(tokens[j] for j in ids)
        samples.append(ParallelSample(id=i, source_tokens=source, target_tokens=source))
    return Corpus(tuple(samples))


def peak_rss_bytes() -> int:
    """Process peak resident set size; ru_maxrss is KiB on Linux."""
    usage = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
    return usage * 1024 if platform.system() == "Linux" else usage


def hardware_summary() -> str:
    return (
        f"{platform.system()} {platform.machine()}, "
        f"{os.cpu_count()} cpus, python {platform.python_version()}"
    )


@dataclass(frozen=True)
class BenchReport:
    metric: str
    sentences: int
    prepare_seconds: float
    scoring_seconds: float
    cdf_seconds: float
    peak_rss: int
    hardware: str

    @property
    def scoring_sentences_per_sec(self) -> float:
        return self.sentences / max(self.scoring_seconds, 1e-12)

    @property
    def end_to_end_sentences_per_sec(self) -> float:
        total = self.prepare_seconds + self.scoring_seconds + self.cdf_seconds
        return self.sentences / max(total, 1e-12)

    def format(self) -> str:
        return (
            f"metric={self.metric} sentences={self.sentences}\n"
            f"  scoring throughput: {self.scoring_sentences_per_sec:,.0f} sentences/sec"
            f" (scoring phase only, {self.scoring_seconds:.3f}s)\n"
            f"  end-to-end throughput: {self.end_to_end_sentences_per_sec:,.0f}"
            f" sentences/sec (incl. corpus stats {self.prepare_seconds:.3f}s,"
            f" cdf {self.cdf_seconds:.3f}s)\n"
            f"  peak rss: {self.peak_rss / 2**30:.2f} GiB\n"
            f"  hardware: {self.hardware}\n"
        )


def bench_scoring(corpus: Corpus, metric: DifficultyMetric) -> tuple[BenchReport, ScoredCorpus]:
    """Time each scoring phase separately on an already-built corpus."""
    plan = plan_scoring(metric)
    start = time.perf_counter()
    stats = _resolve_stats(corpus, plan, None)
    prepared = time.perf_counter()
    raw = [plan.sentence_scorer(sample, stats) for sample in corpus.samples]
    scored_at = time.perf_counter()
    cdf = compute_cdf(raw)
    done = time.perf_counter()
    report = BenchReport(
        metric=metric.name,
        sentences=corpus.M,
        prepare_seconds=prepared - start,
        scoring_seconds=scored_at - prepared,
        cdf_seconds=done - scored_at,
        peak_rss=peak_rss_bytes(),
        hardware=hardware_summary(),
    )
    scored = ScoredCorpus(metric_name=metric.name, raw=raw, cdf=cdf, corpus=corpus)
    return report, scored


def run_bench(
    n_sentences: int, metric: DifficultyMetric, seed: int = 0
) -> BenchReport:
    corpus = synthetic_corpus(n_sentences, seed=seed)
    report, _ = bench_scoring(corpus, metric)
    return report
