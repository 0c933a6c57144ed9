"""Desk-scale experiment harness for the curriculum pipeline.

A synthetic translation task (Zipfian unigram source, target = fixed token
permutation) is trained with a minimal per-token categorical model under
plain and curriculum regimes.  The harness exists to demonstrate the full
loop end to end and to exercise every training-side contract; it makes no
claim of reproducing full-scale NMT results.
"""

from __future__ import annotations

import math
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .competence import CompetenceSchedule
from .corpus import Corpus, ParallelSample
from .difficulty import DifficultyMetric, ScoredCorpus, score_corpus
from .errors import ValidationError
from .sampler import Batch, SamplerConfig, run_curriculum

VARIANTS = ("plain", "sl-linear", "sl-sqrt", "sr-linear", "sr-sqrt")


@dataclass(frozen=True)
class SyntheticTask:
    """Synthetic parallel-corpus spec: Zipfian source, permuted target."""

    vocab_size: int = 100
    zipf_exponent: float = 1.0
    sentence_length_range: tuple[int, int] = (2, 20)
    M: int = 10_000
    heldout_m: int = 1_000
    permutation: tuple[int, ...] | None = None  # None: derived from seed
    seed: int = 0

    def __post_init__(self) -> None:
        lo, hi = self.sentence_length_range
        if self.vocab_size < 2:
            raise ValidationError(f"vocab_size must be >= 2, got {self.vocab_size}")
        if self.M < 10:
            raise ValidationError(f"M must be >= 10, got {self.M}")
        if self.heldout_m < 1:
            raise ValidationError(f"heldout_m must be >= 1, got {self.heldout_m}")
        if self.zipf_exponent <= 0:
            raise ValidationError(
                f"zipf_exponent must be > 0, got {self.zipf_exponent}"
            )
        if not (1 <= lo <= hi):
            raise ValidationError(f"bad sentence_length_range {lo, hi}")
        if self.permutation is not None and sorted(self.permutation) != list(
            range(self.vocab_size)
        ):
            raise ValidationError("permutation must be a bijection over the vocabulary")


def zipf_probabilities(vocab_size: int, exponent: float) -> np.ndarray:
    """p(rank k) proportional to k^-exponent over ranks 1..vocab_size."""
    ranks = np.arange(1, vocab_size + 1, dtype=np.float64)
    weights = ranks**-exponent
    return weights / weights.sum()


def _draw_sentences(
    rng: np.random.Generator,
    n: int,
    task: SyntheticTask,
    probs: np.ndarray,
    tokens: list[str],
    target_tokens: list[str],
    id_offset: int = 0,
) -> list[ParallelSample]:
    lo, hi = task.sentence_length_range
    lengths = rng.integers(lo, hi + 1, size=n)
    flat = rng.choice(task.vocab_size, size=int(lengths.sum()), p=probs)
    samples = []
    offset = 0
    for i, length in enumerate(lengths):
        ids = flat[offset : offset + length]
        offset += length
        samples.append(
            ParallelSample(
                id=id_offset + i,
                source_tokens=tuple(tokens[j] for j in ids),
                target_tokens=tuple(target_tokens[j] for j in ids),
            )
        )
    return samples


def generate_task(task: SyntheticTask) -> tuple[Corpus, Corpus]:
    """Sample (train, heldout) corpora; heldout rows are fresh, later draws.

    Deterministic in ``task.seed``; the target side applies the task
    permutation tokenwise, so a perfect model recovers the permutation.
    """
    rng = np.random.default_rng(task.seed)
    probs = zipf_probabilities(task.vocab_size, task.zipf_exponent)
    if task.permutation is None:
        permutation = rng.permutation(task.vocab_size)
    else:
        permutation = np.asarray(task.permutation)
    tokens = [f"w{i}" for i in range(task.vocab_size)]
    target_tokens = [tokens[permutation[i]] for i in range(task.vocab_size)]
    train = Corpus(
        tuple(_draw_sentences(rng, task.M, task, probs, tokens, target_tokens))
    )
    heldout = Corpus(
        tuple(
            _draw_sentences(rng, task.heldout_m, task, probs, tokens, target_tokens)
        )
    )
    return train, heldout


class EncodedPairs:
    """Token-id views of a toy corpus (one source/target id array per sample)."""

    def __init__(self, corpus: Corpus, vocab_size: int):
        token_ids = {f"w{i}": i for i in range(vocab_size)}
        self.vocab_size = vocab_size
        self.src: list[np.ndarray] = []
        self.tgt: list[np.ndarray] = []
        for sample in corpus:
            try:
                src = np.array(
                    [token_ids[t] for t in sample.source_tokens], dtype=np.int64
                )
                tgt = np.array(
                    [token_ids[t] for t in sample.target_tokens], dtype=np.int64
                )
            except KeyError as exc:
                raise ValidationError(
                    f"token {exc.args[0]!r} is not part of the toy vocabulary"
                ) from exc
            if len(src) != len(tgt):
                raise ValidationError(
                    f"sample {sample.id} is not token-aligned; the toy model "
                    "needs one target token per source token"
                )
            self.src.append(src)
            self.tgt.append(tgt)
        self.flat_src = np.concatenate(self.src)
        self.flat_tgt = np.concatenate(self.tgt)


@dataclass
class ToyModel:
    """Per-source-token categorical over target tokens, unnormalized scores."""

    weights: np.ndarray
    learning_rate: float

    @staticmethod
    def zeros(vocab_size: int, learning_rate: float) -> "ToyModel":
        return ToyModel(
            weights=np.zeros((vocab_size, vocab_size)), learning_rate=learning_rate
        )

    def distribution(self, source_id: int) -> np.ndarray:
        row = self.weights[source_id]
        shifted = np.exp(row - row.max())
        return shifted / shifted.sum()


def _loss_and_grad(
    weights: np.ndarray, src: np.ndarray, tgt: np.ndarray
) -> tuple[float, np.ndarray]:
    """Mean per-token cross-entropy and its gradient w.r.t. the score table."""
    n = len(src)
    rows = weights[src]
    m = rows.max(axis=1, keepdims=True)
    exp_shifted = np.exp(rows - m)
    lse = m[:, 0] + np.log(exp_shifted.sum(axis=1))
    loss = float(np.mean(lse - rows[np.arange(n), tgt]))
    probs = exp_shifted / exp_shifted.sum(axis=1, keepdims=True)
    probs[np.arange(n), tgt] -= 1.0
    probs /= n
    grad = np.zeros_like(weights)
    np.add.at(grad, src, probs)
    return loss, grad


def batch_token_pairs(
    batch: Batch, pairs: EncodedPairs
) -> tuple[np.ndarray, np.ndarray]:
    src = np.concatenate([pairs.src[i] for i in batch.sample_ids])
    tgt = np.concatenate([pairs.tgt[i] for i in batch.sample_ids])
    return src, tgt


def sgd_step(model: ToyModel, batch: Batch, pairs: EncodedPairs) -> float:
    """One plain-SGD update on the batch; returns the pre-update loss."""
    src, tgt = batch_token_pairs(batch, pairs)
    loss, grad = _loss_and_grad(model.weights, src, tgt)
    model.weights -= model.learning_rate * grad
    return loss


def evaluate(model: ToyModel, pairs: EncodedPairs) -> tuple[float, float]:
    """(token accuracy, mean negative log-likelihood) over all pairs."""
    weights = model.weights
    src, tgt = pairs.flat_src, pairs.flat_tgt
    predictions = weights.argmax(axis=1)
    accuracy = float(np.mean(predictions[src] == tgt))
    m = weights.max(axis=1)
    lse_table = m + np.log(np.exp(weights - m[:, None]).sum(axis=1))
    nll = float(np.mean(lse_table[src] - weights[src, tgt]))
    return accuracy, nll


def noam_lr(t: int, d_embedding: int, T_warmup: int) -> float:
    """Warm-up learning-rate schedule: rises to t = T_warmup, then decays."""
    if t < 1 or d_embedding < 1 or T_warmup < 1:
        raise ValidationError("t, d_embedding and T_warmup must all be >= 1")
    return d_embedding**-0.5 * min(t**-0.5, t * T_warmup**-1.5)


@dataclass(frozen=True)
class RunRecord:
    step: int
    accuracy: float
    nll: float
    wall_s: float


@dataclass(frozen=True)
class TSelection:
    step: int
    reached: bool  # False: threshold never met, last step returned


def select_T(baseline_curve: Sequence[RunRecord], fraction: float = 0.9) -> TSelection:
    """First step whose accuracy reaches ``fraction`` of the final accuracy.

    The final value is the last record's accuracy.  If the threshold is
    never met (possible only for pathological inputs), the last step is
    returned with ``reached=False``.
    """
    if not baseline_curve:
        raise ValidationError("baseline curve must be non-empty")
    if not (0.0 < fraction <= 1.0):
        raise ValidationError(f"fraction must be in (0, 1], got {fraction}")
    threshold = fraction * baseline_curve[-1].accuracy
    for record in baseline_curve:
        if record.accuracy >= threshold:
            return TSelection(step=record.step, reached=True)
    return TSelection(step=baseline_curve[-1].step, reached=False)


@dataclass(frozen=True)
class SummaryRow:
    variant: str
    final_metric: float
    relative_time: float  # steps-to-baseline-final / baseline steps; NaN if unreached


@dataclass
class ExperimentResult:
    T: int
    t_selection: TSelection
    curves: dict[tuple[str, int], list[RunRecord]] = field(default_factory=dict)
    summary: list[SummaryRow] = field(default_factory=list)


def _variant_schedule(variant: str, c0: float, T: int) -> CompetenceSchedule:
    if variant == "plain":
        return CompetenceSchedule.full()
    if variant.endswith("-linear"):
        return CompetenceSchedule.linear(c0=c0, T=T)
    if variant.endswith("-sqrt"):
        return CompetenceSchedule.sqrt(c0=c0, T=T)
    raise ValidationError(f"unknown variant {variant!r}")


def _variant_metric(variant: str) -> DifficultyMetric:
    # Plain ignores difficulty (gate is vacuous at c = 1); score by length
    # so its sampler sees the same canonical ordering machinery.
    if variant.startswith("sr"):
        return DifficultyMetric.rarity()
    return DifficultyMetric.length()


def _run_one(
    scored: ScoredCorpus,
    schedule: CompetenceSchedule,
    seed: int,
    steps: int,
    eval_every: int,
    token_budget: int,
    learning_rate: float,
    pairs_train: EncodedPairs,
    pairs_heldout: EncodedPairs,
) -> list[RunRecord]:
    model = ToyModel.zeros(pairs_train.vocab_size, learning_rate)
    records: list[RunRecord] = []
    start = time.perf_counter()

    def trainer(batch: Batch) -> float:
        loss = sgd_step(model, batch, pairs_train)
        if (batch.step + 1) % eval_every == 0:
            accuracy, nll = evaluate(model, pairs_heldout)
            records.append(
                RunRecord(
                    step=batch.step + 1,
                    accuracy=accuracy,
                    nll=nll,
                    wall_s=time.perf_counter() - start,
                )
            )
        return loss

    config = SamplerConfig(schedule=schedule, token_budget=token_budget, seed=seed)
    run_curriculum(scored, config, trainer, steps)
    return records


def run_experiment(
    task: SyntheticTask,
    variants: Sequence[str] = VARIANTS,
    steps: int = 600,
    eval_every: int = 20,
    seeds: Sequence[int] = (0,),
    token_budget: int = 5120,
    c0: float = 0.01,
    fraction: float = 0.9,
    learning_rate: float = 2.0,
    T: int | None = None,
) -> ExperimentResult:
    """Run the requested variants with shared seeds and identical model init.

    When ``T`` is not given, a plain baseline run with the first seed picks
    it: the first step reaching ``fraction`` of the baseline's final
    accuracy.  Per-variant relative time follows the convention that plain
    scores 1.0 and a variant reaching the baseline's final accuracy in s
    steps scores s / s_plain.
    """
    if steps < eval_every or eval_every < 1:
        raise ValidationError("need steps >= eval_every >= 1")
    for variant in variants:
        if variant not in VARIANTS:
            raise ValidationError(f"unknown variant {variant!r}")
    if not seeds:
        raise ValidationError("at least one seed is required")

    train, heldout = generate_task(task)
    pairs_train = EncodedPairs(train, task.vocab_size)
    pairs_heldout = EncodedPairs(heldout, task.vocab_size)

    scored_by_metric: dict[str, ScoredCorpus] = {}
    for variant in set(variants) | {"plain"}:
        metric = _variant_metric(variant)
        if metric.name not in scored_by_metric:
            scored_by_metric[metric.name] = score_corpus(train, metric)

    def run(variant: str, seed: int, schedule: CompetenceSchedule) -> list[RunRecord]:
        return _run_one(
            scored_by_metric[_variant_metric(variant).name],
            schedule,
            seed,
            steps,
            eval_every,
            token_budget,
            learning_rate,
            pairs_train,
            pairs_heldout,
        )

    curves: dict[tuple[str, int], list[RunRecord]] = {}

    # Baseline first: it both selects T and doubles as plain's first-seed run.
    baseline = run("plain", seeds[0], CompetenceSchedule.full())
    selection = select_T(baseline, fraction) if T is None else TSelection(T, True)
    curriculum_T = max(1, selection.step)

    for variant in variants:
        schedule = _variant_schedule(variant, c0, curriculum_T)
        for seed in seeds:
            if variant == "plain" and seed == seeds[0]:
                curves[(variant, seed)] = baseline
            else:
                curves[(variant, seed)] = run(variant, seed, schedule)
    if "plain" not in variants:
        curves[("plain", seeds[0])] = baseline

    summary = _summarize(curves, variants, seeds)
    return ExperimentResult(
        T=curriculum_T, t_selection=selection, curves=curves, summary=summary
    )


def _first_step_reaching(curve: Sequence[RunRecord], target: float) -> int | None:
    for record in curve:
        if record.accuracy >= target:
            return record.step
    return None


def _summarize(
    curves: dict[tuple[str, int], list[RunRecord]],
    variants: Sequence[str],
    seeds: Sequence[int],
) -> list[SummaryRow]:
    rows = []
    for variant in variants:
        finals = [curves[(variant, seed)][-1].accuracy for seed in seeds]
        ratios = []
        for seed in seeds:
            plain_curve = curves.get(("plain", seed))
            if plain_curve is None:
                continue
            target = plain_curve[-1].accuracy
            plain_steps = _first_step_reaching(plain_curve, target)
            variant_steps = _first_step_reaching(curves[(variant, seed)], target)
            if plain_steps and variant_steps:
                ratios.append(variant_steps / plain_steps)
        rows.append(
            SummaryRow(
                variant=variant,
                final_metric=statistics.median(finals),
                relative_time=statistics.median(ratios) if ratios else math.nan,
            )
        )
    return rows


def write_curves_csv(result: ExperimentResult, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        fp.write("variant,seed,step,accuracy,nll,wall_ms\n")
        for (variant, seed), records in sorted(result.curves.items()):
            for r in records:
                fp.write(
                    f"{variant},{seed},{r.step},{r.accuracy!r},{r.nll!r},"
                    f"{r.wall_s * 1000.0:.3f}\n"
                )


def write_summary_csv(result: ExperimentResult, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        fp.write("variant,final_metric,relative_time\n")
        for row in result.summary:
            fp.write(f"{row.variant},{row.final_metric!r},{row.relative_time!r}\n")
