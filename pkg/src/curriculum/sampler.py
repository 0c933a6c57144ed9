"""Competence-gated, token-budgeted batch sampling (the training-loop driver).

At each step t the sampler evaluates the competence c(t), restricts the
sampling domain to the samples whose CDF rank satisfies cdf <= c(t), and
draws ids uniformly with replacement until the next draw would overflow the
token budget.  The overflowing draw is pushed back and opens the next
batch, so the underlying draw stream stays i.i.d. uniform over the pool.
Gating constrains the domain only; it never reweights samples within it.

Determinism contract: given identical scored corpus, costs, and config
(including the 64-bit seed), the emitted batch sequence is identical across
runs, platforms, and the external binding.  All randomness comes from a
SplitMix64 generator with rejection sampling for bounded draws; both are
fixed, documented, and trivially portable (64-bit integer arithmetic only).
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from typing import BinaryIO, Callable, IO, Iterable, Iterator, Sequence

import numpy as np

from .competence import CompetenceSchedule
from .difficulty import ScoredCorpus
from .errors import BudgetError, TrainerError, ValidationError

DEFAULT_TOKEN_BUDGET = 5120

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """SplitMix64 pseudo-random generator (64-bit state, 64-bit output).

    Bounded draws use rejection sampling on the top range-multiple, so they
    are exactly uniform and reproducible anywhere 64-bit unsigned integer
    arithmetic exists.
    """

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    @property
    def state(self) -> int:
        return self._state

    @state.setter
    def state(self, value: int) -> None:
        self._state = value & _MASK64

    def next_uint64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def next_below(self, n: int) -> int:
        """Uniform integer in [0, n) via rejection sampling."""
        if n <= 0:
            raise ValidationError(f"draw bound must be positive, got {n}")
        threshold = (1 << 64) - ((1 << 64) % n)
        while True:
            value = self.next_uint64()
            if value < threshold:
                return value % n


@dataclass(frozen=True)
class SamplerConfig:
    schedule: CompetenceSchedule
    token_budget: int = DEFAULT_TOKEN_BUDGET
    seed: int = 0
    min_pool: int = 1

    def __post_init__(self) -> None:
        if self.token_budget < 1:
            raise ValidationError(
                f"token_budget must be >= 1, got {self.token_budget}"
            )
        if self.min_pool < 1:
            raise ValidationError(f"min_pool must be >= 1, got {self.min_pool}")


@dataclass(frozen=True)
class Batch:
    """Samples drawn at one step; ids appear in draw order.

    ``clamped`` marks batches whose draws were not all gated by
    cdf <= competence_at_draw: either the eligible pool was extended to
    min_pool, or the batch opens with a pushed-back draw from an earlier
    clamped pool that the current competence does not yet cover.
    """

    step: int
    competence_at_draw: float
    sample_ids: tuple[int, ...]
    token_count: int
    clamped: bool = False


def sample_costs(scored: ScoredCorpus) -> list[int]:
    """Token cost per sample (source + target counts) from the attached corpus."""
    if scored.corpus is None:
        raise ValidationError(
            "scored corpus has no attached corpus; supply per-sample costs"
        )
    return [sample.token_cost for sample in scored.corpus.samples]


def eligible_pool(
    scored: ScoredCorpus, c: float, min_pool: int = 1
) -> tuple[list[int], bool]:
    """Ids of all samples with cdf <= c, easiest first (ties by ascending id).

    If fewer than ``min_pool`` qualify, the pool is extended to the
    ``min_pool`` easiest samples and flagged clamped.
    """
    if not (0.0 < c <= 1.0):
        raise ValidationError(f"competence must be in (0, 1], got {c}")
    if min_pool < 1:
        raise ValidationError(f"min_pool must be >= 1, got {min_pool}")
    eligible = scored.eligible_count(c)
    size = max(eligible, min(min_pool, scored.M))
    return scored.order[:size].tolist(), size > eligible


@dataclass
class SamplerState:
    """Snapshot of the mutable sampler state, for alignment and replay."""

    t: int
    rng_state: int
    pending: int | None
    pending_gated: bool


class CurriculumSampler:
    """Stateful driver that emits one batch per training step.

    Single-owner and sequential; independent samplers over the same scored
    corpus are safe to run concurrently.
    """

    def __init__(
        self,
        scored: ScoredCorpus,
        config: SamplerConfig,
        costs: Sequence[int] | None = None,
    ):
        if costs is None:
            costs = sample_costs(scored)
        if len(costs) != scored.M:
            raise ValidationError(
                f"got {len(costs)} costs for {scored.M} samples"
            )
        self._costs = [int(c) for c in costs]
        if min(self._costs) < 1:
            raise ValidationError("sample token costs must be >= 1")
        if scored.corpus is not None:
            longest = max(
                max(len(s.source_tokens), len(s.target_tokens))
                for s in scored.corpus.samples
            )
            if config.token_budget < longest:
                raise ValidationError(
                    f"token_budget {config.token_budget} is below the longest "
                    f"retained sentence ({longest} tokens)"
                )
        self.scored = scored
        self.config = config
        self._order = scored.order.tolist()
        self._t = 0
        self._rng = SplitMix64(config.seed)
        self._pending: int | None = None
        self._pending_gated = True
        self._cached_c: float | None = None
        self._cached_pool_size = 0
        self._cached_eligible = 0

    @property
    def t(self) -> int:
        return self._t

    @property
    def state(self) -> SamplerState:
        return SamplerState(
            t=self._t,
            rng_state=self._rng.state,
            pending=self._pending,
            pending_gated=self._pending_gated,
        )

    def restore(self, state: SamplerState) -> None:
        """Align this sampler to a snapshot taken from another instance."""
        self._t = state.t
        self._rng.state = state.rng_state
        self._pending = state.pending
        self._pending_gated = state.pending_gated

    def pool_size(self, c: float) -> tuple[int, bool]:
        """(pool size, clamped flag) for a competence value, cached per value."""
        if c != self._cached_c:
            eligible = self.scored.eligible_count(c)
            self._cached_c = c
            self._cached_eligible = eligible
            self._cached_pool_size = max(
                eligible, min(self.config.min_pool, self.scored.M)
            )
        return self._cached_pool_size, self._cached_pool_size > self._cached_eligible

    def next_batch(self) -> Batch:
        """Draw the batch for the current step and advance the step counter.

        Raises BudgetError if the first draw alone exceeds the token budget.
        """
        c = self.config.schedule(self._t)
        pool_size, pool_clamped = self.pool_size(c)
        budget = self.config.token_budget
        cdf = self.scored.cdf
        ids: list[int] = []
        tokens = 0
        clamped = pool_clamped
        while True:
            if self._pending is not None:
                sample_id = self._pending
                drawn_gated = self._pending_gated
                self._pending = None
            else:
                sample_id = self._order[self._rng.next_below(pool_size)]
                drawn_gated = not pool_clamped
            cost = self._costs[sample_id]
            if not ids:
                if cost > budget:
                    raise BudgetError(sample_id, cost, budget)
                # Defensive: a draw carried over from a clamped pool is
                # re-checked against the current gate.  Because clamped
                # pools are always the min_pool easiest samples and pools
                # only grow, this cannot trigger today, but the gating
                # invariant is enforced structurally rather than assumed.
                if not drawn_gated and cdf[sample_id] > c:
                    clamped = True
            elif tokens + cost > budget:
                self._pending = sample_id
                self._pending_gated = drawn_gated
                break
            ids.append(sample_id)
            tokens += cost
        batch = Batch(
            step=self._t,
            competence_at_draw=c,
            sample_ids=tuple(ids),
            token_count=tokens,
            clamped=clamped,
        )
        self._t += 1
        return batch

    def batches(self, steps: int) -> Iterator[Batch]:
        """Yield exactly ``steps`` consecutive batches."""
        if steps < 0:
            raise ValidationError(f"steps must be >= 0, got {steps}")
        for _ in range(steps):
            yield self.next_batch()


@dataclass(frozen=True)
class LogRow:
    t: int
    competence: float
    pool_size: int
    batch_tokens: int
    clamped: bool
    callback_value: object = None


@dataclass
class RunLog:
    rows: list[LogRow] = field(default_factory=list)

    CSV_HEADER = "t,competence,pool_size,batch_tokens,clamped,callback_value"

    def to_csv(self) -> str:
        lines = [self.CSV_HEADER]
        for row in self.rows:
            value = "" if row.callback_value is None else repr(row.callback_value)
            lines.append(
                f"{row.t},{row.competence!r},{row.pool_size},"
                f"{row.batch_tokens},{str(row.clamped).lower()},{value}"
            )
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fp:
            fp.write(self.to_csv())


def run_curriculum(
    scored: ScoredCorpus,
    config: SamplerConfig,
    trainer: Callable[[Batch], object] | None,
    steps: int,
    costs: Sequence[int] | None = None,
) -> RunLog:
    """Drive the full loop: gate, sample, invoke the trainer, once per step.

    The trainer callback runs synchronously in step order; its return value
    is recorded opaquely in the log.  A callback exception aborts the run
    with the failing step recorded on the raised TrainerError.
    """
    if steps < 1:
        raise ValidationError(f"steps must be >= 1, got {steps}")
    sampler = CurriculumSampler(scored, config, costs=costs)
    log = RunLog()
    for _ in range(steps):
        batch = sampler.next_batch()
        pool_size, _ = sampler.pool_size(batch.competence_at_draw)
        value: object = None
        if trainer is not None:
            try:
                value = trainer(batch)
            except Exception as exc:
                raise TrainerError(batch.step, exc) from exc
        log.rows.append(
            LogRow(
                t=batch.step,
                competence=batch.competence_at_draw,
                pool_size=pool_size,
                batch_tokens=batch.token_count,
                clamped=batch.clamped,
                callback_value=value,
            )
        )
    return log


# Batch stream formats.  JSON-lines is the compatibility baseline: one
# object per line, {"t": <step>, "ids": [<sample ids in draw order>]}.
# The binary form is a sequence of length-prefixed records:
#   u32le payload_bytes, u64le t, then (payload_bytes - 8) / 4 u32le ids.

def write_batches_jsonl(batches: Iterable[Batch], fp: IO[str]) -> None:
    for batch in batches:
        fp.write(
            json.dumps({"t": batch.step, "ids": list(batch.sample_ids)},
                       separators=(",", ":"))
            + "\n"
        )


def read_batches_jsonl(fp: IO[str]) -> list[tuple[int, list[int]]]:
    out = []
    for line in fp:
        if not line.strip():
            continue
        record = json.loads(line)
        out.append((record["t"], list(record["ids"])))
    return out


def write_batches_binary(batches: Iterable[Batch], fp: BinaryIO) -> None:
    for batch in batches:
        payload = struct.pack("<Q", batch.step) + struct.pack(
            f"<{len(batch.sample_ids)}I", *batch.sample_ids
        )
        fp.write(struct.pack("<I", len(payload)))
        fp.write(payload)


def read_batches_binary(fp: BinaryIO) -> list[tuple[int, list[int]]]:
    out = []
    while True:
        prefix = fp.read(4)
        if not prefix:
            break
        if len(prefix) < 4:
            raise ValidationError("truncated batch stream")
        (length,) = struct.unpack("<I", prefix)
        payload = fp.read(length)
        if len(payload) < length or length < 8 or (length - 8) % 4:
            raise ValidationError("truncated or malformed batch record")
        (t,) = struct.unpack("<Q", payload[:8])
        ids = list(struct.unpack(f"<{(length - 8) // 4}I", payload[8:]))
        out.append((t, ids))
    return out
