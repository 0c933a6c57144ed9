"""Closed-form competence schedules c(t).

Competence is the fraction of the difficulty-ranked corpus the learner may
sample from at integer step t >= 0.  Every schedule starts at c(0) = c0,
is nondecreasing, and saturates at 1 for all t >= T.

Two families are provided:

* linear:  c(t) = min(1, t * (1 - c0) / T + c0)
* root-p:  c(t) = min(1, (t * (1 - c0^p) / T + c0^p)^(1/p)),  p >= 1

p = 1 reduces exactly to the linear form; p = 2 is the "sqrt" schedule,
which front-loads data introduction so the rate of new examples is
inversely proportional to the current training-set size.  Larger p gives
larger early competence, converging toward no-curriculum behavior.

The arithmetic below is written so a foreign reimplementation (same IEEE
double operations, in the same order; ``sqrt`` for p = 2) reproduces the
values bit-for-bit, since eligibility thresholds feed the reproducible
batch-sampling contract.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import ValidationError

DEFAULT_C0 = 0.01
DEFAULT_T = 1000


def competence_linear(t: int, c0: float, T: int) -> float:
    """Eligible fraction under the linear schedule at step t.

    The boundaries t = 0 and t >= T are returned exactly (c0 and 1.0): the
    closed form guarantees them mathematically, and rounding must not leak
    a 1-ulp-short competence into the gate, where a sample with cdf exactly
    1.0 (the hardest tie group) or c0 would otherwise be excluded.
    """
    if t >= T:
        return 1.0
    if t <= 0:
        return c0
    return min(1.0, t * (1.0 - c0) / T + c0)


def competence_root_p(t: int, c0: float, T: int, p: float) -> float:
    """Eligible fraction under the root-p schedule at step t.

    Boundaries are exact as in ``competence_linear``.  p = 2 uses ``sqrt``
    (correctly rounded everywhere), other p the pow equivalent.
    """
    if t >= T:
        return 1.0
    if t <= 0:
        return c0
    if p == 1.0:
        return competence_linear(t, c0, T)
    if p == 2.0:
        c0p = c0 * c0
        return min(1.0, math.sqrt(t * (1.0 - c0p) / T + c0p))
    c0p = c0**p
    return min(1.0, (t * (1.0 - c0p) / T + c0p) ** (1.0 / p))


class ScheduleKind(enum.Enum):
    LINEAR = "linear"
    ROOT = "root"


@dataclass(frozen=True)
class CompetenceSchedule:
    """A parameterized competence function; call it with a step index."""

    kind: ScheduleKind
    c0: float = DEFAULT_C0
    T: int = DEFAULT_T
    p: float = 2.0

    def __post_init__(self) -> None:
        if not (0.0 < self.c0 <= 1.0):
            raise ValidationError(f"c0 must be in (0, 1], got {self.c0}")
        if self.T < 1:
            raise ValidationError(f"T must be >= 1, got {self.T}")
        if self.kind is ScheduleKind.ROOT and self.p < 1.0:
            raise ValidationError(f"p must be >= 1, got {self.p}")

    def __call__(self, t: int) -> float:
        if t < 0:
            raise ValidationError(f"step must be >= 0, got {t}")
        if self.kind is ScheduleKind.LINEAR:
            return competence_linear(t, self.c0, self.T)
        return competence_root_p(t, self.c0, self.T, self.p)

    @property
    def name(self) -> str:
        if self.kind is ScheduleKind.LINEAR:
            return "linear"
        if self.p == 2.0:
            return "sqrt"
        return f"root-{self.p:g}"

    @staticmethod
    def linear(c0: float = DEFAULT_C0, T: int = DEFAULT_T) -> "CompetenceSchedule":
        return CompetenceSchedule(kind=ScheduleKind.LINEAR, c0=c0, T=T)

    @staticmethod
    def sqrt(c0: float = DEFAULT_C0, T: int = DEFAULT_T) -> "CompetenceSchedule":
        return CompetenceSchedule(kind=ScheduleKind.ROOT, c0=c0, T=T, p=2.0)

    @staticmethod
    def root(
        p: float, c0: float = DEFAULT_C0, T: int = DEFAULT_T
    ) -> "CompetenceSchedule":
        return CompetenceSchedule(kind=ScheduleKind.ROOT, c0=c0, T=T, p=p)

    @staticmethod
    def full() -> "CompetenceSchedule":
        """Degenerate schedule with c(t) = 1 everywhere (no curriculum)."""
        return CompetenceSchedule(kind=ScheduleKind.LINEAR, c0=1.0, T=1)


@dataclass(frozen=True)
class CurveTable:
    """(t, c(t)) rows for a family of schedules, ready for CSV or plotting."""

    columns: tuple[str, ...]  # "t" followed by one name per schedule
    rows: tuple[tuple[float, ...], ...]

    def to_csv(self) -> str:
        lines = [",".join(self.columns)]
        for row in self.rows:
            lines.append(
                ",".join([str(int(row[0]))] + [repr(v) for v in row[1:]])
            )
        return "\n".join(lines) + "\n"


def _unique_names(schedules: Sequence[CompetenceSchedule]) -> list[str]:
    names: list[str] = []
    seen: dict[str, int] = {}
    for schedule in schedules:
        name = schedule.name
        if name in seen:
            seen[name] += 1
            name = f"{name}#{seen[name]}"
        else:
            seen[name] = 1
        names.append(name)
    return names


def plot_schedules(
    schedules: Sequence[CompetenceSchedule], T_axis: int
) -> CurveTable:
    """Tabulate c(t) at integer steps 0..T_axis for each schedule."""
    if not schedules:
        raise ValidationError("at least one schedule is required")
    if T_axis < 0:
        raise ValidationError(f"T_axis must be >= 0, got {T_axis}")
    columns = ("t", *_unique_names(schedules))
    rows = tuple(
        (float(t), *(schedule(t) for schedule in schedules))
        for t in range(T_axis + 1)
    )
    return CurveTable(columns=columns, rows=rows)
