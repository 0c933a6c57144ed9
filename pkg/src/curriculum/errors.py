"""Exception hierarchy shared across the pipeline.

Validation failures (bad arguments, malformed configuration, precondition
violations) map to CLI exit code 1; file-format and I/O failures map to
exit code 2.
"""


class CurriculumError(Exception):
    """Base class for all pipeline errors."""


class ValidationError(CurriculumError, ValueError):
    """Invalid argument, configuration, or precondition violation."""


class AlignmentError(ValidationError):
    """Source and target files disagree on line count."""


class EmptyCorpusError(ValidationError):
    """No samples survived ingestion filtering."""


class InvalidFrequencyError(ValidationError):
    """A token resolved to a zero or missing relative frequency."""


class InvalidScoreError(ValidationError):
    """A difficulty score is NaN or infinite."""


class BudgetError(ValidationError):
    """The token budget cannot fit the first drawn sample of a batch."""

    def __init__(self, sample_id: int, cost: int, budget: int):
        self.sample_id = sample_id
        self.cost = cost
        self.budget = budget
        super().__init__(
            f"sample {sample_id} costs {cost} tokens, exceeding the "
            f"token budget of {budget}"
        )


class FormatError(CurriculumError):
    """A file does not conform to its documented format."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class TrainerError(CurriculumError):
    """The trainer callback raised during a curriculum run."""

    def __init__(self, step: int, cause: BaseException):
        self.step = step
        super().__init__(f"trainer callback failed at step {step}: {cause!r}")
