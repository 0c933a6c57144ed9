"""Competence-based curriculum data pipeline.

Scores training samples by difficulty, ranks them by empirical CDF, and
serves competence-gated, token-budgeted batches to a trainer callback.
"""

from .competence import CompetenceSchedule, competence_linear, competence_root_p, plot_schedules
from .corpus import (
    Corpus,
    FrequencyTable,
    ParallelSample,
    Vocabulary,
    build_vocabulary,
    corpus_from_pairs,
    frequency_table,
    ingest,
    ingest_tsv,
    write_vocabulary,
)
from .difficulty import (
    DifficultyMetric,
    ScoredCorpus,
    ScoredSample,
    compute_cdf,
    load_scored,
    save_scored,
    score_corpus,
    score_length,
    score_rarity,
)
from .errors import (
    AlignmentError,
    BudgetError,
    CurriculumError,
    EmptyCorpusError,
    FormatError,
    InvalidFrequencyError,
    InvalidScoreError,
    TrainerError,
    ValidationError,
)
from .sampler import (
    Batch,
    CurriculumSampler,
    RunLog,
    SamplerConfig,
    SplitMix64,
    eligible_pool,
    run_curriculum,
)
from .toytrain import (
    SyntheticTask,
    ToyModel,
    generate_task,
    noam_lr,
    run_experiment,
    select_T,
    sgd_step,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
