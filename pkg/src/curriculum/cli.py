"""Command-line surface: score corpora, preview schedules, emit batch
streams, run toy experiments, and benchmark scoring throughput.

Exit codes: 0 success, 1 validation error, 2 I/O or file-format error.
"""

from __future__ import annotations

import argparse
import sys
import time

from . import bench as bench_mod
from .competence import (
    DEFAULT_C0,
    DEFAULT_T,
    CompetenceSchedule,
    plot_schedules,
)
from .corpus import (
    DEFAULT_MAX_LENGTH,
    DEFAULT_MIN_COUNT,
    DEFAULT_VOCAB_SIZE,
    Corpus,
    build_vocabulary,
    ingest,
    ingest_tsv,
    write_vocabulary,
)
from .difficulty import DifficultyMetric, ScoredCorpus, load_scored, save_scored
from .errors import CurriculumError, FormatError, ValidationError
from .sampler import (
    DEFAULT_TOKEN_BUDGET,
    CurriculumSampler,
    SamplerConfig,
    write_batches_binary,
    write_batches_jsonl,
)
from .toytrain import (
    SyntheticTask,
    VARIANTS,
    run_experiment,
    write_curves_csv,
    write_summary_csv,
)


def _add_corpus_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--source", help="source-side text file, one sentence per line")
    parser.add_argument("--target", help="target-side text file, aligned with --source")
    parser.add_argument("--tsv", help="single file with source<TAB>target per line")
    parser.add_argument(
        "--max-length",
        type=int,
        default=DEFAULT_MAX_LENGTH,
        help="drop pairs whose source exceeds this many tokens",
    )


def _load_corpus(args: argparse.Namespace) -> Corpus:
    if args.tsv:
        return ingest_tsv(args.tsv, max_length=args.max_length)
    if args.source and args.target:
        return ingest(args.source, args.target, max_length=args.max_length)
    raise ValidationError("provide either --tsv or both --source and --target")


def _schedule_from_args(args: argparse.Namespace) -> CompetenceSchedule:
    if args.schedule == "linear":
        return CompetenceSchedule.linear(c0=args.c0, T=args.T)
    if args.schedule == "sqrt":
        return CompetenceSchedule.sqrt(c0=args.c0, T=args.T)
    if args.schedule == "root":
        return CompetenceSchedule.root(args.p, c0=args.c0, T=args.T)
    raise ValidationError(f"unknown schedule kind {args.schedule!r}")


def cmd_score(args: argparse.Namespace) -> int:
    parse_start = time.perf_counter()
    corpus = _load_corpus(args)
    parse_seconds = time.perf_counter() - parse_start
    metric = DifficultyMetric.by_name(
        args.metric, vocab_size=args.vocab_size, min_count=args.min_count
    )
    report, scored = bench_mod.bench_scoring(corpus, metric)
    save_scored(scored, args.output)
    if args.write_vocab:
        vocab = build_vocabulary(
            corpus, max_size=args.vocab_size, min_count=args.min_count
        )
        write_vocabulary(vocab, args.write_vocab)
        print(f"wrote {args.write_vocab}")
    print(f"M={corpus.M} metric={metric.name} -> {args.output}")
    print(
        f"scoring throughput: {report.scoring_sentences_per_sec:,.0f} sentences/sec"
        f" (excluding file parsing; {report.end_to_end_sentences_per_sec:,.0f}"
        f" incl. corpus stats and cdf; parse {parse_seconds:.3f}s)"
    )
    print(f"peak memory estimate: {report.peak_rss / 2**30:.2f} GiB")
    if args.plot:
        _plot_score_distribution(scored, args.plot)
        print(f"wrote {args.plot}")
    return 0


def _plot_score_distribution(scored: ScoredCorpus, path: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    order = scored.order
    fig, (left, right) = plt.subplots(1, 2, figsize=(10, 4))
    left.hist(scored.raw, bins=50)
    left.set_xlabel(f"difficulty ({scored.metric_name})")
    left.set_ylabel("samples")
    left.set_title("histogram")
    right.plot(scored.raw[order], scored.cdf[order])
    right.set_xlabel(f"difficulty ({scored.metric_name})")
    right.set_ylabel("CDF")
    right.set_title("empirical CDF")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def cmd_schedule(args: argparse.Namespace) -> int:
    if args.schedule == "default-family":
        schedules = [
            CompetenceSchedule.linear(c0=args.c0, T=args.T),
            CompetenceSchedule.sqrt(c0=args.c0, T=args.T),
            CompetenceSchedule.root(3.0, c0=args.c0, T=args.T),
            CompetenceSchedule.root(5.0, c0=args.c0, T=args.T),
            CompetenceSchedule.root(10.0, c0=args.c0, T=args.T),
        ]
    else:
        schedules = [_schedule_from_args(args)]
    t_axis = args.t if args.t is not None else max(s.T for s in schedules)
    table = plot_schedules(schedules, t_axis)
    csv_text = table.to_csv()
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fp:
            fp.write(csv_text)
        print(f"wrote {args.output}")
    else:
        sys.stdout.write(csv_text)
    if args.plot:
        _plot_curve_table(table, args.plot)
        print(f"wrote {args.plot}")
    return 0


def _plot_curve_table(table, path: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    steps = [row[0] for row in table.rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    for column in range(1, len(table.columns)):
        ax.plot(steps, [row[column] for row in table.rows], label=table.columns[column])
    ax.set_xlabel("t")
    ax.set_ylabel("competence")
    ax.set_ylim(0.0, 1.05)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def cmd_sample(args: argparse.Namespace) -> int:
    scored = load_scored(args.scored)
    corpus = _load_corpus(args)
    if corpus.M != scored.M:
        raise ValidationError(
            f"corpus has {corpus.M} samples but scored file declares {scored.M}; "
            "use the same inputs and --max-length as the score run"
        )
    costs = [sample.token_cost for sample in corpus.samples]
    config = SamplerConfig(
        schedule=_schedule_from_args(args),
        token_budget=args.token_budget,
        seed=args.seed,
        min_pool=args.min_pool,
    )
    sampler = CurriculumSampler(scored, config, costs=costs)
    batches = []
    log_rows = []
    for _ in range(args.steps):
        batch = sampler.next_batch()
        batches.append(batch)
        if args.log:
            pool, _ = sampler.pool_size(batch.competence_at_draw)
            log_rows.append((batch, pool))
    if args.format == "jsonl":
        if args.output == "-":
            write_batches_jsonl(batches, sys.stdout)
        else:
            with open(args.output, "w", encoding="utf-8") as fp:
                write_batches_jsonl(batches, fp)
    else:
        if args.output == "-":
            raise ValidationError("binary streams require --output FILE")
        with open(args.output, "wb") as fp:
            write_batches_binary(batches, fp)
    if args.output != "-":
        print(f"wrote {args.steps} batches to {args.output}")
    if args.log:
        from .sampler import LogRow, RunLog

        log = RunLog(
            rows=[
                LogRow(
                    t=batch.step,
                    competence=batch.competence_at_draw,
                    pool_size=pool,
                    batch_tokens=batch.token_count,
                    clamped=batch.clamped,
                )
                for batch, pool in log_rows
            ]
        )
        log.write_csv(args.log)
        print(f"wrote {args.log}")
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    task = SyntheticTask(
        vocab_size=args.task_vocab,
        zipf_exponent=args.zipf,
        sentence_length_range=(args.min_len, args.max_len),
        M=args.corpus_size,
        heldout_m=args.heldout,
        seed=args.seed,
    )
    variants = args.variants.split(",") if args.variants else list(VARIANTS)
    seeds = list(range(args.seed, args.seed + args.seeds))
    result = run_experiment(
        task,
        variants=variants,
        steps=args.steps,
        eval_every=args.eval_every,
        seeds=seeds,
        token_budget=args.token_budget,
        c0=args.c0,
        fraction=args.fraction,
        learning_rate=args.lr,
        T=args.T,
    )
    curves_path = f"{args.outdir}/curves.csv"
    summary_path = f"{args.outdir}/summary.csv"
    write_curves_csv(result, curves_path)
    write_summary_csv(result, summary_path)
    warn = "" if result.t_selection.reached else " (threshold never reached)"
    print(f"T={result.T}{warn}")
    for row in result.summary:
        print(
            f"{row.variant}: final={row.final_metric:.4f}"
            f" relative_time={row.relative_time:.3f}"
        )
    print(f"wrote {curves_path} and {summary_path}")
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    metrics = (
        [DifficultyMetric.length(), DifficultyMetric.rarity()]
        if args.metric == "both"
        else [DifficultyMetric.by_name(args.metric)]
    )
    corpus = bench_mod.synthetic_corpus(args.sentences, seed=args.seed)
    reports = []
    for metric in metrics:
        report, _ = bench_mod.bench_scoring(corpus, metric)
        reports.append(report)
        sys.stdout.write(report.format())
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fp:
            for report in reports:
                fp.write(report.format())
        print(f"wrote {args.output}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curriculum",
        description="Difficulty-scored, competence-gated training data pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="score a corpus and write difficulty CDF ranks")
    _add_corpus_args(p)
    p.add_argument("--metric", choices=["length", "rarity"], default="length")
    p.add_argument("--vocab-size", type=int, default=DEFAULT_VOCAB_SIZE)
    p.add_argument("--min-count", type=int, default=DEFAULT_MIN_COUNT)
    p.add_argument("--output", required=True, help="scored-corpus output path")
    p.add_argument("--plot", help="optional histogram + CDF plot (PNG)")
    p.add_argument("--write-vocab", help="optional vocabulary file (token<TAB>count)")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("schedule", help="tabulate competence schedules")
    p.add_argument(
        "--kind",
        dest="schedule",
        choices=["linear", "sqrt", "root", "default-family"],
        default="default-family",
    )
    p.add_argument("--c0", type=float, default=DEFAULT_C0)
    p.add_argument("--T", type=int, default=DEFAULT_T)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--t", type=int, default=None, help="last step to tabulate")
    p.add_argument("--output", help="CSV output path (default: stdout)")
    p.add_argument("--plot", help="optional curve plot (PNG)")
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("sample", help="emit a batch stream from a scored corpus")
    p.add_argument("--scored", required=True, help="scored-corpus file from `score`")
    _add_corpus_args(p)
    p.add_argument(
        "--schedule", choices=["linear", "sqrt", "root"], default="sqrt"
    )
    p.add_argument("--c0", type=float, default=DEFAULT_C0)
    p.add_argument("--T", type=int, default=DEFAULT_T)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--token-budget", type=int, default=DEFAULT_TOKEN_BUDGET)
    p.add_argument("--min-pool", type=int, default=1)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--output", default="-", help="stream path, '-' for stdout")
    p.add_argument("--format", choices=["jsonl", "binary"], default="jsonl")
    p.add_argument("--log", help="optional run-log CSV path")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("train", help="run the toy curriculum experiment")
    p.add_argument("--task-vocab", type=int, default=100)
    p.add_argument("--zipf", type=float, default=1.0)
    p.add_argument("--min-len", type=int, default=2)
    p.add_argument("--max-len", type=int, default=20)
    p.add_argument("--corpus-size", type=int, default=10_000)
    p.add_argument("--heldout", type=int, default=1_000)
    p.add_argument("--variants", help=f"comma list from {','.join(VARIANTS)}")
    p.add_argument("--seeds", type=int, default=1, help="number of seeds")
    p.add_argument("--seed", type=int, default=0, help="first seed")
    p.add_argument("--steps", type=int, default=600)
    p.add_argument("--eval-every", type=int, default=20)
    p.add_argument("--token-budget", type=int, default=DEFAULT_TOKEN_BUDGET)
    p.add_argument("--c0", type=float, default=DEFAULT_C0)
    p.add_argument("--fraction", type=float, default=0.9)
    p.add_argument("--lr", type=float, default=2.0)
    p.add_argument("--T", type=int, default=None)
    p.add_argument("--outdir", default=".")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("bench", help="benchmark scoring throughput and memory")
    p.add_argument("--sentences", type=int, default=1_000_000)
    p.add_argument("--metric", choices=["length", "rarity", "both"], default="both")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", help="optional report path")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CurriculumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
