import { SplitMix64 } from "./rng.js";
import { makeSchedule, ScheduleParams } from "./competence.js";
import { ScoredView } from "./scored.js";

export interface BatchIteratorOptions {
  schedule: ScheduleParams;
  /** 64-bit generator seed; identical seeds replay identical streams. */
  seed: number | bigint;
  /** Number of batches to yield. */
  steps: number;
  /**
   * Per-sample token cost (source + target token counts), indexed by
   * sample id.  The scored-corpus file carries no token counts, and the
   * consumer owns tokenization, so the costs travel with the consumer.
   */
  costs: ArrayLike<number>;
  /** Max summed token cost per batch; default 5120. */
  tokenBudget?: number;
  /** Lower bound on the eligible pool size; default 1. */
  minPool?: number;
}

/** Count of sortedCdf entries <= c (upper-bound binary search). */
function eligibleCount(sortedCdf: Float64Array, c: number): number {
  let lo = 0;
  let hi = sortedCdf.length;
  while (lo < hi) {
    const mid = (lo + hi) >>> 1;
    if (sortedCdf[mid] <= c) lo = mid + 1;
    else hi = mid;
  }
  return lo;
}

/**
 * Iterator over curriculum batches, yielding sample-id lists in draw
 * order, id-for-id identical to the core CLI's batch stream for the same
 * scored corpus, costs, schedule, budget, and seed.
 *
 * Single-owner: not safe to share an instance between concurrent
 * consumers.  Construction is stateless with respect to other instances;
 * two samplers with identical inputs yield identical sequences.
 */
export class BoundSampler implements IterableIterator<number[]> {
  private readonly rng: SplitMix64;
  private readonly schedule: (t: number) => number;
  private readonly costs: number[];
  private readonly budget: number;
  private readonly minPool: number;
  private readonly steps: number;
  private t = 0;
  private pending: number | null = null;
  private pendingGated = true;
  private cachedC: number | null = null;
  private cachedPool = 0;
  private cachedEligible = 0;
  exhausted = false;

  constructor(
    private readonly scored: ScoredView,
    options: BatchIteratorOptions,
  ) {
    const { steps, costs } = options;
    if (!Number.isInteger(steps) || steps < 0) {
      throw new RangeError(`steps must be >= 0, got ${steps}`);
    }
    if (costs.length !== scored.M) {
      throw new RangeError(
        `got ${costs.length} costs for ${scored.M} samples`,
      );
    }
    this.costs = Array.from(costs, (cost, i) => {
      if (!Number.isInteger(cost) || cost < 1) {
        throw new RangeError(`cost of sample ${i} must be a positive integer`);
      }
      return cost;
    });
    this.budget = options.tokenBudget ?? 5120;
    if (!Number.isInteger(this.budget) || this.budget < 1) {
      throw new RangeError(`tokenBudget must be >= 1, got ${this.budget}`);
    }
    this.minPool = options.minPool ?? 1;
    if (!Number.isInteger(this.minPool) || this.minPool < 1) {
      throw new RangeError(`minPool must be >= 1, got ${this.minPool}`);
    }
    this.schedule = makeSchedule(options.schedule);
    this.rng = new SplitMix64(options.seed);
    this.steps = steps;
  }

  private poolSize(c: number): number {
    if (c !== this.cachedC) {
      this.cachedC = c;
      this.cachedEligible = eligibleCount(this.scored.sortedCdf, c);
      this.cachedPool = Math.max(
        this.cachedEligible,
        Math.min(this.minPool, this.scored.M),
      );
    }
    return this.cachedPool;
  }

  next(): IteratorResult<number[]> {
    if (this.t >= this.steps) {
      this.exhausted = true;
      return { value: undefined, done: true };
    }
    const c = this.schedule(this.t);
    const pool = this.poolSize(c);
    const poolClamped = pool > this.cachedEligible;
    const ids: number[] = [];
    let tokens = 0;
    for (;;) {
      let sampleId: number;
      let gated: boolean;
      if (this.pending !== null) {
        sampleId = this.pending;
        gated = this.pendingGated;
        this.pending = null;
      } else {
        sampleId = this.scored.order[this.rng.nextBelow(pool)];
        gated = !poolClamped;
      }
      const cost = this.costs[sampleId];
      if (ids.length === 0) {
        if (cost > this.budget) {
          throw new RangeError(
            `sample ${sampleId} costs ${cost} tokens, exceeding the token ` +
              `budget of ${this.budget}`,
          );
        }
      } else if (tokens + cost > this.budget) {
        this.pending = sampleId;
        this.pendingGated = gated;
        break;
      }
      ids.push(sampleId);
      tokens += cost;
    }
    this.t += 1;
    return { value: ids, done: false };
  }

  [Symbol.iterator](): IterableIterator<number[]> {
    return this;
  }
}

/**
 * Batch-id iterator over a scored corpus: exactly the core's sequences.
 * Terminates after `options.steps` batches.
 */
export function batches(
  scored: ScoredView,
  options: BatchIteratorOptions,
): BoundSampler {
  return new BoundSampler(scored, options);
}
