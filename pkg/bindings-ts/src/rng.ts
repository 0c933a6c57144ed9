const MASK64 = (1n << 64n) - 1n;
const GAMMA = 0x9e3779b97f4a7c15n;
const MIX1 = 0xbf58476d1ce4e5b9n;
const MIX2 = 0x94d049bb133111ebn;

/**
 * SplitMix64 generator, bit-compatible with the core pipeline's sampler.
 *
 * Bounded draws use rejection sampling on the top range-multiple, so the
 * draw sequence for a given seed is identical to the core's.
 */
export class SplitMix64 {
  private state: bigint;

  constructor(seed: number | bigint) {
    this.state = BigInt(seed) & MASK64;
  }

  nextUint64(): bigint {
    this.state = (this.state + GAMMA) & MASK64;
    let z = this.state;
    z = ((z ^ (z >> 30n)) * MIX1) & MASK64;
    z = ((z ^ (z >> 27n)) * MIX2) & MASK64;
    return z ^ (z >> 31n);
  }

  /** Uniform integer in [0, n). */
  nextBelow(n: number): number {
    if (!Number.isInteger(n) || n <= 0) {
      throw new RangeError(`draw bound must be a positive integer, got ${n}`);
    }
    const bound = BigInt(n);
    const threshold = (1n << 64n) - ((1n << 64n) % bound);
    for (;;) {
      const value = this.nextUint64();
      if (value < threshold) {
        return Number(value % bound);
      }
    }
  }
}
