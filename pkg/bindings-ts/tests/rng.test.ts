import { describe, expect, it } from "vitest";

import { SplitMix64 } from "../src/rng.js";

describe("SplitMix64", () => {
  it("reproduces the published reference outputs for seed 0", () => {
    const rng = new SplitMix64(0);
    const values = Array.from({ length: 5 }, () => rng.nextUint64());
    expect(values).toEqual([
      0xe220a8397b1dcdafn,
      0x6e789e6aa1b965f4n,
      0x06c45d188009454fn,
      0xf88bb8a8724c81ecn,
      0x1b39896a51a8749bn,
    ]);
  });

  it("masks seeds to 64 bits like the core", () => {
    expect(new SplitMix64(1n << 64n).nextUint64()).toBe(
      new SplitMix64(0).nextUint64(),
    );
    expect(new SplitMix64(-1).nextUint64()).toBe(
      new SplitMix64((1n << 64n) - 1n).nextUint64(),
    );
  });

  it("draws bounded integers deterministically", () => {
    const a = new SplitMix64(42);
    const b = new SplitMix64(42);
    const draws = Array.from({ length: 500 }, () => a.nextBelow(7));
    expect(draws.every((v) => v >= 0 && v < 7)).toBe(true);
    expect(Array.from({ length: 500 }, () => b.nextBelow(7))).toEqual(draws);
  });

  it("rejects non-positive bounds", () => {
    expect(() => new SplitMix64(0).nextBelow(0)).toThrow(RangeError);
  });
});
