import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { loadScored, ScoredFormatError } from "../src/scored.js";

function writeScored(content: string): string {
  const dir = mkdtempSync(join(tmpdir(), "scored-"));
  const path = join(dir, "scores.tsv");
  writeFileSync(path, content, "utf-8");
  return path;
}

const SMALL = "# metric=length M=3\n0\t3\t0.666666667\n1\t1\t0.333333333\n2\t4\t1\n";

describe("loadScored", () => {
  it("parses header, raw scores and cdf", () => {
    const view = loadScored(writeScored(SMALL));
    expect(view.metric).toBe("length");
    expect(view.M).toBe(3);
    expect(view.raw).toBeInstanceOf(Float64Array);
    expect(Array.from(view.raw)).toEqual([3, 1, 4]);
    expect(view.cdf[2]).toBe(1);
  });

  it("computes the canonical easiest-first order", () => {
    const view = loadScored(writeScored(SMALL));
    expect(Array.from(view.order)).toEqual([1, 0, 2]);
    expect(Array.from(view.sortedCdf)).toEqual([
      0.333333333, 0.666666667, 1,
    ]);
  });

  it("breaks cdf ties by ascending id", () => {
    const tied = "# metric=length M=4\n0\t2\t0.5\n1\t2\t0.5\n2\t5\t1\n3\t5\t1\n";
    const view = loadScored(writeScored(tied));
    expect(Array.from(view.order)).toEqual([0, 1, 2, 3]);
  });

  it("rejects a missing header with the line number", () => {
    expect(() => loadScored(writeScored("0\t1\t1\n"))).toThrowError(
      ScoredFormatError,
    );
    try {
      loadScored(writeScored("0\t1\t1\n"));
    } catch (error) {
      expect((error as ScoredFormatError).line).toBe(1);
    }
  });

  it("rejects truncated files", () => {
    const truncated = "# metric=length M=3\n0\t3\t0.6\n1\t1\t0.3\n";
    expect(() => loadScored(writeScored(truncated))).toThrowError(
      /declared M=3 but file has 2/,
    );
  });

  it("rejects malformed records with their line number", () => {
    const bad = "# metric=length M=1\n0\tnot-a-number\t1\n";
    try {
      loadScored(writeScored(bad));
      expect.unreachable();
    } catch (error) {
      expect((error as ScoredFormatError).line).toBe(2);
    }
  });

  it("rejects non-dense ids", () => {
    const gappy = "# metric=length M=2\n0\t1\t0.5\n2\t2\t1\n";
    expect(() => loadScored(writeScored(gappy))).toThrowError(/dense/);
  });
});
