import { execFileSync } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { beforeAll, describe, expect, it } from "vitest";

import { batches } from "../src/sampler.js";
import { loadScored } from "../src/scored.js";
import { SplitMix64 } from "../src/rng.js";

const PYTHON = process.env.CURRICULUM_PYTHON ?? "python3";

function runCli(args: string[]): void {
  execFileSync(PYTHON, ["-m", "curriculum.cli", ...args], {
    stdio: ["ignore", "pipe", "pipe"],
  });
}

/** Deterministic toy corpus; same whitespace tokenization as the core. */
function makeCorpusLines(
  seedValue: number,
  lines: number,
  vocab: number,
  maxLen: number,
): string[] {
  const rng = new SplitMix64(seedValue);
  const result: string[] = [];
  for (let i = 0; i < lines; i++) {
    const length = 1 + rng.nextBelow(maxLen);
    const tokens = Array.from(
      { length },
      () => `w${rng.nextBelow(vocab)}`,
    );
    result.push(tokens.join(" "));
  }
  return result;
}

interface Fixture {
  dir: string;
  scoredPath: string;
  srcPath: string;
  tgtPath: string;
  costs: number[];
}

function buildFixture(metric: "length" | "rarity"): Fixture {
  const dir = mkdtempSync(join(tmpdir(), "parity-"));
  const srcLines = makeCorpusLines(7, 180, 30, 9);
  const tgtLines = makeCorpusLines(8, 180, 30, 7);
  const srcPath = join(dir, "src.txt");
  const tgtPath = join(dir, "tgt.txt");
  writeFileSync(srcPath, srcLines.join("\n") + "\n", "utf-8");
  writeFileSync(tgtPath, tgtLines.join("\n") + "\n", "utf-8");
  const scoredPath = join(dir, `scores-${metric}.tsv`);
  runCli([
    "score",
    "--source", srcPath,
    "--target", tgtPath,
    "--metric", metric,
    "--min-count", "1",
    "--output", scoredPath,
  ]);
  // Token cost per sample = source + target token counts, matching the
  // core's cost model (no line is empty or over-length here, so ids align
  // with line order).
  const costs = srcLines.map(
    (line, i) =>
      line.split(/\s+/).length + tgtLines[i].split(/\s+/).length,
  );
  return { dir, scoredPath, srcPath, tgtPath, costs };
}

function sampleWithCli(
  fixture: Fixture,
  args: {
    schedule: "linear" | "sqrt" | "root";
    seed: number;
    steps: number;
    tokenBudget: number;
    c0: number;
    T: number;
    p?: number;
  },
): { t: number; ids: number[] }[] {
  const out = join(
    fixture.dir,
    `stream-${args.schedule}-${args.seed}-${args.steps}.jsonl`,
  );
  runCli([
    "sample",
    "--scored", fixture.scoredPath,
    "--source", fixture.srcPath,
    "--target", fixture.tgtPath,
    "--schedule", args.schedule,
    "--c0", String(args.c0),
    "--T", String(args.T),
    ...(args.p !== undefined ? ["--p", String(args.p)] : []),
    "--seed", String(args.seed),
    "--token-budget", String(args.tokenBudget),
    "--steps", String(args.steps),
    "--output", out,
  ]);
  return readFileSync(out, "utf-8")
    .trim()
    .split("\n")
    .map((line) => JSON.parse(line));
}

describe("batch-stream parity with the core CLI", () => {
  let fixture: Fixture;

  beforeAll(() => {
    fixture = buildFixture("length");
  });

  it("replays 1000 sqrt-schedule batches id-for-id across 3 seeds", () => {
    for (const seed of [1, 42, 20240501]) {
      const expected = sampleWithCli(fixture, {
        schedule: "sqrt",
        seed,
        steps: 1000,
        tokenBudget: 64,
        c0: 0.01,
        T: 300,
      });
      const scored = loadScored(fixture.scoredPath);
      const iterator = batches(scored, {
        schedule: { kind: "sqrt", c0: 0.01, T: 300 },
        seed,
        steps: 1000,
        tokenBudget: 64,
        costs: fixture.costs,
      });
      const actual = Array.from(iterator);
      expect(actual.length).toBe(1000);
      for (let i = 0; i < expected.length; i++) {
        expect(expected[i].t).toBe(i);
        expect(actual[i]).toEqual(expected[i].ids);
      }
    }
  });

  it("matches linear schedules and other budgets too", () => {
    const expected = sampleWithCli(fixture, {
      schedule: "linear",
      seed: 9009,
      steps: 400,
      tokenBudget: 48,
      c0: 0.05,
      T: 150,
    });
    const scored = loadScored(fixture.scoredPath);
    const actual = Array.from(
      batches(scored, {
        schedule: { kind: "linear", c0: 0.05, T: 150 },
        seed: 9009,
        steps: 400,
        tokenBudget: 48,
        costs: fixture.costs,
      }),
    );
    expect(actual).toEqual(expected.map((b) => b.ids));
  });

  it("matches on rarity-scored corpora", () => {
    const rarityFixture = buildFixture("rarity");
    const expected = sampleWithCli(rarityFixture, {
      schedule: "sqrt",
      seed: 77,
      steps: 300,
      tokenBudget: 64,
      c0: 0.01,
      T: 120,
    });
    const scored = loadScored(rarityFixture.scoredPath);
    const actual = Array.from(
      batches(scored, {
        schedule: { kind: "sqrt", c0: 0.01, T: 120 },
        seed: 77,
        steps: 300,
        tokenBudget: 64,
        costs: rarityFixture.costs,
      }),
    );
    expect(actual).toEqual(expected.map((b) => b.ids));
  });
});

describe("iterator contract", () => {
  it("yields nothing for steps=0 and flags exhaustion", () => {
    const scored = loadScoredFromString(
      "# metric=length M=2\n0\t1\t0.5\n1\t2\t1\n",
    );
    const iterator = batches(scored, {
      schedule: { kind: "sqrt" },
      seed: 1,
      steps: 0,
      costs: [2, 2],
    });
    expect(Array.from(iterator)).toEqual([]);
    expect(iterator.exhausted).toBe(true);
  });

  it("is stateless across constructions: same params, same sequences", () => {
    const scored = loadScoredFromString(
      "# metric=length M=4\n0\t1\t0.25\n1\t2\t0.5\n2\t3\t0.75\n3\t4\t1\n",
    );
    const make = () =>
      Array.from(
        batches(scored, {
          schedule: { kind: "linear", c0: 0.5, T: 20 },
          seed: 5,
          steps: 50,
          tokenBudget: 16,
          costs: [2, 3, 4, 5],
        }),
      );
    expect(make()).toEqual(make());
  });

  it("validates parameters like the core", () => {
    const scored = loadScoredFromString(
      "# metric=length M=2\n0\t1\t0.5\n1\t2\t1\n",
    );
    expect(() =>
      batches(scored, {
        schedule: { kind: "sqrt" },
        seed: 1,
        steps: 1,
        costs: [2],
      }),
    ).toThrow(/costs/);
    expect(() =>
      batches(scored, {
        schedule: { kind: "sqrt" },
        seed: 1,
        steps: 1,
        costs: [2, 0],
      }),
    ).toThrow(RangeError);
    expect(() =>
      batches(scored, {
        schedule: { kind: "sqrt", c0: 2 },
        seed: 1,
        steps: 1,
        costs: [2, 2],
      }),
    ).toThrow(RangeError);
  });
});

function loadScoredFromString(content: string) {
  const dir = mkdtempSync(join(tmpdir(), "inline-scored-"));
  const path = join(dir, "scores.tsv");
  writeFileSync(path, content, "utf-8");
  return loadScored(path);
}
