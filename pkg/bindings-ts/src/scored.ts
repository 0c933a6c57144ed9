import { readFileSync } from "node:fs";

/** Raised when a scored-corpus file does not match its documented format. */
export class ScoredFormatError extends Error {
  constructor(
    message: string,
    readonly line?: number,
  ) {
    super(line === undefined ? message : `line ${line}: ${message}`);
    this.name = "ScoredFormatError";
  }
}

/**
 * Read-only view of a scored corpus: columnar typed arrays plus the
 * canonical easiest-first permutation (ascending cdf, ties by ascending
 * id) that gated sampling indexes into.  Per-record overhead is zero;
 * memory is three typed arrays regardless of batch count.
 */
export interface ScoredView {
  metric: string;
  M: number;
  raw: Float64Array;
  cdf: Float64Array;
  /** Sample ids sorted by (cdf, id) ascending. */
  order: Int32Array;
  /** cdf values in `order` order (ascending). */
  sortedCdf: Float64Array;
}

const HEADER = /^# metric=(\S+) M=(\d+)$/;

/** Parse a scored-corpus file written by the core `score` command. */
export function loadScored(path: string): ScoredView {
  const text = readFileSync(path, "utf-8");
  const lines = text.split("\n");
  const headerMatch = HEADER.exec(lines[0]);
  if (!headerMatch) {
    throw new ScoredFormatError("missing scored-corpus header", 1);
  }
  const metric = headerMatch[1];
  const declaredM = Number(headerMatch[2]);
  const raw = new Float64Array(declaredM);
  const cdf = new Float64Array(declaredM);
  let count = 0;
  for (let i = 1; i < lines.length; i++) {
    const line = lines[i];
    if (line.trim() === "") continue;
    const parts = line.split("\t");
    if (parts.length !== 3) {
      throw new ScoredFormatError(
        `expected id<TAB>raw<TAB>cdf, got ${JSON.stringify(line)}`,
        i + 1,
      );
    }
    const id = Number(parts[0]);
    const rawValue = Number(parts[1]);
    const cdfValue = Number(parts[2]);
    if (!Number.isInteger(id) || Number.isNaN(rawValue) || Number.isNaN(cdfValue)) {
      throw new ScoredFormatError(
        `unparseable record ${JSON.stringify(line)}`,
        i + 1,
      );
    }
    if (id !== count) {
      throw new ScoredFormatError(
        `ids must be dense and ascending, got ${id}`,
        i + 1,
      );
    }
    if (count >= declaredM) {
      throw new ScoredFormatError(
        `more records than the declared M=${declaredM}`,
        i + 1,
      );
    }
    raw[count] = rawValue;
    cdf[count] = cdfValue;
    count++;
  }
  if (count !== declaredM) {
    throw new ScoredFormatError(
      `header declared M=${declaredM} but file has ${count} records`,
    );
  }
  const order = new Int32Array(declaredM);
  for (let i = 0; i < declaredM; i++) order[i] = i;
  // Stable total order: ascending cdf, ties by ascending id.
  const sorted = Array.from(order).sort((a, b) => cdf[a] - cdf[b] || a - b);
  order.set(sorted);
  const sortedCdf = new Float64Array(declaredM);
  for (let i = 0; i < declaredM; i++) sortedCdf[i] = cdf[order[i]];
  return { metric, M: declaredM, raw, cdf, order, sortedCdf };
}
