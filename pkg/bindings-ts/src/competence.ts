/**
 * Competence schedules, mirroring the core implementation operation for
 * operation so the same IEEE doubles come out: the gate comparison
 * `cdf <= c(t)` feeds the reproducible batch contract.
 *
 * Boundaries are exact by construction (c0 at t <= 0, 1 at t >= T), and
 * p = 2 routes through sqrt, which is correctly rounded everywhere.  For
 * other non-integer p the pow implementations of different runtimes may
 * differ in the last ulp; linear and sqrt schedules are the fully
 * guaranteed-portable subset.
 */

export type ScheduleKind = "linear" | "sqrt" | "root";

export interface ScheduleParams {
  kind: ScheduleKind;
  /** Initial competence in (0, 1]; default 0.01. */
  c0?: number;
  /** Steps until full competence; default 1000. */
  T?: number;
  /** Root exponent (>= 1) for kind "root"; default 2. */
  p?: number;
}

export function competenceLinear(t: number, c0: number, T: number): number {
  if (t >= T) return 1;
  if (t <= 0) return c0;
  return Math.min(1, (t * (1 - c0)) / T + c0);
}

export function competenceRootP(
  t: number,
  c0: number,
  T: number,
  p: number,
): number {
  if (t >= T) return 1;
  if (t <= 0) return c0;
  if (p === 1) return competenceLinear(t, c0, T);
  if (p === 2) {
    const c0p = c0 * c0;
    return Math.min(1, Math.sqrt((t * (1 - c0p)) / T + c0p));
  }
  const c0p = Math.pow(c0, p);
  return Math.min(1, Math.pow((t * (1 - c0p)) / T + c0p, 1 / p));
}

export function makeSchedule(params: ScheduleParams): (t: number) => number {
  const c0 = params.c0 ?? 0.01;
  const T = params.T ?? 1000;
  const p = params.p ?? 2;
  if (!(c0 > 0 && c0 <= 1)) {
    throw new RangeError(`c0 must be in (0, 1], got ${c0}`);
  }
  if (!Number.isInteger(T) || T < 1) {
    throw new RangeError(`T must be a positive integer, got ${T}`);
  }
  switch (params.kind) {
    case "linear":
      return (t) => competenceLinear(t, c0, T);
    case "sqrt":
      return (t) => competenceRootP(t, c0, T, 2);
    case "root":
      if (!(p >= 1)) {
        throw new RangeError(`p must be >= 1, got ${p}`);
      }
      return (t) => competenceRootP(t, c0, T, p);
    default:
      throw new RangeError(`unknown schedule kind ${(params as any).kind}`);
  }
}
