export { SplitMix64 } from "./rng.js";
export {
  competenceLinear,
  competenceRootP,
  makeSchedule,
  type ScheduleKind,
  type ScheduleParams,
} from "./competence.js";
export { loadScored, ScoredFormatError, type ScoredView } from "./scored.js";
export {
  batches,
  BoundSampler,
  type BatchIteratorOptions,
} from "./sampler.js";
