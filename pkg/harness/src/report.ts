/**
 * Curve comparison arithmetic for the suite report. Mirrors the formulas
 * the corpus package's compare CLI applies to the same JSONL files, so a
 * suite report and an external comparison of the emitted curves agree.
 */

import { Curve } from "./curves.js";

/** Tokens at the first crossing of target, linearly interpolated. */
export function tokensToReach(curve: Curve, target: number, interpolate = true): number | null {
  const { tokens, losses } = curve;
  for (let i = 0; i < losses.length; i++) {
    if (losses[i] > target) continue;
    if (!interpolate || i === 0) return tokens[i];
    const t0 = tokens[i - 1], t1 = tokens[i];
    const l0 = losses[i - 1], l1 = losses[i];
    return t0 + ((t1 - t0) * (l0 - target)) / (l0 - l1);
  }
  return null;
}

/** 1 - a's total tokens over b's; b is the reference run. */
export function tokenEfficiencyGain(
  tPptA: number,
  tPtA: number,
  tPptB: number,
  tPtB: number,
): number {
  const denom = tPptB + tPtB;
  if (denom <= 0) throw new Error(`token efficiency gain needs positive reference tokens, got ${denom}`);
  return 1 - (tPptA + tPtA) / denom;
}

export function meanStd(values: number[]): { mean: number | null; std: number | null } {
  if (values.length === 0) return { mean: null, std: null };
  const mean = values.reduce((a, b) => a + b, 0) / values.length;
  if (values.length === 1) return { mean, std: 0 };
  const sq = values.reduce((a, b) => a + (b - mean) ** 2, 0);
  return { mean, std: Math.sqrt(sq / (values.length - 1)) };
}

export interface SeedComparison {
  seed: number;
  targetLoss: number;
  baselineTokens: number | null;
  candidateTokens: number | null;
  candidateReached: boolean;
  gain: number | null;
  speedup: number | null;
}

export interface ArmComparison {
  perSeed: SeedComparison[];
  summary: {
    gainMean: number | null;
    gainStd: number | null;
    speedupMean: number | null;
    speedupStd: number | null;
    seedsReached: number;
    seeds: number;
  };
}

/**
 * Seed-paired comparison of candidate pre-training curves against
 * scratch baselines. The per-seed target is the baseline's final loss;
 * candidatePptTokens is charged on top of the candidate's text tokens.
 */
export function compareArm(
  baselines: Curve[],
  candidates: Curve[],
  seeds: number[],
  candidatePptTokens: number,
): ArmComparison {
  if (baselines.length !== candidates.length || baselines.length !== seeds.length) {
    throw new Error("compareArm needs one baseline and one candidate per seed");
  }
  const perSeed: SeedComparison[] = [];
  const gains: number[] = [];
  const speedups: number[] = [];
  for (let i = 0; i < seeds.length; i++) {
    const target = baselines[i].losses[baselines[i].losses.length - 1];
    const baseTokens = tokensToReach(baselines[i], target);
    const candTokens = tokensToReach(candidates[i], target);
    const reached = candTokens !== null && baseTokens !== null;
    let gain: number | null = null;
    let speedup: number | null = null;
    if (reached) {
      gain = tokenEfficiencyGain(candidatePptTokens, candTokens!, 0, baseTokens!);
      speedup = baseTokens! / candTokens!;
      gains.push(gain);
      speedups.push(speedup);
    }
    perSeed.push({
      seed: seeds[i],
      targetLoss: target,
      baselineTokens: baseTokens,
      candidateTokens: candTokens,
      candidateReached: candTokens !== null,
      gain,
      speedup,
    });
  }
  const g = meanStd(gains);
  const s = meanStd(speedups);
  return {
    perSeed,
    summary: {
      gainMean: g.mean,
      gainStd: g.std,
      speedupMean: s.mean,
      speedupStd: s.std,
      seedsReached: gains.length,
      seeds: seeds.length,
    },
  };
}
