/**
 * AdamW with decoupled weight decay, global-norm gradient clipping, and
 * a cosine learning-rate schedule with linear warmup.
 */

import { Tensor } from "./autograd.js";
import { Params } from "./model.js";

export interface OptimConfig {
  lrMax: number;
  lrMin: number;
  beta1: number;
  beta2: number;
  eps: number;
  weightDecay: number;
  gradClip: number;
  warmupFraction: number;
  totalSteps: number;
}

export const DEFAULT_OPTIM: Omit<OptimConfig, "totalSteps"> = {
  lrMax: 3e-4,
  lrMin: 3e-5,
  beta1: 0.9,
  beta2: 0.95,
  eps: 1e-8,
  weightDecay: 0.1,
  gradClip: 1.0,
  warmupFraction: 0.1,
};

/** Linear warmup to lrMax, then cosine decay to lrMin at totalSteps. */
export function learningRate(cfg: OptimConfig, step: number): number {
  const warmup = Math.max(1, Math.round(cfg.warmupFraction * cfg.totalSteps));
  if (step < warmup) return (cfg.lrMax * (step + 1)) / warmup;
  if (step >= cfg.totalSteps) return cfg.lrMin;
  const t = (step - warmup) / Math.max(1, cfg.totalSteps - warmup);
  return cfg.lrMin + 0.5 * (cfg.lrMax - cfg.lrMin) * (1 + Math.cos(Math.PI * t));
}

/** Scale all gradients so their global L2 norm is at most cfg.gradClip. */
export function clipGradients(params: Params, maxNorm: number): number {
  let sq = 0;
  for (const t of params.values()) {
    if (t.grad === null) continue;
    for (let i = 0; i < t.grad.length; i++) sq += t.grad[i] * t.grad[i];
  }
  const norm = Math.sqrt(sq);
  if (norm > maxNorm && norm > 0) {
    const s = maxNorm / norm;
    for (const t of params.values()) {
      if (t.grad === null) continue;
      for (let i = 0; i < t.grad.length; i++) t.grad[i] *= s;
    }
  }
  return norm;
}

export class AdamW {
  private readonly cfg: OptimConfig;
  private readonly m = new Map<string, Float64Array>();
  private readonly v = new Map<string, Float64Array>();
  private step_ = 0;

  constructor(cfg: OptimConfig) {
    this.cfg = cfg;
  }

  get stepCount(): number {
    return this.step_;
  }

  /** Clip, update in place, zero gradients. Returns (lr, pre-clip norm). */
  step(params: Params): { lr: number; gradNorm: number } {
    const cfg = this.cfg;
    const lr = learningRate(cfg, this.step_);
    const gradNorm = clipGradients(params, cfg.gradClip);
    this.step_ += 1;
    const bc1 = 1 - cfg.beta1 ** this.step_;
    const bc2 = 1 - cfg.beta2 ** this.step_;
    for (const [name, t] of params) {
      if (t.grad === null) continue;
      let m = this.m.get(name);
      let v = this.v.get(name);
      if (m === undefined) {
        m = new Float64Array(t.size);
        v = new Float64Array(t.size);
        this.m.set(name, m);
        this.v.set(name, v);
      }
      // decay only matrices; biases and norm gains train undamped
      const decay = t.rows > 1 && t.cols > 1 ? cfg.weightDecay : 0;
      for (let i = 0; i < t.size; i++) {
        const gr = t.grad[i];
        m[i] = cfg.beta1 * m[i] + (1 - cfg.beta1) * gr;
        v![i] = cfg.beta2 * v![i] + (1 - cfg.beta2) * gr * gr;
        const mHat = m[i] / bc1;
        const vHat = v![i] / bc2;
        t.data[i] -= lr * (mHat / (Math.sqrt(vHat) + cfg.eps) + decay * t.data[i]);
      }
      t.grad.fill(0);
    }
    return { lr, gradNorm };
  }
}
