/**
 * Warm-start transfer with selective re-initialization.
 *
 * Embeddings (token, positional, untied head) are always drawn fresh:
 * the target stage usually has a different vocabulary, and transferring
 * everything except the embedding stack is the default protocol. The
 * mask names additional component groups to reset; "all" resets every
 * group, which makes the transfer equal a scratch initialization.
 */

import { Checkpoint } from "./checkpoint.js";
import { COMPONENTS, Component, ModelConfig, Params, componentOf, initParams } from "./model.js";
import { Rng, STREAM_INIT, mix64 } from "./rng.js";

export type ReinitMask = ReadonlySet<Component>;

export class MaskError extends Error {}

/** Parse mask names; "all" expands to every component. */
export function parseMask(names: Iterable<string>): Set<Component> {
  const mask = new Set<Component>();
  for (const raw of names) {
    const name = raw.trim().toLowerCase();
    if (name === "") continue;
    if (name === "all") {
      for (const c of COMPONENTS) mask.add(c);
      continue;
    }
    if (!(COMPONENTS as readonly string[]).includes(name)) {
      throw new MaskError(`unknown reinit component "${raw}"; expected ${COMPONENTS.join(", ")} or all`);
    }
    mask.add(name as Component);
  }
  return mask;
}

/** Components that end up freshly initialized: the mask plus embeddings. */
export function effectiveComponents(mask: ReinitMask): Set<Component> {
  return new Set<Component>([...mask, "embeddings"]);
}

/** Scratch initialization as a pure function of the run seed. */
export function freshParams(cfg: ModelConfig, seed: bigint | number): Params {
  return initParams(cfg, new Rng(mix64(BigInt(seed), STREAM_INIT)));
}

/**
 * Build stage-2 parameters from a checkpoint: fresh init everywhere,
 * then copy back every parameter whose component is neither masked nor
 * an embedding. The fresh draw uses the same stream as a scratch run
 * with this seed, so mask = all reproduces scratch exactly.
 */
export function transferParams(
  ckpt: Checkpoint,
  targetCfg: ModelConfig,
  mask: ReinitMask,
  seed: bigint | number,
): Params {
  const src = ckpt.model;
  for (const field of ["nLayer", "nHead", "nEmbd", "tieWeights"] as const) {
    if (src[field] !== targetCfg[field]) {
      throw new MaskError(
        `checkpoint ${field}=${src[field]} does not match target ${field}=${targetCfg[field]}`,
      );
    }
  }
  const reset = effectiveComponents(mask);
  const params = freshParams(targetCfg, seed);
  for (const [name, t] of params) {
    if (reset.has(componentOf(name))) continue;
    const old = ckpt.params.get(name);
    if (old === undefined) throw new MaskError(`checkpoint missing parameter ${name}`);
    if (old.rows !== t.rows || old.cols !== t.cols) {
      throw new MaskError(
        `parameter ${name} is ${old.rows}x${old.cols} in checkpoint, ${t.rows}x${t.cols} in target`,
      );
    }
    t.data.set(old.data);
  }
  return params;
}

/**
 * Audit a transfer: every non-reset parameter must be bit-identical to
 * the checkpoint. Reset parameters are only listed; freshness there is
 * a distributional property (norm gains re-init to ones, which an
 * untrained checkpoint also holds), so equality is not an error.
 */
export function verifyTransfer(
  ckpt: Checkpoint,
  params: Params,
  mask: ReinitMask,
): { preserved: string[]; reinitialized: string[] } {
  const reset = effectiveComponents(mask);
  const preserved: string[] = [];
  const reinitialized: string[] = [];
  for (const [name, t] of params) {
    if (reset.has(componentOf(name))) {
      reinitialized.push(name);
      continue;
    }
    const old = ckpt.params.get(name);
    if (old === undefined || old.size !== t.size) {
      throw new MaskError(`parameter ${name} not comparable with checkpoint`);
    }
    const a = new Uint8Array(t.data.buffer, t.data.byteOffset, 8 * t.size);
    const b = new Uint8Array(old.data.buffer, old.data.byteOffset, 8 * old.size);
    for (let i = 0; i < a.length; i++) {
      if (a[i] !== b[i]) throw new MaskError(`parameter ${name} changed despite being outside the mask`);
    }
    preserved.push(name);
  }
  return { preserved, reinitialized };
}
