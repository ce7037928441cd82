/**
 * Decoder-only transformer (pre-norm residual blocks, learned positions,
 * optional weight tying between the token embedding and the output head).
 *
 * Parameters live in an insertion-ordered Map keyed by dotted names like
 * "h0.attn.wq"; the name prefix decides which re-initialization component
 * a parameter belongs to, and checkpoints serialize the Map in order.
 */

import { Graph, Tensor } from "./autograd.js";
import { Rng } from "./rng.js";

export interface ModelConfig {
  vocabSize: number;
  contextLength: number;
  nLayer: number;
  nHead: number;
  nEmbd: number;
  tieWeights: boolean;
}

export type Params = Map<string, Tensor>;

export const COMPONENTS = ["embeddings", "attention", "mlp", "layernorm"] as const;
export type Component = (typeof COMPONENTS)[number];

export function validateConfig(cfg: ModelConfig): void {
  if (cfg.contextLength < 1 || cfg.contextLength > 1024) {
    throw new Error(`contextLength must be in 1..1024, got ${cfg.contextLength}`);
  }
  if (cfg.nEmbd % cfg.nHead !== 0) {
    throw new Error(`nEmbd ${cfg.nEmbd} not divisible by nHead ${cfg.nHead}`);
  }
  if (cfg.vocabSize < 2 || cfg.nLayer < 1) {
    throw new Error("vocabSize must be >= 2 and nLayer >= 1");
  }
}

/** Which reinit component a parameter name belongs to. */
export function componentOf(name: string): Component {
  if (name === "wte" || name === "wpe" || name === "lmHead") return "embeddings";
  if (name.includes(".attn.")) return "attention";
  if (name.includes(".mlp.")) return "mlp";
  if (name.includes(".ln1.") || name.includes(".ln2.") || name.startsWith("lnf.")) {
    return "layernorm";
  }
  throw new Error(`parameter ${name} belongs to no component`);
}

function gaussian(rng: Rng, rows: number, cols: number, std: number): Tensor {
  const t = new Tensor(rows, cols);
  for (let i = 0; i < t.size; i++) t.data[i] = rng.gauss(0, std);
  return t;
}

function ones(cols: number): Tensor {
  const t = new Tensor(1, cols);
  t.data.fill(1);
  return t;
}

/**
 * Fresh parameters. Residual-branch output projections are scaled down
 * by 1/sqrt(2*nLayer) so activations stay O(1) as depth grows.
 */
export function initParams(cfg: ModelConfig, rng: Rng): Params {
  validateConfig(cfg);
  const C = cfg.nEmbd;
  const resStd = 0.02 / Math.sqrt(2 * cfg.nLayer);
  const p: Params = new Map();
  p.set("wte", gaussian(rng, cfg.vocabSize, C, 0.02));
  p.set("wpe", gaussian(rng, cfg.contextLength, C, 0.01));
  for (let l = 0; l < cfg.nLayer; l++) {
    const h = `h${l}`;
    p.set(`${h}.ln1.g`, ones(C));
    p.set(`${h}.ln1.b`, new Tensor(1, C));
    for (const w of ["wq", "wk", "wv"]) {
      p.set(`${h}.attn.${w}`, gaussian(rng, C, C, 0.02));
      p.set(`${h}.attn.${w.replace("w", "b")}`, new Tensor(1, C));
    }
    p.set(`${h}.attn.wo`, gaussian(rng, C, C, resStd));
    p.set(`${h}.attn.bo`, new Tensor(1, C));
    p.set(`${h}.ln2.g`, ones(C));
    p.set(`${h}.ln2.b`, new Tensor(1, C));
    p.set(`${h}.mlp.w1`, gaussian(rng, C, 4 * C, 0.02));
    p.set(`${h}.mlp.b1`, new Tensor(1, 4 * C));
    p.set(`${h}.mlp.w2`, gaussian(rng, 4 * C, C, resStd));
    p.set(`${h}.mlp.b2`, new Tensor(1, C));
  }
  p.set("lnf.g", ones(C));
  p.set("lnf.b", new Tensor(1, C));
  if (!cfg.tieWeights) p.set("lmHead", gaussian(rng, cfg.vocabSize, C, 0.02));
  return p;
}

export function countParams(params: Params): number {
  let total = 0;
  for (const t of params.values()) total += t.size;
  return total;
}

/** Next-token logits, one row per input position. */
export function forwardLogits(
  g: Graph,
  params: Params,
  cfg: ModelConfig,
  inputs: Int32Array,
): Tensor {
  const T = inputs.length;
  if (T > cfg.contextLength) throw new Error(`window ${T} exceeds context ${cfg.contextLength}`);
  const P = (name: string): Tensor => {
    const t = params.get(name);
    if (t === undefined) throw new Error(`missing parameter ${name}`);
    return t;
  };
  const H = cfg.nHead;
  const D = cfg.nEmbd / H;
  const positions = new Int32Array(T);
  for (let t = 0; t < T; t++) positions[t] = t;

  let x = g.add(g.embed(P("wte"), inputs), g.embed(P("wpe"), positions));
  for (let l = 0; l < cfg.nLayer; l++) {
    const h = `h${l}`;
    const normed = g.layerNorm(x, P(`${h}.ln1.g`), P(`${h}.ln1.b`));
    const q = g.addRow(g.matmul(normed, P(`${h}.attn.wq`)), P(`${h}.attn.bq`));
    const k = g.addRow(g.matmul(normed, P(`${h}.attn.wk`)), P(`${h}.attn.bk`));
    const v = g.addRow(g.matmul(normed, P(`${h}.attn.wv`)), P(`${h}.attn.bv`));
    const heads: Tensor[] = [];
    for (let hd = 0; hd < H; hd++) {
      const qh = g.sliceCols(q, hd * D, D);
      const kh = g.sliceCols(k, hd * D, D);
      const vh = g.sliceCols(v, hd * D, D);
      const scores = g.scale(g.matmulT(qh, kh), 1 / Math.sqrt(D));
      heads.push(g.matmul(g.causalSoftmax(scores), vh));
    }
    const attnOut = g.addRow(g.matmul(g.concatCols(heads), P(`${h}.attn.wo`)), P(`${h}.attn.bo`));
    x = g.add(x, attnOut);
    const normed2 = g.layerNorm(x, P(`${h}.ln2.g`), P(`${h}.ln2.b`));
    const mid = g.gelu(g.addRow(g.matmul(normed2, P(`${h}.mlp.w1`)), P(`${h}.mlp.b1`)));
    const mlpOut = g.addRow(g.matmul(mid, P(`${h}.mlp.w2`)), P(`${h}.mlp.b2`));
    x = g.add(x, mlpOut);
  }
  x = g.layerNorm(x, P("lnf.g"), P("lnf.b"));
  return g.matmulT(x, cfg.tieWeights ? P("wte") : P("lmHead"));
}

/** Mean next-token cross-entropy loss for one window. */
export function forwardLoss(
  g: Graph,
  params: Params,
  cfg: ModelConfig,
  inputs: Int32Array,
  targets: Int32Array,
): Tensor {
  if (targets.length !== inputs.length) throw new Error("inputs/targets length mismatch");
  return g.crossEntropy(forwardLogits(g, params, cfg, inputs), targets);
}
