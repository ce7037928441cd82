import { describe, expect, it } from "vitest";
import { Graph } from "../src/autograd.js";
import {
  COMPONENTS,
  ModelConfig,
  componentOf,
  countParams,
  forwardLogits,
  forwardLoss,
  initParams,
  validateConfig,
} from "../src/model.js";
import { Rng } from "../src/rng.js";

function micro(overrides: Partial<ModelConfig> = {}): ModelConfig {
  return {
    vocabSize: 18,
    contextLength: 32,
    nLayer: 2,
    nHead: 2,
    nEmbd: 16,
    tieWeights: true,
    ...overrides,
  };
}

function randomTokens(rng: Rng, n: number, vocab: number): Int32Array {
  return Int32Array.from({ length: n }, () => rng.int(vocab));
}

describe("initParams", () => {
  it("parameter count matches the closed form", () => {
    const cfg = micro();
    const C = cfg.nEmbd;
    const perLayer =
      2 * C + // ln1
      3 * (C * C + C) + // qkv with biases
      (C * C + C) + // output projection
      2 * C + // ln2
      (C * 4 * C + 4 * C) + // mlp up
      (4 * C * C + C); // mlp down
    const expected = cfg.vocabSize * C + cfg.contextLength * C + cfg.nLayer * perLayer + 2 * C;
    expect(countParams(initParams(cfg, new Rng(0)))).toBe(expected);
    const untied = initParams(micro({ tieWeights: false }), new Rng(0));
    expect(countParams(untied)).toBe(expected + cfg.vocabSize * C);
  });

  it("is deterministic in the seed", () => {
    const a = initParams(micro(), new Rng(42));
    const b = initParams(micro(), new Rng(42));
    const c = initParams(micro(), new Rng(43));
    for (const [name, t] of a) {
      expect([...t.data]).toEqual([...b.get(name)!.data]);
    }
    expect([...a.get("wte")!.data]).not.toEqual([...c.get("wte")!.data]);
  });

  it("every parameter maps to a reinit component", () => {
    for (const tie of [true, false]) {
      for (const name of initParams(micro({ tieWeights: tie }), new Rng(1)).keys()) {
        expect(COMPONENTS).toContain(componentOf(name));
      }
    }
    expect(() => componentOf("mystery")).toThrow(/no component/);
  });

  it("weight tying removes the separate head", () => {
    expect(initParams(micro(), new Rng(0)).has("lmHead")).toBe(false);
    expect(initParams(micro({ tieWeights: false }), new Rng(0)).has("lmHead")).toBe(true);
  });
});

describe("validateConfig", () => {
  it("rejects bad geometry", () => {
    expect(() => validateConfig(micro({ contextLength: 0 }))).toThrow(/contextLength/);
    expect(() => validateConfig(micro({ contextLength: 1025 }))).toThrow(/contextLength/);
    expect(() => validateConfig(micro({ nEmbd: 15 }))).toThrow(/divisible/);
    expect(() => validateConfig(micro({ vocabSize: 1 }))).toThrow(/vocabSize/);
    expect(() => validateConfig(micro({ nLayer: 0 }))).toThrow(/vocabSize must be >= 2 and nLayer/);
  });
});

describe("initial loss", () => {
  // a fresh model should be near the uniform-prediction ceiling ln(V)
  function initialLoss(vocab: number, tie: boolean): number {
    const cfg = micro({ vocabSize: vocab, tieWeights: tie });
    const params = initParams(cfg, new Rng(7));
    const rng = new Rng(8);
    const g = new Graph(false);
    let total = 0;
    const trials = 8;
    for (let i = 0; i < trials; i++) {
      const inputs = randomTokens(rng, 32, vocab);
      const targets = randomTokens(rng, 32, vocab);
      total += forwardLoss(g, params, cfg, inputs, targets).data[0];
    }
    return total / trials;
  }

  it.each([
    [18, Math.log(18)],
    [256, Math.log(256)],
    [10002, Math.log(10002)],
  ])("vocab %i starts within 5%% of ln(V)", (vocab, lnV) => {
    const loss = initialLoss(vocab, true);
    expect(Math.abs(loss - lnV) / lnV).toBeLessThan(0.05);
  });

  it("holds untied as well", () => {
    const loss = initialLoss(256, false);
    expect(Math.abs(loss - Math.log(256)) / Math.log(256)).toBeLessThan(0.05);
  });
});

describe("forwardLoss", () => {
  it("is deterministic and positive", () => {
    const cfg = micro();
    const params = initParams(cfg, new Rng(5));
    const rng = new Rng(6);
    const inputs = randomTokens(rng, 16, cfg.vocabSize);
    const targets = randomTokens(rng, 16, cfg.vocabSize);
    const a = forwardLoss(new Graph(false), params, cfg, inputs, targets).data[0];
    const b = forwardLoss(new Graph(false), params, cfg, inputs, targets).data[0];
    expect(a).toBe(b);
    expect(a).toBeGreaterThan(0);
  });

  it("rejects windows beyond the context length", () => {
    const cfg = micro({ contextLength: 8 });
    const params = initParams(cfg, new Rng(5));
    const tokens = new Int32Array(9);
    expect(() => forwardLoss(new Graph(false), params, cfg, tokens, tokens)).toThrow(/context/);
  });

  it("later inputs do not change earlier predictions", () => {
    const cfg = micro();
    const params = initParams(cfg, new Rng(5));
    const rng = new Rng(9);
    const inputs = randomTokens(rng, 16, cfg.vocabSize);
    const mutated = inputs.slice();
    for (let i = 8; i < 16; i++) mutated[i] = (mutated[i] + 1) % cfg.vocabSize;
    const before = forwardLogits(new Graph(false), params, cfg, inputs);
    const after = forwardLogits(new Graph(false), params, cfg, mutated);
    for (let t = 0; t < 8; t++) {
      for (let v = 0; v < cfg.vocabSize; v++) expect(after.at(t, v)).toBe(before.at(t, v));
    }
    let suffixDiffers = false;
    for (let v = 0; v < cfg.vocabSize; v++) {
      if (after.at(8, v) !== before.at(8, v)) suffixDiffers = true;
    }
    expect(suffixDiffers).toBe(true);
  });
});
