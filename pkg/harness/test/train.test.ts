import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import { Graph } from "../src/autograd.js";
import { loadCheckpoint, saveCheckpoint } from "../src/checkpoint.js";
import { readCurve } from "../src/curves.js";
import { ShardReader } from "../src/shard.js";
import { ModelConfig, forwardLoss } from "../src/model.js";
import { AdamW, DEFAULT_OPTIM } from "../src/optim.js";
import { freshParams, parseMask } from "../src/reinit.js";
import { StageOptions, prePreTrain, preTrain } from "../src/train.js";
import { FIXTURES, tempDir } from "./helpers.js";

const N2 = join(FIXTURES, "n2.ncat");

function microOptions(dir: string, name: string, seed = 0): StageOptions {
  return {
    model: { contextLength: 32, nLayer: 1, nHead: 2, nEmbd: 32, tieWeights: true },
    optim: { ...DEFAULT_OPTIM, lrMax: 3e-3, lrMin: 3e-4 },
    batchSize: 4,
    totalTokens: 5000,
    evalEvery: 10,
    evalWindows: 4,
    seed,
    label: name,
    curvePath: join(dir, `${name}.jsonl`),
  };
}

describe("single-batch overfit", () => {
  it("drives the loss toward zero on one repeated window", () => {
    const cfg: ModelConfig = {
      vocabSize: 10,
      contextLength: 16,
      nLayer: 1,
      nHead: 2,
      nEmbd: 16,
      tieWeights: true,
    };
    const params = freshParams(cfg, 3);
    const inputs = Int32Array.from({ length: 16 }, (_, i) => i % 8);
    const targets = Int32Array.from({ length: 16 }, (_, i) => (i + 1) % 8);
    const opt = new AdamW({ ...DEFAULT_OPTIM, lrMax: 1e-2, lrMin: 1e-2, totalSteps: 60 });
    const losses: number[] = [];
    for (let s = 0; s < 60; s++) {
      const g = new Graph(true);
      const loss = forwardLoss(g, params, cfg, inputs, targets);
      losses.push(loss.data[0]);
      g.backward(loss);
      opt.step(params);
    }
    expect(losses[0]).toBeGreaterThan(0.95 * Math.log(10));
    expect(losses[0]).toBeLessThan(1.05 * Math.log(10));
    expect(losses[59]).toBeLessThan(0.1 * losses[0]);
    // the trend is monotone even if single steps wobble
    expect(losses[20]).toBeLessThan(losses[0]);
    expect(losses[40]).toBeLessThan(losses[20]);
    expect(losses[59]).toBeLessThan(losses[40]);
  });
});

describe("prePreTrain", () => {
  it("trains on a shard and leaves a tagged checkpoint", () => {
    const dir = tempDir("train-");
    const ckptPath = join(dir, "stage1.nckp");
    const result = prePreTrain({
      ...microOptions(dir, "s1"),
      shardPaths: [N2],
      checkpointPath: ckptPath,
    });

    // 5000 tokens at 4 windows x 32 tokens per step
    expect(result.stepsDone).toBe(40);
    expect(result.tokensSeen).toBe(40 * 128);
    expect(result.paramCount).toBeGreaterThan(0);
    expect(result.initialValLoss).toBeGreaterThan(0.95 * Math.log(18));
    expect(result.initialValLoss).toBeLessThan(1.05 * Math.log(18));
    expect(result.finalValLoss).toBeLessThan(result.initialValLoss);

    const curve = readCurve(result.curvePath);
    expect(curve.stage).toBe("pre-pre-training");
    expect(curve.label).toBe("s1");
    expect(curve.tokens[0]).toBe(0);
    expect(curve.tokens).toHaveLength(5);
    for (let i = 1; i < curve.tokens.length; i++) {
      expect(curve.tokens[i]).toBe(128 * 10 * i);
      expect(curve.losses[i]).toBeGreaterThan(0);
    }

    const ckpt = loadCheckpoint(ckptPath);
    expect(ckpt.model.vocabSize).toBe(18);
    expect(ckpt.tags.stage).toBe("pre-pre-training");
    expect(ckpt.tags.seed).toBe(0);
    expect(ckpt.tags.stepsDone).toBe(40);
    expect(ckpt.tags.shardHash).toBe(new ShardReader(N2).headerHash);
  });

  it("is bit-reproducible for a fixed seed", () => {
    const dir = tempDir("train-");
    const run = (name: string, seed: number) =>
      prePreTrain({
        ...microOptions(dir, name, seed),
        totalTokens: 2000,
        shardPaths: [N2],
        checkpointPath: join(dir, `${name}.nckp`),
      });
    const a = run("a", 7);
    const b = run("b", 7);
    const c = run("c", 8);
    expect(a.finalValLoss).toBe(b.finalValLoss);
    const stripHeader = (p: string) => readFileSync(p, "utf8").split("\n").slice(1).join("\n");
    expect(stripHeader(a.curvePath)).toBe(stripHeader(b.curvePath));
    expect(stripHeader(a.curvePath)).not.toBe(stripHeader(c.curvePath));
    // checkpoints agree except for the label-free tags
    const pa = loadCheckpoint(join(dir, "a.nckp"));
    const pb = loadCheckpoint(join(dir, "b.nckp"));
    for (const [name, t] of pa.params) {
      const u = pb.params.get(name)!;
      for (let i = 0; i < t.size; i++) expect(Object.is(t.data[i], u.data[i])).toBe(true);
    }
  });

  it("rejects shard sets with mixed vocabularies", () => {
    const dir = tempDir("train-");
    expect(() =>
      prePreTrain({
        ...microOptions(dir, "bad"),
        shardPaths: [N2, join(FIXTURES, "n10.ncat")],
        checkpointPath: join(dir, "bad.nckp"),
      }),
    ).toThrow(/vocab mismatch/);
  });
});

describe("preTrain", () => {
  const text = Buffer.from("abcdefgh".repeat(1500), "latin1");

  it("from scratch learns a cyclic byte stream", () => {
    const dir = tempDir("train-");
    const result = preTrain(
      {
        ...microOptions(dir, "scratch"),
        model: { contextLength: 16, nLayer: 1, nHead: 2, nEmbd: 32, tieWeights: true },
        totalTokens: 4000,
        corpus: text,
      },
      { kind: "scratch" },
    );
    expect(result.initialValLoss).toBeGreaterThan(0.95 * Math.log(256));
    expect(result.initialValLoss).toBeLessThan(1.05 * Math.log(256));
    expect(result.finalValLoss).toBeLessThan(3.0);
    expect(readCurve(result.curvePath).stage).toBe("pre-training");
    expect(result.checkpointPath).toBeUndefined();
  });

  it("warm-starts from a stage-one checkpoint", () => {
    const dir = tempDir("train-");
    const ckptPath = join(dir, "stage1.nckp");
    prePreTrain({
      ...microOptions(dir, "s1"),
      totalTokens: 2000,
      shardPaths: [N2],
      checkpointPath: ckptPath,
    });
    const result = preTrain(
      {
        ...microOptions(dir, "warm"),
        totalTokens: 2000,
        corpus: text,
        checkpointPath: join(dir, "stage2.nckp"),
      },
      { kind: "transfer", checkpoint: ckptPath, mask: parseMask(["layernorm"]) },
    );
    expect(Number.isFinite(result.finalValLoss)).toBe(true);
    expect(result.finalValLoss).toBeLessThan(result.initialValLoss);
    const stage2 = loadCheckpoint(result.checkpointPath!);
    expect(stage2.model.vocabSize).toBe(256);
    expect(stage2.tags.stage).toBe("pre-training");
  });
});

describe("checkpoint round-trip", () => {
  it("preserves every bit, the config, and the tags", () => {
    const dir = tempDir("ckpt-");
    const cfg: ModelConfig = {
      vocabSize: 18,
      contextLength: 8,
      nLayer: 2,
      nHead: 2,
      nEmbd: 8,
      tieWeights: false,
    };
    const params = freshParams(cfg, 5);
    // exercise subnormals and negatives, not just init-range values
    params.get("wte")!.data[0] = -0;
    params.get("wte")!.data[1] = 5e-324;
    params.get("wte")!.data[2] = -1.7976931348623157e308;
    const path = join(dir, "model.nckp");
    saveCheckpoint(path, cfg, params, { stage: "test", seed: 5 });
    const loaded = loadCheckpoint(path);
    expect(loaded.model).toEqual(cfg);
    expect(loaded.tags).toEqual({ stage: "test", seed: 5 });
    expect([...loaded.params.keys()]).toEqual([...params.keys()]);
    for (const [name, t] of params) {
      const u = loaded.params.get(name)!;
      expect(u.rows).toBe(t.rows);
      expect(u.cols).toBe(t.cols);
      for (let i = 0; i < t.size; i++) {
        expect(Object.is(t.data[i], u.data[i])).toBe(true);
      }
    }
  });
});
