import { readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import { Curve, CurveWriter, readCurve } from "../src/curves.js";
import { compareArm, meanStd, tokenEfficiencyGain, tokensToReach } from "../src/report.js";
import { tempDir } from "./helpers.js";

function curve(points: Array<[number, number]>, label = "t", stage: Curve["stage"] = ""): Curve {
  return { label, stage, tokens: points.map((p) => p[0]), losses: points.map((p) => p[1]) };
}

describe("CurveWriter / readCurve", () => {
  it("round-trips records and header", () => {
    const path = join(tempDir("curve-"), "run.jsonl");
    const w = new CurveWriter(path, "nca-s0", "pre-training");
    w.append(0, 5.545, { step: 0, lr: 0 });
    w.append(1024, 4.2);
    w.append(2048, 3.9, { train_loss: 3.8 });
    const c = readCurve(path);
    expect(c.label).toBe("nca-s0");
    expect(c.stage).toBe("pre-training");
    expect(c.tokens).toEqual([0, 1024, 2048]);
    expect(c.losses).toEqual([5.545, 4.2, 3.9]);
  });

  it("ignores unknown record keys", () => {
    const path = join(tempDir("curve-"), "extra.jsonl");
    writeFileSync(
      path,
      [
        JSON.stringify({ schema: "curve.v1", label: "x", stage: "" }),
        JSON.stringify({ tokens_seen: 10, val_loss: 2.0, wallclock: 1.5, note: "hi" }),
      ].join("\n") + "\n",
    );
    const c = readCurve(path);
    expect(c.tokens).toEqual([10]);
    expect(c.losses).toEqual([2.0]);
  });

  it("rejects foreign schemas, malformed records, empty files", () => {
    const dir = tempDir("curve-");
    const bad = join(dir, "bad.jsonl");
    writeFileSync(bad, JSON.stringify({ schema: "curve.v2", label: "x" }) + "\n");
    expect(() => readCurve(bad)).toThrow(/schema/);
    const missing = join(dir, "missing.jsonl");
    writeFileSync(missing, JSON.stringify({ tokens_seen: 5 }) + "\n");
    expect(() => readCurve(missing)).toThrow(/val_loss/);
    const empty = join(dir, "empty.jsonl");
    writeFileSync(empty, JSON.stringify({ schema: "curve.v1", label: "", stage: "" }) + "\n");
    expect(() => readCurve(empty)).toThrow(/no curve records/);
  });

  it("starts a fresh file per writer", () => {
    const path = join(tempDir("curve-"), "run.jsonl");
    new CurveWriter(path, "a", "").append(1, 1);
    new CurveWriter(path, "b", "");
    expect(readFileSync(path, "utf8").split("\n").filter(Boolean)).toHaveLength(1);
  });
});

describe("tokensToReach", () => {
  const c = curve([
    [100, 4.0],
    [200, 3.0],
    [300, 2.5],
  ]);

  it("interpolates between the bracketing evaluations", () => {
    expect(tokensToReach(c, 3.5)).toBeCloseTo(150, 9);
    expect(tokensToReach(c, 2.75)).toBeCloseTo(250, 9);
  });

  it("returns the recorded point without interpolation", () => {
    expect(tokensToReach(c, 3.5, false)).toBe(200);
    expect(tokensToReach(c, 3.0, false)).toBe(200);
  });

  it("handles targets met immediately or never", () => {
    expect(tokensToReach(c, 4.0)).toBe(100);
    expect(tokensToReach(c, 5.0)).toBe(100);
    expect(tokensToReach(c, 2.0)).toBeNull();
  });

  it("takes the first crossing of a non-monotone curve", () => {
    const bumpy = curve([
      [0, 4.0],
      [10, 2.9],
      [20, 3.2],
      [30, 2.5],
    ]);
    expect(tokensToReach(bumpy, 3.0)).toBeCloseTo(0 + (10 * (4.0 - 3.0)) / (4.0 - 2.9), 9);
  });
});

describe("tokenEfficiencyGain", () => {
  it("matches the headline arithmetic", () => {
    const gain = tokenEfficiencyGain(0.164e9, 6.046e9, 0, 9e9);
    expect(gain).toBeGreaterThan(0.31 - 0.005);
    expect(gain).toBeLessThan(0.31 + 0.005);
  });

  it("is zero for equal budgets and negative when a costs more", () => {
    expect(tokenEfficiencyGain(0, 100, 0, 100)).toBe(0);
    expect(tokenEfficiencyGain(50, 100, 0, 100)).toBeCloseTo(-0.5, 12);
  });

  it("rejects a non-positive reference", () => {
    expect(() => tokenEfficiencyGain(1, 1, 0, 0)).toThrow(/positive/);
  });
});

describe("meanStd", () => {
  it("uses the sample standard deviation", () => {
    const { mean, std } = meanStd([1, 2, 3, 4]);
    expect(mean).toBeCloseTo(2.5, 12);
    expect(std).toBeCloseTo(Math.sqrt(5 / 3), 12);
  });

  it("degrades gracefully for short inputs", () => {
    expect(meanStd([])).toEqual({ mean: null, std: null });
    expect(meanStd([7])).toEqual({ mean: 7, std: 0 });
  });
});

describe("compareArm", () => {
  it("reports no gain when candidate equals baseline and ppt is free", () => {
    const base = curve([
      [0, 4],
      [100, 3],
      [200, 2],
    ]);
    const { perSeed, summary } = compareArm([base], [base], [0], 0);
    expect(perSeed[0].targetLoss).toBe(2);
    expect(perSeed[0].gain).toBeCloseTo(0, 12);
    expect(perSeed[0].speedup).toBeCloseTo(1, 12);
    expect(summary.seedsReached).toBe(1);
  });

  it("charges the warm-up tokens against the candidate", () => {
    const base = curve([
      [0, 4],
      [1000, 2],
    ]);
    const cand = curve([
      [0, 3],
      [500, 2],
    ]);
    const { perSeed } = compareArm([base], [cand], [0], 250);
    // candidate reaches 2.0 at 500 text tokens plus 250 charged tokens
    expect(perSeed[0].gain).toBeCloseTo(1 - 750 / 1000, 12);
    expect(perSeed[0].speedup).toBeCloseTo(2, 12);
  });

  it("excludes seeds whose candidate never reaches the target", () => {
    const base = curve([
      [0, 4],
      [100, 2],
    ]);
    const stuck = curve([
      [0, 4],
      [100, 3],
    ]);
    const good = curve([
      [0, 4],
      [50, 2],
    ]);
    const { perSeed, summary } = compareArm([base, base], [stuck, good], [0, 1], 0);
    expect(perSeed[0].candidateReached).toBe(false);
    expect(perSeed[0].gain).toBeNull();
    expect(perSeed[1].candidateReached).toBe(true);
    expect(summary.seedsReached).toBe(1);
    expect(summary.seeds).toBe(2);
    expect(summary.gainMean).toBeCloseTo(0.5, 12);
    expect(summary.gainStd).toBe(0);
  });

  it("requires one curve pair per seed", () => {
    const c = curve([[0, 1]]);
    expect(() => compareArm([c], [c, c], [0], 0)).toThrow(/per seed/);
  });
});
