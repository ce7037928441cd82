/**
 * Experiment orchestration: the transfer suite (scratch vs shard-warmed
 * arms over several seeds) and the component re-initialization ablation.
 * A failing arm is recorded and the rest of the suite continues; every
 * curve lands on disk as curve.v1 JSONL so the corpus package's compare
 * CLI can rerun the analysis from the raw logs.
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { loadCheckpoint } from "./checkpoint.js";
import { readCurve } from "./curves.js";
import { TEXT_VOCAB } from "./data.js";
import { ModelConfig } from "./model.js";
import { OptimConfig } from "./optim.js";
import { ArmComparison, compareArm } from "./report.js";
import { parseMask, transferParams, verifyTransfer } from "./reinit.js";
import { PretrainInit, StageOptions, prePreTrain, preTrain } from "./train.js";

export const SUITE_SCHEMA = "transfer_suite.v1";
export const ABLATION_SCHEMA = "reinit_ablation.v1";

interface CommonConfig {
  outDir: string;
  seeds: number[];
  model: Omit<ModelConfig, "vocabSize">;
  optim: Omit<OptimConfig, "totalSteps">;
  batchSize: number;
  evalEvery: number;
  evalWindows: number;
  valFraction?: number;
  pptTokens: number;
  ptTokens: number;
  corpus: string;
  verbose?: boolean;
}

export interface SuiteConfig extends CommonConfig {
  shards: Partial<Record<"nca" | "dyck", string>>;
  reinitMask?: string[];
}

export interface AblationConfig extends CommonConfig {
  shard: string;
  masks?: string[][];
}

interface SeedRun {
  seed: number;
  status: "ok" | "failed";
  error?: string;
  pptCurve?: string;
  ptCurve?: string;
  checkpoint?: string;
  pptTokensSeen?: number;
  ptTokensSeen?: number;
  finalValLoss?: number;
}

export interface SuiteReport {
  schema: string;
  /** scratch is the reference arm: zero gain, unit speedup by definition. */
  arms: Record<string, { seeds: SeedRun[]; comparison?: ArmComparison }>;
  compareCommands: string[];
  config: SuiteConfig;
}

function stageOptions(cfg: CommonConfig, seed: number, label: string, curvePath: string): StageOptions {
  return {
    model: cfg.model,
    optim: cfg.optim,
    batchSize: cfg.batchSize,
    totalTokens: 0,
    evalEvery: cfg.evalEvery,
    evalWindows: cfg.evalWindows,
    valFraction: cfg.valFraction,
    seed,
    label,
    curvePath,
    verbose: cfg.verbose,
  };
}

/** All arms over all seeds; writes report.json in outDir and returns it. */
export function runTransferSuite(cfg: SuiteConfig): SuiteReport {
  const curveDir = join(cfg.outDir, "curves");
  const ckptDir = join(cfg.outDir, "checkpoints");
  mkdirSync(curveDir, { recursive: true });
  mkdirSync(ckptDir, { recursive: true });
  const mask = parseMask(cfg.reinitMask ?? []);
  const shardArms = (Object.keys(cfg.shards) as Array<"nca" | "dyck">).filter((a) => cfg.shards[a]);
  const armNames: string[] = ["scratch", ...shardArms];
  const report: SuiteReport = { schema: SUITE_SCHEMA, arms: {}, compareCommands: [], config: cfg };

  for (const arm of armNames) {
    const runs: SeedRun[] = [];
    for (const seed of cfg.seeds) {
      const run: SeedRun = { seed, status: "ok" };
      try {
        let init: PretrainInit = { kind: "scratch" };
        if (arm !== "scratch") {
          const pptCurve = join(curveDir, `${arm}-s${seed}.ppt.jsonl`);
          const ckptPath = join(ckptDir, `${arm}-s${seed}.nckp`);
          const ppt = prePreTrain({
            ...stageOptions(cfg, seed, `${arm}-s${seed}`, pptCurve),
            totalTokens: cfg.pptTokens,
            shardPaths: [cfg.shards[arm as "nca" | "dyck"]!],
            checkpointPath: ckptPath,
          });
          run.pptCurve = pptCurve;
          run.checkpoint = ckptPath;
          run.pptTokensSeen = ppt.tokensSeen;
          init = { kind: "transfer", checkpoint: ckptPath, mask };
        }
        const ptCurve = join(curveDir, `${arm}-s${seed}.pt.jsonl`);
        const pt = preTrain(
          {
            ...stageOptions(cfg, seed, `${arm}-s${seed}`, ptCurve),
            totalTokens: cfg.ptTokens,
            corpus: cfg.corpus,
          },
          init,
        );
        run.ptCurve = ptCurve;
        run.ptTokensSeen = pt.tokensSeen;
        run.finalValLoss = pt.finalValLoss;
      } catch (err) {
        run.status = "failed";
        run.error = err instanceof Error ? err.message : String(err);
      }
      runs.push(run);
    }
    report.arms[arm] = { seeds: runs };
  }

  const scratchOk = report.arms["scratch"].seeds.filter((r) => r.status === "ok");
  for (const arm of armNames) {
    if (arm === "scratch") continue;
    const armOk = report.arms[arm].seeds.filter((r) => r.status === "ok");
    const paired = scratchOk
      .map((s) => ({ s, c: armOk.find((r) => r.seed === s.seed) }))
      .filter((p): p is { s: SeedRun; c: SeedRun } => p.c !== undefined);
    if (paired.length === 0) continue;
    const pptTokens = paired[0].c.pptTokensSeen ?? 0;
    report.arms[arm].comparison = compareArm(
      paired.map((p) => readCurve(p.s.ptCurve!)),
      paired.map((p) => readCurve(p.c.ptCurve!)),
      paired.map((p) => p.s.seed),
      pptTokens,
    );
    const baselines = paired.map((p) => `--baseline ${p.s.ptCurve}`).join(" ");
    const candidates = paired.map((p) => `--candidate ${p.c.ptCurve}`).join(" ");
    report.compareCommands.push(
      `ncagen compare ${baselines} ${candidates} --candidate-ppt-tokens ${pptTokens} ` +
        `--json ${join(cfg.outDir, `${arm}_vs_scratch.json`)}`,
    );
  }

  writeFileSync(join(cfg.outDir, "report.json"), JSON.stringify(report, null, 2) + "\n");
  return report;
}

export interface AblationReport {
  schema: string;
  seeds: number[];
  masks: Array<{
    mask: string[];
    perSeed: Array<{
      seed: number;
      status: "ok" | "failed";
      error?: string;
      finalValLoss?: number;
      curve?: string;
      preservedParams?: number;
      reinitializedParams?: number;
    }>;
    meanFinalValLoss: number | null;
    /** mean final loss minus the default-transfer arm's mean. */
    degradation: number | null;
  }>;
}

const ABLATION_MASKS: string[][] = [[], ["attention"], ["mlp"], ["layernorm"], ["all"]];

/**
 * Stage one once per seed, then stage two once per (mask, seed). Before
 * each warm start the transfer is audited: parameters outside the mask
 * must be bit-identical to the checkpoint. The audit rebuilds the same
 * seed-deterministic parameters the training run will use.
 */
export function runReinitAblation(cfg: AblationConfig): AblationReport {
  const curveDir = join(cfg.outDir, "curves");
  const ckptDir = join(cfg.outDir, "checkpoints");
  mkdirSync(curveDir, { recursive: true });
  mkdirSync(ckptDir, { recursive: true });
  const masks = cfg.masks ?? ABLATION_MASKS;

  const checkpoints = new Map<number, string>();
  for (const seed of cfg.seeds) {
    const ckptPath = join(ckptDir, `ppt-s${seed}.nckp`);
    prePreTrain({
      ...stageOptions(cfg, seed, `ppt-s${seed}`, join(curveDir, `ppt-s${seed}.jsonl`)),
      totalTokens: cfg.pptTokens,
      shardPaths: [cfg.shard],
      checkpointPath: ckptPath,
    });
    checkpoints.set(seed, ckptPath);
  }

  const report: AblationReport = { schema: ABLATION_SCHEMA, seeds: cfg.seeds, masks: [] };
  for (const maskNames of masks) {
    const mask = parseMask(maskNames);
    const maskTag = maskNames.length === 0 ? "default" : maskNames.join("+");
    const perSeed: AblationReport["masks"][number]["perSeed"] = [];
    const finals: number[] = [];
    for (const seed of cfg.seeds) {
      const entry: AblationReport["masks"][number]["perSeed"][number] = { seed, status: "ok" };
      try {
        const ckpt = loadCheckpoint(checkpoints.get(seed)!);
        const targetCfg: ModelConfig = { ...cfg.model, vocabSize: TEXT_VOCAB };
        const audit = verifyTransfer(ckpt, transferParams(ckpt, targetCfg, mask, seed), mask);
        entry.preservedParams = audit.preserved.length;
        entry.reinitializedParams = audit.reinitialized.length;
        const curvePath = join(curveDir, `mask-${maskTag}-s${seed}.jsonl`);
        const result = preTrain(
          {
            ...stageOptions(cfg, seed, `mask-${maskTag}-s${seed}`, curvePath),
            totalTokens: cfg.ptTokens,
            corpus: cfg.corpus,
          },
          { kind: "transfer", checkpoint: ckpt, mask },
        );
        entry.curve = curvePath;
        entry.finalValLoss = result.finalValLoss;
        finals.push(result.finalValLoss);
      } catch (err) {
        entry.status = "failed";
        entry.error = err instanceof Error ? err.message : String(err);
      }
      perSeed.push(entry);
    }
    const mean = finals.length > 0 ? finals.reduce((a, b) => a + b, 0) / finals.length : null;
    report.masks.push({ mask: maskNames, perSeed, meanFinalValLoss: mean, degradation: null });
  }
  const base = report.masks.find((m) => m.mask.length === 0)?.meanFinalValLoss ?? null;
  if (base !== null) {
    for (const m of report.masks) {
      if (m.meanFinalValLoss !== null) m.degradation = m.meanFinalValLoss - base;
    }
  }
  writeFileSync(join(cfg.outDir, "ablation.json"), JSON.stringify(report, null, 2) + "\n");
  return report;
}
