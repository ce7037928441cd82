/**
 * The two training stages. Stage one next-token-trains a fresh model on
 * token shards; stage two continues on a byte-level text corpus, either
 * from scratch or warm-started from a stage-one checkpoint with selected
 * components re-initialized. Both stages append to a curve log at every
 * evaluation, starting with the untrained model at tokens_seen = 0.
 */

import { Graph } from "./autograd.js";
import { saveCheckpoint, loadCheckpoint, Checkpoint, Tags } from "./checkpoint.js";
import { CurveWriter, Stage } from "./curves.js";
import { Batcher, Dataset, ShardDataset, TextDataset } from "./data.js";
import { ModelConfig, Params, countParams, forwardLoss } from "./model.js";
import { AdamW, OptimConfig } from "./optim.js";
import { ReinitMask, freshParams, transferParams } from "./reinit.js";

export interface StageOptions {
  model: Omit<ModelConfig, "vocabSize">;
  optim: Omit<OptimConfig, "totalSteps">;
  batchSize: number;
  totalTokens: number;
  evalEvery: number;
  evalWindows: number;
  valFraction?: number;
  seed: number;
  label: string;
  curvePath: string;
  verbose?: boolean;
}

export interface StageResult {
  curvePath: string;
  checkpointPath?: string;
  stepsDone: number;
  tokensSeen: number;
  initialValLoss: number;
  finalValLoss: number;
  paramCount: number;
}

export type PretrainInit =
  | { kind: "scratch" }
  | { kind: "transfer"; checkpoint: Checkpoint | string; mask: ReinitMask };

function evalLoss(params: Params, cfg: ModelConfig, dataset: Dataset, maxWindows: number): number {
  const g = new Graph(false);
  const n = Math.min(dataset.count("val"), maxWindows);
  if (n === 0) throw new Error("no validation windows");
  let lossSum = 0;
  let weight = 0;
  for (let i = 0; i < n; i++) {
    const w = dataset.window("val", i);
    lossSum += forwardLoss(g, params, cfg, w.inputs, w.targets).data[0] * w.inputs.length;
    weight += w.inputs.length;
  }
  return lossSum / weight;
}

function runStage(
  params: Params,
  cfg: ModelConfig,
  dataset: Dataset,
  opts: StageOptions,
  stage: Stage,
): Omit<StageResult, "checkpointPath"> {
  const probe = dataset.window("train", 0);
  const tokensPerStep = opts.batchSize * probe.inputs.length;
  const totalSteps = Math.max(1, Math.ceil(opts.totalTokens / tokensPerStep));
  const optim = new AdamW({ ...opts.optim, totalSteps });
  const batcher = new Batcher(dataset, opts.batchSize, opts.seed);
  const writer = new CurveWriter(opts.curvePath, opts.label, stage);

  const initialValLoss = evalLoss(params, cfg, dataset, opts.evalWindows);
  writer.append(0, initialValLoss, { step: 0 });
  if (opts.verbose) {
    process.stderr.write(
      `[${opts.label}] ${stage || "training"}: ${countParams(params)} params, ` +
        `${totalSteps} steps of ${tokensPerStep} tokens\n`,
    );
    process.stderr.write(`[${opts.label}] step 0: val_loss ${initialValLoss.toFixed(4)}\n`);
  }

  let tokensSeen = 0;
  let valLoss = initialValLoss;
  for (let step = 0; step < totalSteps; step++) {
    const batch = batcher.nextBatch();
    const g = new Graph(true);
    let loss = forwardLoss(g, params, cfg, batch[0].inputs, batch[0].targets);
    for (let b = 1; b < batch.length; b++) {
      loss = g.add(loss, forwardLoss(g, params, cfg, batch[b].inputs, batch[b].targets));
    }
    loss = g.scale(loss, 1 / batch.length);
    g.backward(loss);
    const { lr } = optim.step(params);
    for (const w of batch) tokensSeen += w.inputs.length;
    const isLast = step === totalSteps - 1;
    if ((step + 1) % opts.evalEvery === 0 || isLast) {
      valLoss = evalLoss(params, cfg, dataset, opts.evalWindows);
      writer.append(tokensSeen, valLoss, {
        step: step + 1,
        train_loss: loss.data[0],
        lr,
      });
      if (opts.verbose) {
        process.stderr.write(
          `[${opts.label}] step ${step + 1}/${totalSteps}: ` +
            `train ${loss.data[0].toFixed(4)} val ${valLoss.toFixed(4)}\n`,
        );
      }
    }
  }
  return {
    curvePath: opts.curvePath,
    stepsDone: totalSteps,
    tokensSeen,
    initialValLoss,
    finalValLoss: valLoss,
    paramCount: countParams(params),
  };
}

/** Stage one: train a fresh model on shards, save a tagged checkpoint. */
export function prePreTrain(
  opts: StageOptions & { shardPaths: string[]; checkpointPath: string },
): StageResult {
  const dataset = new ShardDataset(opts.shardPaths, opts.model.contextLength, opts.valFraction);
  const cfg: ModelConfig = { ...opts.model, vocabSize: dataset.vocabSize };
  const params = freshParams(cfg, opts.seed);
  const result = runStage(params, cfg, dataset, opts, "pre-pre-training");
  const tags: Tags = {
    stage: "pre-pre-training",
    seed: opts.seed,
    stepsDone: result.stepsDone,
    tokensSeen: result.tokensSeen,
    shardHash: dataset.readers.map((r) => r.headerHash).join("+"),
  };
  saveCheckpoint(opts.checkpointPath, cfg, params, tags);
  return { ...result, checkpointPath: opts.checkpointPath };
}

/** Stage two: train on text, from scratch or transferred. */
export function preTrain(
  opts: StageOptions & { corpus: string | Uint8Array; checkpointPath?: string },
  init: PretrainInit,
): StageResult {
  const dataset = new TextDataset(opts.corpus, opts.model.contextLength, opts.valFraction);
  const cfg: ModelConfig = { ...opts.model, vocabSize: dataset.vocabSize };
  let params: Params;
  if (init.kind === "scratch") {
    params = freshParams(cfg, opts.seed);
  } else {
    const ckpt =
      typeof init.checkpoint === "string" ? loadCheckpoint(init.checkpoint) : init.checkpoint;
    params = transferParams(ckpt, cfg, init.mask, opts.seed);
  }
  const result = runStage(params, cfg, dataset, opts, "pre-training");
  if (opts.checkpointPath !== undefined) {
    saveCheckpoint(opts.checkpointPath, cfg, params, {
      stage: "pre-training",
      seed: opts.seed,
      stepsDone: result.stepsDone,
      tokensSeen: result.tokensSeen,
    });
    return { ...result, checkpointPath: opts.checkpointPath };
  }
  return result;
}
