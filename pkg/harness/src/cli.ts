#!/usr/bin/env node
/**
 * train-harness <command>
 *
 *   ppt       stage one: train on token shards, write curve + checkpoint
 *   pretrain  stage two: train on a text corpus, scratch or warm-started
 *   suite     scratch/nca/dyck arms over seeds, comparison report
 *   ablation  re-initialization masks over components, degradation report
 */

import { mkdirSync, readFileSync } from "node:fs";
import { join } from "node:path";
import { parseArgs } from "node:util";
import { parseMask } from "./reinit.js";
import { AblationConfig, SuiteConfig, runReinitAblation, runTransferSuite } from "./suite.js";
import { PretrainInit, prePreTrain, preTrain } from "./train.js";
import { DEFAULT_OPTIM } from "./optim.js";

const USAGE = `usage: train-harness <ppt|pretrain|suite|ablation> [options]

ppt        --shard F [--shard F ...] --out-dir D --tokens N [model/train flags]
pretrain   --corpus F --out-dir D --tokens N [--checkpoint F] [--mask a,b] [flags]
suite      --config cfg.json
ablation   --config cfg.json

model/train flags: --context N --layers N --heads N --embd N --no-tie
                   --batch N --eval-every N --eval-windows N --seed N
                   --label S --lr X --quiet
`;

const FLAG_SPEC = {
  shard: { type: "string", multiple: true },
  corpus: { type: "string" },
  config: { type: "string" },
  "out-dir": { type: "string" },
  tokens: { type: "string" },
  checkpoint: { type: "string" },
  mask: { type: "string" },
  context: { type: "string", default: "256" },
  layers: { type: "string", default: "4" },
  heads: { type: "string", default: "8" },
  embd: { type: "string", default: "256" },
  "no-tie": { type: "boolean", default: false },
  batch: { type: "string", default: "8" },
  "eval-every": { type: "string", default: "50" },
  "eval-windows": { type: "string", default: "16" },
  seed: { type: "string", default: "0" },
  label: { type: "string" },
  lr: { type: "string" },
  quiet: { type: "boolean", default: false },
  help: { type: "boolean", default: false },
} as const;

function num(value: string | undefined, flag: string): number {
  if (value === undefined) throw new Error(`missing required flag ${flag}`);
  const n = Number(value);
  if (!Number.isFinite(n)) throw new Error(`${flag} must be a number, got "${value}"`);
  return n;
}

function parseFlags(args: string[]) {
  return parseArgs({ args, options: FLAG_SPEC, allowPositionals: false }).values;
}

type Flags = ReturnType<typeof parseFlags>;

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  if (command === undefined || command === "--help" || command === "-h") {
    process.stdout.write(USAGE);
    return command === undefined ? 2 : 0;
  }
  let values: Flags;
  try {
    values = parseFlags(rest);
  } catch (err) {
    process.stderr.write(`${err instanceof Error ? err.message : err}\n${USAGE}`);
    return 2;
  }
  if (values.help) {
    process.stdout.write(USAGE);
    return 0;
  }

  try {
    switch (command) {
      case "ppt": {
        if (!values.shard || values.shard.length === 0) throw new Error("ppt needs --shard");
        const outDir = values["out-dir"] ?? ".";
        const result = prePreTrain({
          ...commonOptions(values, outDir, "ppt"),
          totalTokens: num(values.tokens, "--tokens"),
          shardPaths: values.shard,
          checkpointPath: join(outDir, `${values.label ?? "ppt"}.nckp`),
        });
        process.stdout.write(JSON.stringify(result, null, 2) + "\n");
        return 0;
      }
      case "pretrain": {
        if (!values.corpus) throw new Error("pretrain needs --corpus");
        const outDir = values["out-dir"] ?? ".";
        let init: PretrainInit = { kind: "scratch" };
        if (values.checkpoint) {
          init = {
            kind: "transfer",
            checkpoint: values.checkpoint,
            mask: parseMask((values.mask ?? "").split(",")),
          };
        } else if (values.mask) {
          throw new Error("--mask requires --checkpoint");
        }
        const result = preTrain(
          {
            ...commonOptions(values, outDir, "pretrain"),
            totalTokens: num(values.tokens, "--tokens"),
            corpus: values.corpus,
          },
          init,
        );
        process.stdout.write(JSON.stringify(result, null, 2) + "\n");
        return 0;
      }
      case "suite": {
        const cfg = loadConfig<SuiteConfig>(values.config, "suite");
        const report = runTransferSuite(cfg);
        summarizeSuite(report);
        return 0;
      }
      case "ablation": {
        const cfg = loadConfig<AblationConfig>(values.config, "ablation");
        const report = runReinitAblation(cfg);
        for (const m of report.masks) {
          const tag = m.mask.length === 0 ? "default" : m.mask.join("+");
          const loss = m.meanFinalValLoss?.toFixed(4) ?? "failed";
          const deg = m.degradation === null ? "" : ` (degradation ${m.degradation >= 0 ? "+" : ""}${m.degradation.toFixed(4)})`;
          process.stdout.write(`mask ${tag}: mean final val_loss ${loss}${deg}\n`);
        }
        return 0;
      }
      default:
        process.stderr.write(`unknown command "${command}"\n${USAGE}`);
        return 2;
    }
  } catch (err) {
    process.stderr.write(`error: ${err instanceof Error ? err.message : err}\n`);
    return 1;
  }
}

function commonOptions(values: Flags, outDir: string, fallbackLabel: string) {
  mkdirSync(outDir, { recursive: true });
  const label = values.label ?? fallbackLabel;
  return {
    model: {
      contextLength: num(values.context, "--context"),
      nLayer: num(values.layers, "--layers"),
      nHead: num(values.heads, "--heads"),
      nEmbd: num(values.embd, "--embd"),
      tieWeights: !values["no-tie"],
    },
    optim: { ...DEFAULT_OPTIM, ...(values.lr ? { lrMax: num(values.lr, "--lr"), lrMin: num(values.lr, "--lr") / 10 } : {}) },
    batchSize: num(values.batch, "--batch"),
    evalEvery: num(values["eval-every"], "--eval-every"),
    evalWindows: num(values["eval-windows"], "--eval-windows"),
    seed: num(values.seed, "--seed"),
    label,
    curvePath: join(outDir, `${label}.jsonl`),
    verbose: !values.quiet,
  };
}

function loadConfig<T>(path: string | undefined, command: string): T {
  if (!path) throw new Error(`${command} needs --config`);
  return JSON.parse(readFileSync(path, "utf8")) as T;
}

function summarizeSuite(report: ReturnType<typeof runTransferSuite>): void {
  for (const [arm, data] of Object.entries(report.arms)) {
    const ok = data.seeds.filter((s) => s.status === "ok").length;
    process.stdout.write(`arm ${arm}: ${ok}/${data.seeds.length} seeds ok`);
    if (data.comparison) {
      const s = data.comparison.summary;
      const fmt = (x: number | null) => (x === null ? "n/a" : x.toFixed(4));
      process.stdout.write(
        `, gain ${fmt(s.gainMean)} ± ${fmt(s.gainStd)}, speedup ${fmt(s.speedupMean)} ± ${fmt(s.speedupStd)}` +
          ` (${s.seedsReached}/${s.seeds} reached target)`,
      );
    }
    process.stdout.write("\n");
  }
  for (const cmd of report.compareCommands) process.stdout.write(`verify with: ${cmd}\n`);
}

const invokedDirectly = process.argv[1] !== undefined && import.meta.url === `file://${process.argv[1]}`;
if (invokedDirectly) process.exit(main(process.argv.slice(2)));
