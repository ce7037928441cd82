/**
 * Batch construction for both training stages.
 *
 * Shard windows never span two shard sequences: each sequence is one
 * automaton rollout (or one bracket walk), and a window crossing the
 * boundary would train the model on a transition that no single latent
 * process generated. Text corpora have no such boundaries, so windows
 * simply tile the byte stream. Both stages deliver batches in an order
 * that is a pure function of the seed.
 */

import { readFileSync } from "node:fs";
import { Rng, STREAM_DATA, mix64 } from "./rng.js";
import { ShardReader } from "./shard.js";

export type Split = "train" | "val";

export interface WindowPair {
  inputs: Int32Array;
  targets: Int32Array;
}

export interface Dataset {
  readonly vocabSize: number;
  count(split: Split): number;
  window(split: Split, index: number): WindowPair;
}

/** Window starts for one sequence: stride ctx+1, tail dropped. */
function windowStarts(seqLen: number, ctx: number): { starts: number[]; len: number } {
  if (seqLen < 2) return { starts: [], len: 0 };
  const span = Math.min(ctx + 1, seqLen);
  const starts: number[] = [];
  for (let s = 0; s + span <= seqLen; s += span) starts.push(s);
  return { starts, len: span - 1 };
}

function pairFrom(tokens: Uint32Array | Uint8Array, start: number, len: number): WindowPair {
  const inputs = new Int32Array(len);
  const targets = new Int32Array(len);
  for (let i = 0; i < len; i++) {
    inputs[i] = tokens[start + i];
    targets[i] = tokens[start + i + 1];
  }
  return { inputs, targets };
}

export class ShardDataset implements Dataset {
  readonly vocabSize: number;
  readonly readers: ShardReader[];
  readonly contextLength: number;
  private readonly refs: { train: Int32Array; val: Int32Array };
  private readonly windowLen: { train: Int32Array; val: Int32Array };

  constructor(paths: string[], contextLength: number, valFraction = 0.1) {
    if (paths.length === 0) throw new Error("ShardDataset needs at least one shard");
    this.readers = paths.map((p) => new ShardReader(p));
    const vocab = this.readers[0].vocabSize;
    for (const r of this.readers) {
      if (r.vocabSize !== vocab) {
        throw new Error(
          `vocab mismatch: ${r.path} has ${r.vocabSize}, ${this.readers[0].path} has ${vocab}`,
        );
      }
    }
    this.vocabSize = vocab;
    this.contextLength = contextLength;
    const train: number[] = [];
    const val: number[] = [];
    const trainLen: number[] = [];
    const valLen: number[] = [];
    for (let s = 0; s < this.readers.length; s++) {
      const r = this.readers[s];
      const { starts, len } = windowStarts(r.seqLen, contextLength);
      if (len === 0) throw new Error(`${r.path}: sequences too short to form windows`);
      const numVal = Math.min(r.numSequences - 1, Math.max(1, Math.round(valFraction * r.numSequences)));
      const valFrom = r.numSequences - numVal;
      for (let q = 0; q < r.numSequences; q++) {
        const isVal = q >= valFrom;
        for (const st of starts) {
          (isVal ? val : train).push(s, q, st);
          (isVal ? valLen : trainLen).push(len);
        }
      }
    }
    if (train.length === 0 || val.length === 0) {
      throw new Error("split produced an empty train or val set; need >= 2 sequences");
    }
    this.refs = { train: Int32Array.from(train), val: Int32Array.from(val) };
    this.windowLen = { train: Int32Array.from(trainLen), val: Int32Array.from(valLen) };
  }

  count(split: Split): number {
    return this.refs[split].length / 3;
  }

  window(split: Split, index: number): WindowPair {
    const refs = this.refs[split];
    if (index < 0 || index * 3 >= refs.length) throw new RangeError(`window ${index} out of range`);
    const s = refs[index * 3];
    const q = refs[index * 3 + 1];
    const start = refs[index * 3 + 2];
    const len = this.windowLen[split][index];
    return pairFrom(this.readers[s].sequence(q), start, len);
  }
}

/** Byte-level text vocabulary: any UTF-8 file works, no vocab file. */
export const TEXT_VOCAB = 256;

export class TextDataset implements Dataset {
  readonly vocabSize = TEXT_VOCAB;
  readonly contextLength: number;
  private readonly bytes: Uint8Array;
  private readonly regions: { train: { from: number; to: number }; val: { from: number; to: number } };
  private readonly starts: { train: number[]; val: number[] };
  private readonly len: number;

  constructor(source: string | Uint8Array, contextLength: number, valFraction = 0.1) {
    this.bytes = typeof source === "string" ? readFileSync(source) : source;
    this.contextLength = contextLength;
    const span = contextLength + 1;
    if (this.bytes.length < 2 * span) {
      throw new Error(`corpus has ${this.bytes.length} bytes, need at least ${2 * span}`);
    }
    const splitAt = this.bytes.length - Math.max(span, Math.floor(valFraction * this.bytes.length));
    this.regions = {
      train: { from: 0, to: splitAt },
      val: { from: splitAt, to: this.bytes.length },
    };
    this.len = contextLength;
    const tile = (from: number, to: number): number[] => {
      const out: number[] = [];
      for (let s = from; s + span <= to; s += span) out.push(s);
      return out;
    };
    this.starts = {
      train: tile(this.regions.train.from, this.regions.train.to),
      val: tile(this.regions.val.from, this.regions.val.to),
    };
    if (this.starts.train.length === 0 || this.starts.val.length === 0) {
      throw new Error("corpus too small for the requested context length");
    }
  }

  count(split: Split): number {
    return this.starts[split].length;
  }

  window(split: Split, index: number): WindowPair {
    const starts = this.starts[split];
    if (index < 0 || index >= starts.length) throw new RangeError(`window ${index} out of range`);
    return pairFrom(this.bytes, starts[index], this.len);
  }
}

/**
 * Seed-deterministic batch order: a fresh permutation of the train
 * windows per epoch, derived from (seed, epoch), batches wrapping
 * across the epoch boundary.
 */
export class Batcher {
  private readonly dataset: Dataset;
  private readonly batchSize: number;
  private readonly seed: bigint;
  private perm: Int32Array;
  private cursor = 0;
  private epoch = 0;

  constructor(dataset: Dataset, batchSize: number, seed: bigint | number) {
    if (batchSize < 1) throw new Error("batchSize must be >= 1");
    this.dataset = dataset;
    this.batchSize = batchSize;
    this.seed = mix64(BigInt(seed), STREAM_DATA);
    this.perm = this.permutation(0);
  }

  private permutation(epoch: number): Int32Array {
    const n = this.dataset.count("train");
    const perm = new Int32Array(n);
    for (let i = 0; i < n; i++) perm[i] = i;
    new Rng(mix64(this.seed, epoch)).shuffle(perm);
    return perm;
  }

  nextBatch(): WindowPair[] {
    const batch: WindowPair[] = [];
    while (batch.length < this.batchSize) {
      if (this.cursor >= this.perm.length) {
        this.epoch += 1;
        this.perm = this.permutation(this.epoch);
        this.cursor = 0;
      }
      batch.push(this.dataset.window("train", this.perm[this.cursor]));
      this.cursor += 1;
    }
    return batch;
  }
}
