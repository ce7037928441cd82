/**
 * Checkpoints: a JSON header (model config, parameter manifest, free-form
 * tags such as the source shard's header hash) followed by every
 * parameter's float64 data, little-endian, in manifest order.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { Tensor } from "./autograd.js";
import { ModelConfig, Params } from "./model.js";

const MAGIC = "NCKP";
const CKPT_VERSION = 1;

export type Tags = Record<string, string | number>;

interface Manifest {
  version: number;
  model: ModelConfig;
  params: Array<{ name: string; rows: number; cols: number }>;
  tags: Tags;
}

export function saveCheckpoint(path: string, model: ModelConfig, params: Params, tags: Tags): void {
  const manifest: Manifest = {
    version: CKPT_VERSION,
    model,
    params: [...params.entries()].map(([name, t]) => ({ name, rows: t.rows, cols: t.cols })),
    tags,
  };
  const meta = Buffer.from(JSON.stringify(manifest), "utf8");
  let payloadBytes = 0;
  for (const t of params.values()) payloadBytes += 8 * t.size;
  const out = Buffer.alloc(4 + 4 + meta.length + payloadBytes);
  out.write(MAGIC, 0, "latin1");
  out.writeUInt32LE(meta.length, 4);
  meta.copy(out, 8);
  let off = 8 + meta.length;
  for (const t of params.values()) {
    const bytes = new Uint8Array(t.data.buffer, t.data.byteOffset, 8 * t.size);
    if (!littleEndianHost()) throw new Error("big-endian hosts are not supported for writing");
    out.set(bytes, off);
    off += bytes.length;
  }
  writeFileSync(path, out);
}

export interface Checkpoint {
  model: ModelConfig;
  params: Params;
  tags: Tags;
}

export function loadCheckpoint(path: string): Checkpoint {
  const buf = readFileSync(path);
  if (buf.length < 8 || buf.toString("latin1", 0, 4) !== MAGIC) {
    throw new Error(`${path}: not a checkpoint file`);
  }
  const metaLen = buf.readUInt32LE(4);
  const manifest: Manifest = JSON.parse(buf.toString("utf8", 8, 8 + metaLen));
  if (manifest.version !== CKPT_VERSION) {
    throw new Error(`${path}: unsupported checkpoint version ${manifest.version}`);
  }
  const params: Params = new Map();
  let off = 8 + metaLen;
  for (const { name, rows, cols } of manifest.params) {
    const n = rows * cols;
    if (off + 8 * n > buf.length) throw new Error(`${path}: payload truncated at ${name}`);
    const data = new Float64Array(n);
    for (let i = 0; i < n; i++) data[i] = buf.readDoubleLE(off + 8 * i);
    params.set(name, new Tensor(rows, cols, data));
    off += 8 * n;
  }
  if (off !== buf.length) throw new Error(`${path}: ${buf.length - off} trailing bytes`);
  return { model: manifest.model, params, tags: manifest.tags };
}

function littleEndianHost(): boolean {
  return new Uint8Array(new Uint16Array([1]).buffer)[0] === 1;
}
