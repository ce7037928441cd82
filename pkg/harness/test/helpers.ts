import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { HEADER_SIZE, ShardHeader } from "../src/shard.js";

export const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export function tempDir(prefix: string): string {
  return mkdtempSync(join(tmpdir(), prefix));
}

/** Mirror of the corpus writer's layout; tests build shards from scratch. */
export function packHeader(h: ShardHeader): Buffer {
  const buf = Buffer.alloc(HEADER_SIZE);
  buf.write("NCAT", 0, "latin1");
  buf.writeUInt16LE(h.version, 4);
  buf.writeUInt16LE(h.alphabetN, 6);
  buf.writeUInt16LE(h.gridH, 8);
  buf.writeUInt16LE(h.gridW, 10);
  buf.writeUInt16LE(h.patchH, 12);
  buf.writeUInt16LE(h.patchW, 14);
  buf.writeUInt32LE(h.seqLen, 16);
  buf.writeBigUInt64LE(BigInt(h.numSequences), 20);
  buf.writeBigUInt64LE(h.masterSeed, 28);
  buf.writeUInt16LE(h.bandLow, 36);
  buf.writeUInt16LE(h.bandHigh, 38);
  buf.writeUInt8(h.compressorLevel, 40);
  return buf;
}

export function writeShard(path: string, header: ShardHeader, tokens: number[]): void {
  const body = Buffer.alloc(4 * tokens.length);
  tokens.forEach((t, i) => body.writeUInt32LE(t, 4 * i));
  writeFileSync(path, Buffer.concat([packHeader(header), body]));
}
