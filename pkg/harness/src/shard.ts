/**
 * Reader for .ncat token shards.
 *
 * Layout (little-endian, 41-byte header, no padding):
 *
 *     magic "NCAT" | version u16 | alphabet_n u16
 *     grid_h u16 | grid_w u16 | patch_h u16 | patch_w u16
 *     seq_len u32 | num_sequences u64 | master_seed u64
 *     band_low u16 | band_high u16 (0xFFFF = unbounded) | compressor_level u8
 *
 * followed by num_sequences * seq_len tokens as u32. Bracket-language
 * shards zero the grid/patch fields and store the bracket-type count in
 * alphabet_n (vocabulary 2k); grid shards have vocabulary
 * alphabet_n^(patch_h*patch_w) + 2 delimiter tokens.
 */

import { createHash } from "node:crypto";
import { readFileSync } from "node:fs";

export const HEADER_SIZE = 41;
export const FORMAT_VERSION = 1;
export const UNBOUNDED_BAND = 0xffff;

export class ShardFormatError extends Error {}

export interface ShardHeader {
  version: number;
  alphabetN: number;
  gridH: number;
  gridW: number;
  patchH: number;
  patchW: number;
  seqLen: number;
  numSequences: number;
  masterSeed: bigint;
  bandLow: number;
  bandHigh: number;
  compressorLevel: number;
}

export function parseHeader(buf: Buffer): ShardHeader {
  if (buf.length < HEADER_SIZE) {
    throw new ShardFormatError(`header truncated: ${buf.length} < ${HEADER_SIZE} bytes`);
  }
  if (buf.toString("latin1", 0, 4) !== "NCAT") {
    throw new ShardFormatError(`bad magic ${JSON.stringify(buf.toString("latin1", 0, 4))}`);
  }
  const version = buf.readUInt16LE(4);
  if (version !== FORMAT_VERSION) {
    throw new ShardFormatError(`unsupported format version ${version}`);
  }
  const numSequences = buf.readBigUInt64LE(20);
  if (numSequences > BigInt(Number.MAX_SAFE_INTEGER)) {
    throw new ShardFormatError(`num_sequences ${numSequences} exceeds safe integer range`);
  }
  return {
    version,
    alphabetN: buf.readUInt16LE(6),
    gridH: buf.readUInt16LE(8),
    gridW: buf.readUInt16LE(10),
    patchH: buf.readUInt16LE(12),
    patchW: buf.readUInt16LE(14),
    seqLen: buf.readUInt32LE(16),
    numSequences: Number(numSequences),
    masterSeed: buf.readBigUInt64LE(28),
    bandLow: buf.readUInt16LE(36),
    bandHigh: buf.readUInt16LE(38),
    compressorLevel: buf.readUInt8(40),
  };
}

export function isDyck(header: ShardHeader): boolean {
  return header.patchH === 0;
}

export function vocabSize(header: ShardHeader): number {
  if (isDyck(header)) return 2 * header.alphabetN;
  return header.alphabetN ** (header.patchH * header.patchW) + 2;
}

export class ShardReader {
  readonly path: string;
  readonly header: ShardHeader;
  /** sha256 of the raw header bytes; tags checkpoints with their data. */
  readonly headerHash: string;
  private readonly tokens: Uint32Array;

  constructor(path: string) {
    this.path = path;
    const buf = readFileSync(path);
    this.header = parseHeader(buf);
    this.headerHash = createHash("sha256").update(buf.subarray(0, HEADER_SIZE)).digest("hex");
    const total = this.header.numSequences * this.header.seqLen;
    const expected = HEADER_SIZE + 4 * total;
    if (buf.length !== expected) {
      throw new ShardFormatError(`${path}: size ${buf.length} != header-implied ${expected}`);
    }
    // the 41-byte header leaves the payload 4-byte misaligned, so copy
    // into a fresh aligned buffer before taking a u32 view
    const aligned = new ArrayBuffer(4 * total);
    new Uint8Array(aligned).set(buf.subarray(HEADER_SIZE));
    this.tokens = new Uint32Array(aligned);
    if (!littleEndianHost()) byteSwap32(new Uint8Array(aligned));
  }

  get numSequences(): number {
    return this.header.numSequences;
  }

  get seqLen(): number {
    return this.header.seqLen;
  }

  get totalTokens(): number {
    return this.header.numSequences * this.header.seqLen;
  }

  get vocabSize(): number {
    return vocabSize(this.header);
  }

  /** Zero-copy view of one sequence. */
  sequence(index: number): Uint32Array {
    if (index < 0 || index >= this.numSequences) {
      throw new RangeError(`sequence index ${index} out of range (shard holds ${this.numSequences})`);
    }
    return this.tokens.subarray(index * this.seqLen, (index + 1) * this.seqLen);
  }
}

function littleEndianHost(): boolean {
  return new Uint8Array(new Uint16Array([1]).buffer)[0] === 1;
}

function byteSwap32(bytes: Uint8Array): void {
  for (let i = 0; i < bytes.length; i += 4) {
    let t = bytes[i];
    bytes[i] = bytes[i + 3];
    bytes[i + 3] = t;
    t = bytes[i + 1];
    bytes[i + 1] = bytes[i + 2];
    bytes[i + 2] = t;
  }
}
