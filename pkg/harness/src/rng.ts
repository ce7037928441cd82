/**
 * Deterministic random numbers for the whole harness.
 *
 * SplitMix64 drives everything: it is tiny, passes BigCrush, and its
 * output function doubles as a seed-mixing fold, so independent
 * substreams (weight init, data order, per-stage noise) are derived by
 * hashing (seed, streamId) instead of by sharing one sequence. Results
 * therefore do not depend on the order in which components consume
 * randomness.
 */

const MASK64 = (1n << 64n) - 1n;
const GAMMA = 0x9e3779b97f4a7c15n;

function mixOnce(z: bigint): bigint {
  z = ((z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n) & MASK64;
  z = ((z ^ (z >> 27n)) * 0x94d049bb133111ebn) & MASK64;
  return z ^ (z >> 31n);
}

/** Hash two u64 values into one, order-sensitive. */
export function mix64(a: bigint | number, b: bigint | number): bigint {
  const ab = BigInt(a) & MASK64;
  const bb = BigInt(b) & MASK64;
  return mixOnce((mixOnce((ab + GAMMA) & MASK64) + bb + GAMMA) & MASK64);
}

export class Rng {
  private state: bigint;
  private spare: number | null = null;

  constructor(seed: bigint | number) {
    this.state = BigInt(seed) & MASK64;
  }

  /** Independent generator for a named purpose under the same seed. */
  substream(streamId: number): Rng {
    return new Rng(mix64(this.state, streamId));
  }

  nextU64(): bigint {
    this.state = (this.state + GAMMA) & MASK64;
    return mixOnce(this.state);
  }

  /** Uniform in [0, 1) with full 53-bit mantissa. */
  random(): number {
    return Number(this.nextU64() >> 11n) * 2 ** -53;
  }

  /** Uniform integer in [0, bound). */
  int(bound: number): number {
    return Math.floor(this.random() * bound);
  }

  gauss(mean = 0, std = 1): number {
    if (this.spare !== null) {
      const z = this.spare;
      this.spare = null;
      return mean + std * z;
    }
    const u1 = Math.max(this.random(), Number.MIN_VALUE);
    const u2 = this.random();
    const mag = Math.sqrt(-2 * Math.log(u1));
    this.spare = mag * Math.sin(2 * Math.PI * u2);
    return mean + std * mag * Math.cos(2 * Math.PI * u2);
  }

  /** In-place Fisher-Yates. */
  shuffle(arr: Int32Array | number[]): void {
    for (let i = arr.length - 1; i > 0; i--) {
      const j = this.int(i + 1);
      const tmp = arr[i];
      arr[i] = arr[j];
      arr[j] = tmp;
    }
  }
}

/** Substream ids; fixed so checkpoints reproduce across versions. */
export const STREAM_INIT = 1;
export const STREAM_DATA = 2;
export const STREAM_REINIT = 3;
