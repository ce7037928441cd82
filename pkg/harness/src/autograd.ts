/**
 * Reverse-mode autodiff over dense float64 matrices.
 *
 * Ops execute eagerly and, when the graph is recording, push a backward
 * closure onto a tape; backward() replays the tape in reverse,
 * accumulating into .grad. Everything is Float64Array because the
 * gradient check compares against central finite differences at 1e-4
 * relative error, which single precision cannot reach.
 */

export class Tensor {
  readonly rows: number;
  readonly cols: number;
  readonly data: Float64Array;
  grad: Float64Array | null = null;

  constructor(rows: number, cols: number, data?: Float64Array) {
    this.rows = rows;
    this.cols = cols;
    if (data !== undefined && data.length !== rows * cols) {
      throw new Error(`data length ${data.length} != ${rows}x${cols}`);
    }
    this.data = data ?? new Float64Array(rows * cols);
  }

  get size(): number {
    return this.rows * this.cols;
  }

  at(r: number, c: number): number {
    return this.data[r * this.cols + c];
  }

  static fromArray(rows: number, cols: number, values: ArrayLike<number>): Tensor {
    return new Tensor(rows, cols, Float64Array.from(values));
  }

  ensureGrad(): Float64Array {
    if (this.grad === null) this.grad = new Float64Array(this.size);
    return this.grad;
  }

  zeroGrad(): void {
    if (this.grad !== null) this.grad.fill(0);
  }
}

export class Graph {
  private tape: Array<() => void> = [];
  readonly recording: boolean;

  constructor(recording = true) {
    this.recording = recording;
  }

  private push(fn: () => void): void {
    if (this.recording) this.tape.push(fn);
  }

  /** Seed dLoss = 1 and replay the tape in reverse. */
  backward(loss: Tensor): void {
    if (!this.recording) throw new Error("cannot backward a non-recording graph");
    if (loss.size !== 1) throw new Error("backward expects a scalar loss");
    loss.ensureGrad()[0] = 1;
    for (let i = this.tape.length - 1; i >= 0; i--) this.tape[i]();
  }

  /** c = a @ b, a [m,k] x b [k,n]. */
  matmul(a: Tensor, b: Tensor): Tensor {
    if (a.cols !== b.rows) throw new Error(`matmul ${a.rows}x${a.cols} @ ${b.rows}x${b.cols}`);
    const m = a.rows, k = a.cols, n = b.cols;
    const c = new Tensor(m, n);
    const ad = a.data, bd = b.data, cd = c.data;
    for (let i = 0; i < m; i++) {
      const arow = i * k, crow = i * n;
      for (let p = 0; p < k; p++) {
        const av = ad[arow + p];
        if (av === 0) continue;
        const brow = p * n;
        for (let j = 0; j < n; j++) cd[crow + j] += av * bd[brow + j];
      }
    }
    this.push(() => {
      const dc = c.grad!;
      const da = a.ensureGrad(), db = b.ensureGrad();
      for (let i = 0; i < m; i++) {
        const arow = i * k, crow = i * n;
        for (let p = 0; p < k; p++) {
          const brow = p * n;
          let acc = 0;
          for (let j = 0; j < n; j++) acc += dc[crow + j] * bd[brow + j];
          da[arow + p] += acc;
          const av = ad[arow + p];
          if (av === 0) continue;
          for (let j = 0; j < n; j++) db[brow + j] += av * dc[crow + j];
        }
      }
    });
    return c;
  }

  /** c = a @ b^T, a [m,k] x b [n,k]; avoids materializing transposes. */
  matmulT(a: Tensor, b: Tensor): Tensor {
    if (a.cols !== b.cols) throw new Error(`matmulT ${a.rows}x${a.cols} @ (${b.rows}x${b.cols})^T`);
    const m = a.rows, k = a.cols, n = b.rows;
    const c = new Tensor(m, n);
    const ad = a.data, bd = b.data, cd = c.data;
    for (let i = 0; i < m; i++) {
      const arow = i * k, crow = i * n;
      for (let j = 0; j < n; j++) {
        const brow = j * k;
        let acc = 0;
        for (let p = 0; p < k; p++) acc += ad[arow + p] * bd[brow + p];
        cd[crow + j] = acc;
      }
    }
    this.push(() => {
      const dc = c.grad!;
      const da = a.ensureGrad(), db = b.ensureGrad();
      for (let i = 0; i < m; i++) {
        const arow = i * k, crow = i * n;
        for (let j = 0; j < n; j++) {
          const g = dc[crow + j];
          if (g === 0) continue;
          const brow = j * k;
          for (let p = 0; p < k; p++) {
            da[arow + p] += g * bd[brow + p];
            db[brow + p] += g * ad[arow + p];
          }
        }
      }
    });
    return c;
  }

  add(a: Tensor, b: Tensor): Tensor {
    if (a.rows !== b.rows || a.cols !== b.cols) throw new Error("add shape mismatch");
    const c = new Tensor(a.rows, a.cols);
    for (let i = 0; i < c.size; i++) c.data[i] = a.data[i] + b.data[i];
    this.push(() => {
      const dc = c.grad!;
      const da = a.ensureGrad(), db = b.ensureGrad();
      for (let i = 0; i < c.size; i++) {
        da[i] += dc[i];
        db[i] += dc[i];
      }
    });
    return c;
  }

  /** Broadcast a [1,n] bias over the rows of a [m,n]. */
  addRow(a: Tensor, bias: Tensor): Tensor {
    if (bias.rows !== 1 || bias.cols !== a.cols) throw new Error("addRow shape mismatch");
    const c = new Tensor(a.rows, a.cols);
    const n = a.cols;
    for (let i = 0; i < a.rows; i++) {
      const row = i * n;
      for (let j = 0; j < n; j++) c.data[row + j] = a.data[row + j] + bias.data[j];
    }
    this.push(() => {
      const dc = c.grad!;
      const da = a.ensureGrad(), db = bias.ensureGrad();
      for (let i = 0; i < a.rows; i++) {
        const row = i * n;
        for (let j = 0; j < n; j++) {
          da[row + j] += dc[row + j];
          db[j] += dc[row + j];
        }
      }
    });
    return c;
  }

  scale(a: Tensor, s: number): Tensor {
    const c = new Tensor(a.rows, a.cols);
    for (let i = 0; i < c.size; i++) c.data[i] = a.data[i] * s;
    this.push(() => {
      const dc = c.grad!;
      const da = a.ensureGrad();
      for (let i = 0; i < c.size; i++) da[i] += dc[i] * s;
    });
    return c;
  }

  /** tanh-approximation GELU; smooth, so finite differences agree closely. */
  gelu(a: Tensor): Tensor {
    const K = Math.sqrt(2 / Math.PI);
    const c = new Tensor(a.rows, a.cols);
    for (let i = 0; i < c.size; i++) {
      const x = a.data[i];
      c.data[i] = 0.5 * x * (1 + Math.tanh(K * (x + 0.044715 * x * x * x)));
    }
    this.push(() => {
      const dc = c.grad!;
      const da = a.ensureGrad();
      for (let i = 0; i < c.size; i++) {
        const x = a.data[i];
        const t = Math.tanh(K * (x + 0.044715 * x * x * x));
        const du = K * (1 + 3 * 0.044715 * x * x);
        da[i] += dc[i] * (0.5 * (1 + t) + 0.5 * x * (1 - t * t) * du);
      }
    });
    return c;
  }

  /** Row-wise layer norm with learned gain/bias, eps inside the sqrt. */
  layerNorm(x: Tensor, gain: Tensor, bias: Tensor, eps = 1e-5): Tensor {
    const n = x.cols;
    if (gain.rows !== 1 || gain.cols !== n || bias.rows !== 1 || bias.cols !== n) {
      throw new Error("layerNorm gain/bias must be [1, cols]");
    }
    const y = new Tensor(x.rows, n);
    const xhat = new Float64Array(x.size);
    const inv = new Float64Array(x.rows);
    for (let i = 0; i < x.rows; i++) {
      const row = i * n;
      let mean = 0;
      for (let j = 0; j < n; j++) mean += x.data[row + j];
      mean /= n;
      let varSum = 0;
      for (let j = 0; j < n; j++) {
        const d = x.data[row + j] - mean;
        varSum += d * d;
      }
      const invStd = 1 / Math.sqrt(varSum / n + eps);
      inv[i] = invStd;
      for (let j = 0; j < n; j++) {
        const h = (x.data[row + j] - mean) * invStd;
        xhat[row + j] = h;
        y.data[row + j] = gain.data[j] * h + bias.data[j];
      }
    }
    this.push(() => {
      const dy = y.grad!;
      const dx = x.ensureGrad(), dg = gain.ensureGrad(), db = bias.ensureGrad();
      for (let i = 0; i < x.rows; i++) {
        const row = i * n;
        let sumDh = 0, sumDhH = 0;
        for (let j = 0; j < n; j++) {
          const g = dy[row + j];
          dg[j] += g * xhat[row + j];
          db[j] += g;
          const dh = g * gain.data[j];
          sumDh += dh;
          sumDhH += dh * xhat[row + j];
        }
        const invStd = inv[i];
        for (let j = 0; j < n; j++) {
          const dh = dy[row + j] * gain.data[j];
          dx[row + j] += invStd * (dh - sumDh / n - xhat[row + j] * (sumDhH / n));
        }
      }
    });
    return y;
  }

  /** Gather rows of an embedding table; backward scatter-adds. */
  embed(table: Tensor, ids: Int32Array): Tensor {
    const n = table.cols;
    const out = new Tensor(ids.length, n);
    for (let t = 0; t < ids.length; t++) {
      const id = ids[t];
      if (id < 0 || id >= table.rows) throw new Error(`embed id ${id} out of range 0..${table.rows - 1}`);
      out.data.set(table.data.subarray(id * n, id * n + n), t * n);
    }
    this.push(() => {
      const dout = out.grad!;
      const dt = table.ensureGrad();
      for (let t = 0; t < ids.length; t++) {
        const dst = ids[t] * n, src = t * n;
        for (let j = 0; j < n; j++) dt[dst + j] += dout[src + j];
      }
    });
    return out;
  }

  sliceCols(x: Tensor, start: number, width: number): Tensor {
    if (start < 0 || start + width > x.cols) throw new Error("sliceCols out of range");
    const out = new Tensor(x.rows, width);
    for (let i = 0; i < x.rows; i++) {
      const src = i * x.cols + start;
      out.data.set(x.data.subarray(src, src + width), i * width);
    }
    this.push(() => {
      const dout = out.grad!;
      const dx = x.ensureGrad();
      for (let i = 0; i < x.rows; i++) {
        const dst = i * x.cols + start, src = i * width;
        for (let j = 0; j < width; j++) dx[dst + j] += dout[src + j];
      }
    });
    return out;
  }

  concatCols(parts: Tensor[]): Tensor {
    const rows = parts[0].rows;
    let total = 0;
    for (const p of parts) {
      if (p.rows !== rows) throw new Error("concatCols row mismatch");
      total += p.cols;
    }
    const out = new Tensor(rows, total);
    let off = 0;
    for (const p of parts) {
      for (let i = 0; i < rows; i++) {
        out.data.set(p.data.subarray(i * p.cols, (i + 1) * p.cols), i * total + off);
      }
      off += p.cols;
    }
    this.push(() => {
      const dout = out.grad!;
      let o = 0;
      for (const p of parts) {
        const dp = p.ensureGrad();
        for (let i = 0; i < rows; i++) {
          const src = i * total + o, dst = i * p.cols;
          for (let j = 0; j < p.cols; j++) dp[dst + j] += dout[src + j];
        }
        o += p.cols;
      }
    });
    return out;
  }

  /**
   * Row-wise softmax over a lower-triangular attention score matrix:
   * row i attends to columns 0..i, later columns are exactly zero.
   */
  causalSoftmax(scores: Tensor): Tensor {
    if (scores.rows !== scores.cols) throw new Error("causalSoftmax expects square scores");
    const T = scores.rows;
    const p = new Tensor(T, T);
    for (let i = 0; i < T; i++) {
      const row = i * T;
      let max = -Infinity;
      for (let j = 0; j <= i; j++) max = Math.max(max, scores.data[row + j]);
      let sum = 0;
      for (let j = 0; j <= i; j++) {
        const e = Math.exp(scores.data[row + j] - max);
        p.data[row + j] = e;
        sum += e;
      }
      for (let j = 0; j <= i; j++) p.data[row + j] /= sum;
    }
    this.push(() => {
      const dp = p.grad!;
      const ds = scores.ensureGrad();
      for (let i = 0; i < T; i++) {
        const row = i * T;
        let dot = 0;
        for (let j = 0; j <= i; j++) dot += dp[row + j] * p.data[row + j];
        for (let j = 0; j <= i; j++) ds[row + j] += p.data[row + j] * (dp[row + j] - dot);
      }
    });
    return p;
  }

  /** Mean next-token cross-entropy from raw logits, fused log-softmax. */
  crossEntropy(logits: Tensor, targets: Int32Array): Tensor {
    const T = logits.rows, V = logits.cols;
    if (targets.length !== T) throw new Error("targets length mismatch");
    const out = new Tensor(1, 1);
    const lse = new Float64Array(T);
    const rowMax = new Float64Array(T);
    let total = 0;
    for (let t = 0; t < T; t++) {
      const row = t * V;
      const y = targets[t];
      if (y < 0 || y >= V) throw new Error(`target ${y} out of vocab 0..${V - 1}`);
      let max = -Infinity;
      for (let j = 0; j < V; j++) max = Math.max(max, logits.data[row + j]);
      let sum = 0;
      for (let j = 0; j < V; j++) sum += Math.exp(logits.data[row + j] - max);
      rowMax[t] = max;
      lse[t] = max + Math.log(sum);
      total += lse[t] - logits.data[row + y];
    }
    out.data[0] = total / T;
    this.push(() => {
      const g = out.grad![0] / T;
      const dl = logits.ensureGrad();
      for (let t = 0; t < T; t++) {
        const row = t * V;
        const denom = Math.exp(lse[t] - rowMax[t]);
        for (let j = 0; j < V; j++) {
          dl[row + j] += g * (Math.exp(logits.data[row + j] - rowMax[t]) / denom);
        }
        dl[row + targets[t]] -= g;
      }
    });
    return out;
  }
}
