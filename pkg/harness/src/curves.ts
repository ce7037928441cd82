/**
 * Training-curve logs as JSON lines, schema "curve.v1": one header
 * record carrying the schema tag, label, and stage, then one record per
 * evaluation with tokens_seen and val_loss. The comparison CLI of the
 * corpus package reads these files directly, so field names are frozen.
 */

import { appendFileSync, readFileSync, writeFileSync } from "node:fs";

export const CURVE_SCHEMA = "curve.v1";

export type Stage = "" | "pre-pre-training" | "pre-training";

export interface Curve {
  label: string;
  stage: Stage;
  tokens: number[];
  losses: number[];
}

export class CurveWriter {
  readonly path: string;

  constructor(path: string, label: string, stage: Stage) {
    this.path = path;
    writeFileSync(path, JSON.stringify({ schema: CURVE_SCHEMA, label, stage }) + "\n");
  }

  append(tokensSeen: number, valLoss: number, extra: Record<string, number> = {}): void {
    appendFileSync(
      this.path,
      JSON.stringify({ tokens_seen: tokensSeen, val_loss: valLoss, ...extra }) + "\n",
    );
  }
}

export function readCurve(path: string): Curve {
  const curve: Curve = { label: "", stage: "", tokens: [], losses: [] };
  const lines = readFileSync(path, "utf8").split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (line === "") continue;
    const record = JSON.parse(line);
    if ("schema" in record) {
      if (record.schema !== CURVE_SCHEMA) {
        throw new Error(`${path}:${i + 1}: unsupported curve schema ${record.schema}`);
      }
      curve.label = record.label ?? "";
      curve.stage = record.stage ?? "";
      continue;
    }
    if (typeof record.tokens_seen !== "number" || typeof record.val_loss !== "number") {
      throw new Error(`${path}:${i + 1}: record missing tokens_seen/val_loss`);
    }
    curve.tokens.push(record.tokens_seen);
    curve.losses.push(record.val_loss);
  }
  if (curve.tokens.length === 0) throw new Error(`${path}: no curve records`);
  return curve;
}
