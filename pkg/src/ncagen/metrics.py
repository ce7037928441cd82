"""Training-curve logs and the transfer-efficiency arithmetic over them.

Curves arrive as JSON lines: an optional header record carrying the
schema tag, label, and stage, followed by one record per evaluation with
tokens_seen and val_loss. The same files are written by the training
harness and read back here, so the format is versioned.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConfigError, MetricUndefinedError

__all__ = [
    "TrainingCurve",
    "tokens_to_reach",
    "token_efficiency_gain",
    "convergence_speedup",
    "read_curve",
    "write_curve",
    "compare_runs",
]

CURVE_SCHEMA = "curve.v1"
REPORT_SCHEMA = "transfer_report.v1"

STAGES = ("", "pre-pre-training", "pre-training")


@dataclass(frozen=True)
class TrainingCurve:
    """Validation loss against cumulative training tokens, one run."""

    tokens: np.ndarray  # strictly increasing
    losses: np.ndarray  # finite, positive
    label: str = ""
    stage: str = ""

    def __post_init__(self):
        tokens = np.asarray(self.tokens, dtype=np.float64)
        losses = np.asarray(self.losses, dtype=np.float64)
        object.__setattr__(self, "tokens", tokens)
        object.__setattr__(self, "losses", losses)
        if tokens.ndim != 1 or tokens.shape != losses.shape or len(tokens) == 0:
            raise ConfigError("curve needs matching, non-empty token/loss arrays")
        if not (np.diff(tokens) > 0).all():
            raise ConfigError(f"tokens_seen must be strictly increasing ({self.label!r})")
        if not (np.isfinite(losses).all() and (losses > 0).all()):
            raise ConfigError(f"losses must be finite and positive ({self.label!r})")
        if self.stage not in STAGES:
            raise ConfigError(f"unknown stage {self.stage!r}, expected one of {STAGES}")

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def final_loss(self) -> float:
        return float(self.losses[-1])


def tokens_to_reach(
    curve: TrainingCurve, target_loss: float, interpolate: bool = True
) -> float | None:
    """Tokens at the first point where loss drops to target_loss or below.

    With interpolation the crossing is placed linearly inside the first
    segment that straddles the target; without it, the first logged
    tokens_seen at or below target is returned. None when the curve never
    attains the target.
    """
    below = np.nonzero(curve.losses <= target_loss)[0]
    if len(below) == 0:
        return None
    i = int(below[0])
    if not interpolate or i == 0:
        return float(curve.tokens[i])
    t0, t1 = curve.tokens[i - 1], curve.tokens[i]
    l0, l1 = curve.losses[i - 1], curve.losses[i]
    return float(t0 + (t1 - t0) * (l0 - target_loss) / (l0 - l1))


def token_efficiency_gain(
    t_ppt_a: float, t_pt_a: float, t_ppt_b: float, t_pt_b: float
) -> float:
    """1 - (a's total training tokens) / (b's total training tokens).

    b is the reference run; its pre-pre-training term is 0 for a scratch
    baseline. Positive values mean a reached the target on fewer tokens.
    """
    denominator = t_ppt_b + t_pt_b
    if denominator <= 0:
        raise MetricUndefinedError(
            f"token_efficiency_gain needs positive reference tokens, got {denominator}"
        )
    return 1.0 - (t_ppt_a + t_pt_a) / denominator


def convergence_speedup(
    curve_a: TrainingCurve,
    curve_b: TrainingCurve,
    target_loss: float,
    interpolate: bool = True,
) -> float:
    """How many times fewer tokens curve_a needs than curve_b to hit target."""
    t_a = tokens_to_reach(curve_a, target_loss, interpolate)
    t_b = tokens_to_reach(curve_b, target_loss, interpolate)
    for name, curve, t in (("a", curve_a, t_a), ("b", curve_b, t_b)):
        if t is None:
            label = curve.label or f"curve_{name}"
            raise MetricUndefinedError(
                f"{label} never reaches target loss {target_loss}"
            )
    return t_b / t_a


def read_curve(path) -> TrainingCurve:
    """Load a JSON-lines curve log.

    A leading record with a "schema" key is the header (label, stage);
    every other record must carry tokens_seen and val_loss. Unknown keys
    are ignored so harness logs can carry extra diagnostics.
    """
    label, stage = "", ""
    tokens: list[float] = []
    losses: list[float] = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{lineno}: bad JSON: {exc}") from exc
        if "schema" in record:
            if record["schema"] != CURVE_SCHEMA:
                raise ConfigError(
                    f"{path}:{lineno}: unsupported curve schema {record['schema']!r}"
                )
            label = record.get("label", "")
            stage = record.get("stage", "")
            continue
        try:
            tokens.append(float(record["tokens_seen"]))
            losses.append(float(record["val_loss"]))
        except KeyError as exc:
            raise ConfigError(f"{path}:{lineno}: record missing {exc}") from exc
    if not tokens:
        raise ConfigError(f"{path}: no curve records")
    return TrainingCurve(np.array(tokens), np.array(losses), label=label, stage=stage)


def write_curve(curve: TrainingCurve, path) -> None:
    lines = [
        json.dumps({"schema": CURVE_SCHEMA, "label": curve.label, "stage": curve.stage})
    ]
    lines += (
        json.dumps({"tokens_seen": t, "val_loss": l})
        for t, l in zip(curve.tokens.tolist(), curve.losses.tolist())
    )
    Path(path).write_text("\n".join(lines) + "\n")


def _mean_std(values: list[float]) -> tuple[float | None, float | None]:
    if not values:
        return None, None
    arr = np.asarray(values)
    std = float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
    return float(arr.mean()), std


def compare_runs(
    baseline_curves: Sequence[TrainingCurve],
    candidate_curves: Sequence[TrainingCurve],
    candidate_ppt_tokens: float = 0.0,
    baseline_ppt_tokens: float = 0.0,
    target_loss: float | None = None,
    interpolate: bool = True,
) -> dict:
    """Seed-paired efficiency comparison of candidate runs against baselines.

    Curves pair by position (one seed per index). The per-seed target is
    target_loss when given, otherwise that seed's baseline final loss.
    Seeds whose candidate never reaches the target are reported with null
    metrics and excluded from the summary means.
    """
    if len(baseline_curves) != len(candidate_curves) or not baseline_curves:
        raise ConfigError(
            f"need equal, non-empty curve lists, got {len(baseline_curves)} "
            f"baselines and {len(candidate_curves)} candidates"
        )
    per_seed = []
    gains: list[float] = []
    speedups: list[float] = []
    for seed, (base, cand) in enumerate(zip(baseline_curves, candidate_curves)):
        target = base.final_loss if target_loss is None else target_loss
        t_base = tokens_to_reach(base, target, interpolate)
        t_cand = tokens_to_reach(cand, target, interpolate)
        entry = {
            "seed": seed,
            "baseline_label": base.label,
            "candidate_label": cand.label,
            "target_loss": target,
            "baseline_tokens": t_base,
            "candidate_tokens": t_cand,
            "reached": t_base is not None and t_cand is not None,
            "token_efficiency_gain": None,
            "convergence_speedup": None,
        }
        if entry["reached"]:
            gain = token_efficiency_gain(
                candidate_ppt_tokens, t_cand, baseline_ppt_tokens, t_base
            )
            entry["token_efficiency_gain"] = gain
            entry["convergence_speedup"] = t_base / t_cand
            gains.append(gain)
            speedups.append(entry["convergence_speedup"])
        per_seed.append(entry)
    gain_mean, gain_std = _mean_std(gains)
    speedup_mean, speedup_std = _mean_std(speedups)
    return {
        "schema": REPORT_SCHEMA,
        "interpolate": interpolate,
        "target_loss": target_loss,
        "candidate_ppt_tokens": candidate_ppt_tokens,
        "baseline_ppt_tokens": baseline_ppt_tokens,
        "num_seeds": len(per_seed),
        "seeds_reached": len(gains),
        "per_seed": per_seed,
        "summary": {
            "token_efficiency_gain_mean": gain_mean,
            "token_efficiency_gain_std": gain_std,
            "convergence_speedup_mean": speedup_mean,
            "convergence_speedup_std": speedup_std,
        },
    }
