"""End-to-end corpus generation into binary shards, with a JSON sidecar.

Sequences are generated in parallel (each owns its seed stream) and
written by a single ordered consumer, so shard bytes are identical for
any worker count.
"""

from __future__ import annotations

import json
import math
import multiprocessing
import time
from pathlib import Path

import numpy as np

from .complexity import COMPRESSOR_LEVEL, build_histogram, sample_in_band
from .config import GenConfig
from .errors import RetriesExhausted
from .shard import ShardHeader, write_shard
from .tokenizer import VocabSpec, serialize_trajectory

STATS_SCHEMA = "corpus_stats.v1"

_worker_config: GenConfig | None = None


def _init_worker(config: GenConfig) -> None:
    global _worker_config
    _worker_config = config


def _generate_sequence(index: int):
    config = _worker_config
    try:
        rule, traj, attempts = sample_in_band(config.master_seed, index, config)
    except RetriesExhausted as exc:
        raise RetriesExhausted(exc.attempts, exc.last_ratio, exc.band, index) from None
    tokens = serialize_trajectory(traj, VocabSpec.from_config(config)).tokens
    return tokens.astype("<u4"), traj.gzip_ratio_pct, attempts


def sidecar_path(shard_path) -> Path:
    return Path(str(shard_path) + ".stats.json")


def generate_corpus(
    config: GenConfig, token_budget: int, out_path, workers: int = 1
) -> dict:
    """Generate ceil(token_budget / seq_tokens) in-band sequences into a shard.

    Writes `out_path` plus a `<out_path>.stats.json` sidecar and returns the
    sidecar dict. Shard bytes are deterministic in (config, token_budget).
    """
    if token_budget < 1:
        raise ValueError(f"token_budget must be >= 1, got {token_budget}")
    num_sequences = math.ceil(token_budget / config.seq_tokens)
    header = ShardHeader.for_nca(config, num_sequences, COMPRESSOR_LEVEL)

    ratios = np.empty(num_sequences)
    attempts_total = 0
    start = time.perf_counter()

    def ordered_results():
        if workers <= 1:
            _init_worker(config)
            results = map(_generate_sequence, range(num_sequences))
            yield from _unpack(results)
        else:
            with multiprocessing.Pool(
                workers, initializer=_init_worker, initargs=(config,)
            ) as pool:
                results = pool.imap(_generate_sequence, range(num_sequences), chunksize=4)
                yield from _unpack(results)

    def _unpack(results):
        nonlocal attempts_total
        for i, (tokens, ratio, attempts) in enumerate(results):
            ratios[i] = ratio
            attempts_total += attempts
            yield tokens

    write_shard(out_path, header, ordered_results())
    elapsed = time.perf_counter() - start

    total_tokens = num_sequences * config.seq_tokens
    stats = {
        "schema": STATS_SCHEMA,
        "kind": "nca",
        "config": {
            "alphabet_n": config.alphabet_n,
            "grid": [config.grid_h, config.grid_w],
            "patch": [config.patch_h, config.patch_w],
            "temperature": config.temperature,
            "timesteps": config.timesteps,
            "max_seq_len": config.max_seq_len,
            "conv_channels": config.conv_channels,
            "mlp_hidden": config.mlp_hidden,
            "master_seed": config.master_seed,
            "band": str(config.band),
            "compressor_level": COMPRESSOR_LEVEL,
        },
        "token_budget": token_budget,
        "num_sequences": num_sequences,
        "seq_len": config.seq_tokens,
        "total_tokens": total_tokens,
        "attempts": {
            "total": attempts_total,
            "accepted": num_sequences,
            "rejected": attempts_total - num_sequences,
            "acceptance_rate": num_sequences / attempts_total,
        },
        "accepted_ratios_pct": [round(float(r), 4) for r in ratios],
        "accepted_ratio_histogram": build_histogram(ratios).to_json_dict(),
        "throughput": {
            "wall_seconds": round(elapsed, 3),
            "tokens_per_second": round(total_tokens / elapsed, 1),
            "workers": workers,
        },
    }
    sidecar_path(out_path).write_text(json.dumps(stats, indent=2) + "\n")
    return stats
