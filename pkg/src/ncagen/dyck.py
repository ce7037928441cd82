"""Balanced k-Dyck sequence generation, shard-compatible with NCA corpora.

Token ids: opening bracket of type t is 2t, its closing partner 2t + 1,
giving a dense vocabulary of 2k ids. The sampler walks left to right and
opens a uniformly chosen type with probability p_open whenever the
remaining length still permits closing everything, otherwise closes the
most recent open bracket; depth is unbounded.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ConfigError
from .seeding import STREAM_NOISE, rule_seed_for, substream


def open_token(bracket_type: int) -> int:
    return 2 * bracket_type


def close_token(bracket_type: int) -> int:
    return 2 * bracket_type + 1


def dyck_sequence(k: int, seq_len: int, seed: int, p_open: float = 0.5) -> np.ndarray:
    """One balanced, properly nested sequence of exactly seq_len tokens.

    One coin and one type are drawn per position whether used or not, so
    the random stream is position-indexed and easy to reason about.
    """
    if seq_len % 2:
        raise ConfigError(f"balanced strings have even length, got seq_len={seq_len}")
    rng = substream(seed, STREAM_NOISE)
    coins = rng.random(seq_len)
    types = rng.integers(0, k, seq_len)
    out = np.empty(seq_len, dtype=np.int64)
    stack: list[int] = []
    for pos in range(seq_len):
        depth = len(stack)
        if depth == 0 or (seq_len - pos > depth and coins[pos] < p_open):
            t = int(types[pos])
            stack.append(t)
            out[pos] = 2 * t
        else:
            out[pos] = 2 * stack.pop() + 1
    return out


def generate_dyck(
    k: int,
    token_budget: int,
    seq_len: int,
    seed: int,
    out_path,
    p_open: float = 0.5,
) -> "ShardHeader":
    """Write ceil(token_budget / seq_len) Dyck sequences as a shard."""
    from .shard import ShardHeader, write_shard

    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    if k > 0xFFFF:
        raise ConfigError(f"k must fit the 16-bit header field, got {k}")
    if seq_len % 2 or seq_len < 2:
        raise ConfigError(f"seq_len must be even and >= 2, got {seq_len}")
    if not 0.0 < p_open < 1.0:
        raise ConfigError(f"p_open must be in (0, 1), got {p_open}")
    if token_budget < 1:
        raise ConfigError(f"token_budget must be >= 1, got {token_budget}")
    num_sequences = math.ceil(token_budget / seq_len)
    header = ShardHeader.for_dyck(k, seq_len, num_sequences, seed)
    write_shard(
        out_path,
        header,
        (
            dyck_sequence(k, seq_len, rule_seed_for(seed, i), p_open)
            for i in range(num_sequences)
        ),
    )
    return header
