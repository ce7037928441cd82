"""Deterministic per-sequence seeding.

Every random draw that goes into sequence `i` (rule weights, initial grid,
sampling noise) is derived from a single 64-bit `rule_seed` obtained by
mixing the corpus master seed with the sequence index. Because no generator
state is ever shared between sequences, output is byte-identical no matter
how many workers run or in what order they finish.

Within one sequence the three consumers draw from separate named substreams
of the same rule_seed, so `sample_rule`, `sample_init`, and the rollout
noise never replay each other's bits.
"""

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

# Substream tags for the per-sequence generators.
STREAM_RULE = 0
STREAM_INIT = 1
STREAM_NOISE = 2


def _finalize(z: int) -> int:
    """SplitMix64 finalizer: full-avalanche 64-bit permutation."""
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def mix64(*values: int) -> int:
    """Fold any number of 64-bit values into one well-mixed 64-bit value.

    SplitMix64-style: each value advances the state by the golden-ratio
    increment and is passed through the finalizer, so (a, b) and (b, a)
    mix to different outputs and single-bit input changes avalanche.
    """
    h = 0
    for v in values:
        h = _finalize((h + _GOLDEN + (v & _MASK64)) & _MASK64)
    return h


def rule_seed_for(master_seed: int, sequence_index: int) -> int:
    """The 64-bit seed owning all randomness of one sequence."""
    return mix64(master_seed, sequence_index)


def retry_sub_index(sequence_index: int, attempt: int) -> int:
    """Sub-index for rejection-sampling attempt `attempt` of a sequence.

    Mixing the attempt counter in keeps retries deterministic without
    perturbing any other sequence's stream.
    """
    return mix64(sequence_index, attempt)


def substream(rule_seed: int, stream: int) -> np.random.Generator:
    """A PCG64 generator for one named substream of a rule_seed."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([rule_seed, stream])))
