"""Bijective patch tokenization of grids, with per-timestep delimiters.

A grid is cut into non-overlapping patch_h x patch_w patches; each patch's
cells, read row-major, form the digits of a base-n integer token. Each
timestep is framed by open/close delimiter tokens whose ids sit directly
after the patch vocabulary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import GenConfig
from .errors import ConfigError, TokenParseError
from .nca import Trajectory


@dataclass(frozen=True)
class VocabSpec:
    """Token-id layout for one (alphabet, patch shape) combination."""

    alphabet_n: int
    patch_h: int
    patch_w: int

    @property
    def cells_per_patch(self) -> int:
        return self.patch_h * self.patch_w

    @property
    def patch_vocab_size(self) -> int:
        return self.alphabet_n**self.cells_per_patch

    @property
    def grid_open_id(self) -> int:
        return self.patch_vocab_size

    @property
    def grid_close_id(self) -> int:
        return self.patch_vocab_size + 1

    @property
    def total_vocab(self) -> int:
        return self.patch_vocab_size + 2

    @property
    def place_values(self) -> np.ndarray:
        """Base-n positional weights, most significant digit first."""
        k = self.cells_per_patch
        return self.alphabet_n ** np.arange(k - 1, -1, -1, dtype=np.int64)

    @classmethod
    def from_config(cls, config: GenConfig) -> "VocabSpec":
        return cls(config.alphabet_n, config.patch_h, config.patch_w)


@dataclass(frozen=True)
class TokenSequence:
    """A serialized trajectory: alternating open/patches/close blocks."""

    tokens: np.ndarray  # int64
    vocab: VocabSpec
    rule_seed: int

    def __len__(self) -> int:
        return len(self.tokens)


def encode_patch(cells, n: int) -> int:
    """Cells (row-major within the patch) -> base-n positional code."""
    code = 0
    for c in cells:
        c = int(c)
        if not 0 <= c < n:
            raise ValueError(f"cell value {c} outside alphabet of size {n}")
        code = code * n + c
    return code


def decode_patch(token_id: int, n: int, cells_per_patch: int = 4) -> list[int]:
    """Inverse of encode_patch."""
    if not 0 <= token_id < n**cells_per_patch:
        raise ValueError(
            f"token id {token_id} outside patch vocabulary of size {n**cells_per_patch}"
        )
    cells = []
    for _ in range(cells_per_patch):
        token_id, c = divmod(token_id, n)
        cells.append(c)
    return cells[::-1]


def _grid_patches(grid: np.ndarray, vocab: VocabSpec) -> np.ndarray:
    """(num_patches, cells_per_patch) cell matrix, patch-row-major scan."""
    h, w = grid.shape
    ph, pw = vocab.patch_h, vocab.patch_w
    return (
        grid.reshape(h // ph, ph, w // pw, pw)
        .transpose(0, 2, 1, 3)
        .reshape(-1, vocab.cells_per_patch)
    )


def serialize_trajectory(traj: Trajectory, vocab: VocabSpec) -> TokenSequence:
    """Tokenize every timestep: open, patch tokens (patch rows top-to-bottom,
    patch columns left-to-right), close; timesteps concatenated."""
    if not traj.grids:
        return TokenSequence(np.empty(0, dtype=np.int64), vocab, traj.rule_seed)
    h, w = traj.grids[0].shape
    if h % vocab.patch_h or w % vocab.patch_w:
        raise ConfigError(
            f"grid {h}x{w} not divisible by patch {vocab.patch_h}x{vocab.patch_w}"
        )
    place = vocab.place_values
    blocks = []
    open_tok = np.array([vocab.grid_open_id], dtype=np.int64)
    close_tok = np.array([vocab.grid_close_id], dtype=np.int64)
    for grid in traj.grids:
        patch_ids = _grid_patches(grid, vocab).astype(np.int64) @ place
        blocks.extend((open_tok, patch_ids, close_tok))
    return TokenSequence(np.concatenate(blocks), vocab, traj.rule_seed)


def deserialize_tokens(
    seq: TokenSequence, grid_h: int, grid_w: int
) -> Trajectory:
    """Exact inverse of serialize_trajectory on its image.

    Raises TokenParseError, carrying the failing token offset, on any
    framing defect: misplaced delimiters, wrong block length, or patch
    tokens outside the vocabulary.
    """
    vocab = seq.vocab
    tokens = np.asarray(seq.tokens, dtype=np.int64)
    per_grid = (grid_h // vocab.patch_h) * (grid_w // vocab.patch_w)
    block = per_grid + 2
    grids = []
    pos = 0
    while pos < len(tokens):
        if tokens[pos] != vocab.grid_open_id:
            raise TokenParseError("expected grid-open delimiter", pos)
        if pos + block > len(tokens):
            raise TokenParseError("truncated grid block", len(tokens))
        patch_ids = tokens[pos + 1 : pos + 1 + per_grid]
        bad = (patch_ids < 0) | (patch_ids >= vocab.patch_vocab_size)
        if bad.any():
            raise TokenParseError(
                "patch token outside vocabulary", pos + 1 + int(np.argmax(bad))
            )
        if tokens[pos + block - 1] != vocab.grid_close_id:
            raise TokenParseError("expected grid-close delimiter", pos + block - 1)
        digits = patch_ids[:, None] // vocab.place_values % vocab.alphabet_n
        grid = (
            digits.reshape(
                grid_h // vocab.patch_h,
                grid_w // vocab.patch_w,
                vocab.patch_h,
                vocab.patch_w,
            )
            .transpose(0, 2, 1, 3)
            .reshape(grid_h, grid_w)
            .astype(np.uint8)
        )
        grids.append(grid)
        pos += block
    return Trajectory(rule_seed=seq.rule_seed, grids=tuple(grids))
