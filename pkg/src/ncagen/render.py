"""Human-readable trajectory rendering: ascii text and PGM image frames."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import ConfigError
from .nca import Trajectory
from .shard import ShardReader
from .tokenizer import TokenSequence, deserialize_tokens

__all__ = ["render_ascii", "parse_ascii", "write_pgm_frames", "render_trajectory"]

# One glyph per state; index is the state value.
GLYPHS = "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def render_ascii(traj: Trajectory) -> str:
    """Each timestep as grid_h lines of glyphs, timesteps blank-line separated."""
    frames = []
    for grid in traj.grids:
        if int(grid.max(initial=0)) >= len(GLYPHS):
            raise ConfigError(
                f"ascii rendering supports at most {len(GLYPHS)} states"
            )
        frames.append("\n".join("".join(GLYPHS[c] for c in row) for row in grid))
    return "\n\n".join(frames) + "\n"


def parse_ascii(text: str) -> Trajectory:
    """Inverse of render_ascii; glyphs map back to their state values."""
    lookup = {g: i for i, g in enumerate(GLYPHS)}
    grids = []
    for frame in text.strip().split("\n\n"):
        rows = []
        for line in frame.splitlines():
            try:
                rows.append([lookup[g] for g in line])
            except KeyError as exc:
                raise ConfigError(f"unknown glyph {exc.args[0]!r}") from exc
        grid = np.array(rows, dtype=np.uint8)
        if grid.ndim != 2 or any(len(r) != len(rows[0]) for r in rows):
            raise ConfigError("ragged ascii frame")
        grids.append(grid)
    return Trajectory(rule_seed=0, grids=tuple(grids))


def write_pgm_frames(
    traj: Trajectory, alphabet_n: int, out_dir, prefix: str = "frame"
) -> list[Path]:
    """One binary (P5) grayscale PGM per timestep, states spread over 0..255."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    width = len(str(max(len(traj.grids) - 1, 0)))
    paths = []
    for t, grid in enumerate(traj.grids):
        gray = np.round(grid.astype(np.float64) * (255.0 / max(alphabet_n - 1, 1)))
        h, w = grid.shape
        path = out_dir / f"{prefix}_{t:0{width}d}.pgm"
        path.write_bytes(
            f"P5\n{w} {h}\n255\n".encode("ascii")
            + gray.astype(np.uint8).tobytes()
        )
        paths.append(path)
    return paths


def read_pgm(path) -> np.ndarray:
    """Minimal P5 reader for round-trip checks (no comment support)."""
    raw = Path(path).read_bytes()
    magic, dims, maxval, pixels = raw.split(b"\n", 3)
    if magic != b"P5":
        raise ConfigError(f"not a binary PGM: {path}")
    w, h = (int(v) for v in dims.split())
    return np.frombuffer(pixels[: h * w], dtype=np.uint8).reshape(h, w)


def render_trajectory(
    shard_path, sequence_index: int, fmt: str = "ascii", out_dir=None
):
    """Load one sequence from a shard and render it.

    Returns the text for fmt="ascii" and the list of written frame paths
    for fmt="pgm-frames" (out_dir required).
    """
    reader = ShardReader(shard_path)
    header = reader.header
    if header.is_dyck:
        raise ConfigError("Dyck shards have no grid to render")
    if not 0 <= sequence_index < len(reader):
        raise ConfigError(
            f"sequence index {sequence_index} out of range [0, {len(reader)})"
        )
    seq = TokenSequence(reader[sequence_index], header.vocab, rule_seed=0)
    traj = deserialize_tokens(seq, header.grid_h, header.grid_w)
    if fmt == "ascii":
        return render_ascii(traj)
    if fmt == "pgm-frames":
        if out_dir is None:
            raise ConfigError("pgm-frames rendering needs an output directory")
        return write_pgm_frames(
            traj, header.alphabet_n, out_dir, prefix=f"seq{sequence_index:06d}"
        )
    raise ConfigError(f"unknown render format {fmt!r}")
