"""Command-line surface: generation, statistics, rendering, inspection.

Report-producing subcommands (stats, hist, compare) write the JSON report
plus CSV tables and PNG figures next to it when --json is given, and
print the JSON to stdout otherwise.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .complexity import COMPRESSOR_LEVEL, complexity_histogram
from .config import ComplexityBand, GenConfig
from .corpus import generate_corpus, sidecar_path
from .dyck import generate_dyck
from .errors import ConfigError, NcagenError
from .metrics import compare_runs, read_curve
from .render import render_trajectory
from .shard import ShardReader
from .stats import shard_ratio_histogram, zipf_report

__all__ = ["main"]


def _parse_hw(text: str, what: str) -> tuple[int, int]:
    try:
        h, w = text.lower().split("x", 1)
        return int(h), int(w)
    except ValueError as exc:
        raise ConfigError(f"cannot parse {what} {text!r}; expected HxW") from exc


def _config_from_args(args) -> GenConfig:
    grid_h, grid_w = _parse_hw(args.grid, "--grid")
    patch_h, patch_w = _parse_hw(args.patch, "--patch")
    return GenConfig(
        alphabet_n=args.n,
        grid_h=grid_h,
        grid_w=grid_w,
        patch_h=patch_h,
        patch_w=patch_w,
        temperature=args.temperature,
        max_seq_len=args.seq_len,
        master_seed=args.seed,
        band=ComplexityBand.parse(args.band),
    )


def _header_dict(header) -> dict:
    return {
        "format_version": header.format_version,
        "kind": "dyck" if header.is_dyck else "nca",
        "alphabet_n": header.alphabet_n,
        "grid": f"{header.grid_h}x{header.grid_w}",
        "patch": f"{header.patch_h}x{header.patch_w}",
        "seq_len": header.seq_len,
        "num_sequences": header.num_sequences,
        "total_tokens": header.total_tokens,
        "vocab_size": header.vocab_size,
        "master_seed": header.master_seed,
        "band": None if header.is_dyck else str(header.band),
        "compressor_level": header.compressor_level,
    }


def _emit_report(report: dict, json_path: str | None) -> Path | None:
    """Write the report or print it; returns the stem for sibling files."""
    if json_path is None:
        json.dump(report, sys.stdout, indent=2)
        sys.stdout.write("\n")
        return None
    path = Path(json_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report, indent=2) + "\n")
    print(f"wrote {path}")
    return path.with_suffix("")


def _sibling(stem: Path, suffix: str) -> Path:
    # not Path.with_suffix: a dotted stem like out.v1 must stay intact
    return stem.parent / (stem.name + suffix)


def _write_csv(path: Path, fieldnames: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {path}")


def _zipf_csv_rows(report):
    for rank in range(min(1000, report.distinct_tokens)):
        yield {
            "rank": rank + 1,
            "token_id": int(report.token_ids[rank]),
            "count": int(report.counts[rank]),
            "frequency": float(report.frequencies[rank]),
        }


def _hist_csv_rows(hist):
    for low, high, count in zip(hist.bin_edges[:-1], hist.bin_edges[1:], hist.counts):
        yield {"bin_low_pct": float(low), "bin_high_pct": float(high), "count": int(count)}


def cmd_generate(args) -> int:
    config = _config_from_args(args)
    stats = generate_corpus(config, args.tokens, args.out, workers=args.workers)
    attempts = stats["attempts"]
    throughput = stats["throughput"]
    print(
        f"wrote {args.out}: {stats['num_sequences']} sequences, "
        f"{stats['total_tokens']} tokens, band {config.band}, "
        f"acceptance {attempts['acceptance_rate']:.3f}, "
        f"{throughput['tokens_per_second']:.0f} tokens/s"
    )
    print(f"wrote {sidecar_path(args.out)}")
    return 0


def cmd_dyck(args) -> int:
    header = generate_dyck(
        args.k, args.tokens, args.seq_len, args.seed, args.out, p_open=args.p_open
    )
    print(
        f"wrote {args.out}: {header.num_sequences} sequences, "
        f"{header.total_tokens} tokens, vocab {header.vocab_size}"
    )
    return 0


def cmd_stats(args) -> int:
    # figures import matplotlib; keep startup cheap for every other command
    from .plots import plot_ratio_histogram, plot_zipf

    want_zipf, want_hist = args.zipf, args.gzip_hist
    header = ShardReader(args.shard).header
    if not want_zipf and not want_hist:
        want_zipf = True
        want_hist = not header.is_dyck
    report = {"schema": "shard_stats.v1", "shard": str(args.shard), "header": _header_dict(header)}
    zipf = hist = None
    if want_zipf:
        zipf = zipf_report(args.shard, include_delimiters=args.include_delimiters)
        report["zipf"] = zipf.to_json_dict()
    if want_hist:
        hist = shard_ratio_histogram(args.shard)
        report["gzip_hist"] = hist.to_json_dict()
    stem = _emit_report(report, args.json)
    if stem is not None:
        if zipf is not None:
            _write_csv(
                _sibling(stem, ".zipf.csv"),
                ["rank", "token_id", "count", "frequency"],
                _zipf_csv_rows(zipf),
            )
            print(f"wrote {plot_zipf(zipf, _sibling(stem, '.zipf.png'))}")
        if hist is not None:
            _write_csv(
                _sibling(stem, ".gzip_hist.csv"),
                ["bin_low_pct", "bin_high_pct", "count"],
                _hist_csv_rows(hist),
            )
            png = plot_ratio_histogram(hist, _sibling(stem, ".gzip_hist.png"), band=header.band)
            print(f"wrote {png}")
    return 0


def cmd_hist(args) -> int:
    from .plots import plot_ratio_histogram

    config = _config_from_args(args)
    hist = complexity_histogram(args.samples, config)
    report = {
        "schema": "shard_stats.v1",
        "alphabet_n": config.alphabet_n,
        "samples": args.samples,
        "master_seed": config.master_seed,
        "gzip_hist": hist.to_json_dict(),
    }
    stem = _emit_report(report, args.json)
    if stem is not None:
        _write_csv(
            _sibling(stem, ".gzip_hist.csv"),
            ["bin_low_pct", "bin_high_pct", "count"],
            _hist_csv_rows(hist),
        )
        print(f"wrote {plot_ratio_histogram(hist, _sibling(stem, '.gzip_hist.png'))}")
    return 0


def cmd_render(args) -> int:
    result = render_trajectory(args.shard, args.index, fmt=args.format, out_dir=args.out)
    if args.format == "ascii":
        if args.out:
            out = Path(args.out)
            # --out names a directory for frames but a file for text
            out.parent.mkdir(parents=True, exist_ok=True)
            out.write_text(result)
            print(f"wrote {out}")
        else:
            sys.stdout.write(result)
    else:
        print(f"wrote {len(result)} frames to {args.out}")
    return 0


def cmd_inspect(args) -> int:
    reader = ShardReader(args.shard)
    for key, value in _header_dict(reader.header).items():
        print(f"{key}: {value}")
    preview = reader[0][:64]
    suffix = " ..." if reader.header.seq_len > len(preview) else ""
    print(f"sequence[0]: {' '.join(str(t) for t in preview)}{suffix}")
    return 0


def cmd_compare(args) -> int:
    from .plots import plot_curves

    baselines = [read_curve(p) for p in args.baseline]
    candidates = [read_curve(p) for p in args.candidate]
    report = compare_runs(
        baselines,
        candidates,
        candidate_ppt_tokens=args.candidate_ppt_tokens,
        baseline_ppt_tokens=args.baseline_ppt_tokens,
        target_loss=args.target_loss,
        interpolate=not args.no_interpolate,
    )
    stem = _emit_report(report, args.json)
    if stem is not None:
        _write_csv(
            _sibling(stem, ".per_seed.csv"),
            list(report["per_seed"][0].keys()),
            report["per_seed"],
        )
        png = plot_curves(baselines + candidates, _sibling(stem, ".curves.png"),
                          target_loss=args.target_loss)
        print(f"wrote {png}")
    summary = report["summary"]
    if summary["token_efficiency_gain_mean"] is not None:
        print(
            f"token efficiency gain {summary['token_efficiency_gain_mean']:.3f} "
            f"± {summary['token_efficiency_gain_std']:.3f}, "
            f"speedup {summary['convergence_speedup_mean']:.2f}x "
            f"over {report['seeds_reached']}/{report['num_seeds']} seeds"
        )
    else:
        print("no seed reached the target loss")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ncagen",
        description="Synthetic token corpora from neural cellular automata.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate an NCA corpus shard")
    p.add_argument("--n", type=int, default=10, help="alphabet size (default 10)")
    p.add_argument("--grid", default="12x12", help="grid HxW (default 12x12)")
    p.add_argument("--patch", default="2x2", help="patch HxW (default 2x2)")
    p.add_argument("--band", default="50+", help="gzip-ratio band LO-HI or LO+ (default 50+)")
    p.add_argument("--tokens", type=int, required=True, help="token budget")
    p.add_argument("--seq-len", type=int, default=1024, help="max tokens per sequence")
    p.add_argument("--temperature", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output shard path")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("dyck", help="generate a balanced-bracket baseline shard")
    p.add_argument("--k", type=int, default=128, help="bracket types (default 128)")
    p.add_argument("--tokens", type=int, required=True, help="token budget")
    p.add_argument("--seq-len", type=int, default=988, help="tokens per sequence (even)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p-open", type=float, default=0.5, help="open probability")
    p.add_argument("--out", required=True, help="output shard path")
    p.set_defaults(func=cmd_dyck)

    p = sub.add_parser("stats", help="token and complexity statistics of a shard")
    p.add_argument("shard")
    p.add_argument("--zipf", action="store_true", help="rank-frequency fit")
    p.add_argument("--gzip-hist", action="store_true", help="per-sequence gzip ratios")
    p.add_argument("--include-delimiters", action="store_true")
    p.add_argument("--json", help="report path; CSV and PNG siblings are written too")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("hist", help="gzip-ratio histogram of unfiltered rules")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--grid", default="12x12")
    p.add_argument("--patch", default="2x2")
    p.add_argument("--band", default="0+", help="ignored for sampling, kept for config echo")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seq-len", type=int, default=1024)
    p.add_argument("--temperature", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", help="report path; CSV and PNG siblings are written too")
    p.set_defaults(func=cmd_hist)

    p = sub.add_parser("render", help="render one sequence as text or PGM frames")
    p.add_argument("shard")
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--format", choices=["ascii", "pgm-frames"], default="ascii")
    p.add_argument("--out", help="text file (ascii) or frame directory (pgm-frames)")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("inspect", help="dump shard header and first sequence")
    p.add_argument("shard")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("compare", help="efficiency report from training-curve logs")
    p.add_argument("--baseline", action="append", required=True,
                   help="baseline curve JSONL, repeat per seed")
    p.add_argument("--candidate", action="append", required=True,
                   help="candidate curve JSONL, repeat per seed")
    p.add_argument("--target-loss", type=float, default=None,
                   help="fixed target; default is each baseline's final loss")
    p.add_argument("--candidate-ppt-tokens", type=float, default=0.0)
    p.add_argument("--baseline-ppt-tokens", type=float, default=0.0)
    p.add_argument("--no-interpolate", action="store_true")
    p.add_argument("--json", help="report path; CSV and PNG siblings are written too")
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NcagenError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
