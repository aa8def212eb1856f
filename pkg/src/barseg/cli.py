"""Command-line interface.

Subcommands: features (audio -> Barwise TF matrix), segment (matrix ->
boundary file), eval (boundaries + annotations -> scores), sweep (grid
search over manifests), report (aggregate sweep results). Exit codes:
0 success, 2 when any track was skipped, 1 on fatal errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import io as bio
from .cbm import CbmParams, segment_cbm
from .core import BarMatrix, bars_from_downbeats, boundaries_to_seconds
from .errors import InvalidInput
from .evaluate import DEFAULT_SILENCE_LABELS, evaluate_track
from .features import (
    DEFAULT_FRAMES_PER_BAR,
    DEFAULT_HOP,
    DEFAULT_N_FFT,
    DEFAULT_N_MELS,
    barwise_tf,
    decode_audio,
    log_mel,
)
from .foote import FooteParams, segment_foote
from .harness import (
    SelectionPolicy,
    SweepGrid,
    emit_report,
    load_manifest,
    select_and_aggregate,
    sweep,
)
from .lsd import LsdParams, segment_lsd
from .ssm import build_ssm, normalize_rows

log = logging.getLogger("barseg")

TRIM_CHOICES = {"none": "none", "trim": "trim", "double": "double_trim"}


def _trimmings(values) -> tuple:
    return tuple(TRIM_CHOICES[v] for v in values)


def _silence_labels(arg: str | None):
    if not arg:
        return DEFAULT_SILENCE_LABELS
    return frozenset(s.strip().lower() for s in arg.split(",") if s.strip())


def _add_segment_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--algorithm", choices=("foote", "lsd", "cbm"), required=True)
    p.add_argument("--similarity", choices=("rbf", "cosine"), default="rbf")
    p.add_argument("--kernel-size", type=int, default=12, help="Foote kernel half-width")
    p.add_argument("--median-size", type=int, default=12, help="Foote median filter size")
    p.add_argument("--k", type=int, default=8, help="LSD cluster count")
    p.add_argument("--cbm-kernel", choices=("full", "band7"), default="full")
    p.add_argument("--max-size", type=int, default=32, help="CBM maximum segment size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pre-normalize", action="store_true",
                   help="scale feature rows to unit norm before the SSM")


def _segment(X: BarMatrix, args):
    if args.pre_normalize:
        X = normalize_rows(X)
    if args.algorithm == "foote":
        ssm = build_ssm(X, args.similarity)
        return segment_foote(ssm, FooteParams(args.kernel_size, args.median_size))
    if args.algorithm == "lsd":
        return segment_lsd(X, LsdParams(k=args.k, seed=args.seed))
    ssm = build_ssm(X, args.similarity)
    return segment_cbm(ssm, CbmParams(kernel=args.cbm_kernel, max_size=args.max_size))


def cmd_features(args) -> int:
    samples, rate = decode_audio(args.audio)
    duration = args.duration if args.duration else len(samples) / rate
    grid = bars_from_downbeats(bio.read_downbeats(args.downbeats), duration)
    spec = log_mel(samples, rate, n_fft=args.n_fft, hop=args.hop, n_mels=args.n_mels)
    X = barwise_tf(spec, grid, frames_per_bar=args.frames_per_bar)
    bio.write_matrix(args.out, X.values)
    log.info("wrote %s (%d bars x %d features)", args.out, *X.values.shape)
    return 0


def cmd_segment(args) -> int:
    X = BarMatrix(bio.read_matrix(args.matrix), feature_id="file")
    grid = bars_from_downbeats(bio.read_downbeats(args.downbeats), args.duration)
    if X.num_bars != grid.num_bars:
        raise InvalidInput(
            f"matrix rows ({X.num_bars}) != bar count ({grid.num_bars})"
        )
    seg = _segment(X, args)
    bio.write_boundaries(args.out, boundaries_to_seconds(seg, grid))
    log.info("wrote %d boundaries to %s", len(seg.boundaries_bars), args.out)
    return 0


def cmd_eval(args) -> int:
    est = list(bio.read_boundaries(args.boundaries))
    refs = [bio.read_annotation(p) for p in args.annotations]
    evaluation = evaluate_track(
        "track",
        refs,
        est,
        trimmings=_trimmings(args.trim),
        silence_labels=_silence_labels(args.silence_labels),
        trim_count=args.trim_segments,
    )
    rows = []
    for (tol, trimming), score in sorted(evaluation.scores.items()):
        rows.append(
            {
                "tolerance": tol,
                "trimming": trimming,
                "precision": round(100 * score.precision, 2),
                "recall": round(100 * score.recall, 2),
                "f_measure": round(100 * score.f_measure, 2),
                "chosen_annotation": evaluation.chosen_annotation[(tol, trimming)],
            }
        )
    if args.out:
        emit_report(rows, args.format, args.out)
    else:
        json.dump(rows, sys.stdout, indent=2)
        sys.stdout.write("\n")
    return 0


def cmd_sweep(args) -> int:
    datasets = {}
    for path in args.manifests:
        name, tracks = load_manifest(path)
        datasets.setdefault(name, []).extend(tracks)
    result = sweep(
        datasets,
        feature_id=args.feature_id,
        grid=SweepGrid(algorithm=args.algorithm),
        trimmings=_trimmings(args.trim),
        silence_labels=_silence_labels(args.silence_labels),
        seed=args.seed,
        jobs=args.jobs,
        cache_dir=args.cache_dir,
    )
    emit_report(result.rows, args.format, args.out)
    log.info(
        "sweep: %d rows, %d skipped, cache %d/%d hits",
        len(result.rows),
        len(result.skipped),
        result.cache_hits,
        result.cache_hits + result.cache_misses,
    )
    for dataset, track_id, reason in result.skipped:
        log.warning("skipped %s/%s: %s", dataset, track_id, reason)
    return 2 if result.skipped else 0


def cmd_report(args) -> int:
    rows = []
    for path in args.results:
        rows.extend(_load_rows(path))
    report = select_and_aggregate(rows, SelectionPolicy(mode=args.policy))
    emit_report(report, args.format, args.out)
    return 0


def _load_rows(path) -> list[dict]:
    if str(path).endswith(".json"):
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    import csv

    numeric = {"tolerance", "precision", "recall", "f_measure"}
    rows = []
    with open(path, "r", encoding="utf-8") as f:
        for row in csv.DictReader(f):
            for key in list(row):
                if key in numeric:
                    row[key] = float(row[key])
                elif key == "chosen_annotation":
                    row[key] = int(row[key])
            rows.append(row)
    return rows


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="barseg",
        description="Unsupervised music structure boundary detection at the bar scale.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("features", help="audio -> Barwise TF matrix file (NPY)")
    p.add_argument("audio")
    p.add_argument("--downbeats", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--duration", type=float, default=None)
    p.add_argument("--n-fft", type=int, default=DEFAULT_N_FFT)
    p.add_argument("--hop", type=int, default=DEFAULT_HOP)
    p.add_argument("--n-mels", type=int, default=DEFAULT_N_MELS)
    p.add_argument("--frames-per-bar", type=int, default=DEFAULT_FRAMES_PER_BAR)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("segment", help="matrix -> boundary file (seconds per line)")
    p.add_argument("matrix")
    p.add_argument("--downbeats", required=True)
    p.add_argument("--duration", type=float, required=True)
    p.add_argument("--out", required=True)
    _add_segment_flags(p)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("eval", help="boundary file + annotations -> scores")
    p.add_argument("boundaries")
    p.add_argument("annotations", nargs="+")
    p.add_argument("--trim", choices=tuple(TRIM_CHOICES), nargs="+", default=["none"])
    p.add_argument("--trim-segments", type=int, default=1,
                   help="boundaries dropped at each extremity when trimming")
    p.add_argument("--silence-labels", default=None)
    p.add_argument("--format", choices=("csv", "json", "markdown"), default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="grid search over dataset manifests")
    p.add_argument("manifests", nargs="+")
    p.add_argument("--feature-id", required=True)
    p.add_argument("--algorithm", choices=("foote", "lsd", "cbm"), required=True)
    p.add_argument("--trim", choices=tuple(TRIM_CHOICES), nargs="+", default=["none"])
    p.add_argument("--silence-labels", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--cache-dir", default=None)
    p.add_argument("--format", choices=("csv", "json", "markdown"), default="json")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="aggregate sweep results per selection policy")
    p.add_argument("results", nargs="+")
    p.add_argument(
        "--policy",
        choices=SelectionPolicy.MODES,
        default="per_model_across_datasets",
    )
    p.add_argument("--format", choices=("csv", "json", "markdown"), default="markdown")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except Exception as exc:  # fatal: bad inputs, unwritable outputs
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
