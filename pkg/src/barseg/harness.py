"""Dataset manifests, per-track runs, sweeps, selection and reports.

A manifest is a JSON file naming each track's input files; sweeps evaluate
the full hyperparameter grid per track with content-hash caching, so
re-runs are incremental. Aggregation follows the two selection policies
used for figures and tables: best configuration per model and dataset, or
best on average across all datasets per model.
"""
from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import io as bio
from .cbm import CbmParams, segment_cbm
from .core import BarMatrix, bars_from_downbeats, boundaries_to_seconds
from .errors import (
    EmptyAnnotation,
    FormatError,
    InvalidInput,
    TrackSkipped,
    UnsupportedFormat,
)
from .evaluate import DEFAULT_SILENCE_LABELS, TOLERANCES, TrackEval, evaluate_track
from .features import barwise_tf, decode_audio, log_mel
from .foote import FooteParams, segment_foote
from .lsd import LsdParams, segment_lsd
from .ssm import build_ssm

CACHE_VERSION = 1
ALGORITHMS = ("foote", "lsd", "cbm")

SWEEP_COLUMNS = (
    "dataset",
    "track_id",
    "feature_id",
    "algorithm",
    "config_id",
    "similarity",
    "tolerance",
    "trimming",
    "precision",
    "recall",
    "f_measure",
    "chosen_annotation",
)


@dataclass(frozen=True)
class TrackManifest:
    track_id: str
    duration: float
    downbeats_path: str
    annotation_paths: tuple
    audio_path: str | None = None
    embedding_paths: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.audio_path and not self.embedding_paths:
            raise InvalidInput(
                f"{self.track_id}: need an audio path or at least one embedding"
            )
        if not self.annotation_paths:
            raise InvalidInput(f"{self.track_id}: need at least one annotation")
        object.__setattr__(self, "annotation_paths", tuple(self.annotation_paths))
        object.__setattr__(self, "embedding_paths", dict(self.embedding_paths))


def load_manifest(path) -> tuple[str, list[TrackManifest]]:
    """Read a dataset manifest; file paths are resolved against its folder."""
    with open(path, "r", encoding="utf-8") as f:
        payload = json.load(f)
    base = os.path.dirname(os.path.abspath(path))

    def resolve(p):
        return p if p is None or os.path.isabs(p) else os.path.join(base, p)

    if isinstance(payload, list):
        dataset, entries = os.path.splitext(os.path.basename(path))[0], payload
    else:
        dataset = payload.get("dataset") or os.path.splitext(os.path.basename(path))[0]
        entries = payload["tracks"]

    tracks = []
    for entry in entries:
        tracks.append(
            TrackManifest(
                track_id=str(entry["track_id"]),
                duration=float(entry["duration"]),
                downbeats_path=resolve(entry["downbeats_path"]),
                annotation_paths=tuple(
                    resolve(p) for p in entry["annotation_paths"]
                ),
                audio_path=resolve(entry.get("audio_path")),
                embedding_paths={
                    k: resolve(v)
                    for k, v in (entry.get("embedding_paths") or {}).items()
                },
            )
        )
    return dataset, tracks


# ---------------------------------------------------------------------------
# Sweep configurations


@dataclass(frozen=True)
class SweepConfig:
    algorithm: str
    similarity: str | None = None
    kernel_size: int | None = None
    median_size: int | None = None
    k: int | None = None
    cbm_kernel: str | None = None
    max_size: int = 32

    @property
    def config_id(self) -> str:
        if self.algorithm == "foote":
            return (
                f"foote:kernel={self.kernel_size},median={self.median_size},"
                f"sim={self.similarity}"
            )
        if self.algorithm == "lsd":
            return f"lsd:k={self.k}"
        return f"cbm:kernel={self.cbm_kernel},sim={self.similarity}"

    def params(self, seed: int = 0):
        if self.algorithm == "foote":
            return FooteParams(kernel_size=self.kernel_size, median_size=self.median_size)
        if self.algorithm == "lsd":
            return LsdParams(k=self.k, seed=seed)
        return CbmParams(kernel=self.cbm_kernel, max_size=self.max_size)


@dataclass(frozen=True)
class SweepGrid:
    """Hyperparameter grids; the defaults are the standard search spaces."""

    algorithm: str
    foote_kernel_sizes: tuple = (8, 12, 16)
    foote_median_sizes: tuple = (8, 12, 16)
    lsd_ks: tuple = (4, 6, 8, 9, 10, 11, 12, 13, 14, 16)
    cbm_kernels: tuple = ("full", "band7")
    similarities: tuple = ("rbf", "cosine")
    max_size: int = 32

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise InvalidInput(f"algorithm must be one of {ALGORITHMS}")
        for name in ("foote_kernel_sizes", "foote_median_sizes", "lsd_ks",
                     "cbm_kernels", "similarities"):
            if not getattr(self, name):
                raise InvalidInput(f"{name} must be non-empty")

    def configs(self) -> list[SweepConfig]:
        out = []
        if self.algorithm == "foote":
            for sim in self.similarities:
                for ks in self.foote_kernel_sizes:
                    for ms in self.foote_median_sizes:
                        out.append(
                            SweepConfig(
                                "foote", similarity=sim, kernel_size=ks, median_size=ms
                            )
                        )
        elif self.algorithm == "lsd":
            for k in self.lsd_ks:
                out.append(SweepConfig("lsd", k=k))
        else:
            for sim in self.similarities:
                for kernel in self.cbm_kernels:
                    out.append(
                        SweepConfig(
                            "cbm",
                            similarity=sim,
                            cbm_kernel=kernel,
                            max_size=self.max_size,
                        )
                    )
        return out


@dataclass(frozen=True)
class SelectionPolicy:
    mode: str = "per_model_across_datasets"

    MODES = ("per_model_per_dataset", "per_model_across_datasets")

    def __post_init__(self):
        if self.mode not in self.MODES:
            raise InvalidInput(f"policy mode must be one of {self.MODES}")


# ---------------------------------------------------------------------------
# Per-track evaluation


def _load_features(manifest: TrackManifest, feature_id: str, grid) -> BarMatrix:
    if feature_id == "barwise_tf":
        if not manifest.audio_path:
            raise TrackSkipped(manifest.track_id, "no audio_path for barwise_tf")
        samples, rate = decode_audio(manifest.audio_path)
        return barwise_tf(log_mel(samples, rate), grid)
    path = manifest.embedding_paths.get(feature_id)
    if path is None:
        raise TrackSkipped(manifest.track_id, f"no embedding for {feature_id!r}")
    values = bio.read_matrix(path)
    if values.shape[0] != grid.num_bars:
        raise TrackSkipped(
            manifest.track_id,
            f"embedding rows ({values.shape[0]}) != bar count ({grid.num_bars})",
        )
    return BarMatrix(values, feature_id=feature_id)


def run_track(
    manifest: TrackManifest,
    feature_id: str,
    algorithm: str,
    params,
    similarity: str | None = None,
    trimmings=("none",),
    tolerances=TOLERANCES,
    silence_labels=DEFAULT_SILENCE_LABELS,
) -> TrackEval:
    """Features -> SSM -> segmentation -> scores for one track.

    Any missing or unparseable input raises TrackSkipped so that batch
    callers can record the gap and continue.
    """
    try:
        downbeats = bio.read_downbeats(manifest.downbeats_path)
        grid = bars_from_downbeats(downbeats, manifest.duration)
        X = _load_features(manifest, feature_id, grid)
        if algorithm == "foote":
            seg = segment_foote(build_ssm(X, similarity or "rbf"), params)
        elif algorithm == "lsd":
            seg = segment_lsd(X, params)
        elif algorithm == "cbm":
            seg = segment_cbm(build_ssm(X, similarity or "rbf"), params)
        else:
            raise InvalidInput(f"unknown algorithm {algorithm!r}")
        est = list(boundaries_to_seconds(seg, grid))
        refs = [bio.read_annotation(p) for p in manifest.annotation_paths]
        return evaluate_track(
            manifest.track_id, refs, est, tolerances, trimmings, silence_labels
        )
    except TrackSkipped:
        raise
    except (OSError, FormatError, InvalidInput, UnsupportedFormat, EmptyAnnotation) as exc:
        raise TrackSkipped(manifest.track_id, str(exc)) from exc


def _eval_rows(dataset, manifest, feature_id, config, evaluation) -> list[dict]:
    rows = []
    for (tol, trimming), score in sorted(evaluation.scores.items()):
        rows.append(
            {
                "dataset": dataset,
                "track_id": manifest.track_id,
                "feature_id": feature_id,
                "algorithm": config.algorithm,
                "config_id": config.config_id,
                "similarity": config.similarity or "",
                "tolerance": tol,
                "trimming": trimming,
                "precision": score.precision,
                "recall": score.recall,
                "f_measure": score.f_measure,
                "chosen_annotation": evaluation.chosen_annotation[(tol, trimming)],
            }
        )
    return rows


# ---------------------------------------------------------------------------
# Sweep with content-hash caching


@dataclass
class SweepResult:
    rows: list
    skipped: list  # (dataset, track_id, reason)
    cache_hits: int = 0
    cache_misses: int = 0

    @property
    def cache_hit_ratio(self) -> float:
        total = self.cache_hits + self.cache_misses
        return self.cache_hits / total if total else 0.0


def _file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _cache_key(dataset, manifest, feature_id, config, trimmings, tolerances,
               silence_labels, seed) -> str | None:
    try:
        inputs = {"downbeats": _file_digest(manifest.downbeats_path)}
        for idx, p in enumerate(manifest.annotation_paths):
            inputs[f"annotation{idx}"] = _file_digest(p)
        if feature_id == "barwise_tf":
            if not manifest.audio_path:
                return None
            inputs["audio"] = _file_digest(manifest.audio_path)
        else:
            path = manifest.embedding_paths.get(feature_id)
            if path is None:
                return None
            inputs["embedding"] = _file_digest(path)
    except OSError:
        return None
    payload = {
        "version": CACHE_VERSION,
        "dataset": dataset,
        "track_id": manifest.track_id,
        "feature_id": feature_id,
        "config_id": config.config_id,
        "max_size": config.max_size,
        "trimmings": list(trimmings),
        "tolerances": list(tolerances),
        "silence_labels": sorted(silence_labels),
        "seed": seed,
        "duration": manifest.duration,
        "inputs": inputs,
    }
    return hashlib.sha256(
        json.dumps(payload, sort_keys=True).encode("utf-8")
    ).hexdigest()


def _cache_read(cache_dir, key):
    if cache_dir is None or key is None:
        return None
    path = os.path.join(cache_dir, f"{key}.json")
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)["rows"]
    except (OSError, ValueError, KeyError):
        return None


def _cache_write(cache_dir, key, rows) -> None:
    if cache_dir is None or key is None:
        return
    os.makedirs(cache_dir, exist_ok=True)
    path = os.path.join(cache_dir, f"{key}.json")
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as f:
        json.dump({"rows": rows}, f)
    os.replace(tmp, path)


def _sweep_task(args):
    (dataset, manifest, feature_id, configs, trimmings, tolerances,
     silence_labels, seed) = args
    results, skipped = [], []
    for config in configs:
        try:
            evaluation = run_track(
                manifest,
                feature_id,
                config.algorithm,
                config.params(seed),
                config.similarity,
                trimmings,
                tolerances,
                silence_labels,
            )
        except TrackSkipped as exc:
            skipped.append((dataset, manifest.track_id, exc.reason))
            break  # same inputs fail for every config
        results.append(
            (config.config_id, _eval_rows(dataset, manifest, feature_id, config, evaluation))
        )
    return dataset, manifest.track_id, results, skipped


def _row_sort_key(row):
    return (
        row["dataset"],
        row["track_id"],
        row["config_id"],
        row["tolerance"],
        row["trimming"],
    )


def sweep(
    datasets: dict,
    feature_id: str,
    grid: SweepGrid,
    trimmings=("none",),
    tolerances=TOLERANCES,
    silence_labels=DEFAULT_SILENCE_LABELS,
    seed: int = 0,
    jobs: int = 1,
    cache_dir=None,
) -> SweepResult:
    """Evaluate the full configuration grid over every track of every dataset.

    Results are cached per (track, feature, config) content hash; identical
    re-runs are pure cache reads. Workers are pure, so the result is
    independent of the job count.
    """
    if not datasets or not any(datasets.values()):
        raise InvalidInput("sweep needs at least one track")
    configs = grid.configs()
    result = SweepResult(rows=[], skipped=[])
    tasks = []
    pending_keys = {}

    for dataset in sorted(datasets):
        for manifest in sorted(datasets[dataset], key=lambda m: m.track_id):
            missing = []
            for config in configs:
                key = _cache_key(
                    dataset, manifest, feature_id, config,
                    trimmings, tolerances, silence_labels, seed,
                )
                cached = _cache_read(cache_dir, key)
                if cached is not None:
                    result.rows.extend(cached)
                    result.cache_hits += 1
                else:
                    missing.append(config)
                    pending_keys[(dataset, manifest.track_id, config.config_id)] = key
                    result.cache_misses += 1
            if missing:
                tasks.append(
                    (dataset, manifest, feature_id, tuple(missing),
                     tuple(trimmings), tuple(tolerances),
                     frozenset(silence_labels), seed)
                )

    if tasks:
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                outcomes = list(pool.map(_sweep_task, tasks))
        else:
            outcomes = [_sweep_task(t) for t in tasks]
        for dataset, track_id, results, skipped in outcomes:
            for config_id, rows in results:
                result.rows.extend(rows)
                _cache_write(
                    cache_dir, pending_keys.get((dataset, track_id, config_id)), rows
                )
            result.skipped.extend(skipped)

    result.rows.sort(key=_row_sort_key)
    result.skipped.sort()
    return result


# ---------------------------------------------------------------------------
# Selection and aggregation


def _percent(x: float) -> float:
    return round(100.0 * x, 2)


def select_and_aggregate(
    rows, policy: SelectionPolicy = SelectionPolicy(), select_trimming=None
) -> list[dict]:
    """Pick the best configuration per policy and aggregate mean +/- std.

    The objective is the mean of the dataset-level F0.5 and F3 averages,
    evaluated on ``select_trimming`` (default: untrimmed scores when
    available). The selected configuration is then reported for every
    trimming mode present in the rows.
    """
    if not rows:
        raise InvalidInput("no result rows to aggregate")
    trimmings = sorted({r["trimming"] for r in rows})
    if select_trimming is None:
        select_trimming = "none" if "none" in trimmings else trimmings[0]

    # (feature, algorithm) -> config -> dataset -> tolerance -> track -> F
    table: dict = {}
    for r in rows:
        table.setdefault((r["feature_id"], r["algorithm"]), {}).setdefault(
            r["config_id"], {}
        ).setdefault(r["dataset"], {}).setdefault(
            (r["tolerance"], r["trimming"]), {}
        )[r["track_id"]] = r["f_measure"]

    def dataset_mean(per_cell, tol, trimming):
        cell = per_cell.get((tol, trimming))
        return float(np.mean(list(cell.values()))) if cell else None

    def objective(per_cell, trimming):
        m05 = dataset_mean(per_cell, 0.5, trimming)
        m3 = dataset_mean(per_cell, 3.0, trimming)
        if m05 is None or m3 is None:
            return None
        return 0.5 * (m05 + m3)

    report = []
    for (feature_id, algorithm) in sorted(table):
        configs = table[(feature_id, algorithm)]
        datasets = sorted({d for cfg in configs.values() for d in cfg})

        if policy.mode == "per_model_across_datasets":
            best_id, best_score = None, -np.inf
            for config_id in sorted(configs):
                objs = [
                    objective(configs[config_id][d], select_trimming)
                    for d in datasets
                    if d in configs[config_id]
                ]
                objs = [o for o in objs if o is not None]
                if not objs:
                    continue
                score = float(np.mean(objs))
                if score > best_score:
                    best_id, best_score = config_id, score
            chosen = {d: best_id for d in datasets}
        else:
            chosen = {}
            for d in datasets:
                best_id, best_score = None, -np.inf
                for config_id in sorted(configs):
                    if d not in configs[config_id]:
                        continue
                    obj = objective(configs[config_id][d], select_trimming)
                    if obj is not None and obj > best_score:
                        best_id, best_score = config_id, obj
                chosen[d] = best_id

        for d in datasets:
            config_id = chosen[d]
            if config_id is None or d not in configs[config_id]:
                continue
            per_cell = configs[config_id][d]
            for trimming in trimmings:
                f05 = per_cell.get((0.5, trimming))
                f3 = per_cell.get((3.0, trimming))
                if not f05 or not f3:
                    continue
                v05 = np.asarray(list(f05.values()))
                v3 = np.asarray(list(f3.values()))
                report.append(
                    {
                        "feature_id": feature_id,
                        "algorithm": algorithm,
                        "dataset": d,
                        "config_id": config_id,
                        "trimming": trimming,
                        "policy": policy.mode,
                        "n_tracks": len(v05),
                        "F0.5": _percent(v05.mean()),
                        "F0.5_std": _percent(v05.std()),
                        "F3": _percent(v3.mean()),
                        "F3_std": _percent(v3.std()),
                    }
                )
    return report


# ---------------------------------------------------------------------------
# Report emission


def emit_report(rows, fmt: str, path) -> None:
    """Write rows as csv, json or markdown with a stable column order."""
    if fmt not in ("csv", "json", "markdown"):
        raise InvalidInput(f"unknown report format {fmt!r}")
    if not rows:
        columns = []
    else:
        columns = list(rows[0].keys())

    if fmt == "json":
        text = json.dumps(rows, indent=2, sort_keys=False) + "\n"
    elif fmt == "csv":
        lines = [",".join(columns)]
        for r in rows:
            lines.append(",".join(_csv_cell(r.get(c)) for c in columns))
        text = "\n".join(lines) + "\n"
    else:
        header = "| " + " | ".join(columns) + " |"
        sep = "| " + " | ".join("---" for _ in columns) + " |"
        lines = [header, sep]
        for r in rows:
            lines.append("| " + " | ".join(_md_cell(r.get(c)) for c in columns) + " |")
        text = "\n".join(lines) + "\n"

    with open(path, "w", encoding="utf-8") as f:
        f.write(text)


def _csv_cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.2f}" if value == round(value, 2) else repr(value)
    return str(value)


def _md_cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.2f}"
    return str(value)
