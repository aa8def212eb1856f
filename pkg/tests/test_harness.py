import json

import numpy as np
import pytest
import synth

from barseg.cbm import CbmParams
from barseg.errors import InvalidInput, TrackSkipped
from barseg.harness import (
    SelectionPolicy,
    SweepConfig,
    SweepGrid,
    TrackManifest,
    emit_report,
    load_manifest,
    run_track,
    select_and_aggregate,
    sweep,
)

FEATURE = "model:synth"


@pytest.fixture()
def dataset(tmp_path):
    manifest = synth.make_dataset(tmp_path / "ds", n_tracks=3, seed=0)
    name, tracks = load_manifest(manifest)
    return name, tracks


class TestManifest:
    def test_loads_and_resolves_paths(self, dataset):
        name, tracks = dataset
        assert name == "synth"
        assert len(tracks) == 3
        assert tracks[0].downbeats_path.startswith("/")

    def test_requires_inputs(self):
        with pytest.raises(InvalidInput):
            TrackManifest(
                track_id="x", duration=10.0, downbeats_path="d",
                annotation_paths=("a",),
            )
        with pytest.raises(InvalidInput):
            TrackManifest(
                track_id="x", duration=10.0, downbeats_path="d",
                annotation_paths=(), audio_path="a.wav",
            )


class TestRunTrack:
    def test_ideal_block_track_scores_one(self, dataset):
        _, tracks = dataset
        evaluation = run_track(
            tracks[0], FEATURE, "cbm", CbmParams("full", 32), "rbf",
            trimmings=("none",),
        )
        for (tol, _), score in evaluation.scores.items():
            assert score.f_measure == 1.0, (tol, score)

    def test_missing_embedding_skips(self, dataset):
        _, tracks = dataset
        broken = TrackManifest(
            track_id="broken",
            duration=tracks[0].duration,
            downbeats_path=tracks[0].downbeats_path,
            annotation_paths=tracks[0].annotation_paths,
            embedding_paths={FEATURE: "/nonexistent/path.npy"},
        )
        with pytest.raises(TrackSkipped):
            run_track(broken, FEATURE, "cbm", CbmParams(), "rbf")

    def test_unknown_feature_skips(self, dataset):
        _, tracks = dataset
        with pytest.raises(TrackSkipped):
            run_track(tracks[0], "model:other", "cbm", CbmParams(), "rbf")

    def test_deterministic(self, dataset):
        _, tracks = dataset
        a = run_track(tracks[1], FEATURE, "cbm", CbmParams(), "rbf")
        b = run_track(tracks[1], FEATURE, "cbm", CbmParams(), "rbf")
        assert a == b


class TestSweepGrid:
    def test_foote_has_18_configs(self):
        assert len(SweepGrid("foote").configs()) == 18

    def test_lsd_has_10_configs(self):
        assert len(SweepGrid("lsd").configs()) == 10

    def test_cbm_has_4_configs(self):
        configs = SweepGrid("cbm").configs()
        assert len(configs) == 4  # 2 kernels x 2 similarities
        per_similarity = {c.similarity for c in configs}
        assert per_similarity == {"rbf", "cosine"}

    def test_default_grids_exact(self):
        grid = SweepGrid("lsd")
        assert grid.lsd_ks == (4, 6, 8, 9, 10, 11, 12, 13, 14, 16)
        assert SweepGrid("foote").foote_kernel_sizes == (8, 12, 16)

    def test_empty_grid_rejected(self):
        with pytest.raises(InvalidInput):
            SweepGrid("foote", foote_kernel_sizes=())


class TestSweep:
    def test_rows_cover_product(self, dataset, tmp_path):
        name, tracks = dataset
        result = sweep({name: tracks}, FEATURE, SweepGrid("cbm"))
        # 3 tracks x 4 configs x 2 tolerances x 1 trimming
        assert len(result.rows) == 3 * 4 * 2
        assert not result.skipped

    def test_cache_hits_on_rerun(self, dataset, tmp_path):
        name, tracks = dataset
        cache = tmp_path / "cache"
        first = sweep({name: tracks}, FEATURE, SweepGrid("cbm"), cache_dir=str(cache))
        assert first.cache_hits == 0
        second = sweep({name: tracks}, FEATURE, SweepGrid("cbm"), cache_dir=str(cache))
        assert second.cache_misses == 0
        assert second.cache_hit_ratio == 1.0
        assert first.rows == second.rows

    def test_job_count_does_not_change_rows(self, dataset):
        name, tracks = dataset
        serial = sweep({name: tracks}, FEATURE, SweepGrid("cbm"), jobs=1)
        parallel = sweep({name: tracks}, FEATURE, SweepGrid("cbm"), jobs=4)
        assert serial.rows == parallel.rows

    def test_skipped_track_leaves_gap(self, dataset):
        name, tracks = dataset
        broken = TrackManifest(
            track_id="zz_broken",
            duration=10.0,
            downbeats_path="/nonexistent",
            annotation_paths=("/nonexistent",),
            embedding_paths={FEATURE: "/nonexistent"},
        )
        result = sweep({name: list(tracks) + [broken]}, FEATURE, SweepGrid("cbm"))
        assert len(result.skipped) == 1
        assert result.skipped[0][1] == "zz_broken"
        assert {r["track_id"] for r in result.rows} == {t.track_id for t in tracks}

    def test_empty_dataset_rejected(self):
        with pytest.raises(InvalidInput):
            sweep({}, FEATURE, SweepGrid("cbm"))


def hand_rows():
    """Two configs, two datasets: A wins ds1, B wins on average."""
    rows = []

    def add(config, dataset, f05, f3):
        for tol, f in ((0.5, f05), (3.0, f3)):
            rows.append(
                {
                    "dataset": dataset,
                    "track_id": "t0",
                    "feature_id": "m",
                    "algorithm": "cbm",
                    "config_id": config,
                    "similarity": "rbf",
                    "tolerance": tol,
                    "trimming": "none",
                    "precision": f,
                    "recall": f,
                    "f_measure": f,
                    "chosen_annotation": 0,
                }
            )

    add("cfgA", "ds1", 0.70, 0.70)  # A: ds1 obj 0.70, ds2 obj 0.50 -> avg 0.60
    add("cfgA", "ds2", 0.50, 0.50)
    add("cfgB", "ds1", 0.62, 0.62)  # B: 0.62 everywhere -> avg 0.62
    add("cfgB", "ds2", 0.62, 0.62)
    return rows


class TestSelectAndAggregate:
    def test_across_datasets_picks_best_average(self):
        report = select_and_aggregate(
            hand_rows(), SelectionPolicy("per_model_across_datasets")
        )
        assert {r["config_id"] for r in report} == {"cfgB"}
        assert all(r["F0.5"] == 62.0 for r in report)

    def test_per_dataset_picks_local_winner(self):
        report = select_and_aggregate(
            hand_rows(), SelectionPolicy("per_model_per_dataset")
        )
        by_ds = {r["dataset"]: r["config_id"] for r in report}
        assert by_ds == {"ds1": "cfgA", "ds2": "cfgB"}

    def test_single_config_selected(self):
        rows = [r for r in hand_rows() if r["config_id"] == "cfgA"]
        report = select_and_aggregate(rows)
        assert {r["config_id"] for r in report} == {"cfgA"}

    def test_dataset_order_invariance(self):
        rows = hand_rows()
        report_a = select_and_aggregate(rows)
        report_b = select_and_aggregate(list(reversed(rows)))
        assert report_a == report_b

    def test_population_std(self, dataset):
        name, tracks = dataset
        result = sweep({name: tracks}, FEATURE, SweepGrid("cbm"))
        report = select_and_aggregate(result.rows)
        row = report[0]
        values = [
            r["f_measure"]
            for r in result.rows
            if r["config_id"] == row["config_id"] and r["tolerance"] == 0.5
        ]
        assert row["F0.5_std"] == pytest.approx(
            round(100 * float(np.std(values)), 2)
        )


class TestEmitReport:
    def rows(self):
        return select_and_aggregate(hand_rows())

    def test_markdown_has_metric_columns(self, tmp_path):
        path = tmp_path / "r.md"
        emit_report(self.rows(), "markdown", path)
        text = path.read_text()
        assert "F0.5" in text and "F3" in text
        assert text.count("\n") == 2 + len(self.rows())

    def test_json_roundtrip(self, tmp_path):
        path = tmp_path / "r.json"
        rows = self.rows()
        emit_report(rows, "json", path)
        assert json.loads(path.read_text()) == rows

    def test_csv_cells_parse(self, tmp_path):
        import csv

        path = tmp_path / "r.csv"
        emit_report(self.rows(), "csv", path)
        with open(path) as f:
            parsed = list(csv.DictReader(f))
        for row in parsed:
            assert np.isfinite(float(row["F0.5"]))
            assert np.isfinite(float(row["F3"]))

    def test_unknown_format_rejected(self, tmp_path):
        with pytest.raises(InvalidInput):
            emit_report(self.rows(), "xml", tmp_path / "r.xml")
