import numpy as np
import pytest

from barseg.core import (
    Annotation,
    BarGrid,
    BarMatrix,
    Segmentation,
    SelfSimilarityMatrix,
    bars_from_downbeats,
    boundaries_to_seconds,
)
from barseg.errors import InvalidInput


class TestBarsFromDownbeats:
    def test_uniform_grid_closed_by_duration(self):
        grid = bars_from_downbeats([0, 1, 2], 3.0)
        assert np.allclose(grid.bar_starts, [0, 1, 2, 3])

    def test_empty_list_rejected(self):
        with pytest.raises(InvalidInput):
            bars_from_downbeats([], 3.0)

    def test_leading_partial_bar(self):
        # first downbeat at 0.8 > 0.5 earns a leading bar; median interval
        # closes the last bar at min(3.1, 2.8 + 1.0)
        grid = bars_from_downbeats([0.8, 1.8, 2.8], 3.1)
        assert np.allclose(grid.bar_starts, [0, 0.8, 1.8, 2.8, 3.1])

    def test_no_leading_bar_below_threshold(self):
        grid = bars_from_downbeats([0.4, 1.4, 2.4], 4.0)
        assert np.allclose(grid.bar_starts, [0.4, 1.4, 2.4, 3.4])

    def test_final_bar_not_past_track_end(self):
        grid = bars_from_downbeats([0.0, 2.0], 2.5)
        assert grid.bar_starts[-1] == 2.5

    def test_non_monotone_rejected(self):
        with pytest.raises(InvalidInput):
            bars_from_downbeats([0.0, 2.0, 1.0], 3.0)

    def test_out_of_range_rejected(self):
        with pytest.raises(InvalidInput):
            bars_from_downbeats([0.0, 5.0], 3.0)

    def test_single_downbeat_closes_at_duration(self):
        grid = bars_from_downbeats([0.0], 2.0)
        assert np.allclose(grid.bar_starts, [0.0, 2.0])

    def test_downbeat_at_track_end_rejected(self):
        with pytest.raises(InvalidInput):
            bars_from_downbeats([3.0], 3.0)

    @pytest.mark.parametrize("seed", range(5))
    def test_idempotent_on_own_output(self, seed):
        # jittered but realistic grid starting within the pickup threshold,
        # so re-application sees exactly the same downbeat list
        rng = np.random.default_rng(seed)
        intervals = rng.uniform(1.8, 2.2, size=12)
        times = np.concatenate(([0.3], 0.3 + np.cumsum(intervals)))
        duration = float(times[-1] + rng.uniform(0.1, 3.0))
        grid = bars_from_downbeats(times, duration)
        again = bars_from_downbeats(grid.bar_starts[:-1], duration)
        assert np.array_equal(again.bar_starts, grid.bar_starts)

    def test_idempotent_with_prepended_leading_bar(self):
        # uniform bars keep the median interval stable when the leading
        # partial bar joins the interval list on re-application
        grid = bars_from_downbeats(np.arange(0.8, 12.0, 1.0), 12.4)
        again = bars_from_downbeats(grid.bar_starts[:-1], 12.4)
        assert np.allclose(again.bar_starts, grid.bar_starts)


class TestBoundariesToSeconds:
    def test_unit_bars(self):
        seg = Segmentation(np.array([0, 2, 4]))
        grid = BarGrid(np.array([0.0, 1, 2, 3, 4]), 4.0)
        assert np.allclose(boundaries_to_seconds(seg, grid), [0, 2, 4])

    def test_single_bar(self):
        seg = Segmentation(np.array([0, 1]))
        grid = BarGrid(np.array([0.5, 2.5]), 2.5)
        assert np.allclose(boundaries_to_seconds(seg, grid), [0.5, 2.5])

    def test_direct_lookup(self):
        seg = Segmentation(np.array([0, 3]))
        grid = BarGrid(np.array([0.0, 0.9, 1.7, 2.6]), 2.6)
        assert np.allclose(boundaries_to_seconds(seg, grid), [0.0, 2.6])

    def test_out_of_range(self):
        seg = Segmentation(np.array([0, 5]))
        grid = BarGrid(np.array([0.0, 1.0, 2.0]), 2.0)
        with pytest.raises(InvalidInput):
            boundaries_to_seconds(seg, grid)


class TestTypeInvariants:
    def test_bargrid_needs_increasing_starts(self):
        with pytest.raises(InvalidInput):
            BarGrid(np.array([0.0, 1.0, 1.0]), 2.0)

    def test_bargrid_rejects_past_duration(self):
        with pytest.raises(InvalidInput):
            BarGrid(np.array([0.0, 5.0]), 2.0)

    def test_bargrid_is_readonly(self):
        grid = BarGrid(np.array([0.0, 1.0]), 1.0)
        with pytest.raises(ValueError):
            grid.bar_starts[0] = 5.0

    def test_barmatrix_rejects_nan(self):
        with pytest.raises(InvalidInput):
            BarMatrix(np.array([[1.0, np.nan]]), "x")

    def test_ssm_requires_symmetry(self):
        bad = np.array([[1.0, 0.5], [0.2, 1.0]])
        with pytest.raises(InvalidInput):
            SelfSimilarityMatrix(bad, "cosine")

    def test_ssm_requires_unit_diagonal(self):
        bad = np.array([[0.9, 0.5], [0.5, 0.9]])
        with pytest.raises(InvalidInput):
            SelfSimilarityMatrix(bad, "rbf")

    def test_segmentation_must_start_at_zero(self):
        with pytest.raises(InvalidInput):
            Segmentation(np.array([1, 4]))

    def test_segmentation_strictly_increasing(self):
        with pytest.raises(InvalidInput):
            Segmentation(np.array([0, 3, 3, 8]))

    def test_segmentation_seconds_projection(self):
        grid = BarGrid(np.array([0.0, 1.5, 3.0, 4.5]), 4.5)
        seg = Segmentation(np.array([0, 2, 3])).with_seconds(grid)
        assert np.allclose(seg.boundaries_seconds, [0.0, 3.0, 4.5])
        assert np.allclose(
            seg.boundaries_seconds, grid.bar_starts[seg.boundaries_bars]
        )

    def test_annotation_contiguity_tolerance(self):
        Annotation(((0.0, 10.0, "a"), (10.005, 20.0, "b")))  # 5 ms gap is fine
        with pytest.raises(InvalidInput):
            Annotation(((0.0, 10.0, "a"), (10.5, 20.0, "b")))

    def test_annotation_ends_strictly_increase(self):
        with pytest.raises(InvalidInput):
            Annotation(((0.0, 10.0, "a"), (10.0, 10.0, "b")))

    def test_annotation_boundaries(self):
        ann = Annotation(((0.0, 10.0, "a"), (10.0, 25.0, "b")))
        assert ann.boundaries() == [0.0, 10.0, 25.0]
