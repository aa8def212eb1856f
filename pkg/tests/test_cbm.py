import numpy as np
import pytest
import synth

from barseg import _accel
from barseg.cbm import CbmParams, block_score, cbm_kernel, segment_cbm, total_score
from barseg.core import SelfSimilarityMatrix
from barseg.errors import InvalidInput


def ssm(values):
    return SelfSimilarityMatrix(np.asarray(values, dtype=float), "rbf")


def two_ones_blocks():
    S = np.zeros((8, 8))
    S[:4, :4] = 1.0
    S[4:, 4:] = 1.0
    return S


class TestCbmKernel:
    def test_full_n3(self):
        expected = np.ones((3, 3)) - np.eye(3)
        assert np.array_equal(cbm_kernel(3, "full"), expected)

    def test_band7_small_equals_full(self):
        assert np.array_equal(cbm_kernel(3, "band7"), cbm_kernel(3, "full"))

    def test_band7_membership(self):
        K = cbm_kernel(10, "band7")
        assert K[0, 7] == 1.0
        assert K[0, 8] == 0.0

    @pytest.mark.parametrize("kind", ["full", "band7"])
    def test_n1_is_zero(self, kind):
        assert np.array_equal(cbm_kernel(1, kind), np.zeros((1, 1)))

    @pytest.mark.parametrize("kind", ["full", "band7"])
    @pytest.mark.parametrize("n", [1, 2, 7, 8, 9, 15])
    def test_matches_oracle(self, n, kind):
        assert np.array_equal(cbm_kernel(n, kind), synth.cbm_kernel_oracle(n, kind))


class TestBlockScore:
    def test_single_bar_scores_zero(self):
        rng = np.random.default_rng(0)
        S = synth.random_ssm(rng, 6)
        assert block_score(S, 2, 3, "full") == 0.0

    def test_all_ones_block(self):
        S = np.ones((6, 6))
        for n in (2, 3, 6):
            assert block_score(S, 0, n, "full") == pytest.approx(n - 1)

    def test_identity_block_scores_zero(self):
        assert block_score(np.eye(5), 0, 5, "full") == 0.0

    def test_rejects_empty_interval(self):
        with pytest.raises(InvalidInput):
            block_score(np.eye(4), 2, 2, "full")

    @pytest.mark.parametrize("kind", ["full", "band7"])
    def test_matches_oracle(self, kind):
        rng = np.random.default_rng(1)
        S = synth.random_ssm(rng, 14)
        for i, j in [(0, 14), (3, 7), (5, 6), (0, 9), (2, 13)]:
            assert block_score(S, i, j, kind) == pytest.approx(
                synth.cbm_block_score_oracle(S, i, j, kind), abs=1e-9
            )


class TestSegmentCbm:
    def test_single_bar(self):
        seg = segment_cbm(ssm(np.ones((1, 1))), CbmParams())
        assert list(seg.boundaries_bars) == [0, 1]

    def test_two_blocks_beats_alternatives(self):
        seg = segment_cbm(ssm(two_ones_blocks()), CbmParams("full", 32))
        assert list(seg.boundaries_bars) == [0, 4, 8]
        achieved = total_score(two_ones_blocks(), [0, 4, 8], "full")
        best = synth.cbm_brute_force(two_ones_blocks(), "full", 32)
        assert achieved == pytest.approx(best, abs=1e-9)

    @pytest.mark.parametrize("kind", ["full", "band7"])
    @pytest.mark.parametrize("max_size", [4, 32])
    @pytest.mark.parametrize("seed", range(5))
    def test_dp_equals_brute_force(self, seed, max_size, kind):
        rng = np.random.default_rng(10 + seed)
        n_bars = int(rng.integers(4, 13))
        S = synth.random_ssm(rng, n_bars)
        seg = segment_cbm(ssm(S), CbmParams(kind, max_size))
        achieved = sum(
            synth.cbm_block_score_oracle(S, a, b, kind)
            for a, b in zip(seg.boundaries_bars[:-1], seg.boundaries_bars[1:])
        )
        best = synth.cbm_brute_force(S, kind, max_size)
        assert achieved == pytest.approx(best, abs=1e-9)

    def test_max_size_respected(self):
        rng = np.random.default_rng(2)
        S = synth.random_ssm(rng, 40)
        seg = segment_cbm(ssm(S), CbmParams("full", 8))
        assert np.max(np.diff(seg.boundaries_bars)) <= 8

    def test_block_joints_stable_under_offdiag_shift(self):
        sizes = [6, 7, 5]
        base = synth.block_ssm(sizes, within=[0.6, 0.6, 0.6], cross=0.1)
        shifted = base + 0.2
        np.fill_diagonal(shifted, 1.0)
        for S in (base, shifted):
            seg = segment_cbm(ssm(S), CbmParams("full", 32))
            assert list(seg.boundaries_bars) == [0, 6, 13, 18]

    def test_constant_ssm_prefers_fewest_segments(self):
        S = np.ones((40, 40))
        seg = segment_cbm(ssm(S), CbmParams("full", 32))
        # two segments are unavoidable; ties resolve to the longest last one
        assert list(seg.boundaries_bars) == [0, 8, 40]

    @pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba unavailable")
    @pytest.mark.parametrize("band", [0, 7])
    def test_backends_agree(self, band):
        rng = np.random.default_rng(3)
        S = synth.random_ssm(rng, 30)
        tables = _accel.cbm_prefix_tables(S, band)
        c_np, p_np = _accel.cbm_dp_numpy(*tables, 30, 16, band)
        c_nb, p_nb = _accel.cbm_dp_numba(*tables, 30, 16, band)
        assert np.array_equal(p_np, p_nb)
        assert np.allclose(c_np, c_nb, atol=0)
