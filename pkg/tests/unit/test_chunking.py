"""
Unit tests for chunk specs, visibility masks and the dynamic chunk schedule
"""
import math

import numpy as np
import pytest

from src.chunking import (
    ChunkSpec, DctSchedule, build_mask, chunk_count, ms_to_frames, parse_text_grid,
    sample_chunk_spec, sample_uniform_chunk_spec, visible_frame_count,
)
from src.exceptions import MaskError


def brute_force_mask(T, C, L):
    bits = np.zeros((T, T), dtype=bool)
    for t in range(T):
        for u in range(T):
            ct, cu = t // C, u // C
            bits[t, u] = cu <= ct and (L is None or cu >= ct - L)
    return bits


def grid(*rows):
    return np.array([[ch == "1" for ch in row] for row in rows], dtype=bool)


class TestChunkSpec:
    """Test ChunkSpec construction and parsing"""

    @pytest.mark.unit
    @pytest.mark.positive
    def test_variants(self):
        full = ChunkSpec.full_context()
        assert full.is_full_context and not full.is_streaming
        assert full.resolve_chunk_size(17) == 17
        spec = ChunkSpec.streaming(4, 2)
        assert spec.is_streaming and spec.resolve_chunk_size(17) == 4
        assert spec.describe() == "C=4,L=2"
        assert ChunkSpec.streaming(4).has_infinite_left_context

    @pytest.mark.unit
    @pytest.mark.negative
    @pytest.mark.parametrize("chunk,left", [(0, None), (-1, 0), (2, -1), (1.5, 0)])
    def test_invalid(self, chunk, left):
        with pytest.raises(MaskError):
            ChunkSpec(chunk, left)

    @pytest.mark.unit
    @pytest.mark.positive
    @pytest.mark.parametrize("text,expected", [("infinite", None), ("inf", None), (None, None),
                                               ("3", 3), (0, 0)])
    def test_parse_left_context(self, text, expected):
        assert ChunkSpec.parse_left_context(text) == expected

    @pytest.mark.unit
    @pytest.mark.negative
    def test_parse_left_context_rejects_garbage(self):
        with pytest.raises(MaskError):
            ChunkSpec.parse_left_context("lots")

    @pytest.mark.unit
    @pytest.mark.positive
    def test_chunk_count(self):
        assert chunk_count(6, 2) == 3
        assert chunk_count(7, 2) == 4
        assert chunk_count(0, 3) == 0


class TestBuildMask:
    """Test build_mask against hand-built grids and a brute-force oracle"""

    @pytest.mark.unit
    @pytest.mark.positive
    def test_single_chunk_is_all_ones(self):
        assert build_mask(4, ChunkSpec.streaming(4, 0)).bits.all()

    @pytest.mark.unit
    @pytest.mark.positive
    def test_no_left_context(self):
        expected = grid("1100", "1100", "0011", "0011")
        np.testing.assert_array_equal(build_mask(4, ChunkSpec.streaming(2, 0)).bits, expected)

    @pytest.mark.unit
    @pytest.mark.positive
    def test_one_chunk_left_context_matches_golden_grid(self, fixtures_dir):
        mask = build_mask(6, ChunkSpec.streaming(2, 1))
        golden = (fixtures_dir / "mask_T6_C2_L1.txt").read_text()
        assert mask.to_text_grid() == golden
        np.testing.assert_array_equal(parse_text_grid(golden), mask.bits)

    @pytest.mark.unit
    @pytest.mark.positive
    def test_infinite_left_context(self):
        bits = build_mask(6, ChunkSpec.streaming(2)).bits
        assert bits[4].all() and bits[5].all()
        np.testing.assert_array_equal(bits[0], [1, 1, 0, 0, 0, 0])

    @pytest.mark.unit
    @pytest.mark.acceptance
    @pytest.mark.parametrize("max_T", [
        20, pytest.param(64, marks=pytest.mark.slow),
    ])
    def test_oracle_grid(self, max_T):
        for T in range(1, max_T + 1):
            for C in range(1, T + 1):
                max_left = math.ceil(T / C)
                for L in list(range(0, max_left + 1)) + [None]:
                    bits = build_mask(T, ChunkSpec.streaming(C, L)).bits
                    assert np.array_equal(bits, brute_force_mask(T, C, L)), (T, C, L)

    @pytest.mark.unit
    @pytest.mark.acceptance
    def test_infinite_masks_only_grow(self):
        for T in range(1, 65):
            for C in range(1, T + 1):
                bits = build_mask(T, ChunkSpec.streaming(C)).bits
                assert np.all(bits[:-1] <= bits[1:]), (T, C)

    @pytest.mark.unit
    @pytest.mark.positive
    def test_structural_properties(self, rng):
        for _ in range(50):
            T = int(rng.integers(1, 40))
            C = int(rng.integers(1, T + 1))
            L = int(rng.integers(0, 4))
            mask = build_mask(T, ChunkSpec.streaming(C, L))
            bits = mask.bits
            assert bits.diagonal().all()
            for t in range(T):
                same_chunk = np.arange(T) // C == t // C
                assert bits[t, same_chunk].all()
                assert visible_frame_count(mask, t) >= t % C + 1
                assert visible_frame_count(mask, t) == bits[t].sum()

    @pytest.mark.unit
    @pytest.mark.positive
    def test_full_context_spec(self):
        assert build_mask(5, ChunkSpec.full_context()).bits.all()

    @pytest.mark.unit
    @pytest.mark.negative
    def test_empty_sequence(self):
        with pytest.raises(MaskError):
            build_mask(0, ChunkSpec.streaming(2))

    @pytest.mark.unit
    @pytest.mark.positive
    def test_row_and_visible(self):
        mask = build_mask(6, ChunkSpec.streaming(2, 1))
        np.testing.assert_array_equal(mask.row(2), [1, 1, 1, 1, 0, 0])
        assert not mask.visible(0, 7)
        assert mask.chunk_bounds(2) == (4, 6)


class TestVisibleFrameCount:
    """Test visible_frame_count"""

    @pytest.mark.unit
    @pytest.mark.positive
    def test_examples(self):
        assert visible_frame_count(build_mask(5, ChunkSpec.full_context()), 3) == 5
        assert visible_frame_count(build_mask(4, ChunkSpec.streaming(2, 0)), 3) == 2
        assert visible_frame_count(build_mask(6, ChunkSpec.streaming(2, 1)), 2) == 4

    @pytest.mark.unit
    @pytest.mark.edge
    def test_partial_last_chunk(self):
        assert visible_frame_count(build_mask(5, ChunkSpec.streaming(2)), 4) == 5

    @pytest.mark.unit
    @pytest.mark.negative
    def test_out_of_range(self):
        with pytest.raises(MaskError):
            visible_frame_count(build_mask(4, ChunkSpec.streaming(2)), 4)


class TestTextGrid:
    """Test the debug 0/1 grid format"""

    @pytest.mark.unit
    @pytest.mark.negative
    @pytest.mark.parametrize("text", ["", "10\n1", "12\n01", "101\n010"])
    def test_malformed(self, text):
        with pytest.raises(MaskError):
            parse_text_grid(text)


class TestSchedule:
    """Test the dynamic chunk sampling schedule"""

    @pytest.mark.unit
    @pytest.mark.positive
    @pytest.mark.parametrize("ms,shift,frames", [(320, 10, 32), (10, 10, 1), (5, 10, 1), (700, 10, 70)])
    def test_ms_to_frames(self, ms, shift, frames):
        assert ms_to_frames(ms, shift) == frames

    @pytest.mark.unit
    @pytest.mark.negative
    def test_ms_to_frames_rejects_non_positive(self):
        with pytest.raises(MaskError):
            ms_to_frames(0, 10)
        with pytest.raises(MaskError):
            ms_to_frames(10, -1)

    @pytest.mark.unit
    @pytest.mark.configuration
    def test_defaults(self):
        sched = DctSchedule()
        assert sched.streaming_probability == 0.6
        assert sched.chunk_range_ms == (320.0, 1280.0)
        assert sched.left_context_range_ms == (320.0, 1280.0)
        assert sched.frame_shift_ms == 10.0

    @pytest.mark.unit
    @pytest.mark.negative
    def test_invalid_schedule(self):
        with pytest.raises(MaskError):
            DctSchedule(streaming_probability=1.5)
        with pytest.raises(MaskError):
            DctSchedule(chunk_range_ms=(500.0, 100.0))

    @pytest.mark.unit
    @pytest.mark.positive
    def test_zero_probability_is_always_full_context(self):
        rng = np.random.default_rng(0)
        sched = DctSchedule(streaming_probability=0.0)
        assert all(sample_chunk_spec(500, sched, rng).is_full_context for _ in range(200))

    @pytest.mark.unit
    @pytest.mark.positive
    def test_same_seed_same_spec(self):
        sched = DctSchedule()
        a = [sample_chunk_spec(500, sched, np.random.default_rng(42)) for _ in range(3)]
        assert a[0] == a[1] == a[2]

    @pytest.mark.unit
    @pytest.mark.numerical
    def test_streaming_fraction(self):
        rng = np.random.default_rng(2024)
        sched = DctSchedule()
        specs = [sample_chunk_spec(1000, sched, rng) for _ in range(10000)]
        fraction = sum(spec.is_streaming for spec in specs) / len(specs)
        assert abs(fraction - 0.6) <= 0.02

    @pytest.mark.unit
    @pytest.mark.positive
    def test_streaming_draws_within_ranges(self):
        rng = np.random.default_rng(3)
        sched = DctSchedule(streaming_probability=1.0)
        for _ in range(500):
            spec = sample_chunk_spec(1000, sched, rng)
            assert 32 <= spec.chunk_size_frames <= 128
            assert math.ceil(32 / spec.chunk_size_frames) <= spec.left_context_chunks
            assert spec.left_context_chunks <= math.ceil(128 / spec.chunk_size_frames)

    @pytest.mark.unit
    @pytest.mark.edge
    def test_short_sequence_clamps_chunk(self):
        rng = np.random.default_rng(5)
        sched = DctSchedule(streaming_probability=1.0)
        for _ in range(50):
            assert sample_chunk_spec(10, sched, rng).chunk_size_frames == 10

    @pytest.mark.unit
    @pytest.mark.positive
    def test_uniform_draw(self):
        rng = np.random.default_rng(9)
        for _ in range(200):
            spec = sample_uniform_chunk_spec(20, rng, streaming_probability=1.0)
            assert 1 <= spec.chunk_size_frames <= 20
            assert 0 <= spec.left_context_chunks <= math.ceil(20 / spec.chunk_size_frames)
