"""
Unit tests for synthetic features, the memory model, RTF timing and length buckets
"""
import numpy as np
import pandas as pd
import pytest

from src.bench import (
    BUCKET_COLUMNS, bucket_by_length, chunk_spec_for_run, frames_for_duration,
    generate_synthetic_features, measure_peak_memory, memory_breakdown, model_peak_memory,
    output_digest, run_length_buckets, run_rtf_benchmark, sample_utterance_durations,
    time_streaming, weight_bytes,
)
from src.chunking import ChunkSpec
from src.encoder import EncoderConfig, init_encoder_params
from src.exceptions import BenchmarkError, ConfigurationError, TimerResolutionError
from src.models import BenchRun
from tests.conftest import tiny_config


class FakeClock:
    """Clock that advances by a fixed step on every reading"""

    def __init__(self, step: float):
        self.step = step
        self.now = 0.0

    def __call__(self) -> float:
        value = self.now
        self.now += self.step
        return value


def bench_encoder(mixing: str, **overrides) -> EncoderConfig:
    values = dict(d_model=144, mixing=mixing, num_blocks=12, num_heads=4, conv_kernel=31,
                  subsampling_factor=4, precision="f32", feat_dim=80)
    values.update(overrides)
    return EncoderConfig(**values)


class TestSyntheticFeatures:
    """Test synthetic feature generation"""

    @pytest.mark.unit
    @pytest.mark.positive
    @pytest.mark.parametrize("duration,frames", [(5, 500), (120, 12000), (0.3, 30), (0.019, 1)])
    def test_frame_count(self, duration, frames):
        """Test T = floor(duration * 1000 / shift)"""
        assert frames_for_duration(duration, 10.0) == frames

    @pytest.mark.unit
    @pytest.mark.positive
    def test_shape_and_dtype(self):
        feats = generate_synthetic_features(5, 80, 10.0, seed=3)
        assert feats.frames.shape == (500, 80)
        assert feats.frames.dtype == np.float32
        assert feats.duration_s == pytest.approx(5.0)
        assert abs(float(feats.frames.std()) - 1.0) < 0.02

    @pytest.mark.unit
    @pytest.mark.positive
    def test_seeded(self):
        """Test that equal seeds give bitwise identical frames"""
        a = generate_synthetic_features(2, 40, seed=11)
        b = generate_synthetic_features(2, 40, seed=11)
        c = generate_synthetic_features(2, 40, seed=12)
        assert np.array_equal(a.frames, b.frames)
        assert not np.array_equal(a.frames, c.frames)

    @pytest.mark.unit
    @pytest.mark.negative
    @pytest.mark.parametrize("kwargs", [dict(duration_s=0), dict(duration_s=-1), dict(duration_s=0.005),
                                        dict(duration_s=1, D=0), dict(duration_s=1, frame_shift_ms=0)])
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigurationError):
            generate_synthetic_features(**kwargs)


class TestMemoryModel:
    """Test the closed-form peak memory model"""

    @pytest.mark.unit
    @pytest.mark.edge
    @pytest.mark.parametrize("mixing", ["summary_mixing", "mhsa"])
    def test_zero_frames_is_weights_only(self, mixing):
        cfg = bench_encoder(mixing, num_blocks=2)
        assert model_peak_memory(cfg, None, 0) == weight_bytes(cfg)
        assert weight_bytes(cfg) == init_encoder_params(cfg, None).nbytes

    @pytest.mark.unit
    @pytest.mark.acceptance
    def test_mhsa_score_term_is_quadratic(self):
        """Test the score term ratio between 24k and 1k frames"""
        cfg = bench_encoder("mhsa")
        long, short = memory_breakdown(cfg, None, 24000), memory_breakdown(cfg, None, 1000)
        assert long.mixing / short.mixing == 576

    @pytest.mark.unit
    @pytest.mark.acceptance
    def test_summary_mixing_total_is_linear(self):
        cfg = bench_encoder("summary_mixing")
        ratio = model_peak_memory(cfg, None, 24000) / model_peak_memory(cfg, None, 1000)
        assert ratio <= 24.5

    @pytest.mark.unit
    @pytest.mark.acceptance
    def test_mixing_term_growth_between_10s_and_120s(self):
        """Test that MHSA cross-frame bytes grow at least 50x faster than SummaryMixing's"""
        sm, mhsa = bench_encoder("summary_mixing"), bench_encoder("mhsa")
        sm_ratio = memory_breakdown(sm, None, 12000).mixing / memory_breakdown(sm, None, 1000).mixing
        mhsa_ratio = memory_breakdown(mhsa, None, 12000).mixing / memory_breakdown(mhsa, None, 1000).mixing
        assert mhsa_ratio >= 50 * sm_ratio
        assert model_peak_memory(mhsa, None, 12000) > 2 * model_peak_memory(sm, None, 12000)

    @pytest.mark.unit
    @pytest.mark.positive
    def test_spec_does_not_change_estimate(self):
        cfg = bench_encoder("mhsa", num_blocks=2)
        assert model_peak_memory(cfg, ChunkSpec.streaming(16, 2), 3000) == model_peak_memory(cfg, None, 3000)

    @pytest.mark.unit
    @pytest.mark.dataclass
    def test_breakdown_fields(self):
        cfg = bench_encoder("summary_mixing", num_blocks=2)
        data = memory_breakdown(cfg, None, 1000).to_dict()
        assert data["input_frames"] == 1000 and data["encoder_frames"] == 250
        assert data["features"] == 1000 * 80 * 4
        assert data["mixing"] == 2 * 144 * 4
        assert data["total"] == model_peak_memory(cfg, None, 1000)

    @pytest.mark.unit
    @pytest.mark.negative
    def test_negative_frames(self):
        with pytest.raises(ConfigurationError):
            model_peak_memory(bench_encoder("mhsa"), None, -1)

    @pytest.mark.unit
    @pytest.mark.performance
    @pytest.mark.parametrize("mixing", ["summary_mixing", "mhsa"])
    @pytest.mark.parametrize("T", [500, 2000])
    def test_measured_within_factor_two(self, mixing, T):
        """Test that the traced peak of a real pass stays within 2x of the model"""
        cfg = bench_encoder(mixing, num_blocks=2)
        spec = ChunkSpec.streaming(16)
        measured = measure_peak_memory(cfg, spec, T)
        modeled = model_peak_memory(cfg, spec, T)
        assert 0.5 <= measured / modeled <= 2.0

    @pytest.mark.unit
    @pytest.mark.negative
    def test_measure_rejects_short_input(self):
        with pytest.raises(ConfigurationError):
            measure_peak_memory(bench_encoder("mhsa", num_blocks=1), None, 3)


class TestRtfBenchmark:
    """Test RTF timing with an injected clock"""

    def setup_method(self):
        self.cfg = tiny_config("summary_mixing")
        self.params = init_encoder_params(self.cfg, 0)

    def _run(self, **overrides):
        values = dict(config_id="tiny", mixing="summary_mixing", durations_s=[0.1, 0.05], repeats=3,
                      chunk_ms=20, measure_memory=False)
        values.update(overrides)
        return BenchRun(**values)

    @pytest.mark.unit
    @pytest.mark.positive
    def test_rows(self):
        run = run_rtf_benchmark(self.cfg, None, self._run(), self.params, timer=FakeClock(0.5), resolution=1e-9)
        assert [row.duration_s for row in run.results] == [0.05, 0.1]
        first, second = run.results
        assert first.wall_ms_mean == pytest.approx(500.0)
        assert first.wall_ms_p95 == pytest.approx(500.0)
        assert first.rtf == pytest.approx(10.0)
        assert second.rtf == pytest.approx(5.0)
        assert first.left_context == "infinite"
        assert first.chunk_ms == 20
        assert first.modeled_peak_bytes == model_peak_memory(self.cfg, ChunkSpec.streaming(2), 5)
        assert first.measured_peak_bytes is None

    @pytest.mark.unit
    @pytest.mark.positive
    def test_measured_memory_column(self):
        run = run_rtf_benchmark(self.cfg, None, self._run(durations_s=[0.05], measure_memory=True),
                                self.params, timer=FakeClock(0.5), resolution=1e-9)
        assert run.results[0].measured_peak_bytes > 0

    @pytest.mark.unit
    @pytest.mark.negative
    def test_timer_resolution(self):
        with pytest.raises(TimerResolutionError, match="raise repeats"):
            run_rtf_benchmark(self.cfg, None, self._run(), self.params, timer=FakeClock(1e-9), resolution=1e-9)

    @pytest.mark.unit
    @pytest.mark.negative
    def test_default_resolution_is_perf_counter(self, mocker):
        resolution = mocker.patch("src.bench.rtf_benchmark.timer_resolution", return_value=1.0)
        with pytest.raises(TimerResolutionError):
            run_rtf_benchmark(self.cfg, None, self._run(), self.params, timer=FakeClock(0.5))
        resolution.assert_called_once()

    @pytest.mark.unit
    @pytest.mark.negative
    def test_mixing_mismatch(self):
        with pytest.raises(ConfigurationError):
            run_rtf_benchmark(self.cfg, None, self._run(mixing="mhsa"), self.params)

    @pytest.mark.unit
    @pytest.mark.negative
    def test_nondeterministic_output(self, mocker):
        mocker.patch("src.bench.rtf_benchmark.stream_features",
                     side_effect=[np.zeros((2, 2)), np.zeros((2, 2)), np.ones((2, 2))])
        feats = generate_synthetic_features(0.05, self.cfg.feat_dim)
        with pytest.raises(BenchmarkError, match="repeat 1"):
            time_streaming(feats, ChunkSpec.streaming(2), self.cfg, self.params, repeats=2)

    @pytest.mark.unit
    @pytest.mark.positive
    def test_warmup_passes_are_not_timed(self, mocker):
        stream = mocker.patch("src.bench.rtf_benchmark.stream_features", return_value=np.zeros((2, 2)))
        clock = FakeClock(0.25)
        timings = time_streaming(None, ChunkSpec.streaming(2), self.cfg, self.params, repeats=4, warmup=3,
                                 timer=clock)
        assert stream.call_count == 3 + 4
        np.testing.assert_array_equal(timings, [0.25] * 4)
        assert clock.now == pytest.approx(0.25 * 8)

    @pytest.mark.unit
    @pytest.mark.configuration
    def test_chunk_spec_for_run(self):
        cfg = bench_encoder("summary_mixing", num_blocks=1)
        assert chunk_spec_for_run(cfg, BenchRun("x", "summary_mixing")) == ChunkSpec.streaming(16)
        assert chunk_spec_for_run(cfg, BenchRun("x", "summary_mixing", left_context=2)) == ChunkSpec.streaming(16, 2)
        with pytest.raises(ConfigurationError):
            chunk_spec_for_run(cfg, BenchRun("x", "summary_mixing", chunk_ms=20))

    @pytest.mark.unit
    @pytest.mark.positive
    def test_output_digest(self):
        a = np.arange(6, dtype=np.float32).reshape(2, 3)
        assert output_digest(a) == output_digest(a.copy())
        assert output_digest(a) != output_digest(a.reshape(3, 2))
        assert output_digest(a) != output_digest(a.astype(np.float64))


class TestLengthBuckets:
    """Test length-bucketed throughput"""

    @pytest.mark.unit
    @pytest.mark.positive
    def test_equal_count_buckets(self):
        durations = np.arange(1.0, 21.0)
        timings = pd.DataFrame({"duration_s": durations, "wall_seconds": durations * 0.1})
        table = bucket_by_length(timings, 10)
        assert list(table.columns) == BUCKET_COLUMNS
        assert table["bucket"].tolist() == list(range(1, 11))
        assert table["utterances"].tolist() == [2] * 10
        assert table["min_duration_s"].is_monotonic_increasing
        np.testing.assert_allclose(table["rtf"], 0.1)
        np.testing.assert_allclose(table["throughput"], 10.0)

    @pytest.mark.unit
    @pytest.mark.edge
    def test_single_duration(self):
        timings = pd.DataFrame({"duration_s": [3.0] * 4, "wall_seconds": [1.0] * 4})
        table = bucket_by_length(timings, 10)
        assert len(table) == 1
        assert table.iloc[0]["utterances"] == 4

    @pytest.mark.unit
    @pytest.mark.edge
    def test_empty(self):
        table = bucket_by_length(pd.DataFrame(columns=["duration_s", "wall_seconds"]))
        assert table.empty and list(table.columns) == BUCKET_COLUMNS

    @pytest.mark.unit
    @pytest.mark.negative
    def test_invalid_arguments(self):
        with pytest.raises(ConfigurationError):
            bucket_by_length(pd.DataFrame({"duration_s": [1.0], "wall_seconds": [1.0]}), 0)
        with pytest.raises(ConfigurationError):
            sample_utterance_durations(0, 1, 2)
        with pytest.raises(ConfigurationError):
            sample_utterance_durations(5, 3, 2)

    @pytest.mark.unit
    @pytest.mark.positive
    def test_sampled_durations(self):
        a = sample_utterance_durations(100, 2.0, 20.0, seed=4)
        assert np.array_equal(a, sample_utterance_durations(100, 2.0, 20.0, seed=4))
        assert a.min() >= 2.0 and a.max() <= 20.0

    @pytest.mark.unit
    @pytest.mark.integration
    def test_run_with_workers(self):
        cfg = tiny_config("mhsa")
        table = run_length_buckets(cfg, ChunkSpec.streaming(2), num_utterances=12, min_s=0.05, max_s=0.2,
                                   num_buckets=3, workers=2, seed=1)
        assert 1 <= len(table) <= 3
        assert table["utterances"].sum() == 12
        assert (table["wall_seconds"] > 0).all()
        assert table["max_duration_s"].max() <= 0.2
