"""
Real-time-factor benchmark
Times the streaming encoder over synthetic utterances of increasing length
"""
import hashlib
import logging
import time
from typing import Callable, Optional

import numpy as np

from src.bench.features import generate_synthetic_features
from src.bench.memory_model import measure_peak_memory, model_peak_memory
from src.chunking.chunk_spec import ChunkSpec
from src.encoder import EncoderConfig, EncoderParams, MixingKind, init_encoder_params, stream_features
from src.exceptions import BenchmarkError, ConfigurationError, TimerResolutionError
from src.models.bench_run import BenchRow, BenchRun, left_context_label

logger = logging.getLogger(__name__)

RESOLUTION_MARGIN = 10


def output_digest(out: np.ndarray) -> str:
    """Content hash of an encoder output (dtype and shape included)"""
    digest = hashlib.sha256()
    digest.update(str((out.dtype.str, out.shape)).encode("ascii"))
    digest.update(np.ascontiguousarray(out).tobytes())
    return digest.hexdigest()


def timer_resolution() -> float:
    return time.get_clock_info("perf_counter").resolution


def chunk_spec_for_run(cfg: EncoderConfig, run: BenchRun) -> ChunkSpec:
    """Streaming spec from the run's chunk_ms, in post-subsampling frames"""
    frames = int(run.chunk_ms // (run.frame_shift_ms * cfg.subsampling_factor))
    if frames < 1:
        raise ConfigurationError(
            f"chunk_ms {run.chunk_ms} is shorter than one encoder frame "
            f"({run.frame_shift_ms * cfg.subsampling_factor} ms)"
        )
    return ChunkSpec.streaming(frames, run.left_context)


def time_streaming(feats, spec: ChunkSpec, cfg: EncoderConfig, params: EncoderParams,
                   repeats: int, warmup: int = 1,
                   timer: Callable[[], float] = time.perf_counter) -> np.ndarray:
    """
    Wall seconds of `repeats` streaming passes after `warmup` discarded ones

    Raises:
        BenchmarkError: If two passes produce different outputs
    """
    reference = output_digest(stream_features(feats, spec, cfg, params))
    for _ in range(warmup - 1):
        stream_features(feats, spec, cfg, params)
    timings = np.empty(repeats, dtype=np.float64)
    for i in range(repeats):
        start = timer()
        out = stream_features(feats, spec, cfg, params)
        timings[i] = timer() - start
        if output_digest(out) != reference:
            raise BenchmarkError(f"encoder output changed on repeat {i}; the pass is not deterministic")
    return timings


def run_rtf_benchmark(cfg: EncoderConfig, spec: Optional[ChunkSpec], run: BenchRun,
                      params: Optional[EncoderParams] = None,
                      timer: Callable[[], float] = time.perf_counter,
                      resolution: Optional[float] = None) -> BenchRun:
    """
    Fill run.results with one row per duration

    Args:
        cfg: encoder configuration (its mixing kind must match the run)
        spec: streaming chunk spec; None derives it from run.chunk_ms and run.left_context
        run: benchmark settings; rows are appended to it
        params: encoder weights, random from run.seed when omitted
        timer: monotonic clock returning seconds
        resolution: clock resolution in seconds, perf_counter's when omitted

    Returns:
        The same BenchRun with len(durations_s) rows sorted by duration

    Raises:
        ConfigurationError: If the run and the config disagree
        TimerResolutionError: If a mean pass is within 10x of the clock resolution
        BenchmarkError: If outputs differ between repeats
    """
    if MixingKind.parse(run.mixing) is not cfg.mixing:
        raise ConfigurationError(f"run is for {run.mixing} but config uses {cfg.mixing.value}")
    if spec is None:
        spec = chunk_spec_for_run(cfg, run)
    if params is None:
        params = init_encoder_params(cfg, run.seed)
    resolution = timer_resolution() if resolution is None else resolution

    for duration in run.durations_s:
        feats = generate_synthetic_features(duration, cfg.feat_dim, run.frame_shift_ms, run.seed)
        logger.info("Timing %s at %.1fs (%d frames, %d repeats)",
                    cfg.mixing.value, duration, feats.num_frames, run.repeats)
        timings = time_streaming(feats, spec, cfg, params, run.repeats, run.warmup, timer)
        mean_s = float(timings.mean())
        if mean_s <= resolution * RESOLUTION_MARGIN:
            raise TimerResolutionError(
                f"mean pass of {mean_s:.3e}s at {duration}s is within {RESOLUTION_MARGIN}x of the "
                f"timer resolution {resolution:.1e}s; raise repeats or use longer durations"
            )
        measured = None
        if run.measure_memory:
            measured = measure_peak_memory(cfg, spec, feats.num_frames, run.seed, run.frame_shift_ms)
        run.add_row(BenchRow(
            duration_s=duration,
            mixing=cfg.mixing.value,
            chunk_ms=run.chunk_ms,
            left_context=left_context_label(spec.left_context_chunks),
            wall_ms_mean=mean_s * 1000.0,
            wall_ms_p95=float(np.percentile(timings, 95)) * 1000.0,
            rtf=mean_s / duration,
            modeled_peak_bytes=model_peak_memory(cfg, spec, feats.num_frames),
            measured_peak_bytes=measured,
        ))
    return run
