"""
Length-bucketed throughput
Random-length utterances grouped into equal-count buckets of increasing length
"""
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional, Sequence

import numpy as np
import pandas as pd

from src.bench.features import generate_synthetic_features
from src.chunking.chunk_spec import ChunkSpec
from src.encoder import EncoderConfig, EncoderParams, init_encoder_params, stream_features
from src.exceptions import ConfigurationError

logger = logging.getLogger(__name__)

DEFAULT_NUM_BUCKETS = 10
BUCKET_COLUMNS = [
    'bucket', 'min_duration_s', 'max_duration_s', 'utterances', 'audio_seconds', 'wall_seconds',
    'throughput', 'rtf',
]


def sample_utterance_durations(num_utterances: int, min_s: float, max_s: float,
                               seed: int = 0) -> np.ndarray:
    """Uniform random durations in [min_s, max_s]"""
    if num_utterances < 1:
        raise ConfigurationError(f"num_utterances must be >= 1, got {num_utterances}")
    if min_s <= 0 or max_s < min_s:
        raise ConfigurationError(f"need 0 < min_s <= max_s, got {min_s} and {max_s}")
    rng = np.random.default_rng(seed)
    return rng.uniform(min_s, max_s, size=num_utterances)


def time_utterances(durations: Sequence[float], cfg: EncoderConfig, spec: ChunkSpec,
                    params: EncoderParams, frame_shift_ms: float = 10.0, seed: int = 0,
                    workers: int = 1, timer: Callable[[], float] = time.perf_counter) -> pd.DataFrame:
    """
    Stream every utterance once; with workers > 1 the streams run concurrently,
    each with its own context

    Returns:
        DataFrame with duration_s and wall_seconds per utterance, input order
    """
    if workers < 1:
        raise ConfigurationError(f"workers must be >= 1, got {workers}")

    def _one(item):
        index, duration = item
        feats = generate_synthetic_features(duration, cfg.feat_dim, frame_shift_ms, seed + index)
        start = timer()
        stream_features(feats, spec, cfg, params)
        return feats.duration_s, timer() - start

    items = list(enumerate(durations))
    if workers == 1:
        results = [_one(item) for item in items]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_one, items))
    return pd.DataFrame(results, columns=['duration_s', 'wall_seconds'])


def bucket_by_length(timings: pd.DataFrame, num_buckets: int = DEFAULT_NUM_BUCKETS) -> pd.DataFrame:
    """
    Aggregate per-utterance timings into equal-count length buckets

    Buckets whose quantile edges coincide are merged, so fewer than
    num_buckets rows may come back.
    """
    if num_buckets < 1:
        raise ConfigurationError(f"num_buckets must be >= 1, got {num_buckets}")
    if timings.empty:
        return pd.DataFrame(columns=BUCKET_COLUMNS)
    frame = timings.copy()
    if frame['duration_s'].nunique() == 1 or num_buckets == 1:
        frame['bucket'] = 0
    else:
        frame['bucket'] = pd.qcut(frame['duration_s'], q=num_buckets, labels=False, duplicates='drop')

    grouped = frame.groupby('bucket').agg(
        min_duration_s=('duration_s', 'min'),
        max_duration_s=('duration_s', 'max'),
        utterances=('duration_s', 'size'),
        audio_seconds=('duration_s', 'sum'),
        wall_seconds=('wall_seconds', 'sum'),
    ).reset_index()
    grouped['bucket'] = np.arange(1, len(grouped) + 1)
    grouped['throughput'] = grouped['audio_seconds'] / grouped['wall_seconds']
    grouped['rtf'] = grouped['wall_seconds'] / grouped['audio_seconds']
    return grouped[BUCKET_COLUMNS]


def run_length_buckets(cfg: EncoderConfig, spec: ChunkSpec, num_utterances: int, min_s: float,
                       max_s: float, num_buckets: int = DEFAULT_NUM_BUCKETS, workers: int = 1,
                       seed: int = 0, params: Optional[EncoderParams] = None,
                       frame_shift_ms: float = 10.0,
                       timer: Callable[[], float] = time.perf_counter) -> pd.DataFrame:
    """Sample durations, time them and return the bucket table"""
    durations = sample_utterance_durations(num_utterances, min_s, max_s, seed)
    if params is None:
        params = init_encoder_params(cfg, seed)
    logger.info("Timing %d utterances (%.1f-%.1fs) with %d worker(s)", num_utterances, min_s, max_s, workers)
    timings = time_utterances(durations, cfg, spec, params, frame_shift_ms, seed, workers, timer)
    return bucket_by_length(timings, num_buckets)
