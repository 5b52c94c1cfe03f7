"""
Benchmark package
Synthetic features, RTF timing, memory model and length-bucketed throughput
"""
from .features import frames_for_duration, generate_synthetic_features
from .memory_model import (
    MemoryBreakdown, measure_peak_memory, memory_breakdown, model_peak_memory, weight_bytes,
)
from .rtf_benchmark import chunk_spec_for_run, output_digest, run_rtf_benchmark, time_streaming
from .length_buckets import (
    BUCKET_COLUMNS, DEFAULT_NUM_BUCKETS, bucket_by_length, run_length_buckets,
    sample_utterance_durations, time_utterances,
)

__all__ = [
    'frames_for_duration', 'generate_synthetic_features',
    'MemoryBreakdown', 'measure_peak_memory', 'memory_breakdown', 'model_peak_memory', 'weight_bytes',
    'chunk_spec_for_run', 'output_digest', 'run_rtf_benchmark', 'time_streaming',
    'BUCKET_COLUMNS', 'DEFAULT_NUM_BUCKETS', 'bucket_by_length', 'run_length_buckets',
    'sample_utterance_durations', 'time_utterances',
]
