"""
Models package for data classes and domain objects
"""

from .feature_sequence import FeatureSequence
from .bench_run import BenchRun, BenchRow, CSV_COLUMNS, DEFAULT_DURATIONS_S, DEFAULT_REPEATS, DEFAULT_CHUNK_MS

__all__ = ['FeatureSequence', 'BenchRun', 'BenchRow', 'CSV_COLUMNS', 'DEFAULT_DURATIONS_S',
           'DEFAULT_REPEATS', 'DEFAULT_CHUNK_MS']
