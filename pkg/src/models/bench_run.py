"""
BenchRun and BenchRow data classes for benchmark runs
"""
from dataclasses import dataclass, field
from typing import List, Optional

from src.chunking.schedule import DEFAULT_FRAME_SHIFT_MS
from src.exceptions import ConfigurationError

DEFAULT_DURATIONS_S = [5.0, 10.0, 20.0, 30.0, 60.0, 120.0]
DEFAULT_REPEATS = 100
DEFAULT_CHUNK_MS = 640.0

CSV_COLUMNS = [
    'duration_s', 'mixing', 'chunk_ms', 'left_context', 'wall_ms_mean', 'wall_ms_p95', 'rtf',
    'modeled_peak_bytes', 'measured_peak_bytes',
]


def left_context_label(left_context_chunks: Optional[int]) -> str:
    return "infinite" if left_context_chunks is None else str(left_context_chunks)


@dataclass
class BenchRow:
    """Timing and memory results for one utterance duration"""
    duration_s: float
    mixing: str
    chunk_ms: float
    left_context: str
    wall_ms_mean: float
    wall_ms_p95: float
    rtf: float
    modeled_peak_bytes: int
    measured_peak_bytes: Optional[int] = None

    @property
    def wall_seconds(self) -> float:
        return self.wall_ms_mean / 1000.0

    def to_dict(self) -> dict:
        """Convert BenchRow to dictionary (CSV column order)"""
        return {
            'duration_s': self.duration_s,
            'mixing': self.mixing,
            'chunk_ms': self.chunk_ms,
            'left_context': self.left_context,
            'wall_ms_mean': self.wall_ms_mean,
            'wall_ms_p95': self.wall_ms_p95,
            'rtf': self.rtf,
            'modeled_peak_bytes': self.modeled_peak_bytes,
            'measured_peak_bytes': self.measured_peak_bytes,
        }


@dataclass
class BenchRun:
    """Benchmark settings plus the per-duration result rows"""
    config_id: str
    mixing: str
    durations_s: List[float] = field(default_factory=lambda: list(DEFAULT_DURATIONS_S))
    repeats: int = DEFAULT_REPEATS
    frame_shift_ms: float = DEFAULT_FRAME_SHIFT_MS
    chunk_ms: float = DEFAULT_CHUNK_MS
    left_context: Optional[int] = None
    warmup: int = 1
    seed: int = 0
    measure_memory: bool = True
    results: List[BenchRow] = field(default_factory=list)

    def __post_init__(self):
        if not self.durations_s:
            raise ConfigurationError("durations_s must list at least one duration")
        if any(d <= 0 for d in self.durations_s):
            raise ConfigurationError(f"durations must be positive, got {self.durations_s}")
        if self.repeats < 1:
            raise ConfigurationError(f"repeats must be >= 1, got {self.repeats}")
        if self.warmup < 1:
            raise ConfigurationError(f"warmup must be >= 1, got {self.warmup}")
        if self.frame_shift_ms <= 0 or self.chunk_ms <= 0:
            raise ConfigurationError("frame_shift_ms and chunk_ms must be positive")
        self.durations_s = sorted(float(d) for d in self.durations_s)

    @property
    def left_context_label(self) -> str:
        return left_context_label(self.left_context)

    def add_row(self, row: BenchRow) -> None:
        """Insert a row keeping results sorted by duration"""
        self.results.append(row)
        self.results.sort(key=lambda r: r.duration_s)

    def rows_as_dicts(self) -> List[dict]:
        return [row.to_dict() for row in self.results]

    def to_dict(self) -> dict:
        """Convert BenchRun to dictionary"""
        return {
            'config_id': self.config_id,
            'mixing': self.mixing,
            'durations_s': list(self.durations_s),
            'repeats': self.repeats,
            'frame_shift_ms': self.frame_shift_ms,
            'chunk_ms': self.chunk_ms,
            'left_context': self.left_context_label,
            'warmup': self.warmup,
            'seed': self.seed,
            'results': self.rows_as_dicts(),
        }
