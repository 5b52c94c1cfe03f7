"""
Dynamic chunk training schedule
Draws one ChunkSpec per batch from millisecond ranges
"""
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.chunking.chunk_spec import ChunkSpec
from src.exceptions import MaskError

DEFAULT_STREAMING_PROBABILITY = 0.6
DEFAULT_CHUNK_RANGE_MS = (320.0, 1280.0)
DEFAULT_LEFT_CONTEXT_RANGE_MS = (320.0, 1280.0)
DEFAULT_FRAME_SHIFT_MS = 10.0


@dataclass(frozen=True)
class DctSchedule:
    """Sampling parameters for dynamic chunk training"""
    streaming_probability: float = DEFAULT_STREAMING_PROBABILITY
    chunk_range_ms: Tuple[float, float] = DEFAULT_CHUNK_RANGE_MS
    left_context_range_ms: Tuple[float, float] = DEFAULT_LEFT_CONTEXT_RANGE_MS
    frame_shift_ms: float = DEFAULT_FRAME_SHIFT_MS

    def __post_init__(self):
        if not 0.0 <= self.streaming_probability <= 1.0:
            raise MaskError(f"streaming_probability must be in [0, 1], got {self.streaming_probability}")
        for name in ("chunk_range_ms", "left_context_range_ms"):
            low, high = getattr(self, name)
            if low <= 0 or high <= 0 or low > high:
                raise MaskError(f"{name} must be a positive range with min <= max, got ({low}, {high})")
        if self.frame_shift_ms <= 0:
            raise MaskError(f"frame_shift_ms must be positive, got {self.frame_shift_ms}")


def ms_to_frames(ms: float, frame_shift_ms: float) -> int:
    """floor(ms / frame_shift_ms), at least 1"""
    if ms <= 0 or frame_shift_ms <= 0:
        raise MaskError(f"ms and frame_shift_ms must be positive, got {ms} and {frame_shift_ms}")
    # tolerate float noise such as 0.7 * 1000 / 10 = 69.99999...
    return max(1, int(math.floor(ms / frame_shift_ms + 1e-9)))


def sample_chunk_spec(T: int, sched: DctSchedule, rng: np.random.Generator) -> ChunkSpec:
    """
    Draw the chunk layout for one batch

    With probability 1 - streaming_probability the batch is full context.
    Otherwise C is uniform over the chunk range (in frames, clamped to [1, T])
    and L is uniform over the left-context range, rounded up to whole chunks.
    """
    if T < 1:
        raise MaskError(f"T must be >= 1, got {T}")
    if rng.random() >= sched.streaming_probability:
        return ChunkSpec.full_context()

    c_low = ms_to_frames(sched.chunk_range_ms[0], sched.frame_shift_ms)
    c_high = ms_to_frames(sched.chunk_range_ms[1], sched.frame_shift_ms)
    chunk = int(rng.integers(c_low, c_high + 1))
    chunk = min(max(chunk, 1), T)

    l_low = ms_to_frames(sched.left_context_range_ms[0], sched.frame_shift_ms)
    l_high = ms_to_frames(sched.left_context_range_ms[1], sched.frame_shift_ms)
    left_frames = int(rng.integers(l_low, l_high + 1))
    left_chunks = max(0, math.ceil(left_frames / chunk))
    return ChunkSpec.streaming(chunk, left_chunks)


def sample_uniform_chunk_spec(T: int, rng: np.random.Generator,
                              streaming_probability: float = DEFAULT_STREAMING_PROBABILITY) -> ChunkSpec:
    """Unrestricted draw: C uniform in [1, T], L uniform in [0, ceil(T / C)]"""
    if T < 1:
        raise MaskError(f"T must be >= 1, got {T}")
    if not 0.0 <= streaming_probability <= 1.0:
        raise MaskError(f"streaming_probability must be in [0, 1], got {streaming_probability}")
    if rng.random() >= streaming_probability:
        return ChunkSpec.full_context()
    chunk = int(rng.integers(1, T + 1))
    left = int(rng.integers(0, math.ceil(T / chunk) + 1))
    return ChunkSpec.streaming(chunk, left)
