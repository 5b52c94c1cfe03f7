"""
Synthetic acoustic features for benchmark runs
"""
import logging
import math

import numpy as np

from src.chunking.schedule import DEFAULT_FRAME_SHIFT_MS
from src.exceptions import ConfigurationError
from src.models.feature_sequence import FeatureSequence

logger = logging.getLogger(__name__)


def frames_for_duration(duration_s: float, frame_shift_ms: float = DEFAULT_FRAME_SHIFT_MS) -> int:
    """floor(duration_s * 1000 / frame_shift_ms), tolerant of float round-off"""
    if duration_s <= 0:
        raise ConfigurationError(f"duration_s must be positive, got {duration_s}")
    if frame_shift_ms <= 0:
        raise ConfigurationError(f"frame_shift_ms must be positive, got {frame_shift_ms}")
    return int(math.floor(duration_s * 1000.0 / frame_shift_ms + 1e-9))


def generate_synthetic_features(duration_s: float, D: int = 80,
                                frame_shift_ms: float = DEFAULT_FRAME_SHIFT_MS,
                                seed: int = 0) -> FeatureSequence:
    """
    Unit-variance float32 noise standing in for log-mel features

    Args:
        duration_s: audio seconds to cover
        D: feature width
        frame_shift_ms: time between frames
        seed: generator seed; equal seeds give bitwise identical frames

    Returns:
        FeatureSequence of floor(duration_s * 1000 / frame_shift_ms) frames

    Raises:
        ConfigurationError: On non-positive inputs or a duration shorter than one frame
    """
    if int(D) != D or D < 1:
        raise ConfigurationError(f"feature width D must be an integer >= 1, got {D}")
    T = frames_for_duration(duration_s, frame_shift_ms)
    if T < 1:
        raise ConfigurationError(
            f"duration {duration_s}s is shorter than one {frame_shift_ms} ms frame"
        )
    rng = np.random.default_rng(seed)
    frames = rng.standard_normal((T, int(D)), dtype=np.float32)
    logger.debug("Generated %d x %d synthetic frames (seed %s)", T, D, seed)
    return FeatureSequence(frames, frame_shift_ms)
