"""
FeatureSequence data class for acoustic feature frames
"""
from dataclasses import dataclass

import numpy as np

from src.exceptions import ShapeError
from src.chunking.schedule import DEFAULT_FRAME_SHIFT_MS


@dataclass(frozen=True)
class FeatureSequence:
    """T x D feature frames sampled every frame_shift_ms"""
    frames: np.ndarray
    frame_shift_ms: float = DEFAULT_FRAME_SHIFT_MS

    def __post_init__(self):
        frames = np.asarray(self.frames)
        if frames.ndim != 2:
            raise ShapeError(f"feature frames must be T x D, got shape {frames.shape}")
        if self.frame_shift_ms <= 0:
            raise ShapeError(f"frame_shift_ms must be positive, got {self.frame_shift_ms}")
        object.__setattr__(self, "frames", frames)

    @property
    def num_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def feat_dim(self) -> int:
        return self.frames.shape[1]

    @property
    def duration_s(self) -> float:
        """Audio seconds covered by the frames"""
        return self.num_frames * self.frame_shift_ms / 1000.0

    def slice(self, start: int, stop: int) -> "FeatureSequence":
        return FeatureSequence(self.frames[start:stop], self.frame_shift_ms)

    def to_dict(self) -> dict:
        """Header fields (the frames themselves are not included)"""
        return {
            'num_frames': self.num_frames,
            'feat_dim': self.feat_dim,
            'frame_shift_ms': self.frame_shift_ms,
            'duration_s': self.duration_s,
        }
