"""
Chunking package
Chunk specifications, visibility masks and the dynamic chunk sampling schedule
"""
from .chunk_spec import ChunkSpec, INFINITE, chunk_count, frame_visibility
from .mask import VisibilityMask, build_mask, visible_frame_count, parse_text_grid
from .schedule import (
    DctSchedule, ms_to_frames, sample_chunk_spec, sample_uniform_chunk_spec,
    DEFAULT_FRAME_SHIFT_MS,
)

__all__ = [
    'ChunkSpec', 'INFINITE', 'chunk_count', 'frame_visibility',
    'VisibilityMask', 'build_mask', 'visible_frame_count', 'parse_text_grid',
    'DctSchedule', 'ms_to_frames', 'sample_chunk_spec', 'sample_uniform_chunk_spec',
    'DEFAULT_FRAME_SHIFT_MS',
]
