"""
Dynamic-chunk visibility mask
"""
import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from src.chunking.chunk_spec import ChunkSpec, chunk_count, frame_visibility
from src.exceptions import MaskError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VisibilityMask:
    """
    T x T visibility structure m[t, u] derived from a ChunkSpec

    The dense bit matrix is only materialised on first access of `bits`;
    chunk-structured consumers use `chunk_size` / `visible` instead.
    """
    T: int
    spec: ChunkSpec

    @property
    def chunk_size(self) -> int:
        return self.spec.resolve_chunk_size(self.T)

    @property
    def left_context_chunks(self):
        return self.spec.left_context_chunks

    @property
    def num_chunks(self) -> int:
        return chunk_count(self.T, self.chunk_size)

    @cached_property
    def bits(self) -> np.ndarray:
        idx = np.arange(self.T)
        logger.debug("Materialising %dx%d visibility mask (%s)", self.T, self.T, self.spec.describe())
        return frame_visibility(idx[:, None], idx[None, :], self.chunk_size, self.left_context_chunks)

    def visible(self, t, u) -> np.ndarray:
        """m[t, u] for index arrays; out-of-range u is never visible"""
        u = np.asarray(u)
        in_range = (u >= 0) & (u < self.T)
        return in_range & frame_visibility(t, u, self.chunk_size, self.left_context_chunks)

    def row(self, t: int) -> np.ndarray:
        self._check_index(t)
        return self.visible(t, np.arange(self.T))

    def chunk_bounds(self, k: int):
        """(start, stop) frame range of chunk k"""
        start = k * self.chunk_size
        return start, min(start + self.chunk_size, self.T)

    def _check_index(self, t: int) -> None:
        if not 0 <= t < self.T:
            raise MaskError(f"frame index {t} out of range [0, {self.T})")

    def to_text_grid(self) -> str:
        """Debug grid: one line of 0/1 characters per frame t"""
        return "\n".join("".join("1" if b else "0" for b in row) for row in self.bits) + "\n"


def build_mask(T: int, spec: ChunkSpec) -> VisibilityMask:
    """
    Build the visibility mask for T frames

    Raises:
        MaskError: If T < 1
    """
    if int(T) != T or T < 1:
        raise MaskError(f"T must be an integer >= 1, got {T}")
    return VisibilityMask(int(T), spec)


def visible_frame_count(mask: VisibilityMask, t: int) -> int:
    """Number of frames visible at time t (always >= 1)"""
    mask._check_index(t)
    C = mask.chunk_size
    k = t // C
    first_chunk = 0 if mask.left_context_chunks is None else max(0, k - mask.left_context_chunks)
    stop = min((k + 1) * C, mask.T)
    return stop - first_chunk * C


def parse_text_grid(text: str) -> np.ndarray:
    """Parse a 0/1 debug grid back into a boolean matrix"""
    rows = [line.strip() for line in text.strip().splitlines() if line.strip()]
    if not rows or any(len(r) != len(rows) for r in rows):
        raise MaskError("mask grid must be a non-empty square of 0/1 characters")
    if any(ch not in "01" for r in rows for ch in r):
        raise MaskError("mask grid may only contain '0' and '1'")
    return np.array([[ch == "1" for ch in r] for r in rows], dtype=bool)
