"""
Little-endian binary helpers shared by the feature and checkpoint file formats
"""
import struct
from pathlib import Path
from typing import Tuple

import numpy as np

from src.exceptions import (
    BadMagicError, FileWriteError, SummixIOError, TruncatedFileError, UnsupportedVersionError,
)

LITTLE_F32 = np.dtype("<f4")


class BinaryReader:
    """Sequential reader over an in-memory byte buffer; every short read is a truncation"""

    def __init__(self, data: bytes, kind: str, source: str):
        self.data = data
        self.kind = kind
        self.source = source
        self.offset = 0

    @classmethod
    def from_path(cls, file_path, kind: str) -> "BinaryReader":
        path = Path(file_path)
        try:
            data = path.read_bytes()
        except OSError as e:
            raise SummixIOError(f"Cannot read {kind} file {file_path}: {e}")
        return cls(data, kind, str(file_path))

    @property
    def remaining(self) -> int:
        return len(self.data) - self.offset

    def read(self, size: int) -> bytes:
        if size > self.remaining:
            raise TruncatedFileError(
                f"{self.kind} file {self.source} is truncated: needed {size} bytes at offset "
                f"{self.offset}, only {self.remaining} left"
            )
        chunk = self.data[self.offset:self.offset + size]
        self.offset += size
        return chunk

    def unpack(self, fmt: str) -> Tuple:
        return struct.unpack("<" + fmt, self.read(struct.calcsize("<" + fmt)))

    def u32(self) -> int:
        return self.unpack("I")[0]

    def f32_array(self, shape: Tuple[int, ...]) -> np.ndarray:
        count = int(np.prod(shape, dtype=np.int64))
        raw = self.read(count * LITTLE_F32.itemsize)
        return np.frombuffer(raw, dtype=LITTLE_F32).reshape(shape).astype(np.float32)

    def expect_magic(self, magic: bytes) -> None:
        found = self.data[:len(magic)]
        if found != magic:
            raise BadMagicError(f"{self.source} is not a {self.kind} file: magic {found!r}, expected {magic!r}")
        self.offset = len(magic)

    def expect_version(self, supported: int) -> int:
        version = self.u32()
        if version != supported:
            raise UnsupportedVersionError(
                f"{self.kind} file {self.source} has version {version}; supported version is {supported}"
            )
        return version


def write_bytes(file_path, payload: bytes, kind: str) -> Path:
    """Write payload, creating parent directories"""
    path = Path(file_path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(payload)
    except OSError as e:
        raise FileWriteError(f"Failed to write {kind} file {file_path}: {e}")
    return path


def f32_bytes(array: np.ndarray) -> bytes:
    return np.ascontiguousarray(array, dtype=LITTLE_F32).tobytes()
