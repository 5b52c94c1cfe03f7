"""
Feature file (SMXF) reader and writer

Layout, little-endian: magic b"SMXF", version u32, T u32, D u32,
frame_shift_ms f32, then T * D f32 values in row-major order.
"""
import logging
import struct

from src.exceptions import BinaryFormatError
from src.models.feature_sequence import FeatureSequence
from src.utils.binary_io import BinaryReader, f32_bytes, write_bytes

logger = logging.getLogger(__name__)

FEATURE_MAGIC = b"SMXF"
FEATURE_VERSION = 1


class FeatureFile:
    """Static utility class for SMXF feature files"""

    @staticmethod
    def encode(feat: FeatureSequence) -> bytes:
        T, D = feat.frames.shape
        header = FEATURE_MAGIC + struct.pack("<IIIf", FEATURE_VERSION, T, D, feat.frame_shift_ms)
        return header + f32_bytes(feat.frames)

    @staticmethod
    def decode(data: bytes, source: str = "<bytes>") -> FeatureSequence:
        """
        Parse SMXF bytes

        Raises:
            BadMagicError: If the magic is not SMXF
            UnsupportedVersionError: If the version is not FEATURE_VERSION
            TruncatedFileError: If the body is shorter than T * D * 4 bytes
            BinaryFormatError: On trailing bytes or a bad frame shift
        """
        reader = BinaryReader(data, "feature", source)
        reader.expect_magic(FEATURE_MAGIC)
        reader.expect_version(FEATURE_VERSION)
        T, D = reader.unpack("II")
        (frame_shift_ms,) = reader.unpack("f")
        if not frame_shift_ms > 0:
            raise BinaryFormatError(f"feature file {source} has non-positive frame shift {frame_shift_ms}")
        frames = reader.f32_array((T, D))
        if reader.remaining:
            raise BinaryFormatError(f"feature file {source} has {reader.remaining} trailing bytes")
        return FeatureSequence(frames, float(frame_shift_ms))


def save_feature_file(feat: FeatureSequence, file_path) -> None:
    write_bytes(file_path, FeatureFile.encode(feat), "feature")
    logger.debug("Wrote %d x %d features to %s", feat.num_frames, feat.feat_dim, file_path)


def load_feature_file(file_path) -> FeatureSequence:
    reader = BinaryReader.from_path(file_path, "feature")
    feat = FeatureFile.decode(reader.data, str(file_path))
    logger.debug("Read %d x %d features from %s", feat.num_frames, feat.feat_dim, file_path)
    return feat
