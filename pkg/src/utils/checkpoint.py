"""
Encoder checkpoint (SMXC) reader and writer

Layout, little-endian: magic b"SMXC", version u32, config length u32 followed by
the encoder config as UTF-8 JSON, tensor count u32, then per tensor: name length
u16, name bytes, rank u8, dims u32 * rank, f32 data in row-major order.
"""
import json
import logging
import struct
from dataclasses import fields, is_dataclass, replace
from typing import Any, Dict, Tuple

import numpy as np

from src.encoder import EncoderConfig, EncoderParams, init_encoder_params
from src.exceptions import BinaryFormatError, ConfigurationError
from src.utils.binary_io import BinaryReader, f32_bytes, write_bytes

logger = logging.getLogger(__name__)

CHECKPOINT_MAGIC = b"SMXC"
CHECKPOINT_VERSION = 1


def flatten_tensors(obj: Any, prefix: str = "") -> Dict[str, np.ndarray]:
    """Dotted-name view of every array in a parameter tree"""
    if isinstance(obj, np.ndarray):
        return {prefix: obj}
    out: Dict[str, np.ndarray] = {}
    if is_dataclass(obj) and not isinstance(obj, type):
        for f in fields(obj):
            out.update(flatten_tensors(getattr(obj, f.name), f"{prefix}.{f.name}" if prefix else f.name))
    elif isinstance(obj, (tuple, list)):
        for i, item in enumerate(obj):
            out.update(flatten_tensors(item, f"{prefix}.{i}" if prefix else str(i)))
    return out


def unflatten_tensors(template: Any, tensors: Dict[str, np.ndarray], prefix: str = "") -> Any:
    """Rebuild a parameter tree shaped like template from dotted-name tensors"""
    if isinstance(template, np.ndarray):
        if prefix not in tensors:
            raise BinaryFormatError(f"checkpoint is missing tensor {prefix}")
        value = tensors[prefix]
        if value.shape != template.shape:
            raise BinaryFormatError(f"tensor {prefix} has shape {value.shape}, expected {template.shape}")
        return value.astype(template.dtype, copy=False)
    if is_dataclass(template) and not isinstance(template, type):
        changes = {
            f.name: unflatten_tensors(getattr(template, f.name), tensors,
                                      f"{prefix}.{f.name}" if prefix else f.name)
            for f in fields(template)
        }
        return replace(template, **changes)
    if isinstance(template, tuple):
        return tuple(unflatten_tensors(item, tensors, f"{prefix}.{i}" if prefix else str(i))
                     for i, item in enumerate(template))
    return template


def encode_checkpoint(cfg: EncoderConfig, params: EncoderParams) -> bytes:
    config_json = json.dumps(cfg.to_dict(), sort_keys=True).encode("utf-8")
    tensors = flatten_tensors(params)
    parts = [CHECKPOINT_MAGIC, struct.pack("<II", CHECKPOINT_VERSION, len(config_json)), config_json,
             struct.pack("<I", len(tensors))]
    for name, array in tensors.items():
        encoded = name.encode("utf-8")
        parts.append(struct.pack("<H", len(encoded)))
        parts.append(encoded)
        parts.append(struct.pack("<B", array.ndim))
        parts.append(struct.pack(f"<{array.ndim}I", *array.shape))
        parts.append(f32_bytes(array))
    return b"".join(parts)


def decode_checkpoint(data: bytes, source: str = "<bytes>") -> Tuple[EncoderConfig, EncoderParams]:
    """
    Parse SMXC bytes into (config, params)

    Raises:
        BadMagicError, UnsupportedVersionError, TruncatedFileError: On a malformed header or body
        BinaryFormatError: On bad config JSON or missing / misshapen tensors
    """
    reader = BinaryReader(data, "checkpoint", source)
    reader.expect_magic(CHECKPOINT_MAGIC)
    reader.expect_version(CHECKPOINT_VERSION)
    config_raw = reader.read(reader.u32())
    try:
        cfg = EncoderConfig.from_dict(json.loads(config_raw.decode("utf-8")))
    except (UnicodeDecodeError, json.JSONDecodeError, TypeError, ConfigurationError) as e:
        raise BinaryFormatError(f"checkpoint {source} has an invalid config block: {e}")

    tensors: Dict[str, np.ndarray] = {}
    for _ in range(reader.u32()):
        (name_len,) = reader.unpack("H")
        name = reader.read(name_len).decode("utf-8", errors="replace")
        (rank,) = reader.unpack("B")
        shape = reader.unpack(f"{rank}I") if rank else ()
        tensors[name] = reader.f32_array(tuple(shape))
    if reader.remaining:
        raise BinaryFormatError(f"checkpoint {source} has {reader.remaining} trailing bytes")

    params = unflatten_tensors(init_encoder_params(cfg, rng=None), tensors)
    return cfg, params


def save_checkpoint(file_path, cfg: EncoderConfig, params: EncoderParams) -> None:
    write_bytes(file_path, encode_checkpoint(cfg, params), "checkpoint")
    logger.debug("Wrote checkpoint %s (%d blocks)", file_path, cfg.num_blocks)


def load_checkpoint(file_path) -> Tuple[EncoderConfig, EncoderParams]:
    reader = BinaryReader.from_path(file_path, "checkpoint")
    cfg, params = decode_checkpoint(reader.data, str(file_path))
    logger.debug("Read checkpoint %s (%d blocks)", file_path, cfg.num_blocks)
    return cfg, params
