"""
Encoder configuration
"""
from dataclasses import asdict, dataclass, replace
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np

from src.exceptions import ConfigurationError, PrecisionError
from src.mixing.mhsa import PositionalEncoding
from src.numkernel import F32, PrecisionPolicy


class MixingKind(str, Enum):
    """Token-mixing cell used in every conformer block"""
    SUMMARY_MIXING = "summary_mixing"
    MHSA = "mhsa"

    @classmethod
    def parse(cls, value) -> "MixingKind":
        if isinstance(value, MixingKind):
            return value
        text = str(value).strip().lower().replace("-", "_")
        aliases = {"summarymixing": cls.SUMMARY_MIXING, "sm": cls.SUMMARY_MIXING, "summary": cls.SUMMARY_MIXING,
                   "summary_mixing": cls.SUMMARY_MIXING, "mhsa": cls.MHSA, "attention": cls.MHSA}
        if text not in aliases:
            raise ConfigurationError(f"Unknown mixing kind: {value}. Available: summary, summary_mixing, mhsa")
        return aliases[text]


class ConvMode(str, Enum):
    """Depthwise convolution variant"""
    DYNAMIC_CHUNK = "dynamic_chunk"
    CAUSAL = "causal"
    STANDARD = "standard"

    @classmethod
    def parse(cls, value) -> "ConvMode":
        if isinstance(value, ConvMode):
            return value
        text = str(value).strip().lower().replace("-", "_")
        if text in ("dcconv", "dynamic"):
            return cls.DYNAMIC_CHUNK
        try:
            return cls(text)
        except ValueError:
            raise ConfigurationError(
                f"Unknown conv mode: {value}. Available: {[m.value for m in cls]}"
            )


@dataclass(frozen=True)
class EncoderConfig:
    """
    Conformer encoder hyper-parameters

    summary_local_dim / summary_dim default to d_model when left unset.
    """
    d_model: int = 256
    mixing: MixingKind = MixingKind.SUMMARY_MIXING
    num_blocks: int = 12
    num_heads: int = 4
    conv_kernel: int = 31
    ffn_expansion: float = 4.0
    conv_mode: ConvMode = ConvMode.DYNAMIC_CHUNK
    subsampling_factor: int = 1
    precision: PrecisionPolicy = F32
    feat_dim: int = 80
    summary_local_dim: Optional[int] = None
    summary_dim: Optional[int] = None
    positional: PositionalEncoding = PositionalEncoding.OFF

    def __post_init__(self):
        object.__setattr__(self, "mixing", MixingKind.parse(self.mixing))
        object.__setattr__(self, "conv_mode", ConvMode.parse(self.conv_mode))
        try:
            object.__setattr__(self, "positional", PositionalEncoding(self.positional))
        except ValueError:
            raise ConfigurationError(f"Unknown positional encoding: {self.positional}. Available: off, absolute")
        try:
            object.__setattr__(self, "precision", PrecisionPolicy.from_name(self.precision))
        except PrecisionError as e:
            raise ConfigurationError(str(e))
        if self.summary_local_dim is None:
            object.__setattr__(self, "summary_local_dim", self.d_model)
        if self.summary_dim is None:
            object.__setattr__(self, "summary_dim", self.d_model)

        for name in ("d_model", "num_blocks", "num_heads", "conv_kernel", "subsampling_factor",
                     "feat_dim", "summary_local_dim", "summary_dim"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ConfigurationError(f"{name} must be an integer >= 1, got {value}")
        if self.conv_kernel % 2 == 0:
            raise ConfigurationError(f"conv_kernel must be odd, got {self.conv_kernel}")
        if self.ffn_expansion <= 0:
            raise ConfigurationError(f"ffn_expansion must be positive, got {self.ffn_expansion}")
        factor = self.subsampling_factor
        if factor & (factor - 1):
            raise ConfigurationError(f"subsampling_factor must be a power of 2, got {factor}")
        if self.mixing is MixingKind.MHSA and self.d_model % self.num_heads != 0:
            raise ConfigurationError(
                f"d_model {self.d_model} is not divisible by num_heads {self.num_heads}"
            )

    @property
    def ffn_dim(self) -> int:
        return max(1, int(round(self.d_model * self.ffn_expansion)))

    @property
    def conv_context(self) -> int:
        """Frames on each side of a centered kernel"""
        return (self.conv_kernel - 1) // 2

    @property
    def subsampling_layers(self) -> int:
        return int(self.subsampling_factor).bit_length() - 1

    @property
    def dtype(self) -> np.dtype:
        return self.precision.compute_dtype

    def replace(self, **changes) -> "EncoderConfig":
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        """Plain-value dictionary (enums and precision as strings)"""
        data = asdict(self)
        data["mixing"] = self.mixing.value
        data["conv_mode"] = self.conv_mode.value
        data["positional"] = self.positional.value
        data["precision"] = self.precision.name
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "EncoderConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"Unknown encoder config fields: {sorted(unknown)}")
        return cls(**data)
