"""
Precision policy
Chooses the floating-point width used for stored operands and for accumulation
"""
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

from src.exceptions import PrecisionError


class Width(str, Enum):
    """Floating-point width"""
    F32 = "f32"
    F64 = "f64"

    @property
    def dtype(self) -> np.dtype:
        return np.dtype(np.float32) if self is Width.F32 else np.dtype(np.float64)

    @property
    def itemsize(self) -> int:
        return self.dtype.itemsize


@dataclass(frozen=True)
class PrecisionPolicy:
    """Compute and accumulate widths for the numeric kernel

    The f32/f32 policy stands in for a reduced-precision path, f64/f64 is the
    reference. Accumulation is never narrower than the operands.
    """
    compute_width: Width = Width.F32
    accumulate_width: Width = Width.F32

    def __post_init__(self):
        try:
            object.__setattr__(self, "compute_width", Width(self.compute_width))
            object.__setattr__(self, "accumulate_width", Width(self.accumulate_width))
        except ValueError as e:
            raise PrecisionError(f"Unknown width: {e}. Available: {[w.value for w in Width]}")
        if self.accumulate_width.itemsize < self.compute_width.itemsize:
            raise PrecisionError(
                f"accumulate_width {self.accumulate_width.value} is narrower than "
                f"compute_width {self.compute_width.value}"
            )

    @property
    def compute_dtype(self) -> np.dtype:
        return self.compute_width.dtype

    @property
    def accumulate_dtype(self) -> np.dtype:
        return self.accumulate_width.dtype

    @property
    def name(self) -> str:
        if self.compute_width == self.accumulate_width:
            return self.compute_width.value
        return f"{self.compute_width.value}+{self.accumulate_width.value}"

    def cast(self, x) -> np.ndarray:
        """Return x as an array of the compute dtype (no copy when already matching)"""
        return np.asarray(x, dtype=self.compute_dtype)

    def accumulate(self, x) -> np.ndarray:
        """Return x as an array of the accumulate dtype"""
        return np.asarray(x, dtype=self.accumulate_dtype)

    @classmethod
    def from_name(cls, name: Union[str, "PrecisionPolicy"]) -> "PrecisionPolicy":
        """Parse 'f32', 'f64' or 'f32+f64' (compute+accumulate)"""
        if isinstance(name, PrecisionPolicy):
            return name
        parts = str(name).strip().lower().split("+")
        if len(parts) == 1:
            return cls(parts[0], parts[0])
        if len(parts) == 2:
            return cls(parts[0], parts[1])
        raise PrecisionError(f"Invalid precision name: {name}")

    @classmethod
    def for_array(cls, x: np.ndarray) -> "PrecisionPolicy":
        """Policy matching the dtype of an existing array"""
        width = Width.F32 if np.asarray(x).dtype == np.float32 else Width.F64
        return cls(width, width)


F32 = PrecisionPolicy(Width.F32, Width.F32)
F64 = PrecisionPolicy(Width.F64, Width.F64)
MIXED = PrecisionPolicy(Width.F32, Width.F64)
DEFAULT_POLICY = F32
