"""
Multi-head self-attention baseline
Masked scaled dot-product attention and a key/value-cached streaming step
"""
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from src.chunking.mask import VisibilityMask
from src.exceptions import ConfigurationError, ShapeError, StreamStateError
from src.numkernel import (
    DenseParams, PrecisionPolicy, dense, ensure_matrix, init_dense, matmul, softmax_rows,
)


class PositionalEncoding(str, Enum):
    """Positional information added before the attention projections"""
    OFF = "off"
    ABSOLUTE = "absolute"


@dataclass(frozen=True)
class MhsaParams:
    """Query/key/value/output projections (d_model x d_model, all heads packed)"""
    num_heads: int
    query: DenseParams
    key: DenseParams
    value: DenseParams
    output: DenseParams
    positional: PositionalEncoding = PositionalEncoding.OFF

    def __post_init__(self):
        object.__setattr__(self, "positional", PositionalEncoding(self.positional))
        d = self.query.d_in
        if self.num_heads < 1 or d % self.num_heads != 0:
            raise ConfigurationError(f"d_model {d} is not divisible by num_heads {self.num_heads}")
        for name in ("query", "key", "value", "output"):
            proj = getattr(self, name)
            if proj.d_in != d or proj.d_out != d:
                raise ShapeError(f"{name} projection must be {d}x{d}, got {proj.d_in}x{proj.d_out}")

    @property
    def d_model(self) -> int:
        return self.query.d_in

    @property
    def head_dim(self) -> int:
        return self.d_model // self.num_heads

    @property
    def nbytes(self) -> int:
        return sum(getattr(self, name).nbytes for name in ("query", "key", "value", "output"))


def init_mhsa_params(rng: Optional[np.random.Generator], d_model: int, num_heads: int,
                     dtype=np.float32, positional=PositionalEncoding.OFF) -> MhsaParams:
    """Random attention projections (all zero when rng is None)"""
    return MhsaParams(
        num_heads=num_heads,
        query=init_dense(rng, d_model, d_model, dtype=dtype),
        key=init_dense(rng, d_model, d_model, dtype=dtype),
        value=init_dense(rng, d_model, d_model, dtype=dtype),
        output=init_dense(rng, d_model, d_model, dtype=dtype),
        positional=positional,
    )


def sinusoidal_positions(start: int, length: int, d_model: int, dtype=np.float32) -> np.ndarray:
    """Absolute sinusoidal encodings for positions start .. start + length - 1"""
    pos = np.arange(start, start + length, dtype=np.float64)[:, None]
    rates = np.power(10000.0, -np.arange(0, d_model, 2, dtype=np.float64) / d_model)
    angles = pos * rates[None, :]
    pe = np.zeros((length, d_model), dtype=np.float64)
    pe[:, 0::2] = np.sin(angles)
    pe[:, 1::2] = np.cos(angles[:, : d_model // 2])
    return pe.astype(dtype)


def _with_positions(X: np.ndarray, p: MhsaParams, position_offset: int) -> np.ndarray:
    if p.positional is PositionalEncoding.OFF:
        return X
    return X + sinusoidal_positions(position_offset, X.shape[0], X.shape[1], X.dtype)


def _split_heads(x: np.ndarray, num_heads: int) -> np.ndarray:
    T, d = x.shape
    return x.reshape(T, num_heads, d // num_heads).transpose(1, 0, 2)


def _merge_heads(x: np.ndarray) -> np.ndarray:
    h, T, dh = x.shape
    return x.transpose(1, 0, 2).reshape(T, h * dh)


def _attend(q: np.ndarray, k: np.ndarray, v: np.ndarray, visible: Optional[np.ndarray],
            policy: PrecisionPolicy) -> np.ndarray:
    # q (h, Tq, dh), k/v (h, Tk, dh); scores are written over in place
    scores = matmul(q, k.transpose(0, 2, 1), policy)
    scores *= 1.0 / np.sqrt(q.shape[-1])
    softmax_rows(scores, visible, inplace=True)
    return matmul(scores, v, policy)


def mhsa_masked(X, mask: VisibilityMask, p: MhsaParams, policy: Optional[PrecisionPolicy] = None,
                position_offset: int = 0) -> np.ndarray:
    """
    Scaled dot-product attention per head with masked keys excluded from the softmax

    Raises:
        ShapeError: If X does not match the mask or the projections, or a mask row is empty
    """
    X = ensure_matrix(X, "X")
    if X.shape[0] != mask.T:
        raise ShapeError(f"mask is for T={mask.T} frames but X has {X.shape[0]}")
    if X.shape[1] != p.d_model:
        raise ShapeError(f"X width {X.shape[1]} != d_model {p.d_model}")
    policy = policy if policy is not None else PrecisionPolicy.for_array(X)
    X = _with_positions(X, p, position_offset)
    q = _split_heads(dense(X, p.query, policy), p.num_heads)
    k = _split_heads(dense(X, p.key, policy), p.num_heads)
    v = _split_heads(dense(X, p.value, policy), p.num_heads)
    context = _attend(q, k, v, mask.bits, policy)
    return dense(_merge_heads(context), p.output, policy)


@dataclass(frozen=True)
class KeyValueCache:
    """
    Keys and values of the left-context frames, shape (heads, frames, head_dim)

    capacity is L * C frames, None for unbounded (infinite left context).
    """
    keys: np.ndarray
    values: np.ndarray
    capacity: Optional[int] = None

    @classmethod
    def empty(cls, num_heads: int, head_dim: int, capacity: Optional[int],
              dtype=np.float32) -> "KeyValueCache":
        if capacity is not None and capacity < 0:
            raise StreamStateError(f"cache capacity must be >= 0, got {capacity}")
        blank = np.zeros((num_heads, 0, head_dim), dtype=dtype)
        return cls(blank, blank.copy(), capacity)

    @property
    def num_frames(self) -> int:
        return self.keys.shape[1]

    @property
    def nbytes(self) -> int:
        return self.keys.nbytes + self.values.nbytes


def mhsa_step(chunk, cache: KeyValueCache, p: MhsaParams, policy: Optional[PrecisionPolicy] = None,
              position_offset: int = 0) -> Tuple[np.ndarray, KeyValueCache]:
    """
    Attend one chunk over the cached left context plus the chunk itself

    position_offset is the absolute index of the chunk's first frame.
    """
    chunk = ensure_matrix(chunk, "chunk")
    if chunk.shape[0] == 0:
        raise StreamStateError("mhsa_step received an empty chunk")
    if chunk.shape[1] != p.d_model:
        raise ShapeError(f"chunk width {chunk.shape[1]} != d_model {p.d_model}")
    if cache.keys.shape[0] != p.num_heads or cache.keys.shape[2] != p.head_dim:
        raise StreamStateError(
            f"cache layout {cache.keys.shape} does not match {p.num_heads} heads of width {p.head_dim}"
        )
    policy = policy if policy is not None else PrecisionPolicy.for_array(chunk)
    chunk = _with_positions(chunk, p, position_offset)
    q = _split_heads(dense(chunk, p.query, policy), p.num_heads)
    k = _split_heads(dense(chunk, p.key, policy), p.num_heads)
    v = _split_heads(dense(chunk, p.value, policy), p.num_heads)
    keys = np.concatenate([cache.keys.astype(k.dtype, copy=False), k], axis=1)
    values = np.concatenate([cache.values.astype(v.dtype, copy=False), v], axis=1)
    context = _attend(q, keys, values, None, policy)
    out = dense(_merge_heads(context), p.output, policy)

    if cache.capacity is None:
        new_cache = KeyValueCache(keys, values, None)
    elif cache.capacity == 0:
        new_cache = KeyValueCache(keys[:, :0], values[:, :0], 0)
    else:
        new_cache = KeyValueCache(keys[:, -cache.capacity:], values[:, -cache.capacity:], cache.capacity)
    return out, new_cache
