"""
Depthwise convolutions and the conformer convolution module
Dynamic chunk (centered, mask-gated), causal (left-shifted) and standard (centered, unmasked)
"""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from src.chunking.chunk_spec import ChunkSpec, frame_visibility
from src.chunking.mask import VisibilityMask
from src.encoder.config import ConvMode
from src.exceptions import ConfigurationError, ShapeError, StreamStateError
from src.numkernel import (
    Activation, DenseParams, PrecisionPolicy, activations, dense, ensure_matrix, init_dense,
    record_multiply_adds,
)


@dataclass(frozen=True)
class DepthwiseKernel:
    """Per-channel kernel taps (K x D) and bias (D,), tap j covers offset j - (K - 1) / 2"""
    weight: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        if self.weight.ndim != 2:
            raise ShapeError(f"depthwise weight must be K x D, got {self.weight.shape}")
        if self.weight.shape[0] % 2 == 0:
            raise ShapeError(f"depthwise kernel width must be odd, got {self.weight.shape[0]}")
        if self.bias.shape != (self.weight.shape[1],):
            raise ShapeError(f"depthwise bias must be ({self.weight.shape[1]},), got {self.bias.shape}")

    @classmethod
    def from_taps(cls, taps, channels: int = 1, dtype=np.float64) -> "DepthwiseKernel":
        """Same taps for every channel, zero bias"""
        taps = np.asarray(taps, dtype=dtype)
        weight = np.repeat(taps[:, None], channels, axis=1)
        return cls(weight, np.zeros(channels, dtype=dtype))

    @property
    def width(self) -> int:
        return self.weight.shape[0]

    @property
    def channels(self) -> int:
        return self.weight.shape[1]

    @property
    def context(self) -> int:
        return (self.width - 1) // 2

    @property
    def nbytes(self) -> int:
        return self.weight.nbytes + self.bias.nbytes


def _check_input(X, kernel: DepthwiseKernel) -> np.ndarray:
    X = ensure_matrix(X, "X")
    if X.shape[1] != kernel.channels:
        raise ShapeError(f"conv input width {X.shape[1]} != kernel channels {kernel.channels}")
    return X


def _apply_taps(X: np.ndarray, taps: np.ndarray, positions: np.ndarray,
                gates: np.ndarray) -> np.ndarray:
    """
    out[t] = sum_j taps[j] * X[positions[j, t]] where gates[j, t]

    Taps are added in kernel order; gated-off taps contribute exact zeros.
    """
    out = np.zeros((positions.shape[1], X.shape[1]), dtype=np.result_type(X, taps))
    if X.shape[0] == 0:
        return out
    for j in range(taps.shape[0]):
        gate = gates[j]
        if not gate.any():
            continue
        src = X[np.clip(positions[j], 0, X.shape[0] - 1)]
        out += np.where(gate[:, None], src * taps[j], 0)
    record_multiply_adds(out.size * taps.shape[0], "conv")
    return out


def dcconv_forward(X, mask: VisibilityMask, kernel: DepthwiseKernel) -> np.ndarray:
    """
    Dynamic chunk convolution: centered kernel, taps gated by the visibility mask

    output[t] = sum_k w_k * X[t + k] * [0 <= t + k < T] * m[t, t + k] + b

    Raises:
        ShapeError: If the kernel is even or X does not match the mask
    """
    X = _check_input(X, kernel)
    T = X.shape[0]
    if T != mask.T:
        raise ShapeError(f"mask is for T={mask.T} frames but X has {T}")
    t = np.arange(T)
    offsets = np.arange(-kernel.context, kernel.context + 1)[:, None]
    positions = t[None, :] + offsets
    gates = mask.visible(t[None, :], positions)
    return _apply_taps(X, kernel.weight, positions, gates) + kernel.bias


def causal_conv_forward(X, kernel: DepthwiseKernel) -> np.ndarray:
    """Left-shifted kernel: output[t] uses X[t - K + 1 .. t], zero-padded on the left"""
    X = _check_input(X, kernel)
    T = X.shape[0]
    t = np.arange(T)
    offsets = np.arange(-(kernel.width - 1), 1)[:, None]
    positions = t[None, :] + offsets
    return _apply_taps(X, kernel.weight, positions, positions >= 0) + kernel.bias


def standard_conv_forward(X, kernel: DepthwiseKernel) -> np.ndarray:
    """Centered kernel with plain zero padding, no chunk masking"""
    X = _check_input(X, kernel)
    T = X.shape[0]
    t = np.arange(T)
    offsets = np.arange(-kernel.context, kernel.context + 1)[:, None]
    positions = t[None, :] + offsets
    gates = (positions >= 0) & (positions < T)
    return _apply_taps(X, kernel.weight, positions, gates) + kernel.bias


def depthwise_forward(X, mask: VisibilityMask, kernel: DepthwiseKernel, mode: ConvMode) -> np.ndarray:
    mode = ConvMode.parse(mode)
    if mode is ConvMode.DYNAMIC_CHUNK:
        return dcconv_forward(X, mask, kernel)
    if mode is ConvMode.CAUSAL:
        return causal_conv_forward(X, kernel)
    return standard_conv_forward(X, kernel)


@dataclass(frozen=True)
class ConvBuffer:
    """Most recent depthwise-stage input frames; row 0 is absolute frame `start`"""
    frames: np.ndarray
    start: int = 0

    @classmethod
    def empty(cls, channels: int, dtype=np.float32) -> "ConvBuffer":
        return cls(np.zeros((0, channels), dtype=dtype), 0)

    @property
    def num_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def nbytes(self) -> int:
        return self.frames.nbytes


def buffer_capacity(mode: ConvMode, kernel_width: int) -> int:
    """Left-edge frames a streaming depthwise stage must remember"""
    mode = ConvMode.parse(mode)
    if mode is ConvMode.CAUSAL:
        return kernel_width - 1
    if mode is ConvMode.DYNAMIC_CHUNK:
        return (kernel_width - 1) // 2
    raise ConfigurationError("standard convolution sees future frames across chunks and cannot stream")


def depthwise_step(chunk, buffer: ConvBuffer, kernel: DepthwiseKernel, mode: ConvMode,
                   spec: ChunkSpec, start_frame: int) -> Tuple[np.ndarray, ConvBuffer]:
    """
    Streaming depthwise convolution of one chunk starting at absolute frame start_frame

    Frames after the chunk are never available; dynamic chunk taps into the
    buffer are additionally gated by the chunk visibility condition.
    """
    chunk = _check_input(chunk, kernel)
    mode = ConvMode.parse(mode)
    if chunk.shape[0] == 0:
        raise StreamStateError("depthwise_step received an empty chunk")
    if buffer.num_frames and buffer.start + buffer.num_frames != start_frame:
        raise StreamStateError(
            f"conv buffer ends at frame {buffer.start + buffer.num_frames}, chunk starts at {start_frame}"
        )
    capacity = buffer_capacity(mode, kernel.width)
    ext = np.concatenate([buffer.frames.astype(chunk.dtype, copy=False), chunk], axis=0)
    ext_start = start_frame - buffer.num_frames
    t = np.arange(start_frame, start_frame + chunk.shape[0])

    if mode is ConvMode.CAUSAL:
        offsets = np.arange(-(kernel.width - 1), 1)[:, None]
    else:
        offsets = np.arange(-kernel.context, kernel.context + 1)[:, None]
    u = t[None, :] + offsets
    positions = u - ext_start
    gates = (u >= 0) & (positions >= 0) & (positions < ext.shape[0])
    if mode is ConvMode.DYNAMIC_CHUNK:
        C = spec.chunk_size_frames
        gates &= frame_visibility(t[None, :], u, C, spec.left_context_chunks)
    out = _apply_taps(ext, kernel.weight, positions, gates) + kernel.bias

    kept = ext[ext.shape[0] - min(capacity, ext.shape[0]):] if capacity else ext[:0]
    new_buffer = ConvBuffer(kept.copy(), start_frame + chunk.shape[0] - kept.shape[0])
    return out, new_buffer


@dataclass(frozen=True)
class ConvModuleParams:
    """Pointwise (GLU), depthwise, folded batch-norm affine, SiLU, pointwise"""
    pointwise_in: DenseParams
    depthwise: DepthwiseKernel
    norm_scale: np.ndarray
    norm_shift: np.ndarray
    pointwise_out: DenseParams

    def __post_init__(self):
        d = self.pointwise_in.d_out
        if self.pointwise_in.activation is not Activation.GLU:
            raise ShapeError("conv module input projection must use GLU")
        if self.depthwise.channels != d:
            raise ShapeError(f"depthwise channels {self.depthwise.channels} != {d}")
        if self.norm_scale.shape != (d,) or self.norm_shift.shape != (d,):
            raise ShapeError(f"conv norm scale/shift must be ({d},)")
        if self.pointwise_out.d_in != d:
            raise ShapeError(f"conv output projection expects {self.pointwise_out.d_in} inputs, got {d}")

    @property
    def nbytes(self) -> int:
        return (self.pointwise_in.nbytes + self.depthwise.nbytes + self.norm_scale.nbytes
                + self.norm_shift.nbytes + self.pointwise_out.nbytes)


def init_conv_module_params(rng: Optional[np.random.Generator], d_model: int, kernel_width: int,
                            dtype=np.float32) -> ConvModuleParams:
    if rng is None:
        weight = np.zeros((kernel_width, d_model), dtype=dtype)
    else:
        weight = (rng.standard_normal((kernel_width, d_model)) / np.sqrt(kernel_width)).astype(dtype)
    return ConvModuleParams(
        pointwise_in=init_dense(rng, d_model, d_model, Activation.GLU, dtype),
        depthwise=DepthwiseKernel(weight, np.zeros(d_model, dtype=dtype)),
        norm_scale=np.ones(d_model, dtype=dtype),
        norm_shift=np.zeros(d_model, dtype=dtype),
        pointwise_out=init_dense(rng, d_model, d_model, dtype=dtype),
    )


def _conv_tail(y: np.ndarray, p: ConvModuleParams, policy: Optional[PrecisionPolicy]) -> np.ndarray:
    y *= p.norm_scale
    y += p.norm_shift
    return dense(activations(y, Activation.SILU), p.pointwise_out, policy)


def conv_module_forward(X, mask: VisibilityMask, p: ConvModuleParams, mode: ConvMode,
                        policy: Optional[PrecisionPolicy] = None) -> np.ndarray:
    """Conformer convolution module; only the depthwise stage sees the mask"""
    y = dense(X, p.pointwise_in, policy)
    y = depthwise_forward(y, mask, p.depthwise, mode)
    return _conv_tail(y, p, policy)


def conv_module_step(chunk, buffer: ConvBuffer, p: ConvModuleParams, mode: ConvMode, spec: ChunkSpec,
                     start_frame: int, policy: Optional[PrecisionPolicy] = None) -> Tuple[np.ndarray, ConvBuffer]:
    y = dense(chunk, p.pointwise_in, policy)
    y, buffer = depthwise_step(y, buffer, p.depthwise, mode, spec, start_frame)
    return _conv_tail(y, p, policy), buffer
