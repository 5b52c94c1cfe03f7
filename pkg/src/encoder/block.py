"""
Conformer block
Pre-norm macaron layout: half FFN, mixing, convolution, half FFN, final layer norm
"""
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from src.chunking.chunk_spec import ChunkSpec
from src.chunking.mask import VisibilityMask
from src.encoder.config import EncoderConfig, MixingKind
from src.encoder.convolution import (
    ConvBuffer, ConvModuleParams, conv_module_forward, conv_module_step, init_conv_module_params,
)
from src.exceptions import ContextMismatchError, ShapeError
from src.mixing import (
    KeyValueCache, MhsaParams, SummaryMixingParams, SummaryState, init_mhsa_params,
    init_summary_mixing_params, mhsa_masked, mhsa_step, summary_mixing_masked, summary_mixing_step,
)
from src.numkernel import Activation, DenseParams, PrecisionPolicy, dense, init_dense, layernorm

MixingParams = Union[SummaryMixingParams, MhsaParams]
MixingState = Union[SummaryState, KeyValueCache]


@dataclass(frozen=True)
class LayerNormParams:
    gain: np.ndarray
    bias: np.ndarray

    @classmethod
    def identity(cls, dim: int, dtype=np.float32) -> "LayerNormParams":
        return cls(np.ones(dim, dtype=dtype), np.zeros(dim, dtype=dtype))

    @property
    def nbytes(self) -> int:
        return self.gain.nbytes + self.bias.nbytes

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return layernorm(x, self.gain, self.bias)


@dataclass(frozen=True)
class FeedForwardParams:
    """d_model -> ffn_dim (SiLU) -> d_model"""
    expand: DenseParams
    project: DenseParams

    def __post_init__(self):
        if self.expand.d_out != self.project.d_in or self.expand.d_in != self.project.d_out:
            raise ShapeError(
                f"feed-forward widths do not chain: {self.expand.d_in}->{self.expand.d_out}, "
                f"{self.project.d_in}->{self.project.d_out}"
            )

    @property
    def nbytes(self) -> int:
        return self.expand.nbytes + self.project.nbytes


def init_feed_forward_params(rng, d_model: int, ffn_dim: int, dtype=np.float32) -> FeedForwardParams:
    return FeedForwardParams(
        expand=init_dense(rng, d_model, ffn_dim, Activation.SILU, dtype),
        project=init_dense(rng, ffn_dim, d_model, dtype=dtype),
    )


def feed_forward(x: np.ndarray, p: FeedForwardParams, policy: Optional[PrecisionPolicy]) -> np.ndarray:
    return dense(dense(x, p.expand, policy), p.project, policy)


@dataclass(frozen=True)
class ConformerBlockParams:
    ffn_in: FeedForwardParams
    ffn_in_norm: LayerNormParams
    mixing: MixingParams
    mixing_norm: LayerNormParams
    conv: ConvModuleParams
    conv_norm: LayerNormParams
    ffn_out: FeedForwardParams
    ffn_out_norm: LayerNormParams
    final_norm: LayerNormParams

    @property
    def mixing_kind(self) -> MixingKind:
        return MixingKind.MHSA if isinstance(self.mixing, MhsaParams) else MixingKind.SUMMARY_MIXING

    @property
    def nbytes(self) -> int:
        return sum(getattr(self, name).nbytes for name in self.__dataclass_fields__)


def init_block_params(rng: Optional[np.random.Generator], cfg: EncoderConfig) -> ConformerBlockParams:
    """Random block weights; rng=None gives zero weights with unit layer-norm gains"""
    d, dtype = cfg.d_model, cfg.dtype
    if cfg.mixing is MixingKind.MHSA:
        mixing = init_mhsa_params(rng, d, cfg.num_heads, dtype, cfg.positional)
    else:
        mixing = init_summary_mixing_params(rng, d, cfg.summary_local_dim, cfg.summary_dim, d, dtype)
    return ConformerBlockParams(
        ffn_in=init_feed_forward_params(rng, d, cfg.ffn_dim, dtype),
        ffn_in_norm=LayerNormParams.identity(d, dtype),
        mixing=mixing,
        mixing_norm=LayerNormParams.identity(d, dtype),
        conv=init_conv_module_params(rng, d, cfg.conv_kernel, dtype),
        conv_norm=LayerNormParams.identity(d, dtype),
        ffn_out=init_feed_forward_params(rng, d, cfg.ffn_dim, dtype),
        ffn_out_norm=LayerNormParams.identity(d, dtype),
        final_norm=LayerNormParams.identity(d, dtype),
    )


def _check_kind(p: ConformerBlockParams, cfg: EncoderConfig) -> None:
    if p.mixing_kind is not cfg.mixing:
        raise ContextMismatchError(
            f"block parameters are for {p.mixing_kind.value} but config asks for {cfg.mixing.value}"
        )


def conformer_block_forward(X, mask: VisibilityMask, p: ConformerBlockParams, cfg: EncoderConfig,
                            position_offset: int = 0) -> np.ndarray:
    """
    One conformer block over a whole (masked) sequence

    x += FFN(LN x) / 2; x += Mix(LN x, mask); x += Conv(LN x, mask); x += FFN(LN x) / 2; LN(x)
    """
    _check_kind(p, cfg)
    policy = cfg.precision
    x = policy.cast(X).copy()
    x += 0.5 * feed_forward(p.ffn_in_norm(x), p.ffn_in, policy)
    normed = p.mixing_norm(x)
    if cfg.mixing is MixingKind.MHSA:
        x += mhsa_masked(normed, mask, p.mixing, policy, position_offset)
    else:
        x += summary_mixing_masked(normed, mask, p.mixing, policy)
    x += conv_module_forward(p.conv_norm(x), mask, p.conv, cfg.conv_mode, policy)
    x += 0.5 * feed_forward(p.ffn_out_norm(x), p.ffn_out, policy)
    return p.final_norm(x)


@dataclass(frozen=True)
class BlockState:
    """Streaming state of one block: mixing state and conv left-edge buffer"""
    mixing: MixingState
    conv: ConvBuffer

    @property
    def nbytes(self) -> int:
        return self.mixing.nbytes + self.conv.nbytes


def init_block_state(cfg: EncoderConfig, spec: ChunkSpec) -> BlockState:
    dtype = cfg.dtype
    if cfg.mixing is MixingKind.MHSA:
        left = spec.left_context_chunks
        capacity = None if left is None else left * spec.chunk_size_frames
        mixing = KeyValueCache.empty(cfg.num_heads, cfg.d_model // cfg.num_heads, capacity, dtype)
    else:
        mixing = SummaryState.initial(cfg.summary_dim, spec.left_context_chunks,
                                      cfg.precision.accumulate_dtype)
    return BlockState(mixing, ConvBuffer.empty(cfg.d_model, dtype))


def conformer_block_step(chunk, state: BlockState, p: ConformerBlockParams, cfg: EncoderConfig,
                         spec: ChunkSpec, start_frame: int) -> Tuple[np.ndarray, BlockState]:
    """Streaming counterpart of conformer_block_forward for the chunk starting at start_frame"""
    _check_kind(p, cfg)
    policy = cfg.precision
    x = policy.cast(chunk).copy()
    x += 0.5 * feed_forward(p.ffn_in_norm(x), p.ffn_in, policy)
    normed = p.mixing_norm(x)
    if cfg.mixing is MixingKind.MHSA:
        mixed, mixing_state = mhsa_step(normed, state.mixing, p.mixing, policy, start_frame)
    else:
        mixed, mixing_state = summary_mixing_step(normed, state.mixing, p.mixing, policy)
    x += mixed
    conv_out, conv_state = conv_module_step(p.conv_norm(x), state.conv, p.conv, cfg.conv_mode,
                                            spec, start_frame, policy)
    x += conv_out
    x += 0.5 * feed_forward(p.ffn_out_norm(x), p.ffn_out, policy)
    return p.final_norm(x), BlockState(mixing_state, conv_state)
