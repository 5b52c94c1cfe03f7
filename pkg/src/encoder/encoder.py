"""
Conformer encoder stack
Offline (masked) forward, batched forward and the stateful streaming path
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, is_dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from src.chunking.chunk_spec import ChunkSpec
from src.chunking.mask import build_mask
from src.encoder.block import (
    BlockState, ConformerBlockParams, conformer_block_forward, conformer_block_step,
    init_block_params, init_block_state,
)
from src.encoder.config import ConvMode, EncoderConfig
from src.encoder.frontend import FrontendParams, frontend_forward, init_frontend_params
from src.exceptions import (
    ConfigurationError, ContextMismatchError, ShapeError, StreamStateError,
)
from src.models.feature_sequence import FeatureSequence

logger = logging.getLogger(__name__)

Features = Union[FeatureSequence, np.ndarray]


@dataclass(frozen=True)
class EncoderParams:
    frontend: FrontendParams
    blocks: Tuple[ConformerBlockParams, ...]

    @property
    def nbytes(self) -> int:
        return self.frontend.nbytes + sum(block.nbytes for block in self.blocks)


def init_encoder_params(cfg: EncoderConfig,
                        rng: Union[np.random.Generator, int, None] = 0) -> EncoderParams:
    """
    Random encoder weights in the config's compute dtype

    Args:
        cfg: encoder configuration
        rng: generator or integer seed; None gives the zero-weight template

    Returns:
        EncoderParams with cfg.num_blocks blocks
    """
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(int(rng))
    frontend = init_frontend_params(rng, cfg)
    blocks = tuple(init_block_params(rng, cfg) for _ in range(cfg.num_blocks))
    return EncoderParams(frontend, blocks)


def check_params(cfg: EncoderConfig, params: EncoderParams) -> None:
    if len(params.blocks) != cfg.num_blocks:
        raise ContextMismatchError(f"params have {len(params.blocks)} blocks, config expects {cfg.num_blocks}")
    if params.frontend.factor != cfg.subsampling_factor:
        raise ContextMismatchError(
            f"frontend subsamples by {params.frontend.factor}, config expects {cfg.subsampling_factor}"
        )


def _frames_of(feat: Features) -> np.ndarray:
    return feat.frames if isinstance(feat, FeatureSequence) else np.asarray(feat)


def encoder_forward_offline(feat: Features, spec: Optional[ChunkSpec], cfg: EncoderConfig,
                            params: EncoderParams) -> np.ndarray:
    """
    Whole-utterance forward with every block sharing one visibility mask

    The mask is built at the post-subsampling frame rate. spec=None means full context.

    Raises:
        ShapeError: If the input is empty or shorter than one subsampling stride
    """
    frames = _frames_of(feat)
    if frames.ndim != 2 or frames.shape[0] == 0:
        raise ShapeError(f"encoder input must be a non-empty T x D matrix, got shape {frames.shape}")
    check_params(cfg, params)
    x = frontend_forward(cfg.precision.cast(frames), params.frontend, cfg.precision)
    if x.shape[0] == 0:
        raise ShapeError(
            f"{frames.shape[0]} input frames are fewer than the subsampling factor {cfg.subsampling_factor}"
        )
    mask = build_mask(x.shape[0], spec if spec is not None else ChunkSpec.full_context())
    for block in params.blocks:
        x = conformer_block_forward(x, mask, block, cfg)
    return x


def encoder_forward_batch(feats: Sequence[Features], spec: Optional[ChunkSpec], cfg: EncoderConfig,
                          params: EncoderParams, workers: int = 1) -> List[np.ndarray]:
    """Offline forward of independent sequences; results do not depend on workers"""
    if workers < 1:
        raise ConfigurationError(f"workers must be >= 1, got {workers}")
    if workers == 1 or len(feats) <= 1:
        return [encoder_forward_offline(f, spec, cfg, params) for f in feats]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda f: encoder_forward_offline(f, spec, cfg, params), feats))


@dataclass(eq=False)
class StreamingContext:
    """
    Per-stream state carried between encoder_forward_streaming calls

    frames_consumed counts post-subsampling frames. One owner at a time.
    """
    config: EncoderConfig
    spec: ChunkSpec
    block_states: List[BlockState] = field(default_factory=list)
    frames_consumed: int = 0
    input_frames_consumed: int = 0
    finished: bool = False

    @property
    def input_chunk_frames(self) -> int:
        """Input frames per full chunk"""
        return self.spec.chunk_size_frames * self.config.subsampling_factor

    @property
    def state_nbytes(self) -> int:
        return sum(state.nbytes for state in self.block_states)

    def __eq__(self, other) -> bool:
        if not isinstance(other, StreamingContext):
            return NotImplemented
        return (self.config == other.config and self.spec == other.spec
                and self.frames_consumed == other.frames_consumed
                and self.input_frames_consumed == other.input_frames_consumed
                and self.finished == other.finished
                and _state_equal(self.block_states, other.block_states))


def _state_equal(a, b) -> bool:
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return isinstance(a, np.ndarray) and isinstance(b, np.ndarray) and np.array_equal(a, b)
    if isinstance(a, (list, tuple)):
        return (isinstance(b, (list, tuple)) and len(a) == len(b)
                and all(_state_equal(x, y) for x, y in zip(a, b)))
    if is_dataclass(a) and not isinstance(a, type):
        return type(a) is type(b) and all(
            _state_equal(getattr(a, f.name), getattr(b, f.name)) for f in fields(a)
        )
    return a == b


def init_streaming_context(cfg: EncoderConfig, spec: ChunkSpec) -> StreamingContext:
    """
    Fresh per-stream state: empty summaries or key/value caches, empty conv buffers

    Raises:
        ConfigurationError: If spec is full context or the conv mode cannot stream
    """
    if spec is None or not spec.is_streaming:
        raise ConfigurationError("streaming requires a finite chunk size; got a full-context spec")
    if cfg.conv_mode is ConvMode.STANDARD:
        raise ConfigurationError("conv_mode 'standard' looks across chunk boundaries and cannot stream")
    states = [init_block_state(cfg, spec) for _ in range(cfg.num_blocks)]
    logger.debug("Streaming context for %s, %d blocks, %s", cfg.mixing.value, cfg.num_blocks, spec.describe())
    return StreamingContext(cfg, spec, states)


def _check_context(ctx: StreamingContext, cfg: EncoderConfig, params: EncoderParams) -> None:
    if ctx.config != cfg:
        raise ContextMismatchError("streaming context was created for a different encoder config")
    check_params(cfg, params)
    if len(ctx.block_states) != cfg.num_blocks:
        raise ContextMismatchError(
            f"context holds {len(ctx.block_states)} block states, config has {cfg.num_blocks} blocks"
        )
    for block in params.blocks:
        if block.mixing_kind is not cfg.mixing:
            raise ContextMismatchError(f"block parameters do not match mixing kind {cfg.mixing.value}")


def encoder_forward_streaming(chunk, ctx: StreamingContext, cfg: EncoderConfig,
                              params: EncoderParams) -> Tuple[np.ndarray, StreamingContext]:
    """
    Encode one chunk of C * subsampling_factor input frames

    A shorter chunk is accepted once, as the final chunk of the stream.
    Returns the chunk's encoder frames and the (updated) context.

    Raises:
        StreamStateError: On an empty chunk or a chunk after the final one
        ContextMismatchError: If ctx was built for another config
        ShapeError: If the chunk is longer than one chunk
    """
    _check_context(ctx, cfg, params)
    if ctx.finished:
        raise StreamStateError("stream already finished: a short final chunk was processed")
    frames = _frames_of(chunk)
    if frames.ndim != 2 or frames.shape[0] == 0:
        raise StreamStateError(f"streaming chunk must be a non-empty T x D matrix, got shape {frames.shape}")
    expected = ctx.input_chunk_frames
    if frames.shape[0] > expected:
        raise ShapeError(f"chunk has {frames.shape[0]} input frames, at most {expected} allowed")
    if frames.shape[0] < expected:
        ctx.finished = True

    x = frontend_forward(cfg.precision.cast(frames), params.frontend, cfg.precision)
    ctx.input_frames_consumed += frames.shape[0]
    if x.shape[0] == 0:
        return x, ctx
    start = ctx.frames_consumed
    for i, block in enumerate(params.blocks):
        x, ctx.block_states[i] = conformer_block_step(x, ctx.block_states[i], block, cfg, ctx.spec, start)
    ctx.frames_consumed += x.shape[0]
    return x, ctx


def stream_features(feat: Features, spec: ChunkSpec, cfg: EncoderConfig,
                    params: EncoderParams) -> np.ndarray:
    """Feed a whole utterance chunk by chunk and concatenate the streaming outputs"""
    frames = _frames_of(feat)
    if frames.ndim != 2 or frames.shape[0] == 0:
        raise ShapeError(f"encoder input must be a non-empty T x D matrix, got shape {frames.shape}")
    ctx = init_streaming_context(cfg, spec)
    step = ctx.input_chunk_frames
    outputs = []
    for start in range(0, frames.shape[0], step):
        out, ctx = encoder_forward_streaming(frames[start:start + step], ctx, cfg, params)
        outputs.append(out)
    return np.concatenate(outputs, axis=0)
