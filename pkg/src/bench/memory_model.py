"""
Peak memory of a masked whole-utterance encoder pass
Closed-form model plus a tracemalloc measurement of the same pass
"""
import logging
import tracemalloc
from dataclasses import asdict, dataclass
from typing import Dict, Optional

from src.bench.features import generate_synthetic_features
from src.chunking.chunk_spec import ChunkSpec
from src.encoder import EncoderConfig, MixingKind, encoder_forward_offline, init_encoder_params
from src.encoder.frontend import subsampled_length
from src.exceptions import ConfigurationError

logger = logging.getLogger(__name__)

# index (int64) and gate (bool) arrays per kernel tap and frame in the depthwise conv
CONV_INDEX_BYTES = 9
MASK_BYTES = 1


@dataclass(frozen=True)
class MemoryBreakdown:
    """
    Modeled byte counts for one masked forward over T input frames

    mixing is the cross-frame term: MHSA score tensor plus mask bits, or the
    SummaryMixing per-block summary state.
    """
    input_frames: int
    encoder_frames: int
    weights: int
    features: int
    frontend: int
    activations: int
    mixing: int

    @property
    def total(self) -> int:
        if self.input_frames == 0:
            return self.weights
        return self.weights + self.features + max(self.frontend, self.activations + self.mixing)

    def to_dict(self) -> Dict[str, int]:
        data = asdict(self)
        data['total'] = self.total
        return data


def weight_bytes(cfg: EncoderConfig) -> int:
    """Exact parameter bytes of an encoder built from cfg"""
    return init_encoder_params(cfg, None).nbytes


def memory_breakdown(cfg: EncoderConfig, spec: Optional[ChunkSpec], T: int) -> MemoryBreakdown:
    """
    Component-wise memory model

    The masked pass materialises a dense mask and, for MHSA, a full score
    tensor whatever the chunk spec, so spec does not change the estimate.

    Args:
        cfg: encoder configuration
        spec: chunk spec of the masked pass (None for full context)
        T: input feature frames

    Raises:
        ConfigurationError: If T is negative
    """
    if int(T) != T or T < 0:
        raise ConfigurationError(f"T must be an integer >= 0, got {T}")
    T = int(T)
    w = cfg.precision.compute_width.itemsize
    acc_w = cfg.precision.accumulate_width.itemsize
    d, F, K = cfg.d_model, cfg.ffn_dim, cfg.conv_kernel
    Tp = subsampled_length(T, cfg.subsampling_factor)

    features = T * cfg.feat_dim * (4 + (w if w != 4 else 0))
    frontend = T * d * w * (2 if cfg.subsampling_layers else 1)
    activations = Tp * w * (4 * d + 2 * F) + Tp * K * CONV_INDEX_BYTES

    if cfg.mixing is MixingKind.MHSA:
        mixing = cfg.num_heads * Tp * Tp * w + 2 * Tp * Tp * MASK_BYTES
    else:
        activations += Tp * w * 2 * (cfg.summary_local_dim + cfg.summary_dim)
        mixing = cfg.num_blocks * cfg.summary_dim * acc_w if Tp else 0

    return MemoryBreakdown(
        input_frames=T,
        encoder_frames=Tp,
        weights=weight_bytes(cfg),
        features=features,
        frontend=frontend,
        activations=activations,
        mixing=mixing,
    )


def model_peak_memory(cfg: EncoderConfig, spec: Optional[ChunkSpec], T: int) -> int:
    """Modeled peak bytes; T=0 gives the weights alone"""
    return memory_breakdown(cfg, spec, T).total


def measure_peak_memory(cfg: EncoderConfig, spec: Optional[ChunkSpec], T: int, seed: int = 0,
                        frame_shift_ms: float = 10.0) -> int:
    """
    Peak traced bytes of weight init, feature generation and one masked forward

    Works whether or not tracemalloc is already tracing; in that case the
    bytes traced before the call are subtracted.

    Raises:
        ConfigurationError: If T is smaller than the subsampling factor
    """
    if int(T) != T or T < cfg.subsampling_factor:
        raise ConfigurationError(
            f"T must be an integer >= subsampling factor {cfg.subsampling_factor}, got {T}"
        )
    duration_s = T * frame_shift_ms / 1000.0
    already_tracing = tracemalloc.is_tracing()
    if already_tracing:
        baseline, _ = tracemalloc.get_traced_memory()
        tracemalloc.reset_peak()
    else:
        tracemalloc.start()
        baseline = 0
    try:
        params = init_encoder_params(cfg, seed)
        feats = generate_synthetic_features(duration_s, cfg.feat_dim, frame_shift_ms, seed)
        out = encoder_forward_offline(feats, spec, cfg, params)
        del out
        _, peak = tracemalloc.get_traced_memory()
    finally:
        if not already_tracing:
            tracemalloc.stop()
    measured = max(0, peak - baseline)
    logger.debug("Measured peak %d bytes for %s at T=%d", measured, cfg.mixing.value, T)
    return measured
