"""
Subsampling frontend
Input projection followed by stride-2 depthwise convolutions (one per factor of 2)
"""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from src.encoder.config import EncoderConfig
from src.exceptions import ShapeError
from src.numkernel import (
    Activation, DenseParams, PrecisionPolicy, activations, dense, ensure_matrix, init_dense,
    record_multiply_adds,
)


@dataclass(frozen=True)
class StridedLayer:
    """Kernel-2 stride-2 depthwise layer: weight (2 x D), bias (D,)"""
    weight: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        if self.weight.ndim != 2 or self.weight.shape[0] != 2:
            raise ShapeError(f"strided layer weight must be 2 x D, got {self.weight.shape}")
        if self.bias.shape != (self.weight.shape[1],):
            raise ShapeError(f"strided layer bias must be ({self.weight.shape[1]},), got {self.bias.shape}")

    @property
    def nbytes(self) -> int:
        return self.weight.nbytes + self.bias.nbytes


@dataclass(frozen=True)
class FrontendParams:
    input_projection: DenseParams
    layers: Tuple[StridedLayer, ...] = ()

    @property
    def factor(self) -> int:
        return 2 ** len(self.layers)

    @property
    def nbytes(self) -> int:
        return self.input_projection.nbytes + sum(layer.nbytes for layer in self.layers)


def init_frontend_params(rng: Optional[np.random.Generator], cfg: EncoderConfig) -> FrontendParams:
    dtype = cfg.dtype
    layers = []
    for _ in range(cfg.subsampling_layers):
        if rng is None:
            weight = np.zeros((2, cfg.d_model), dtype=dtype)
        else:
            weight = (rng.standard_normal((2, cfg.d_model)) / np.sqrt(2.0)).astype(dtype)
        layers.append(StridedLayer(weight, np.zeros(cfg.d_model, dtype=dtype)))
    return FrontendParams(init_dense(rng, cfg.feat_dim, cfg.d_model, dtype=dtype), tuple(layers))


def subsampled_length(T: int, factor: int) -> int:
    """Output frames for T input frames (tail frames that do not fill a stride are dropped)"""
    return T // factor


def frontend_forward(feats, p: FrontendParams, policy: Optional[PrecisionPolicy] = None) -> np.ndarray:
    """(T x feat_dim) -> (floor(T / factor) x d_model)"""
    feats = ensure_matrix(feats, "features")
    if feats.shape[1] != p.input_projection.d_in:
        raise ShapeError(f"feature width {feats.shape[1]} != frontend input {p.input_projection.d_in}")
    x = dense(feats, p.input_projection, policy)
    for layer in p.layers:
        half = x.shape[0] // 2
        even = x[0:2 * half:2]
        odd = x[1:2 * half:2]
        y = even * layer.weight[0]
        y += odd * layer.weight[1]
        y += layer.bias
        record_multiply_adds(y.size * 2, "frontend")
        x = activations(y, Activation.SILU)
    return x
