"""
Dense layer: affine projection followed by an activation
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.exceptions import ShapeError
from src.numkernel.kernels import Activation, activations, matmul
from src.numkernel.precision import PrecisionPolicy


@dataclass(frozen=True)
class DenseParams:
    """Weight (d_in x d_out), bias (d_out,) and activation"""
    weight: np.ndarray
    bias: np.ndarray
    activation: Activation = Activation.IDENTITY

    def __post_init__(self):
        object.__setattr__(self, "activation", Activation(self.activation))
        if self.weight.ndim != 2:
            raise ShapeError(f"dense weight must be 2-D, got {self.weight.shape}")
        if self.bias.shape != (self.weight.shape[1],):
            raise ShapeError(f"dense bias must be ({self.weight.shape[1]},), got {self.bias.shape}")

    @property
    def d_in(self) -> int:
        return self.weight.shape[0]

    @property
    def d_out(self) -> int:
        width = self.weight.shape[1]
        return width // 2 if self.activation is Activation.GLU else width

    @property
    def nbytes(self) -> int:
        return self.weight.nbytes + self.bias.nbytes


def dense(x, params: DenseParams, policy: Optional[PrecisionPolicy] = None) -> np.ndarray:
    """activation(x @ W + b)"""
    x = np.asarray(x)
    if x.shape[-1] != params.d_in:
        raise ShapeError(f"dense: input width {x.shape[-1]} != {params.d_in}")
    out = matmul(x, params.weight, policy)
    out += params.bias
    return activations(out, params.activation)


def init_dense(rng: Optional[np.random.Generator], d_in: int, d_out: int,
               activation=Activation.IDENTITY, dtype=np.float32,
               scale: Optional[float] = None) -> DenseParams:
    """
    Random dense layer with N(0, scale^2) weights and zero bias

    rng=None gives an all-zero layer (used as a checkpoint template).
    GLU layers get 2 * d_out output columns.
    """
    width = 2 * d_out if Activation(activation) is Activation.GLU else d_out
    if rng is None:
        weight = np.zeros((d_in, width), dtype=dtype)
    else:
        std = scale if scale is not None else 1.0 / np.sqrt(d_in)
        weight = (rng.standard_normal((d_in, width)) * std).astype(dtype)
    return DenseParams(weight=weight, bias=np.zeros(width, dtype=dtype), activation=activation)


def identity_dense(dim: int, activation=Activation.IDENTITY, dtype=np.float64) -> DenseParams:
    """Identity projection, handy for hand-checkable examples"""
    return DenseParams(np.eye(dim, dtype=dtype), np.zeros(dim, dtype=dtype), activation)
