"""
Transducer joiner
Sums the projected encoder and predictor vectors, one hidden activation, output projection
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.exceptions import ShapeError
from src.numkernel import Activation, DenseParams, PrecisionPolicy, activations, dense, init_dense
from src.transducer.config import TransducerConfig


@dataclass(frozen=True)
class JoinerParams:
    enc_proj: DenseParams   # enc_dim -> joint_dim
    pred_proj: DenseParams  # pred_dim -> joint_dim
    out_proj: DenseParams   # joint_dim -> V
    activation: Activation = Activation.TANH

    def __post_init__(self):
        object.__setattr__(self, "activation", Activation(self.activation))
        if self.enc_proj.d_out != self.pred_proj.d_out:
            raise ShapeError(
                f"encoder and predictor projections differ: {self.enc_proj.d_out} vs {self.pred_proj.d_out}"
            )
        if self.out_proj.d_in != self.enc_proj.d_out:
            raise ShapeError(f"output projection expects {self.out_proj.d_in}, joint width is {self.enc_proj.d_out}")

    @property
    def vocab_size(self) -> int:
        return self.out_proj.d_out


def init_joiner_params(cfg: TransducerConfig, rng: Optional[np.random.Generator]) -> JoinerParams:
    dtype = cfg.precision.compute_dtype
    return JoinerParams(
        enc_proj=init_dense(rng, cfg.enc_dim, cfg.joint_dim, dtype=dtype),
        pred_proj=init_dense(rng, cfg.pred_dim, cfg.joint_dim, dtype=dtype),
        out_proj=init_dense(rng, cfg.joint_dim, cfg.vocab_size, dtype=dtype),
        activation=cfg.joiner_activation,
    )


def _check_width(x: np.ndarray, proj: DenseParams, name: str) -> None:
    if x.shape[-1] != proj.d_in:
        raise ShapeError(f"{name} width {x.shape[-1]} != joiner input {proj.d_in}")


def joiner(enc_t, pred_u, p: JoinerParams, policy: Optional[PrecisionPolicy] = None) -> np.ndarray:
    """
    logits = OutProj(activation(EncProj(enc_t) + PredProj(pred_u)))

    Raises:
        ShapeError: If either input width does not match its projection
    """
    enc_t, pred_u = np.asarray(enc_t), np.asarray(pred_u)
    _check_width(enc_t, p.enc_proj, "encoder vector")
    _check_width(pred_u, p.pred_proj, "predictor vector")
    hidden = dense(enc_t, p.enc_proj, policy) + dense(pred_u, p.pred_proj, policy)
    return dense(activations(hidden, p.activation), p.out_proj, policy)


def joint_lattice(enc, pred, p: JoinerParams, policy: Optional[PrecisionPolicy] = None) -> np.ndarray:
    """All joiner outputs: (T' x E) and ((U + 1) x P) -> T' x (U + 1) x V logits"""
    enc, pred = np.asarray(enc), np.asarray(pred)
    if enc.ndim != 2 or pred.ndim != 2:
        raise ShapeError(f"joint_lattice needs 2-D inputs, got {enc.shape} and {pred.shape}")
    _check_width(enc, p.enc_proj, "encoder frames")
    _check_width(pred, p.pred_proj, "predictor rows")
    hidden = dense(enc, p.enc_proj, policy)[:, None, :] + dense(pred, p.pred_proj, policy)[None, :, :]
    return dense(activations(hidden, p.activation), p.out_proj, policy)
