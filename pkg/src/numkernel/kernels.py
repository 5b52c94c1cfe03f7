"""
Dense numeric kernels
Matrix products, normalisation, activations, softmax and the LSTM cell.
All functions are pure: inputs are never modified unless inplace=True is passed.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from src.exceptions import ShapeError
from src.numkernel.op_counter import record_multiply_adds
from src.numkernel.precision import PrecisionPolicy

# Row-major dense 2-D array (rows x cols); stacks of matrices use leading batch axes
Matrix = np.ndarray

DEFAULT_LAYERNORM_EPS = 1e-5
_GELU_COEF = np.sqrt(2.0 / np.pi)


class Activation(str, Enum):
    """Elementwise activation kinds"""
    GELU = "gelu"
    SILU = "silu"
    SIGMOID = "sigmoid"
    TANH = "tanh"
    RELU = "relu"
    GLU = "glu"
    IDENTITY = "identity"


def ensure_matrix(x, name: str = "x") -> Matrix:
    """Return x as a 2-D float array or raise ShapeError"""
    arr = np.asarray(x)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be a 2-D matrix, got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.floating):
        arr = arr.astype(np.float64)
    return arr


def matmul(a, b, policy: Optional[PrecisionPolicy] = None) -> np.ndarray:
    """
    Matrix product with accumulation in the policy's accumulate width

    Args:
        a: (..., m, k) or (k,) operand
        b: (..., k, n) operand
        policy: precision policy; defaults to the operands' own dtype

    Returns:
        (..., m, n) product in the compute dtype

    Raises:
        ShapeError: If the inner dimensions differ
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if b.ndim < 2 or a.ndim < 1:
        raise ShapeError(f"matmul needs a matrix right operand, got shapes {a.shape} and {b.shape}")
    if a.shape[-1] != b.shape[-2]:
        raise ShapeError(
            f"matmul dimension mismatch: a.cols={a.shape[-1]} but b.rows={b.shape[-2]}"
        )
    if policy is None:
        out = np.matmul(a, b)
    else:
        acc = policy.accumulate_dtype
        out = np.matmul(a.astype(acc, copy=False), b.astype(acc, copy=False))
        out = out.astype(policy.compute_dtype, copy=False)
    record_multiply_adds(out.size * a.shape[-1])
    return out


def layernorm(x, gain, bias, eps: float = DEFAULT_LAYERNORM_EPS) -> np.ndarray:
    """Normalise each row to zero mean and unit variance, then apply gain and bias"""
    x = np.asarray(x)
    if x.ndim < 1 or x.shape[-1] == 0:
        raise ShapeError("layernorm needs rows of non-zero length")
    gain = np.asarray(gain)
    bias = np.asarray(bias)
    if gain.shape != (x.shape[-1],) or bias.shape != (x.shape[-1],):
        raise ShapeError(
            f"gain/bias must have length {x.shape[-1]}, got {gain.shape} and {bias.shape}"
        )
    if eps <= 0:
        raise ShapeError(f"eps must be positive, got {eps}")
    mean = x.mean(axis=-1, keepdims=True)
    centered = x - mean
    var = np.mean(centered * centered, axis=-1, keepdims=True)
    centered /= np.sqrt(var + eps)
    centered *= gain
    centered += bias
    return centered


def _gelu(x: np.ndarray) -> np.ndarray:
    # tanh approximation, evaluated in a single scratch buffer
    out = x * x
    out *= x
    out *= 0.044715
    out += x
    out *= _GELU_COEF
    np.tanh(out, out=out)
    out += 1.0
    out *= x
    out *= 0.5
    return out


def _sigmoid(x: np.ndarray) -> np.ndarray:
    # 0.5 * (1 + tanh(x / 2)) never overflows
    out = x * 0.5
    np.tanh(out, out=out)
    out += 1.0
    out *= 0.5
    return out


def activations(x, kind) -> np.ndarray:
    """
    Apply an elementwise activation

    GLU splits the last axis in halves [a | b] and returns a * sigmoid(b).

    Raises:
        ShapeError: If GLU is requested on an odd number of columns
    """
    x = np.asarray(x)
    if not np.issubdtype(x.dtype, np.floating):
        x = x.astype(np.float64)
    kind = Activation(kind)
    if kind is Activation.IDENTITY:
        return x
    if kind is Activation.RELU:
        return np.maximum(x, 0)
    if kind is Activation.TANH:
        return np.tanh(x)
    if kind is Activation.SIGMOID:
        return _sigmoid(x)
    if kind is Activation.SILU:
        out = _sigmoid(x)
        out *= x
        return out
    if kind is Activation.GELU:
        return _gelu(x)
    # GLU
    if x.shape[-1] % 2 != 0:
        raise ShapeError(f"glu needs an even number of columns, got {x.shape[-1]}")
    half = x.shape[-1] // 2
    out = _sigmoid(x[..., half:])
    out *= x[..., :half]
    return out


def softmax_rows(x, mask=None, inplace: bool = False) -> np.ndarray:
    """
    Softmax over the last axis with optional visibility mask

    Args:
        x: scores (..., n)
        mask: boolean array broadcastable to x, True where the entry is visible
        inplace: reuse x as the output buffer (x must be a float array)

    Returns:
        Probabilities; masked entries are exactly 0

    Raises:
        ShapeError: If any row has no visible entry
    """
    x = np.asarray(x)
    out = x if inplace else np.array(x, dtype=np.result_type(x, np.float32), copy=True)
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if not np.all(np.any(mask, axis=-1)):
            raise ShapeError("softmax_rows: fully masked row (every row needs one visible entry)")
        np.copyto(out, -np.inf, where=~mask)
    out -= out.max(axis=-1, keepdims=True)
    np.exp(out, out=out)
    out /= out.sum(axis=-1, keepdims=True)
    return out


def log_softmax(x, axis: int = -1) -> np.ndarray:
    """Numerically stable log-softmax along one axis"""
    x = np.asarray(x)
    shifted = x - x.max(axis=axis, keepdims=True)
    shifted -= np.log(np.exp(shifted).sum(axis=axis, keepdims=True))
    return shifted


@dataclass(frozen=True)
class LstmWeights:
    """LSTM cell weights, gate order input/forget/cell/output"""
    input_weight: np.ndarray   # (input_dim, 4 * hidden_dim)
    hidden_weight: np.ndarray  # (hidden_dim, 4 * hidden_dim)
    bias: np.ndarray           # (4 * hidden_dim,)

    def __post_init__(self):
        hidden = self.hidden_weight.shape[0]
        if self.hidden_weight.shape != (hidden, 4 * hidden):
            raise ShapeError(f"hidden_weight must be (H, 4H), got {self.hidden_weight.shape}")
        if self.input_weight.ndim != 2 or self.input_weight.shape[1] != 4 * hidden:
            raise ShapeError(f"input_weight must be (I, {4 * hidden}), got {self.input_weight.shape}")
        if self.bias.shape != (4 * hidden,):
            raise ShapeError(f"bias must be ({4 * hidden},), got {self.bias.shape}")

    @property
    def input_dim(self) -> int:
        return self.input_weight.shape[0]

    @property
    def hidden_dim(self) -> int:
        return self.hidden_weight.shape[0]


def lstm_cell(x, h, c, weights: LstmWeights,
              policy: Optional[PrecisionPolicy] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    One LSTM step

    Returns:
        (h', c') with c' = f*c + i*g and h' = o*tanh(c')
    """
    x, h, c = np.asarray(x), np.asarray(h), np.asarray(c)
    hidden = weights.hidden_dim
    if x.shape[-1] != weights.input_dim:
        raise ShapeError(f"lstm_cell: input width {x.shape[-1]} != {weights.input_dim}")
    if h.shape[-1] != hidden or c.shape[-1] != hidden:
        raise ShapeError(f"lstm_cell: state width must be {hidden}, got h={h.shape}, c={c.shape}")
    gates = matmul(x, weights.input_weight, policy) + matmul(h, weights.hidden_weight, policy)
    gates = gates + weights.bias
    i = _sigmoid(gates[..., :hidden])
    f = _sigmoid(gates[..., hidden:2 * hidden])
    g = np.tanh(gates[..., 2 * hidden:3 * hidden])
    o = _sigmoid(gates[..., 3 * hidden:])
    c_next = f * c + i * g
    h_next = o * np.tanh(c_next)
    return h_next, c_next
