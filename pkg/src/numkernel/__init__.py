"""
Numeric kernel package
Dense matrices (numpy arrays), precision policy, activations, softmax, LSTM cell
"""
from .precision import Width, PrecisionPolicy, F32, F64, MIXED, DEFAULT_POLICY
from .kernels import (
    Matrix, Activation, LstmWeights, DEFAULT_LAYERNORM_EPS,
    ensure_matrix, matmul, layernorm, activations, softmax_rows, log_softmax, lstm_cell,
)
from .dense import DenseParams, dense, init_dense, identity_dense
from .op_counter import OpCounter, counting_ops, record_multiply_adds

__all__ = [
    'Width', 'PrecisionPolicy', 'F32', 'F64', 'MIXED', 'DEFAULT_POLICY',
    'Matrix', 'Activation', 'LstmWeights', 'DEFAULT_LAYERNORM_EPS',
    'ensure_matrix', 'matmul', 'layernorm', 'activations', 'softmax_rows', 'log_softmax', 'lstm_cell',
    'DenseParams', 'dense', 'init_dense', 'identity_dense',
    'OpCounter', 'counting_ops', 'record_multiply_adds',
]
