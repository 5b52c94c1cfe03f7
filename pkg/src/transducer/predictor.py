"""
Transducer predictor
Token embedding followed by a single LSTM layer; the blank id starts every sequence
"""
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from src.exceptions import ShapeError, TargetError
from src.numkernel import LstmWeights, PrecisionPolicy, lstm_cell
from src.transducer.config import BLANK_ID, TransducerConfig


@dataclass(frozen=True)
class PredictorParams:
    embedding: np.ndarray  # (V, embed_dim)
    lstm: LstmWeights

    def __post_init__(self):
        if self.embedding.ndim != 2:
            raise ShapeError(f"embedding must be V x E, got {self.embedding.shape}")
        if self.embedding.shape[1] != self.lstm.input_dim:
            raise ShapeError(
                f"embedding width {self.embedding.shape[1]} != LSTM input {self.lstm.input_dim}"
            )

    @property
    def vocab_size(self) -> int:
        return self.embedding.shape[0]

    @property
    def output_dim(self) -> int:
        return self.lstm.hidden_dim


@dataclass(frozen=True)
class PredictorState:
    """LSTM state after the last consumed token; h is also that step's output row"""
    h: np.ndarray
    c: np.ndarray

    @property
    def output(self) -> np.ndarray:
        return self.h


def init_predictor_params(cfg: TransducerConfig, rng: Optional[np.random.Generator]) -> PredictorParams:
    dtype = cfg.precision.compute_dtype
    E, H, V = cfg.embed_dim, cfg.pred_dim, cfg.vocab_size

    def draw(shape, scale):
        if rng is None:
            return np.zeros(shape, dtype=dtype)
        return (rng.standard_normal(shape) * scale).astype(dtype)

    lstm = LstmWeights(draw((E, 4 * H), 1 / np.sqrt(E)), draw((H, 4 * H), 1 / np.sqrt(H)),
                       np.zeros(4 * H, dtype=dtype))
    return PredictorParams(draw((V, E), 1.0), lstm)


def _step(token: int, state: PredictorState, p: PredictorParams,
          policy: Optional[PrecisionPolicy]) -> PredictorState:
    h, c = lstm_cell(p.embedding[token], state.h, state.c, p.lstm, policy)
    return PredictorState(h, c)


def initial_predictor_state(p: PredictorParams, policy: Optional[PrecisionPolicy] = None) -> PredictorState:
    """State after consuming the blank start symbol from zero LSTM state"""
    zeros = np.zeros(p.output_dim, dtype=p.embedding.dtype)
    return _step(BLANK_ID, PredictorState(zeros, zeros.copy()), p, policy)


def check_tokens(tokens: Sequence[int], vocab_size: int, allow_blank: bool = True) -> np.ndarray:
    ids = np.asarray(list(tokens), dtype=np.int64)
    if ids.ndim != 1:
        raise TargetError(f"token ids must be a flat sequence, got shape {ids.shape}")
    bad = ids[(ids < 0) | (ids >= vocab_size)]
    if bad.size:
        raise TargetError(f"token id {int(bad[0])} out of range [0, {vocab_size})")
    if not allow_blank and np.any(ids == BLANK_ID):
        raise TargetError(f"targets may not contain the blank id {BLANK_ID}")
    return ids


def predictor_forward(tokens: Sequence[int], p: PredictorParams, state: Optional[PredictorState] = None,
                      policy: Optional[PrecisionPolicy] = None) -> Tuple[np.ndarray, PredictorState]:
    """
    Predictor outputs for a token sequence

    Args:
        tokens: U token ids
        p: predictor parameters
        state: state from a previous call; None starts a new sequence

    Returns:
        ((U + 1) x pred_dim outputs, state after the last token). Row 0 is the
        output for the context before tokens[0].

    Raises:
        TargetError: If a token id is outside the vocabulary
    """
    ids = check_tokens(tokens, p.vocab_size)
    if state is None:
        state = initial_predictor_state(p, policy)
    rows = [state.output]
    for token in ids:
        state = _step(int(token), state, p, policy)
        rows.append(state.output)
    return np.stack(rows), state
