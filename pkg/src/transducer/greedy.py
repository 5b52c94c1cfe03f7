"""
Greedy transducer decoding
Frame-synchronous argmax search that can run chunk by chunk
"""
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np

from src.exceptions import ShapeError
from src.numkernel import PrecisionPolicy, ensure_matrix
from src.transducer.config import BLANK_ID, TransducerConfig
from src.transducer.joiner import JoinerParams, init_joiner_params, joiner
from src.transducer.predictor import (
    PredictorParams, PredictorState, init_predictor_params, initial_predictor_state, predictor_forward,
)


@dataclass(frozen=True)
class TransducerParams:
    """Predictor and joiner of one transducer model"""
    config: TransducerConfig
    predictor: PredictorParams
    joiner: JoinerParams

    def __post_init__(self):
        if self.predictor.vocab_size != self.joiner.vocab_size:
            raise ShapeError(
                f"predictor vocabulary {self.predictor.vocab_size} != joiner vocabulary {self.joiner.vocab_size}"
            )
        if self.predictor.output_dim != self.joiner.pred_proj.d_in:
            raise ShapeError(
                f"predictor width {self.predictor.output_dim} != joiner input {self.joiner.pred_proj.d_in}"
            )


def init_transducer_params(cfg: TransducerConfig,
                           rng: Union[np.random.Generator, int, None] = 0) -> TransducerParams:
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(int(rng))
    return TransducerParams(cfg, init_predictor_params(cfg, rng), init_joiner_params(cfg, rng))


@dataclass
class DecodeState:
    """Predictor state after the last emitted token plus the hypothesis so far"""
    predictor_state: PredictorState
    last_token: int = BLANK_ID
    hypothesis: List[int] = field(default_factory=list)
    frames_decoded: int = 0


def init_decode_state(model: TransducerParams) -> DecodeState:
    return DecodeState(initial_predictor_state(model.predictor, model.config.precision))


def _policy(model: TransducerParams) -> PrecisionPolicy:
    return model.config.precision


def greedy_decode_streaming(enc_chunk, state: DecodeState, model: TransducerParams,
                            max_symbols_per_frame: Optional[int] = None) -> Tuple[List[int], DecodeState]:
    """
    Decode the frames of one encoder chunk

    Per frame the joiner argmax is taken repeatedly: a non-blank token is emitted
    and fed to the predictor, blank (or the per-frame emit cap) moves to the next frame.

    Returns:
        (ids emitted in this chunk, updated state)
    """
    enc_chunk = ensure_matrix(enc_chunk, "enc_chunk")
    cap = max_symbols_per_frame if max_symbols_per_frame is not None else model.config.max_symbols_per_frame
    policy = _policy(model)
    emitted: List[int] = []
    for enc_t in enc_chunk:
        for _ in range(cap):
            logits = joiner(enc_t, state.predictor_state.output, model.joiner, policy)
            token = int(np.argmax(logits))
            if token == BLANK_ID:
                break
            _, state.predictor_state = predictor_forward([token], model.predictor, state.predictor_state, policy)
            state.last_token = token
            state.hypothesis.append(token)
            emitted.append(token)
        state.frames_decoded += 1
    return emitted, state


def greedy_decode(enc, model: TransducerParams, max_symbols_per_frame: Optional[int] = None) -> List[int]:
    """Whole-utterance greedy decode"""
    tokens, _ = greedy_decode_streaming(enc, init_decode_state(model), model, max_symbols_per_frame)
    return tokens
