"""
Transducer package
Predictor, joiner, RNN-T loss with analytic gradients and greedy decoding
"""
from .config import TransducerConfig, BLANK_ID, DEFAULT_MAX_SYMBOLS_PER_FRAME
from .predictor import (
    PredictorParams, PredictorState, init_predictor_params, initial_predictor_state,
    predictor_forward, check_tokens,
)
from .joiner import JoinerParams, init_joiner_params, joiner, joint_lattice
from .loss import (
    RnntLattice, TransducerLossResult, rnnt_loss, rnnt_loss_bruteforce, enumerate_alignments,
    MAX_BRUTEFORCE_FRAMES, MAX_BRUTEFORCE_TOKENS,
)
from .greedy import (
    TransducerParams, DecodeState, init_transducer_params, init_decode_state,
    greedy_decode_streaming, greedy_decode,
)

__all__ = [
    'TransducerConfig', 'BLANK_ID', 'DEFAULT_MAX_SYMBOLS_PER_FRAME',
    'PredictorParams', 'PredictorState', 'init_predictor_params', 'initial_predictor_state',
    'predictor_forward', 'check_tokens',
    'JoinerParams', 'init_joiner_params', 'joiner', 'joint_lattice',
    'RnntLattice', 'TransducerLossResult', 'rnnt_loss', 'rnnt_loss_bruteforce', 'enumerate_alignments',
    'MAX_BRUTEFORCE_FRAMES', 'MAX_BRUTEFORCE_TOKENS',
    'TransducerParams', 'DecodeState', 'init_transducer_params', 'init_decode_state',
    'greedy_decode_streaming', 'greedy_decode',
]
