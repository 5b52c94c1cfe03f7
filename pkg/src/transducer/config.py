"""
Transducer configuration
"""
from dataclasses import asdict, dataclass
from typing import Any, Dict

from src.exceptions import ConfigurationError, PrecisionError
from src.numkernel import Activation, F32, PrecisionPolicy

BLANK_ID = 0
DEFAULT_MAX_SYMBOLS_PER_FRAME = 10


@dataclass(frozen=True)
class TransducerConfig:
    """Predictor, joiner and decoding hyper-parameters (blank is always id 0)"""
    vocab_size: int = 1000
    enc_dim: int = 256
    embed_dim: int = 128
    pred_dim: int = 320
    joint_dim: int = 320
    joiner_activation: Activation = Activation.TANH
    max_symbols_per_frame: int = DEFAULT_MAX_SYMBOLS_PER_FRAME
    precision: PrecisionPolicy = F32

    def __post_init__(self):
        try:
            object.__setattr__(self, "joiner_activation", Activation(self.joiner_activation))
        except ValueError:
            raise ConfigurationError(f"Unknown joiner activation: {self.joiner_activation}")
        if self.joiner_activation is Activation.GLU:
            raise ConfigurationError("joiner activation must be elementwise, glu halves the width")
        try:
            object.__setattr__(self, "precision", PrecisionPolicy.from_name(self.precision))
        except PrecisionError as e:
            raise ConfigurationError(str(e))
        if self.vocab_size < 2:
            raise ConfigurationError(f"vocab_size must include blank and one token, got {self.vocab_size}")
        for name in ("enc_dim", "embed_dim", "pred_dim", "joint_dim", "max_symbols_per_frame"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be >= 1, got {getattr(self, name)}")

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["joiner_activation"] = self.joiner_activation.value
        data["precision"] = self.precision.name
        return data
