"""
Mixing package
SummaryMixing (offline, masked, streaming) and the MHSA baseline
"""
from .summary_mixing import (
    SummaryMixingParams, SummaryState, init_summary_mixing_params, linear_summary_mixing_params,
    summary_mixing_offline, summary_mixing_masked, summary_mixing_step, masked_summaries,
)
from .mhsa import (
    PositionalEncoding, MhsaParams, KeyValueCache, init_mhsa_params, sinusoidal_positions,
    mhsa_masked, mhsa_step,
)

__all__ = [
    'SummaryMixingParams', 'SummaryState', 'init_summary_mixing_params', 'linear_summary_mixing_params',
    'summary_mixing_offline', 'summary_mixing_masked', 'summary_mixing_step', 'masked_summaries',
    'PositionalEncoding', 'MhsaParams', 'KeyValueCache', 'init_mhsa_params', 'sinusoidal_positions',
    'mhsa_masked', 'mhsa_step',
]
