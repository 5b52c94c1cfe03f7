"""
Encoder package
Conformer blocks with SummaryMixing or MHSA, chunk-aware convolutions, offline and streaming stacks
"""
from .config import EncoderConfig, MixingKind, ConvMode
from .convolution import (
    DepthwiseKernel, ConvBuffer, ConvModuleParams, dcconv_forward, causal_conv_forward,
    standard_conv_forward, depthwise_forward, depthwise_step, buffer_capacity,
    conv_module_forward, conv_module_step, init_conv_module_params,
)
from .frontend import FrontendParams, StridedLayer, frontend_forward, init_frontend_params, subsampled_length
from .block import (
    LayerNormParams, FeedForwardParams, ConformerBlockParams, BlockState, init_block_params,
    init_block_state, conformer_block_forward, conformer_block_step,
)
from .encoder import (
    EncoderParams, StreamingContext, init_encoder_params, check_params, encoder_forward_offline,
    encoder_forward_batch, init_streaming_context, encoder_forward_streaming, stream_features,
)

__all__ = [
    'EncoderConfig', 'MixingKind', 'ConvMode',
    'DepthwiseKernel', 'ConvBuffer', 'ConvModuleParams', 'dcconv_forward', 'causal_conv_forward',
    'standard_conv_forward', 'depthwise_forward', 'depthwise_step', 'buffer_capacity',
    'conv_module_forward', 'conv_module_step', 'init_conv_module_params',
    'FrontendParams', 'StridedLayer', 'frontend_forward', 'init_frontend_params', 'subsampled_length',
    'LayerNormParams', 'FeedForwardParams', 'ConformerBlockParams', 'BlockState', 'init_block_params',
    'init_block_state', 'conformer_block_forward', 'conformer_block_step',
    'EncoderParams', 'StreamingContext', 'init_encoder_params', 'check_params', 'encoder_forward_offline',
    'encoder_forward_batch', 'init_streaming_context', 'encoder_forward_streaming', 'stream_features',
]
