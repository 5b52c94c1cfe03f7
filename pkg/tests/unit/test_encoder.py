"""
Unit tests for the encoder config, convolutions, frontend, conformer block and stack
"""
import json
import threading

import numpy as np
import pytest

from src.chunking import ChunkSpec, build_mask
from src.encoder import (
    ConformerBlockParams, ConvBuffer, ConvMode, ConvModuleParams, DepthwiseKernel, EncoderConfig,
    FeedForwardParams, LayerNormParams, MixingKind, buffer_capacity, causal_conv_forward,
    conformer_block_forward, conformer_block_step, dcconv_forward, depthwise_step,
    encoder_forward_batch, encoder_forward_offline, encoder_forward_streaming, frontend_forward,
    init_block_params, init_block_state, init_encoder_params, init_frontend_params,
    init_streaming_context, standard_conv_forward, stream_features, subsampled_length,
)
from src.exceptions import (
    ConfigurationError, ContextMismatchError, ShapeError, StreamStateError,
)
from src.mixing import SummaryMixingParams
from src.models import FeatureSequence
from src.numkernel import Activation, DenseParams, layernorm
from tests.conftest import tiny_config

X4 = np.array([[1.0], [2.0], [3.0], [4.0]])
ONES3 = DepthwiseKernel.from_taps([1.0, 1.0, 1.0])


def load_golden_block(path):
    """Input, block parameters and expected output of a frozen f64 block evaluation"""
    data = json.loads(path.read_text())
    p = data['params']

    def arr(values):
        return np.array(values, dtype=np.float64)

    def dense(d, activation=Activation.IDENTITY):
        return DenseParams(arr(d['weight']), arr(d['bias']), activation)

    def norm(d):
        return LayerNormParams(arr(d['gain']), arr(d['bias']))

    def ffn(d):
        return FeedForwardParams(dense(d['expand'], Activation.SILU), dense(d['project']))

    conv = p['conv']
    params = ConformerBlockParams(
        ffn_in=ffn(p['ffn_in']),
        ffn_in_norm=norm(p['ffn_in_norm']),
        mixing=SummaryMixingParams(*(dense(p['mixing'][k], Activation.GELU)
                                     for k in ("local", "summary", "combiner"))),
        mixing_norm=norm(p['mixing_norm']),
        conv=ConvModuleParams(
            pointwise_in=dense(conv['pointwise_in'], Activation.GLU),
            depthwise=DepthwiseKernel(arr(conv['depthwise']['weight']), arr(conv['depthwise']['bias'])),
            norm_scale=arr(conv['norm_scale']),
            norm_shift=arr(conv['norm_shift']),
            pointwise_out=dense(conv['pointwise_out']),
        ),
        conv_norm=norm(p['conv_norm']),
        ffn_out=ffn(p['ffn_out']),
        ffn_out_norm=norm(p['ffn_out_norm']),
        final_norm=norm(p['final_norm']),
    )
    return arr(data['input']), params, arr(data['expected'])


class TestEncoderConfig:
    """Test EncoderConfig validation and serialization"""

    @pytest.mark.unit
    @pytest.mark.configuration
    def test_defaults(self):
        cfg = EncoderConfig()
        assert cfg.mixing is MixingKind.SUMMARY_MIXING
        assert cfg.conv_mode is ConvMode.DYNAMIC_CHUNK
        assert cfg.summary_dim == cfg.d_model == cfg.summary_local_dim
        assert cfg.ffn_dim == 4 * cfg.d_model
        assert cfg.conv_context == 15
        assert cfg.subsampling_layers == 0

    @pytest.mark.unit
    @pytest.mark.positive
    @pytest.mark.parametrize("text,kind", [("summary", MixingKind.SUMMARY_MIXING),
                                           ("SummaryMixing", MixingKind.SUMMARY_MIXING),
                                           ("summary-mixing", MixingKind.SUMMARY_MIXING),
                                           ("MHSA", MixingKind.MHSA)])
    def test_mixing_aliases(self, text, kind):
        assert MixingKind.parse(text) is kind

    @pytest.mark.unit
    @pytest.mark.negative
    @pytest.mark.parametrize("overrides", [
        dict(conv_kernel=4), dict(subsampling_factor=3), dict(d_model=0),
        dict(mixing="mhsa", d_model=10, num_heads=4), dict(ffn_expansion=0),
        dict(mixing="lstm"), dict(conv_mode="dilated"), dict(precision="f16"),
        dict(positional="relative"),
    ])
    def test_invalid(self, overrides):
        with pytest.raises(ConfigurationError):
            tiny_config(**overrides)

    @pytest.mark.unit
    @pytest.mark.dataclass
    def test_dict_round_trip(self):
        cfg = tiny_config("mhsa", conv_mode="causal", subsampling_factor=4, positional="absolute")
        data = cfg.to_dict()
        assert data["mixing"] == "mhsa" and data["precision"] == "f64"
        assert EncoderConfig.from_dict(data) == cfg

    @pytest.mark.unit
    @pytest.mark.negative
    def test_from_dict_rejects_unknown_fields(self):
        with pytest.raises(ConfigurationError, match="dropout"):
            EncoderConfig.from_dict({"d_model": 8, "dropout": 0.1})


class TestDepthwiseConvolution:
    """Test the three depthwise variants on hand-checkable inputs"""

    @pytest.mark.unit
    @pytest.mark.positive
    def test_dynamic_chunk_without_left_context(self):
        out = dcconv_forward(X4, build_mask(4, ChunkSpec.streaming(2, 0)), ONES3)
        np.testing.assert_array_equal(out[:, 0], [3.0, 3.0, 7.0, 7.0])

    @pytest.mark.unit
    @pytest.mark.positive
    def test_dynamic_chunk_with_left_context(self):
        out = dcconv_forward(X4, build_mask(4, ChunkSpec.streaming(2)), ONES3)
        np.testing.assert_array_equal(out[:, 0], [3.0, 3.0, 9.0, 7.0])

    @pytest.mark.unit
    @pytest.mark.positive
    def test_standard_and_causal(self):
        np.testing.assert_array_equal(standard_conv_forward(X4, ONES3)[:, 0], [3.0, 6.0, 9.0, 7.0])
        np.testing.assert_array_equal(causal_conv_forward(X4, ONES3)[:, 0], [1.0, 3.0, 6.0, 9.0])

    @pytest.mark.unit
    @pytest.mark.positive
    def test_full_context_mask_equals_standard(self, rng):
        kernel = DepthwiseKernel(rng.standard_normal((5, 3)), rng.standard_normal(3))
        X = rng.standard_normal((9, 3))
        np.testing.assert_allclose(dcconv_forward(X, build_mask(9, ChunkSpec.full_context()), kernel),
                                   standard_conv_forward(X, kernel), atol=1e-12)

    @pytest.mark.unit
    @pytest.mark.negative
    def test_even_kernel(self):
        with pytest.raises(ShapeError):
            DepthwiseKernel.from_taps([1.0, 1.0])

    @pytest.mark.unit
    @pytest.mark.negative
    def test_channel_mismatch(self):
        with pytest.raises(ShapeError):
            standard_conv_forward(np.zeros((3, 2)), ONES3)

    @pytest.mark.unit
    @pytest.mark.configuration
    def test_buffer_capacity(self):
        assert buffer_capacity(ConvMode.CAUSAL, 31) == 30
        assert buffer_capacity(ConvMode.DYNAMIC_CHUNK, 31) == 15
        with pytest.raises(ConfigurationError):
            buffer_capacity(ConvMode.STANDARD, 31)


class TestDepthwiseStep:
    """Test chunk-by-chunk depthwise convolution against the whole-sequence forms"""

    def _stream(self, X, kernel, mode, spec):
        buffer = ConvBuffer.empty(X.shape[1], X.dtype)
        C = spec.chunk_size_frames
        outputs = []
        for start in range(0, X.shape[0], C):
            out, buffer = depthwise_step(X[start:start + C], buffer, kernel, mode, spec, start)
            outputs.append(out)
        return np.concatenate(outputs), buffer

    @pytest.mark.unit
    @pytest.mark.streaming
    @pytest.mark.parametrize("mode", [ConvMode.DYNAMIC_CHUNK, ConvMode.CAUSAL])
    def test_streaming_equals_whole_sequence(self, rng, mode):
        for _ in range(30):
            T = int(rng.integers(1, 30))
            C = int(rng.integers(1, T + 1))
            L = None if rng.random() < 0.5 else int(rng.integers(0, 3))
            K = int(rng.choice([1, 3, 5, 7]))
            kernel = DepthwiseKernel(rng.standard_normal((K, 2)), rng.standard_normal(2))
            X = rng.standard_normal((T, 2))
            spec = ChunkSpec.streaming(C, L)
            streamed, buffer = self._stream(X, kernel, mode, spec)
            if mode is ConvMode.CAUSAL:
                whole = causal_conv_forward(X, kernel)
            else:
                whole = dcconv_forward(X, build_mask(T, spec), kernel)
            np.testing.assert_allclose(streamed, whole, atol=1e-12)
            assert buffer.num_frames <= buffer_capacity(mode, K)

    @pytest.mark.unit
    @pytest.mark.negative
    def test_gap_in_stream(self):
        spec = ChunkSpec.streaming(2)
        _, buffer = depthwise_step(X4[:2], ConvBuffer.empty(1, np.float64), ONES3, ConvMode.CAUSAL, spec, 0)
        with pytest.raises(StreamStateError):
            depthwise_step(X4[2:], buffer, ONES3, ConvMode.CAUSAL, spec, 3)

    @pytest.mark.unit
    @pytest.mark.negative
    def test_empty_chunk(self):
        with pytest.raises(StreamStateError):
            depthwise_step(np.zeros((0, 1)), ConvBuffer.empty(1), ONES3, ConvMode.CAUSAL,
                           ChunkSpec.streaming(2), 0)


class TestFrontend:
    """Test the subsampling frontend"""

    @pytest.mark.unit
    @pytest.mark.positive
    @pytest.mark.parametrize("T,factor,expected", [(10, 1, 10), (10, 2, 5), (10, 4, 2), (3, 4, 0)])
    def test_subsampled_length(self, T, factor, expected):
        assert subsampled_length(T, factor) == expected

    @pytest.mark.unit
    @pytest.mark.positive
    def test_output_shape(self, rng):
        cfg = tiny_config(subsampling_factor=4)
        p = init_frontend_params(rng, cfg)
        assert p.factor == 4
        out = frontend_forward(rng.standard_normal((11, cfg.feat_dim)), p, cfg.precision)
        assert out.shape == (2, cfg.d_model)

    @pytest.mark.unit
    @pytest.mark.negative
    def test_feature_width_mismatch(self, rng):
        cfg = tiny_config()
        with pytest.raises(ShapeError):
            frontend_forward(np.zeros((4, cfg.feat_dim + 1)), init_frontend_params(rng, cfg))


class TestConformerBlock:
    """Test a single conformer block"""

    @pytest.mark.unit
    @pytest.mark.positive
    @pytest.mark.parametrize("mixing", ["summary_mixing", "mhsa"])
    def test_zero_weights_reduce_to_final_norm(self, rng, mixing):
        cfg = tiny_config(mixing)
        X = rng.standard_normal((5, cfg.d_model))
        out = conformer_block_forward(X, build_mask(5, ChunkSpec.full_context()), init_block_params(None, cfg), cfg)
        expected = layernorm(X, np.ones(cfg.d_model), np.zeros(cfg.d_model))
        np.testing.assert_allclose(out, expected, atol=1e-12)

    @pytest.mark.unit
    @pytest.mark.negative
    def test_mixing_kind_mismatch(self, rng, tiny_sm_config, tiny_mhsa_config):
        p = init_block_params(rng, tiny_mhsa_config)
        with pytest.raises(ContextMismatchError):
            conformer_block_forward(np.zeros((2, 8)), build_mask(2, ChunkSpec.full_context()), p, tiny_sm_config)

    @pytest.mark.unit
    @pytest.mark.streaming
    @pytest.mark.parametrize("mixing", ["summary_mixing", "mhsa"])
    def test_block_step_equals_block_forward(self, rng, mixing):
        cfg = tiny_config(mixing)
        p = init_block_params(rng, cfg)
        spec = ChunkSpec.streaming(3, 1)
        X = rng.standard_normal((10, cfg.d_model))
        state = init_block_state(cfg, spec)
        outputs = []
        for start in range(0, 10, 3):
            out, state = conformer_block_step(X[start:start + 3], state, p, cfg, spec, start)
            outputs.append(out)
        np.testing.assert_allclose(np.concatenate(outputs),
                                   conformer_block_forward(X, build_mask(10, spec), p, cfg), atol=1e-10)

    @pytest.mark.unit
    @pytest.mark.numerical
    def test_golden_two_frame_block(self, fixtures_dir):
        """Test a 2-frame, d_model=4 block against its frozen f64 output"""
        X, params, expected = load_golden_block(fixtures_dir / "conformer_block_T2_D4.json")
        cfg = tiny_config(d_model=4, conv_kernel=3, ffn_expansion=2.0)
        assert X.shape == expected.shape == (2, 4)
        out = conformer_block_forward(X, build_mask(2, ChunkSpec.full_context()), params, cfg)
        np.testing.assert_allclose(out, expected, rtol=0, atol=1e-12)

        state = init_block_state(cfg, ChunkSpec.streaming(2))
        streamed, _ = conformer_block_step(X, state, params, cfg, ChunkSpec.streaming(2), 0)
        np.testing.assert_allclose(streamed, expected, rtol=0, atol=1e-12)

    @pytest.mark.unit
    @pytest.mark.positive
    @pytest.mark.parametrize("mixing", ["summary_mixing", "mhsa"])
    @pytest.mark.parametrize("left", [0, 2, None])
    def test_full_mask_equals_whole_chunk_mask(self, rng, mixing, left):
        """Test that a single chunk covering all frames is the full-context mask"""
        cfg = tiny_config(mixing)
        p = init_block_params(rng, cfg)
        X = rng.standard_normal((7, cfg.d_model))
        full = conformer_block_forward(X, build_mask(7, ChunkSpec.full_context()), p, cfg)
        whole_chunk = conformer_block_forward(X, build_mask(7, ChunkSpec.streaming(7, left)), p, cfg)
        np.testing.assert_allclose(whole_chunk, full, rtol=0, atol=1e-12)

    @pytest.mark.unit
    @pytest.mark.positive
    def test_weight_bytes_follow_mixing(self):
        sm = init_block_params(None, tiny_config("summary_mixing"))
        attention = init_block_params(None, tiny_config("mhsa"))
        assert sm.mixing.nbytes == (8 * 8 + 8) * 2 * 8 + (16 * 8 + 8) * 8
        assert attention.mixing.nbytes == (8 * 8 + 8) * 4 * 8


class TestEncoderStack:
    """Test offline, batched and streaming encoder forwards"""

    @pytest.mark.unit
    @pytest.mark.acceptance
    @pytest.mark.parametrize("mixing", ["summary_mixing", "mhsa"])
    @pytest.mark.parametrize("conv_mode", ["dynamic_chunk", "causal"])
    @pytest.mark.parametrize("factor", [1, 2])
    def test_streaming_equals_offline(self, rng, mixing, conv_mode, factor):
        cfg = tiny_config(mixing, conv_mode=conv_mode, subsampling_factor=factor, positional="absolute")
        params = init_encoder_params(cfg, rng)
        for C, L in [(1, 0), (2, 1), (3, None), (4, 2)]:
            spec = ChunkSpec.streaming(C, L)
            feats = rng.standard_normal((17, cfg.feat_dim))
            streamed = stream_features(feats, spec, cfg, params)
            offline = encoder_forward_offline(feats, spec, cfg, params)
            assert streamed.shape == offline.shape == (17 // factor, cfg.d_model)
            np.testing.assert_allclose(streamed, offline, atol=1e-9)

    @pytest.mark.unit
    @pytest.mark.positive
    @pytest.mark.parametrize("mixing", ["summary_mixing", "mhsa"])
    def test_future_chunks_do_not_leak(self, rng, mixing):
        cfg = tiny_config(mixing)
        params = init_encoder_params(cfg, rng)
        spec = ChunkSpec.streaming(4, 1)
        feats = rng.standard_normal((12, cfg.feat_dim))
        changed = feats.copy()
        changed[8:] += 3.0
        base = encoder_forward_offline(feats, spec, cfg, params)
        other = encoder_forward_offline(changed, spec, cfg, params)
        np.testing.assert_allclose(other[:8], base[:8], rtol=1e-12, atol=0)
        assert not np.allclose(other[8:], base[8:])

    @pytest.mark.unit
    @pytest.mark.positive
    @pytest.mark.parametrize("mixing", ["summary_mixing", "mhsa"])
    def test_full_context_equals_single_chunk(self, rng, mixing):
        """Test full context against one chunk of T' frames, offline and streamed"""
        cfg = tiny_config(mixing, subsampling_factor=2)
        params = init_encoder_params(cfg, rng)
        feats = rng.standard_normal((12, cfg.feat_dim))
        frames = subsampled_length(12, 2)
        full = encoder_forward_offline(feats, ChunkSpec.full_context(), cfg, params)
        for left in (0, 1, None):
            single = encoder_forward_offline(feats, ChunkSpec.streaming(frames, left), cfg, params)
            np.testing.assert_allclose(single, full, rtol=0, atol=1e-12)
        streamed = stream_features(feats, ChunkSpec.streaming(frames), cfg, params)
        assert streamed.shape == full.shape == (frames, cfg.d_model)
        np.testing.assert_allclose(streamed, full, rtol=0, atol=1e-10)

    @pytest.mark.unit
    @pytest.mark.positive
    def test_feature_sequence_input(self, rng, tiny_sm_config):
        params = init_encoder_params(tiny_sm_config, 3)
        frames = rng.standard_normal((6, tiny_sm_config.feat_dim))
        np.testing.assert_array_equal(
            encoder_forward_offline(FeatureSequence(frames), None, tiny_sm_config, params),
            encoder_forward_offline(frames, None, tiny_sm_config, params),
        )

    @pytest.mark.unit
    @pytest.mark.positive
    def test_batch_does_not_depend_on_workers(self, rng, tiny_mhsa_config):
        params = init_encoder_params(tiny_mhsa_config, rng)
        feats = [rng.standard_normal((int(n), tiny_mhsa_config.feat_dim)) for n in (3, 9, 5, 12)]
        spec = ChunkSpec.streaming(2, 1)
        serial = encoder_forward_batch(feats, spec, tiny_mhsa_config, params, workers=1)
        parallel = encoder_forward_batch(feats, spec, tiny_mhsa_config, params, workers=3)
        for a, b in zip(serial, parallel):
            np.testing.assert_array_equal(a, b)

    @pytest.mark.unit
    @pytest.mark.negative
    def test_batch_rejects_zero_workers(self, tiny_sm_config):
        with pytest.raises(ConfigurationError):
            encoder_forward_batch([], None, tiny_sm_config, init_encoder_params(tiny_sm_config), workers=0)

    @pytest.mark.unit
    @pytest.mark.negative
    def test_offline_rejects_short_input(self, tiny_sm_config):
        with pytest.raises(ShapeError):
            encoder_forward_offline(np.zeros((0, 6)), None, tiny_sm_config, init_encoder_params(tiny_sm_config))
        cfg = tiny_config(subsampling_factor=4)
        with pytest.raises(ShapeError):
            encoder_forward_offline(np.zeros((3, 6)), None, cfg, init_encoder_params(cfg))

    @pytest.mark.unit
    @pytest.mark.negative
    def test_params_for_other_config(self, tiny_sm_config):
        params = init_encoder_params(tiny_config(num_blocks=3))
        with pytest.raises(ContextMismatchError):
            encoder_forward_offline(np.zeros((4, 6)), None, tiny_sm_config, params)

    @pytest.mark.unit
    @pytest.mark.edge
    def test_zero_template_is_all_zero(self, tiny_sm_config):
        params = init_encoder_params(tiny_sm_config, None)
        assert not params.frontend.input_projection.weight.any()
        assert params.nbytes == init_encoder_params(tiny_sm_config, 0).nbytes


class TestStreamingContext:
    """Test streaming context life cycle and errors"""

    def setup_method(self):
        self.cfg = tiny_config("summary_mixing", subsampling_factor=2)
        self.params = init_encoder_params(self.cfg, 5)
        self.spec = ChunkSpec.streaming(2, 1)
        self.feats = np.random.default_rng(6).standard_normal((11, self.cfg.feat_dim))

    @pytest.mark.unit
    @pytest.mark.negative
    def test_requires_finite_chunks(self):
        with pytest.raises(ConfigurationError):
            init_streaming_context(self.cfg, ChunkSpec.full_context())

    @pytest.mark.unit
    @pytest.mark.negative
    def test_standard_conv_cannot_stream(self):
        with pytest.raises(ConfigurationError):
            init_streaming_context(self.cfg.replace(conv_mode="standard"), self.spec)

    @pytest.mark.unit
    @pytest.mark.streaming
    def test_counters_and_short_final_chunk(self):
        ctx = init_streaming_context(self.cfg, self.spec)
        assert ctx.input_chunk_frames == 4
        for start in (0, 4):
            out, ctx = encoder_forward_streaming(self.feats[start:start + 4], ctx, self.cfg, self.params)
            assert out.shape == (2, self.cfg.d_model)
        out, ctx = encoder_forward_streaming(self.feats[8:], ctx, self.cfg, self.params)
        assert out.shape == (1, self.cfg.d_model)
        assert ctx.finished and ctx.frames_consumed == 5 and ctx.input_frames_consumed == 11
        with pytest.raises(StreamStateError):
            encoder_forward_streaming(self.feats[:4], ctx, self.cfg, self.params)

    @pytest.mark.unit
    @pytest.mark.negative
    def test_oversized_and_empty_chunks(self):
        ctx = init_streaming_context(self.cfg, self.spec)
        with pytest.raises(ShapeError):
            encoder_forward_streaming(self.feats[:5], ctx, self.cfg, self.params)
        with pytest.raises(StreamStateError):
            encoder_forward_streaming(self.feats[:0], ctx, self.cfg, self.params)

    @pytest.mark.unit
    @pytest.mark.negative
    def test_context_for_other_config(self):
        ctx = init_streaming_context(self.cfg, self.spec)
        other = self.cfg.replace(mixing="mhsa")
        with pytest.raises(ContextMismatchError):
            encoder_forward_streaming(self.feats[:4], ctx, other, init_encoder_params(other))

    @pytest.mark.unit
    @pytest.mark.streaming
    def test_equal_inputs_give_equal_contexts(self):
        a = init_streaming_context(self.cfg, self.spec)
        b = init_streaming_context(self.cfg, self.spec)
        assert a == b
        _, a = encoder_forward_streaming(self.feats[:4], a, self.cfg, self.params)
        assert a != b
        _, b = encoder_forward_streaming(self.feats[:4], b, self.cfg, self.params)
        assert a == b
        assert a.state_nbytes > 0

    @pytest.mark.unit
    @pytest.mark.streaming
    def test_summary_state_size_does_not_grow(self):
        """Test equal state bytes after T and 10*T frames with infinite left context"""
        cfg = tiny_config("summary_mixing")
        params = init_encoder_params(cfg, 8)
        spec = ChunkSpec.streaming(4)
        sizes = []
        for T in (40, 400):
            feats = np.random.default_rng(T).standard_normal((T, cfg.feat_dim))
            ctx = init_streaming_context(cfg, spec)
            for start in range(0, T, 4):
                _, ctx = encoder_forward_streaming(feats[start:start + 4], ctx, cfg, params)
            assert ctx.frames_consumed == T
            sizes.append(ctx.state_nbytes)
        assert sizes[0] == sizes[1] > 0

    @pytest.mark.unit
    @pytest.mark.streaming
    def test_attention_cache_bounded_by_left_context(self):
        """Test that a finite-L cache never holds more than L*C frames per block"""
        cfg = tiny_config("mhsa")
        params = init_encoder_params(cfg, 9)
        C, L = 3, 2
        spec = ChunkSpec.streaming(C, L)
        feats = np.random.default_rng(10).standard_normal((31, cfg.feat_dim))
        ctx = init_streaming_context(cfg, spec)
        sizes = []
        for start in range(0, 31, C):
            _, ctx = encoder_forward_streaming(feats[start:start + C], ctx, cfg, params)
            for state in ctx.block_states:
                assert state.mixing.num_frames <= L * C
            sizes.append(ctx.state_nbytes)
        assert all(state.mixing.num_frames == L * C for state in ctx.block_states)
        assert len(set(sizes[L + 1:])) == 1

    @pytest.mark.unit
    @pytest.mark.streaming
    def test_handoff_between_threads(self):
        """Test that chunks fed from two threads in turn match a single-thread run"""
        cfg = tiny_config("mhsa")
        params = init_encoder_params(cfg, 11)
        spec = ChunkSpec.streaming(3, 1)
        feats = np.random.default_rng(12).standard_normal((29, cfg.feat_dim))
        ctx = init_streaming_context(cfg, spec)
        outputs = []

        def feed(starts):
            nonlocal ctx
            for start in starts:
                out, ctx = encoder_forward_streaming(feats[start:start + 3], ctx, cfg, params)
                outputs.append(out)

        starts = list(range(0, 29, 3))
        for part in (starts[:4], starts[4:]):
            worker = threading.Thread(target=feed, args=(part,))
            worker.start()
            worker.join()
        assert ctx.finished
        np.testing.assert_array_equal(np.concatenate(outputs), stream_features(feats, spec, cfg, params))
