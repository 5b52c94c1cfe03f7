"""
summix command-line interface
Subcommands: bench, buckets, mask, init, encode, plot, report
"""
import argparse
import logging
from pathlib import Path
from typing import List, Optional

from src.bench.length_buckets import DEFAULT_NUM_BUCKETS, run_length_buckets
from src.bench.rtf_benchmark import chunk_spec_for_run, run_rtf_benchmark
from src.chunking import ChunkSpec, build_mask
from src.config import BenchConfigLoader, BenchProfile, RuntimeSettings, load_runtime_settings
from src.encoder import EncoderConfig, MixingKind, init_encoder_params, stream_features
from src.exceptions import ConfigurationError, SummixIOError, ValidationError
from src.models.bench_run import DEFAULT_CHUNK_MS, DEFAULT_DURATIONS_S, DEFAULT_REPEATS, BenchRun
from src.models.feature_sequence import FeatureSequence
from src.reporting import ReportGenerator, emit_report, load_reports
from src.utils import load_feature_file, save_feature_file
from src.utils.checkpoint import load_checkpoint, save_checkpoint

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3

DEFAULT_ENCODER = {
    'd_model': 144, 'num_blocks': 12, 'num_heads': 4, 'conv_kernel': 31,
    'conv_mode': 'dynamic_chunk', 'subsampling_factor': 4, 'precision': 'f32', 'feat_dim': 80,
}
ENCODER_FLAGS = {
    'd_model': 'd_model', 'blocks': 'num_blocks', 'heads': 'num_heads', 'kernel': 'conv_kernel',
    'conv_mode': 'conv_mode', 'subsampling': 'subsampling_factor', 'precision': 'precision',
    'feat_dim': 'feat_dim', 'mixing': 'mixing', 'positional': 'positional',
}


def _csv_floats(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _csv_paths(text: str) -> List[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _add_encoder_arguments(parser: argparse.ArgumentParser, with_mixing: bool = True) -> None:
    group = parser.add_argument_group("encoder")
    if with_mixing:
        group.add_argument("--mixing", "-m", help="summary (SummaryMixing) or mhsa")
    group.add_argument("--d-model", type=int, help="model width (default: 144)")
    group.add_argument("--blocks", type=int, help="conformer blocks (default: 12)")
    group.add_argument("--heads", type=int, help="attention heads for mhsa (default: 4)")
    group.add_argument("--kernel", type=int, help="depthwise conv kernel, odd (default: 31)")
    group.add_argument("--conv-mode", choices=["dynamic_chunk", "dcconv", "causal", "standard"],
                       help="depthwise conv variant (default: dynamic_chunk)")
    group.add_argument("--subsampling", type=int, help="frontend subsampling factor (default: 4)")
    group.add_argument("--precision", choices=["f32", "f64"], help="compute precision (default: f32)")
    group.add_argument("--feat-dim", type=int, help="input feature width (default: 80)")
    group.add_argument("--positional", choices=["off", "absolute"], help="mhsa positional encoding")


def _add_stream_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--chunk-ms", type=float, help=f"chunk length in ms (default: {DEFAULT_CHUNK_MS:g})")
    parser.add_argument("--left-context", help="left context chunks or 'infinite' (default: infinite)")


def create_argument_parser() -> argparse.ArgumentParser:
    """Create command line argument parser"""
    parser = argparse.ArgumentParser(
        prog="summix",
        description="Streaming SummaryMixing / MHSA conformer encoder benchmarks",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  summix bench --mixing summary --durations 5,10,20,30,60,120 --out sm.csv --plot sm.svg
  summix bench --profile quick_mhsa --out mhsa.csv
  summix report --inputs sm.csv,mhsa.csv --out comparison.md
  summix mask --t 6 --chunk-frames 2 --left 1
  summix init --out model.smxc --d-model 144 --blocks 12 --seed 0
  summix encode --features in.smxf --checkpoint model.smxc --chunk-ms 640 --out enc.smxf
        """,
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    parser.add_argument("--env-file", help="dotenv file with SUMMIX_* settings")
    sub = parser.add_subparsers(dest="command", required=True)

    bench = sub.add_parser("bench", help="RTF and peak memory vs utterance length")
    bench.add_argument("--profile", "-p", help="named profile from the profiles JSON")
    bench.add_argument("--profile-file", help="profiles JSON (default: SUMMIX_PROFILE_FILE)")
    _add_encoder_arguments(bench)
    _add_stream_arguments(bench)
    bench.add_argument("--durations", type=_csv_floats, help="comma-separated seconds")
    bench.add_argument("--repeats", type=int, help=f"timed passes per duration (default: {DEFAULT_REPEATS})")
    bench.add_argument("--warmup", type=int, help="discarded passes per duration (default: 1)")
    bench.add_argument("--seed", type=int, help="weights and features seed (default: 0)")
    bench.add_argument("--threads", type=int,
                       help="recorded in the report metadata only; timing is single-stream "
                            "(parallel streams: buckets --threads)")
    bench.add_argument("--no-memory", action="store_true", help="skip the tracemalloc measurement")
    bench.add_argument("--out", "-o", required=True, help="report path (.csv, .json, .xlsx, .md)")
    bench.add_argument("--format", choices=["csv", "json", "xlsx", "md"], help="override format")
    bench.add_argument("--plot", help="also render an SVG chart of rtf vs duration")

    buckets = sub.add_parser("buckets", help="throughput of random-length utterances by length bucket")
    _add_encoder_arguments(buckets)
    _add_stream_arguments(buckets)
    buckets.add_argument("--utterances", type=int, default=100, help="utterances to sample (default: 100)")
    buckets.add_argument("--min-s", type=float, default=1.0, help="shortest duration (default: 1)")
    buckets.add_argument("--max-s", type=float, default=30.0, help="longest duration (default: 30)")
    buckets.add_argument("--buckets", type=int, default=DEFAULT_NUM_BUCKETS, help="bucket count (default: 10)")
    buckets.add_argument("--threads", type=int, help="parallel streams, capped by SUMMIX_THREADS")
    buckets.add_argument("--seed", type=int, default=0)
    buckets.add_argument("--out", "-o", required=True, help="CSV output path")

    mask = sub.add_parser("mask", help="print the 0/1 visibility grid")
    mask.add_argument("--t", type=int, required=True, help="frames")
    mask.add_argument("--chunk-frames", type=int, help="chunk size in frames (omit for full context)")
    mask.add_argument("--left", default="infinite", help="left context chunks or 'infinite'")

    init = sub.add_parser("init", help="write a randomly initialised encoder checkpoint")
    _add_encoder_arguments(init)
    init.add_argument("--seed", type=int, default=0)
    init.add_argument("--out", "-o", required=True, help="checkpoint path (.smxc)")

    encode = sub.add_parser("encode", help="stream a feature file through a checkpoint")
    encode.add_argument("--features", required=True, help="input feature file (.smxf)")
    encode.add_argument("--checkpoint", required=True, help="encoder checkpoint (.smxc)")
    _add_stream_arguments(encode)
    encode.add_argument("--out", "-o", required=True, help="output feature file (.smxf)")

    plot = sub.add_parser("plot", help="SVG chart from CSV/JSON reports")
    plot.add_argument("--inputs", type=_csv_paths, required=True, help="comma-separated report paths")
    plot.add_argument("--out", "-o", required=True, help="SVG path")
    plot.add_argument("--title", default="RTF vs utterance duration")

    report = sub.add_parser("report", help="Markdown comparison from CSV/JSON reports")
    report.add_argument("--inputs", type=_csv_paths, required=True, help="comma-separated report paths")
    report.add_argument("--out", "-o", required=True, help="output path (.md, .csv, .json, .xlsx)")
    report.add_argument("--title", default="SummaryMixing vs MHSA benchmark")

    return parser


def encoder_config_from_args(args: argparse.Namespace, base: Optional[EncoderConfig] = None) -> EncoderConfig:
    """Explicit flags override the base config (or the CLI defaults)"""
    data = base.to_dict() if base is not None else dict(DEFAULT_ENCODER)
    if base is not None and getattr(args, 'd_model', None) is not None:
        for name in ('summary_local_dim', 'summary_dim'):
            if data[name] == base.d_model:
                data[name] = None
    for flag, name in ENCODER_FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            data[name] = value
    if 'mixing' not in data:
        raise ConfigurationError("--mixing is required (summary or mhsa)")
    data['mixing'] = MixingKind.parse(data['mixing'])
    return EncoderConfig.from_dict(data)


def _stream_spec(cfg: EncoderConfig, chunk_ms: float, left_context, frame_shift_ms: float) -> ChunkSpec:
    frames = int(chunk_ms // (frame_shift_ms * cfg.subsampling_factor))
    if frames < 1:
        raise ConfigurationError(f"chunk_ms {chunk_ms} is shorter than one encoder frame")
    return ChunkSpec.streaming(frames, ChunkSpec.parse_left_context(left_context))


def _worker_count(requested: Optional[int], settings: RuntimeSettings) -> int:
    if requested is not None and requested < 1:
        raise ConfigurationError(f"--threads must be >= 1, got {requested}")
    return min(requested or settings.threads, settings.threads)


def _bench_profile(args: argparse.Namespace) -> Optional[BenchProfile]:
    if not args.profile:
        return None
    return BenchConfigLoader(args.profile_file).get_profile(args.profile)


def cmd_bench(args: argparse.Namespace, settings: RuntimeSettings) -> int:
    profile = _bench_profile(args)
    cfg = encoder_config_from_args(args, profile.encoder if profile else None)

    run = profile.to_bench_run() if profile else BenchRun(config_id=f"cli_{cfg.mixing.value}",
                                                          mixing=cfg.mixing.value)
    overrides = {
        'durations_s': args.durations, 'repeats': args.repeats, 'warmup': args.warmup,
        'chunk_ms': args.chunk_ms, 'seed': args.seed,
    }
    settings_changed = {k: v for k, v in overrides.items() if v is not None}
    if args.left_context is not None:
        settings_changed['left_context'] = ChunkSpec.parse_left_context(args.left_context)
    run_data = {**run.to_dict(), **settings_changed}
    run = BenchRun(
        config_id=run_data['config_id'],
        mixing=cfg.mixing.value,
        durations_s=list(run_data['durations_s']),
        repeats=run_data['repeats'],
        frame_shift_ms=run_data['frame_shift_ms'],
        chunk_ms=run_data['chunk_ms'],
        left_context=ChunkSpec.parse_left_context(run_data['left_context']),
        warmup=run_data['warmup'],
        seed=run_data['seed'],
        measure_memory=not args.no_memory,
    )
    spec = chunk_spec_for_run(cfg, run)
    workers = _worker_count(args.threads, settings)

    print(f"📊 Benchmarking {cfg.mixing.value}: d_model={cfg.d_model}, {cfg.num_blocks} blocks, "
          f"{spec.describe()}, durations {run.durations_s}, {run.repeats} repeats")
    run_rtf_benchmark(cfg, spec, run)
    for row in run.results:
        print(f"   • {row.duration_s:g}s: mean {row.wall_ms_mean:.1f} ms, p95 {row.wall_ms_p95:.1f} ms, "
              f"RTF {row.rtf:.4f}, modeled {row.modeled_peak_bytes} B")

    metadata = {**{k: v for k, v in run.to_dict().items() if k != 'results'},
                'encoder': cfg.to_dict(), 'threads': workers}
    generator = ReportGenerator(f"Benchmark {run.config_id}", metadata)
    written = generator.generate(run, args.format, args.out)
    print(f"✅ Report written: {written}")
    if args.plot:
        print(f"✅ Plot written: {generator.generate(run, 'svg', args.plot)}")
    return EXIT_OK


def cmd_buckets(args: argparse.Namespace, settings: RuntimeSettings) -> int:
    cfg = encoder_config_from_args(args)
    spec = _stream_spec(cfg, args.chunk_ms or DEFAULT_CHUNK_MS, args.left_context, 10.0)
    workers = _worker_count(args.threads, settings)
    print(f"📊 Timing {args.utterances} utterances in {args.buckets} buckets with {workers} worker(s)")
    table = run_length_buckets(cfg, spec, args.utterances, args.min_s, args.max_s,
                               args.buckets, workers, args.seed)
    out = Path(args.out)
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        table.to_csv(out, index=False)
    except OSError as e:
        raise SummixIOError(f"Cannot write {out}: {e}")
    for row in table.itertuples(index=False):
        print(f"   • bucket {row.bucket}: {row.min_duration_s:.1f}-{row.max_duration_s:.1f}s, "
              f"RTF {row.rtf:.4f}, throughput {row.throughput:.1f}x")
    print(f"✅ Buckets written: {out}")
    return EXIT_OK


def cmd_mask(args: argparse.Namespace, settings: RuntimeSettings) -> int:
    if args.chunk_frames is None:
        spec = ChunkSpec.full_context()
    else:
        spec = ChunkSpec.streaming(args.chunk_frames, ChunkSpec.parse_left_context(args.left))
    print(build_mask(args.t, spec).to_text_grid())
    return EXIT_OK


def cmd_init(args: argparse.Namespace, settings: RuntimeSettings) -> int:
    cfg = encoder_config_from_args(args)
    save_checkpoint(args.out, cfg, init_encoder_params(cfg, args.seed))
    print(f"✅ Checkpoint written: {args.out} ({cfg.mixing.value}, {cfg.num_blocks} blocks)")
    return EXIT_OK


def cmd_encode(args: argparse.Namespace, settings: RuntimeSettings) -> int:
    feats = load_feature_file(args.features)
    cfg, params = load_checkpoint(args.checkpoint)
    spec = _stream_spec(cfg, args.chunk_ms or DEFAULT_CHUNK_MS, args.left_context, feats.frame_shift_ms)
    out = stream_features(feats, spec, cfg, params)
    save_feature_file(FeatureSequence(out.astype('float32'), feats.frame_shift_ms * cfg.subsampling_factor),
                      args.out)
    print(f"✅ Encoded {feats.num_frames} frames into {out.shape[0]} x {out.shape[1]}: {args.out}")
    return EXIT_OK


def cmd_plot(args: argparse.Namespace, settings: RuntimeSettings) -> int:
    frame = load_reports(args.inputs)
    written = ReportGenerator(args.title).generate(frame, 'svg', args.out)
    print(f"✅ Plot written: {written}")
    return EXIT_OK


def cmd_report(args: argparse.Namespace, settings: RuntimeSettings) -> int:
    frame = load_reports(args.inputs)
    fmt = None if Path(args.out).suffix else 'md'
    written = ReportGenerator(args.title, {'inputs': ', '.join(args.inputs)}).generate(frame, fmt, args.out)
    print(f"✅ Report written: {written}")
    return EXIT_OK


COMMANDS = {
    'bench': cmd_bench,
    'buckets': cmd_buckets,
    'mask': cmd_mask,
    'init': cmd_init,
    'encode': cmd_encode,
    'plot': cmd_plot,
    'report': cmd_report,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the process exit code"""
    parser = create_argument_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_VALIDATION

    try:
        settings = load_runtime_settings(args.env_file)
    except ValidationError as e:
        print(f"❌ {e}")
        return EXIT_VALIDATION
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else settings.log_level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        return COMMANDS[args.command](args, settings)
    except ValidationError as e:
        print(f"❌ {type(e).__name__}: {e}")
        return EXIT_VALIDATION
    except (SummixIOError, OSError) as e:
        print(f"❌ {type(e).__name__}: {e}")
        return EXIT_IO
    except KeyboardInterrupt:
        print("\n⚠️ Interrupted by user")
        return 130
