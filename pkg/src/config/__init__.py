"""
Benchmark Configuration Loader
Loads named benchmark profiles from JSON and runtime settings from environment variables
"""
import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from dotenv import find_dotenv, load_dotenv

from src.chunking.chunk_spec import ChunkSpec
from src.encoder.config import EncoderConfig, MixingKind
from src.exceptions import ConfigurationError, SummixIOError
from src.models.bench_run import BenchRun, DEFAULT_CHUNK_MS, DEFAULT_DURATIONS_S, DEFAULT_REPEATS

logger = logging.getLogger(__name__)

DEFAULT_PROFILE_FILE = "config/bench_profiles.json"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass
class RuntimeSettings:
    """Process-level settings taken from SUMMIX_* environment variables"""
    threads: int = 1
    log_level: str = "WARNING"
    profile_file: str = DEFAULT_PROFILE_FILE


def load_runtime_settings(env_file: Optional[str] = None) -> RuntimeSettings:
    """
    Read SUMMIX_THREADS, SUMMIX_LOG_LEVEL and SUMMIX_PROFILE_FILE

    A .env file (env_file, or one found from the working directory) fills in
    variables that are not already set.

    Raises:
        ConfigurationError: If a variable holds an invalid value
    """
    load_dotenv(env_file or find_dotenv(usecwd=True), override=False)
    threads_raw = os.getenv("SUMMIX_THREADS", "1").strip()
    try:
        threads = int(threads_raw)
    except ValueError:
        raise ConfigurationError(f"SUMMIX_THREADS must be a positive integer, got {threads_raw!r}")
    if threads < 1:
        raise ConfigurationError(f"SUMMIX_THREADS must be a positive integer, got {threads}")

    log_level = os.getenv("SUMMIX_LOG_LEVEL", "WARNING").strip().upper()
    if log_level not in LOG_LEVELS:
        raise ConfigurationError(f"SUMMIX_LOG_LEVEL must be one of {list(LOG_LEVELS)}, got {log_level!r}")

    profile_file = os.getenv("SUMMIX_PROFILE_FILE", DEFAULT_PROFILE_FILE).strip() or DEFAULT_PROFILE_FILE
    return RuntimeSettings(threads=threads, log_level=log_level, profile_file=profile_file)


@dataclass
class BenchProfile:
    """Named benchmark setup: encoder config plus timing-run parameters"""
    name: str
    description: str
    encoder: EncoderConfig
    durations_s: List[float] = field(default_factory=lambda: list(DEFAULT_DURATIONS_S))
    repeats: int = DEFAULT_REPEATS
    chunk_ms: float = DEFAULT_CHUNK_MS
    left_context: Optional[int] = None
    frame_shift_ms: float = 10.0
    warmup: int = 1
    seed: int = 0

    def chunk_spec(self) -> ChunkSpec:
        """Chunk size in post-subsampling frames"""
        frames = max(1, int(self.chunk_ms // (self.frame_shift_ms * self.encoder.subsampling_factor)))
        return ChunkSpec.streaming(frames, self.left_context)

    def to_bench_run(self) -> BenchRun:
        return BenchRun(
            config_id=self.name,
            mixing=self.encoder.mixing.value,
            durations_s=list(self.durations_s),
            repeats=self.repeats,
            frame_shift_ms=self.frame_shift_ms,
            chunk_ms=self.chunk_ms,
            left_context=self.left_context,
            warmup=self.warmup,
            seed=self.seed,
        )


class BenchConfigLoader:
    """Loads and manages benchmark profiles"""

    def __init__(self, config_file: Optional[str] = None):
        """
        Initialize the configuration loader

        Args:
            config_file: Path to the JSON profile file; defaults to SUMMIX_PROFILE_FILE
        """
        if config_file is None:
            config_file = load_runtime_settings().profile_file
        self.config_file = Path(config_file)
        self.config_data: Dict = {}
        self.profiles: Dict[str, BenchProfile] = {}
        self._load_config()

    def _load_config(self) -> None:
        """Load configuration from JSON file"""
        try:
            with open(self.config_file, 'r', encoding='utf-8') as f:
                self.config_data = json.load(f)
        except FileNotFoundError:
            raise SummixIOError(f"Configuration file not found: {self.config_file}")
        except OSError as e:
            raise SummixIOError(f"Cannot read configuration file {self.config_file}: {e}")
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"Invalid JSON in configuration file: {e}")
        self._parse_profiles()
        logger.debug("Loaded %d profiles from %s", len(self.profiles), self.config_file)

    def _parse_profiles(self) -> None:
        """Parse profiles, layering each over profile_defaults"""
        defaults = self.config_data.get("profile_defaults", {})
        encoder_defaults = defaults.get("encoder", {})
        bench_defaults = defaults.get("bench", {})

        for name, data in self.config_data.get("profiles", {}).items():
            encoder_data = {**encoder_defaults, **data.get("encoder", {})}
            bench_data = {**bench_defaults, **data.get("bench", {})}
            try:
                encoder = EncoderConfig.from_dict(encoder_data)
                profile = BenchProfile(
                    name=name,
                    description=data.get("description", ""),
                    encoder=encoder,
                    durations_s=[float(d) for d in bench_data.get("durations_s", DEFAULT_DURATIONS_S)],
                    repeats=int(bench_data.get("repeats", DEFAULT_REPEATS)),
                    chunk_ms=float(bench_data.get("chunk_ms", DEFAULT_CHUNK_MS)),
                    left_context=ChunkSpec.parse_left_context(bench_data.get("left_context", "infinite")),
                    frame_shift_ms=float(bench_data.get("frame_shift_ms", 10.0)),
                    warmup=int(bench_data.get("warmup", 1)),
                    seed=int(bench_data.get("seed", 0)),
                )
            except (TypeError, ValueError) as e:
                raise ConfigurationError(f"Invalid profile {name}: {e}")
            self.profiles[name] = profile

    def get_profiles(self) -> List[str]:
        """Get list of available profile names"""
        return list(self.profiles.keys())

    def get_profile(self, name: str) -> BenchProfile:
        """
        Get one benchmark profile

        Raises:
            ConfigurationError: If the profile does not exist
        """
        if name not in self.profiles:
            raise ConfigurationError(f"Profile not found: {name}. Available: {self.get_profiles()}")
        return self.profiles[name]

    def get_profiles_for_mixing(self, mixing) -> List[str]:
        kind = MixingKind.parse(mixing)
        return [name for name, profile in self.profiles.items() if profile.encoder.mixing is kind]

    def validate_configuration(self) -> Dict[str, List[str]]:
        """
        Check profiles for settings that make measurements unreliable

        Returns:
            Dictionary with validation results
        """
        results = {
            "invalid_configs": [],
            "warnings": []
        }

        for name, profile in self.profiles.items():
            if profile.repeats < 1:
                results["invalid_configs"].append(f"{name}: repeats must be >= 1")
            if any(d <= 0 for d in profile.durations_s):
                results["invalid_configs"].append(f"{name}: non-positive duration")
            if profile.chunk_ms < profile.frame_shift_ms * profile.encoder.subsampling_factor:
                results["invalid_configs"].append(f"{name}: chunk_ms shorter than one encoder frame")

            if profile.repeats < 10:
                results["warnings"].append(f"{name}: only {profile.repeats} repeats, timings will be noisy")
            if profile.left_context is not None:
                results["warnings"].append(f"{name}: finite left context ({profile.left_context} chunks)")

        return results

    def get_config_metadata(self) -> Dict[str, Any]:
        """Get configuration metadata"""
        return self.config_data.get("metadata", {})
