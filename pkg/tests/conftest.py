"""
Shared fixtures: seeded generators and tiny encoder configurations
"""
from pathlib import Path

import numpy as np
import pytest

from src.encoder import EncoderConfig

FIXTURES_DIR = Path(__file__).parent / "fixtures"


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def fixtures_dir():
    return FIXTURES_DIR


def tiny_config(mixing="summary_mixing", **overrides) -> EncoderConfig:
    """Small encoder used across unit and integration tests"""
    values = dict(d_model=8, mixing=mixing, num_blocks=2, num_heads=2, conv_kernel=3,
                  ffn_expansion=2.0, feat_dim=6, subsampling_factor=1, precision="f64")
    values.update(overrides)
    return EncoderConfig(**values)


@pytest.fixture
def tiny_sm_config():
    return tiny_config("summary_mixing")


@pytest.fixture
def tiny_mhsa_config():
    return tiny_config("mhsa")
