"""
Pytest configuration and fixtures for the laboratory tests.
"""
from pathlib import Path

import numpy as np
import pytest

from bmfl.models.operators import ModelSpec
from bmfl.services.model_service import model_service
from tests.factories import onsite_model, random_dense_model

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def dimer() -> ModelSpec:
    """Two sites, t = 1, U = 1."""
    return onsite_model(2, 1.0, 1.0, name="dimer")


@pytest.fixture
def attractive_dimer() -> ModelSpec:
    """Two sites, t = 1, U = -4."""
    return onsite_model(2, 1.0, -4.0, name="dimer-attractive")


@pytest.fixture
def free_dimer() -> ModelSpec:
    """Two sites, t = 1, no interaction."""
    return onsite_model(2, 1.0, 0.0, name="dimer-free")


@pytest.fixture
def trapped_chain() -> ModelSpec:
    """Four-site chain with a well v_1 = -5 and U = 1."""
    return onsite_model(4, 1.0, 1.0, potential=[-5.0, 0.0, 0.0, 0.0], name="trapped-chain")


@pytest.fixture
def attractive_ring() -> ModelSpec:
    """Three-site ring with attractive pair potential."""
    return model_service.parse_model({
        "name": "ring3",
        "modes": 3,
        "geometry": "ring",
        "hopping": 1.0,
        "two_body": {"kind": "pair_potential", "geometry": "ring", "values": [-1.0, -0.5]},
    })


@pytest.fixture
def random_model(rng) -> ModelSpec:
    return random_dense_model(3, rng)
