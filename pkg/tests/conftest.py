"""Shared fixtures for the whichslit test suite."""

import numpy as np
import pytest

from whichslit.analysis.families import (
    esw_instance,
    family_dim4_mu0,
    family_dim4_sym,
    family_dim6,
    mirror_instance,
    sec6_instance,
)
from whichslit.config import config

_QUARTER = np.array(
    [
        [0.25, -0.25, 0, 0.25, -0.25, 0],
        [-0.25, 0.25, 0, -0.25, 0.25, 0],
        [0, 0, 1, 0, 0, 0],
        [0.25, -0.25, 0, 0.25, -0.25, 0],
        [-0.25, 0.25, 0, -0.25, 0.25, 0],
        [0, 0, 0, 0, 0, 1],
    ],
    dtype=complex,
)

SOLUTIONS = {
    "dim6": lambda: family_dim6(0.25, 0.0),
    "dim4-mu0": lambda: family_dim4_mu0(2.0, 0.5, theta=0.4),
    "sec6": lambda: sec6_instance().instance,
    "dim4-sym": lambda: family_dim4_sym(0.25, 0.0),
    "dim4-sym-mirror": lambda: mirror_instance(family_dim4_sym(0.25, 0.0)),
    "dim6-mirror": lambda: mirror_instance(family_dim6(0.1, 0.0)),
}


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    """Keep environment overrides and in-memory config edits from leaking between tests."""
    monkeypatch.delenv("WHICHSLIT_TOL", raising=False)
    monkeypatch.delenv("WHICHSLIT_MAX_DIM", raising=False)
    saved = {section: dict(config.config.get(section, {})) for section in ("tolerances", "limits")}
    services = {name: config.get_service_config(name) for name in ("solver", "screen", "sampler", "cache")}
    yield
    for section, values in saved.items():
        config.config[section] = values
    for name, values in services.items():
        config.config["services"][name] = values


@pytest.fixture
def quarter_matrix():
    """Rank-3 projector with entries in {±1/4, 0, 1}."""
    return _QUARTER.copy()


@pytest.fixture
def quarter_instance():
    return family_dim6(0.25, 0.0)


@pytest.fixture
def sym_instance():
    return family_dim4_sym(0.25, 0.0)


@pytest.fixture
def sec6():
    return sec6_instance()


@pytest.fixture
def esw():
    return esw_instance()


@pytest.fixture(params=sorted(SOLUTIONS))
def solution(request):
    """Each packaged solution of the detector problem in turn."""
    return SOLUTIONS[request.param]()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
