import numpy as np
import pytest

from posecodes.config import PipelineConfig
from posecodes.defaults import (
    load_binning_specs,
    load_eligibility,
    load_posecode_defs,
    load_support_roles,
    load_super_posecodes,
    load_template_bank,
)
from posecodes.pipeline import Engine


@pytest.fixture(scope="session")
def defs():
    return load_posecode_defs()


@pytest.fixture(scope="session")
def specs():
    return load_binning_specs()


@pytest.fixture(scope="session")
def super_defs():
    return load_super_posecodes()


@pytest.fixture(scope="session")
def roles():
    return load_support_roles()


@pytest.fixture(scope="session")
def eligibility():
    return load_eligibility()


@pytest.fixture(scope="session")
def bank():
    return load_template_bank()


@pytest.fixture(scope="session")
def engine():
    return Engine(PipelineConfig())


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
