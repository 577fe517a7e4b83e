import pytest

from src.services.config import Config, config_from_dict
from src.services.profile import estimate
from src.services.sizing import resolve_params


@pytest.fixture(scope="session")
def default_config() -> Config:
    return Config()


@pytest.fixture(scope="session")
def default_params(default_config):
    return resolve_params(default_config)


@pytest.fixture(scope="session")
def default_report(default_config):
    return estimate(default_config)


@pytest.fixture(scope="session")
def small_config() -> Config:
    return config_from_dict({"problem": {"N": 24}})
