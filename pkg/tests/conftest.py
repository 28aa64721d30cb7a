import csv
import json

import pytest
from click.testing import CliRunner

from priorlab.config import PriorLabConfig, ProcessingSettings
from priorlab.core.models import bernoulli_model, correlation_model
from priorlab.core.numerics import (
    GAUSS_LEGENDRE,
    TANH_SINH,
    UNIT_INTERVAL,
    ParamDomain,
    build_grid,
)
from priorlab.core.priors import jeffreys_rule_prior, mdip_prior


@pytest.fixture(scope="session")
def bernoulli():
    return bernoulli_model()


@pytest.fixture(scope="session")
def correlation():
    return correlation_model()


@pytest.fixture(scope="session")
def unit_grid():
    return build_grid(UNIT_INTERVAL, 2048, TANH_SINH)


@pytest.fixture(scope="session")
def rho_grid():
    return build_grid(ParamDomain.open_singular(-1.0, 1.0), 2048, GAUSS_LEGENDRE)


@pytest.fixture(scope="session")
def bernoulli_mdip(bernoulli, unit_grid):
    return mdip_prior(bernoulli, unit_grid)


@pytest.fixture(scope="session")
def bernoulli_jeffreys(bernoulli, unit_grid):
    return jeffreys_rule_prior(bernoulli, unit_grid)


@pytest.fixture
def config():
    return PriorLabConfig(processing=ProcessingSettings(show_progress=False))


@pytest.fixture
def cli_runner():
    return CliRunner()


@pytest.fixture
def read_records():
    """Parse a record file written by the CLI (JSON lines or CSV)."""

    def read(path, fmt="json"):
        with open(path, newline="") as f:
            if fmt == "json":
                return [json.loads(line) for line in f if line.strip()]
            return list(csv.reader(f))

    return read
