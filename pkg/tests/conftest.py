import json
import pathlib

import pytest

_ORACLES = pathlib.Path(__file__).parent / "_oracles" / "oracles.json"

# quadrature checkpoint construction is expensive; session-scoped
# engine state lives in a repo-local cache so repeated runs are fast
_CACHE_DIR = pathlib.Path(__file__).parent.parent / ".cache"


def pytest_configure(config):
    import os
    os.environ.setdefault("LADDERLAB_CACHE_DIR", str(_CACHE_DIR))


@pytest.fixture(scope="session")
def oracles():
    return json.loads(_ORACLES.read_text())


@pytest.fixture(scope="session")
def engine():
    from ladderlab import quadrature
    return quadrature.default_engine()


@pytest.fixture(scope="session")
def checkpoints(engine):
    from ladderlab import quadrature
    return quadrature.build_checkpoints()


@pytest.fixture(scope="session")
def phi_model(engine):
    from ladderlab import quadrature
    return quadrature.phi_model()
