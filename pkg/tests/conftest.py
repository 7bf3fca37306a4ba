import os

import pytest

from eepc.bch import make_code
from eepc.distributions import weight_distribution

# transition tables are cached here so repeated runs skip the builds
CACHE_DIR = os.path.join(os.path.dirname(__file__), "..", ".cache")
os.environ.setdefault("EEPC_CACHE_DIR", CACHE_DIR)

SLOW_ENABLED = os.environ.get("EEPC_SLOW", "") not in ("", "0")

requires_slow = pytest.mark.skipif(
    not SLOW_ENABLED, reason="long-running; set EEPC_SLOW=1 to enable"
)


def pytest_configure(config):
    os.makedirs(CACHE_DIR, exist_ok=True)


@pytest.fixture(scope="session")
def code15():
    return make_code(4, 2)


@pytest.fixture(scope="session")
def tables15(code15):
    return weight_distribution(code15)


@pytest.fixture(scope="session")
def cache_dir():
    return CACHE_DIR
