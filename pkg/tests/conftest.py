import json
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("ballfield", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ballfield")

ORACLES = Path(__file__).parent / "oracles" / "frozen.json"


@pytest.fixture(scope="session")
def oracle():
    """Reference values computed in mpmath by tests/oracles/make_oracles.py."""
    return json.loads(ORACLES.read_text())
