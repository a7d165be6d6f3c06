import sys
from pathlib import Path

import pytest

# Ensure project root is on sys.path for tests.
ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from delta_identity.models import IntegrationConfig, IntegrationMethod  # noqa: E402


@pytest.fixture
def exact_cfg() -> IntegrationConfig:
    """Closed forms where available, tight quadrature otherwise."""
    return IntegrationConfig(method=IntegrationMethod.EXACT, epsabs=1e-12, epsrel=1e-10)


@pytest.fixture
def quad_cfg() -> IntegrationConfig:
    """Adaptive quadrature even where a closed form exists."""
    return IntegrationConfig(method=IntegrationMethod.QUADRATURE, epsabs=1e-12, epsrel=1e-10)


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(12345)
