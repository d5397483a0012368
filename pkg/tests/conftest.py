import os
import tempfile

# The global settings object is created at import; point it at a scratch file first.
_SETTINGS_DIR = tempfile.mkdtemp(prefix="twosite-test-")
os.environ["TWOSITE_CONFIG_PATH"] = os.path.join(_SETTINGS_DIR, "twosite.cfg")

import numpy as np  # noqa: E402
import pytest  # noqa: E402

from twosite.baths import BathSpec, SpectralDensity, Statistics, rate_set  # noqa: E402
from twosite.dynamics import build_liouvillian  # noqa: E402
from twosite.model import SystemParams, diagonalize  # noqa: E402

OHMIC = SpectralDensity(kappa=1.0, exponent=1.0)


def make_setup(h, delta, t1, t2, model="global", statistics=Statistics.QUANTUM, spectral=OHMIC):
    """(params, eig, rates, liouvillian) for one parameter set."""
    params = SystemParams(h=h, delta=delta)
    eig = diagonalize(params)
    rates = rate_set(eig, BathSpec(t1, spectral, statistics), BathSpec(t2, spectral, statistics))
    return params, eig, rates, build_liouvillian(model, params, eig, rates)


def random_draws(rng, count, h=(0.1, 2.0), delta=(0.1, 1.0), temperature=(0.1, 2.0)):
    """Moderate (h, delta, t1, t2) tuples keeping every rate well away from underflow."""
    return [(rng.uniform(*h), rng.uniform(*delta), rng.uniform(*temperature), rng.uniform(*temperature))
            for _ in range(count)]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def reference_setup():
    """h=1, delta=0.5, kappa=1, k_B T1=1, k_B T2=0.5, global model."""
    return make_setup(1.0, 0.5, 1.0, 0.5)


@pytest.fixture
def settings(tmp_path):
    from twosite.config import TwoSiteConfig
    return TwoSiteConfig(str(tmp_path / "settings.cfg"))
