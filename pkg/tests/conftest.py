import warnings

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "quadwalks", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("quadwalks")

# a few root-finding and quadrature steps overflow harmlessly near infinity
warnings.filterwarnings("ignore", category=RuntimeWarning)

# one representative per subcase, with a weight factor z |S| at which the
# period ratio is not a small fraction
SUBCASE_REPS = {
    "I.A": ("-1,0;-1,1;1,-1;1,1", 0.4),
    "I.B": ("-1,0;-1,1;0,-1;1,1", 0.4),
    "I.C": ("-1,1;0,-1;0,1;1,0;1,1", 0.4),
    "II.A": ("-1,0;0,1;1,-1;1,1", 0.4),
    "II.B": ("-1,-1;-1,0;0,1;1,0", 0.4),
    "II.C": ("-1,0;0,-1;0,1;1,1", 0.4),
    "II.D": ("-1,0;-1,1;0,1;1,-1", 0.4),
    "III": ("-1,-1;-1,0;0,-1;1,1", 0.4),
}


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def infinite_models():
    from quadwalks.models import infinite_group_models

    return infinite_group_models()


@pytest.fixture(scope="session")
def finite_taxa():
    from quadwalks.models import taxonomy

    return [t for t in taxonomy() if not t.singular and t.order != "Infinite"]
