import os

import numpy as np
import pytest

from qbist.sic_core import known_fiducial, orbit, search_fiducial


def pytest_collection_modifyitems(config, items):
    if os.environ.get("QBIST_SLOW"):
        return
    skip = pytest.mark.skip(reason="opt-in; set QBIST_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


_SICS = {}


def get_sic(d, t=0.0):
    key = (d, t)
    if key not in _SICS:
        fid = known_fiducial(d, t) if d <= 3 else search_fiducial(d, seed=1, restarts=20)
        _SICS[key] = orbit(fid)
    return _SICS[key]


@pytest.fixture(params=[2, 3, 4, 5], ids=lambda d: f"d{d}")
def sic(request):
    return get_sic(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
