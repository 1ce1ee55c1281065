import math

import pytest

from vortex_tunneling.params import SimulationParams
from vortex_tunneling.pulse import make_pulse


@pytest.fixture
def small_params():
    return SimulationParams(l_x=3.0, l_y=30.0, n_kx=6, n_ky=3, tol=1e-11)


@pytest.fixture
def strong_pulse():
    tp = 2.0
    return make_pulse("bipolar-derivative", 0.3, 0.5, tp, 0.0, e_offset=tp / math.sqrt(2))
