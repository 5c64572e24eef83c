import math

import numpy as np
import pytest

from cubewalk.walks import CoinParams, WalkSpec


def rng_for(seed):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def random_coins(rng, n, with_phases=False):
    thetas = rng.uniform(0.0, math.pi, n)
    phis = rng.uniform(0.0, math.pi, n) if with_phases else np.zeros(n)
    lams = rng.uniform(0.0, math.pi, n) if with_phases else np.zeros(n)
    return tuple(CoinParams(t, p, l) for t, p, l in zip(thetas, phis, lams))


def random_spec(rng, n, q=1, order="ascending", kind="quantum", with_phases=None):
    if with_phases is None:
        with_phases = q >= 2 and kind == "quantum"
    return WalkSpec(n, random_coins(rng, n, with_phases), q=q, order=order, kind=kind)


@pytest.fixture
def rng():
    return rng_for(20260811)
