import numpy as np
import pytest

from thomae_lab.context import CurveContext
from thomae_lab.curve import validate_curve
from thomae_lab.harness import random_curve

# One well-spaced curve per genus, shared across the whole session so the
# theta caches are paid for once.
_CURVES = {
    1: [-1.0, 0.0, 1.0],
    2: [1.0, 2.0, 3.0, 4.0, 5.0],
    3: [-3.1, -1.9, -0.4, 0.8, 2.2, 3.7, 5.1],
    4: [-4.2, -3.0, -1.8, -0.7, 0.4, 1.5, 2.9, 4.0, 5.3],
    5: [-5.1, -3.8, -2.5, -1.2, 0.1, 1.3, 2.6, 3.8, 5.0, 6.3, 7.7],
    6: [-6.0, -4.9, -3.7, -2.4, -1.1, 0.2, 1.4, 2.7, 3.9, 5.1, 6.2, 7.5, 8.8],
}


@pytest.fixture(scope="session")
def curve():
    def get(g):
        return validate_curve(g, _CURVES[g], label=f"test-g{g}")

    return get


@pytest.fixture(scope="session")
def ctx(curve):
    cache = {}

    def get(g) -> CurveContext:
        if g not in cache:
            cache[g] = CurveContext.build(curve(g))
        return cache[g]

    return get


@pytest.fixture(scope="session")
def random_ctx():
    cache = {}

    def get(g, seed) -> CurveContext:
        key = (g, seed)
        if key not in cache:
            cache[key] = CurveContext.build(random_curve(g, seed))
        return cache[key]

    return get
