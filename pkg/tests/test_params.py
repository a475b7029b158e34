import math

import pytest

from sfsketch import SketchParams
from sfsketch.errors import ConfigurationError


def test_defaults_and_w_prime():
    p = SketchParams(d=3, w=10)
    assert p.z == 1 and p.w_prime == 10
    p = SketchParams(d=3, w=10, z=4)
    assert p.w_prime == 40
    p = SketchParams(d=3, w=10, z=2, w_prime=50)
    assert p.w_prime == 50


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(d=0, w=4),
        dict(d=2, w=0),
        dict(d=2, w=4, z=0),
        dict(d=2, w=8, w_prime=4),
        dict(d=2, w=4, master_seed=-1),
    ],
)
def test_invalid_shapes_rejected(kwargs):
    with pytest.raises(ConfigurationError):
        SketchParams(**kwargs)


def test_error_bound_derivation():
    p = SketchParams.from_error_bounds(0.001, 0.05)
    assert p.d == math.ceil(math.log(1 / 0.05))
    assert p.w == math.ceil(math.e / 0.001)
    assert (p.d, p.w) == (3, 2719)


def test_epsilon_delta_must_be_consistent():
    with pytest.raises(ConfigurationError):
        SketchParams(d=5, w=2719, epsilon=0.001, delta=0.05)
    with pytest.raises(ConfigurationError):
        SketchParams(d=3, w=2719, epsilon=0.001)  # delta missing
    with pytest.raises(ConfigurationError):
        SketchParams.from_error_bounds(0.0, 0.05)
    ok = SketchParams(d=3, w=2719, epsilon=0.001, delta=0.05)
    assert ok.epsilon == 0.001


def test_frozen():
    p = SketchParams(d=2, w=4)
    with pytest.raises(Exception):
        p.d = 5
