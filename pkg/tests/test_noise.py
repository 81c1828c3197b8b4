import numpy as np
import pytest

from volmem.noise import NoiseSource


def test_same_seed_bit_identical():
    a = NoiseSource(123).gaussians(10_000)
    b = NoiseSource(123).gaussians(10_000)
    assert (a == b).all()


def test_different_seeds_differ():
    assert not (NoiseSource(1).gaussians(100) == NoiseSource(2).gaussians(100)).all()


def test_prefix_property():
    # the first n draws do not depend on how many are requested
    full = NoiseSource(7).gaussians(5000)
    assert (NoiseSource(7).gaussians(100) == full[:100]).all()


def test_moments_within_5_sigma():
    n = 1_000_000
    x = NoiseSource(99).gaussians(n)
    se_mean = 1.0 / np.sqrt(n)
    se_var = np.sqrt(2.0 / n)
    assert abs(x.mean()) < 5 * se_mean
    assert abs(x.var() - 1.0) < 5 * se_var


def test_seed_validation():
    with pytest.raises(ValueError):
        NoiseSource(-1)
    with pytest.raises(ValueError):
        NoiseSource(2**64)
    NoiseSource(2**64 - 1)  # max value is fine
