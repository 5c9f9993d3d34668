import numpy as np
import pytest

from bgklab.torus import (CoupledConfig, ParticleConfig, RandomStream,
                          displacement, squared_distance_phase, wrap)


def test_wrap_basic_values():
    assert wrap([0.0]) == np.array([0.0])
    assert wrap([0.75]) == np.array([-0.25])
    assert wrap([-0.5]) == np.array([-0.5])
    # half-open convention: +1/2 maps to -1/2
    assert wrap([0.5]) == np.array([-0.5])


def test_wrap_idempotent_and_range():
    rng = np.random.default_rng(0)
    p = rng.uniform(-40, 40, (500, 3))
    w = wrap(p)
    assert np.all(w >= -0.5) and np.all(w < 0.5)
    assert np.array_equal(wrap(w), w)


def test_wrap_rejects_nonfinite():
    with pytest.raises(ValueError):
        wrap([np.nan])
    with pytest.raises(ValueError):
        wrap([np.inf, 0.0])


def test_displacement_examples():
    assert displacement([0.4], [-0.4]) == pytest.approx([-0.2])
    assert np.all(displacement([0.3, -0.1], [0.3, -0.1]) == 0.0)
    np.testing.assert_allclose(displacement([0.1, 0.0], [-0.1, 0.0]), [0.2, 0.0])


def test_displacement_antisymmetry_and_bound():
    rng = np.random.default_rng(1)
    for d in (1, 2, 3):
        a = rng.uniform(-0.5, 0.5, (200, d))
        b = rng.uniform(-0.5, 0.5, (200, d))
        dab = displacement(a, b)
        dba = displacement(b, a)
        # antisymmetric except where a component lands exactly on -1/2
        interior = np.all(np.abs(dab) < 0.5 - 1e-12, axis=1)
        np.testing.assert_allclose(dab[interior], -dba[interior], atol=1e-15)
        assert np.all(np.linalg.norm(dab, axis=1) <= np.sqrt(d) / 2 + 1e-15)


def test_displacement_dimension_mismatch():
    with pytest.raises(ValueError):
        displacement([0.1, 0.2], [0.1])


def test_squared_distance_phase():
    assert squared_distance_phase(([0.2], [1.0]), ([0.2], [1.0])) == 0.0
    # torus distance between 0.3 and -0.3 is 0.4
    assert squared_distance_phase(([0.3], [0.0]), ([-0.3], [0.0])) == pytest.approx(0.16)
    assert squared_distance_phase(([0.1, 0.1], [1.0, 0.0]),
                                  ([0.1, 0.1], [0.0, 0.0])) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        squared_distance_phase(([0.1], [0.0]), ([0.1, 0.2], [0.0, 0.0]))


def test_particle_config_validation():
    cfg = ParticleConfig([[0.7]], [[1.0]])
    assert cfg.n == 1 and cfg.dim == 1
    assert cfg.positions[0, 0] == pytest.approx(-0.3)  # wrapped on entry
    with pytest.raises(ValueError):
        ParticleConfig(np.zeros((2, 1)), np.zeros((3, 1)))
    with pytest.raises(ValueError):
        ParticleConfig(np.zeros((1, 4)), np.zeros((1, 4)))
    with pytest.raises(ValueError):
        ParticleConfig([[0.0]], [[np.inf]])


def test_coupled_config_validation():
    a = ParticleConfig(np.zeros((3, 1)), np.ones((3, 1)), time=1.0)
    b = ParticleConfig(np.zeros((3, 1)), np.ones((3, 1)), time=1.0)
    cc = CoupledConfig(a, b)
    assert cc.n == 3
    with pytest.raises(ValueError):
        CoupledConfig(a, ParticleConfig(np.zeros((2, 1)), np.ones((2, 1)), time=1.0))
    with pytest.raises(ValueError):
        CoupledConfig(a, ParticleConfig(np.zeros((3, 1)), np.ones((3, 1)), time=0.5))


def test_random_stream_reproducible_and_independent():
    a = RandomStream(123, 7).generator().random(10 ** 6)
    b = RandomStream(123, 7).generator().random(10 ** 6)
    assert np.array_equal(a, b)
    c = RandomStream(123, 8).generator().random(10 ** 6)
    assert not np.array_equal(a[:1000], c[:1000])
    # correlation of distinct streams is at noise level
    assert abs(np.corrcoef(a, c)[0, 1]) < 5e-3


def test_random_stream_children_distinct():
    base = RandomStream(5, 0)
    kids = {base.child(k).stream_id for k in range(100)}
    assert len(kids) == 100
    assert base.child(3) == base.child(3)
