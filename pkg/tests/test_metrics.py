import itertools
import math

import numpy as np
import pytest

from bgklab import metrics
from bgklab.torus import ParticleConfig, RandomStream


def random_cloud(rng, m, d=1):
    return rng.uniform(-0.5, 0.5, (m, d)), rng.standard_normal((m, d))


def brute_force_w2_squared(a, b):
    """Exhaustive minimum over all pairings; the independent oracle."""
    pa, va = a
    pb, vb = b
    m = pa.shape[0]
    best = math.inf
    for perm in itertools.permutations(range(m)):
        cost = 0.0
        for i, j in enumerate(perm):
            dx = pa[i] - pb[j]
            dx -= np.floor(dx + 0.5)
            dv = va[i] - vb[j]
            cost += float(dx @ dx + dv @ dv)
        best = min(best, cost / m)
    return best


def test_assignment_identity_and_singleton():
    rng = np.random.default_rng(0)
    cloud = random_cloud(rng, 16, 2)
    assert metrics.w2_assignment(cloud, cloud).value == 0.0
    a = (np.array([[0.3]]), np.array([[0.0]]))
    b = (np.array([[-0.3]]), np.array([[0.0]]))
    res = metrics.w2_assignment(a, b)
    assert res.squared == pytest.approx(0.16)
    assert res.value == pytest.approx(0.4)


def test_assignment_equals_brute_force():
    rng = np.random.default_rng(1)
    for k in range(50):
        m = int(rng.integers(2, 8))
        d = int(rng.integers(1, 3))
        a = random_cloud(rng, m, d)
        b = random_cloud(rng, m, d)
        assert metrics.w2_assignment(a, b).squared == \
            pytest.approx(brute_force_w2_squared(a, b), rel=1e-12)


def test_assignment_symmetry():
    rng = np.random.default_rng(2)
    a = random_cloud(rng, 33, 1)
    b = random_cloud(rng, 33, 1)
    assert metrics.w2_assignment(a, b).squared == metrics.w2_assignment(b, a).squared


def test_assignment_accepts_particle_configs():
    rng = np.random.default_rng(3)
    pa, va = random_cloud(rng, 10, 1)
    pb, vb = random_cloud(rng, 10, 1)
    res1 = metrics.w2_assignment(ParticleConfig(pa, va), ParticleConfig(pb, vb))
    res2 = metrics.w2_assignment((pa, va), (pb, vb))
    assert res1 == res2


def test_assignment_size_cap_and_mismatch():
    rng = np.random.default_rng(4)
    big = random_cloud(rng, 2049, 1)
    with pytest.raises(ValueError, match="sliced"):
        metrics.w2_assignment(big, big)
    with pytest.raises(ValueError):
        metrics.w2_assignment(random_cloud(rng, 4), random_cloud(rng, 5))


def test_triangle_inequality_random_triples():
    rng = np.random.default_rng(5)
    for _ in range(20):
        m = int(rng.integers(2, 65))
        a = random_cloud(rng, m, 1)
        b = random_cloud(rng, m, 1)
        c = random_cloud(rng, m, 1)
        ab = metrics.w2_assignment(a, b).value
        ac = metrics.w2_assignment(a, c).value
        cb = metrics.w2_assignment(c, b).value
        assert ab <= ac + cb + 1e-12


def test_sliced_identity_and_1d_exact():
    rng = RandomStream(6).generator()
    a = rng.standard_normal((64, 1))
    assert metrics.sliced_w2(a, a, 8, rng) == 0.0
    b = rng.standard_normal((64, 1))
    # one dimension: sorted matching is the exact transport
    expected = math.sqrt(float(np.mean((np.sort(a[:, 0]) - np.sort(b[:, 0])) ** 2)))
    assert metrics.sliced_w2(a, b, 3, rng) == pytest.approx(expected)


def test_sliced_gaussian_mean_gap():
    # clouds N(0, I) vs N(e1, I) in D dims: squared sliced distance per
    # projection concentrates near E[(theta . e1)^2] = 1/D
    rng = RandomStream(7).generator()
    d = 4
    m = 256
    vals = []
    for _ in range(10):
        a = rng.standard_normal((m, d))
        b = rng.standard_normal((m, d))
        b[:, 0] += 1.0
        vals.append(metrics.sliced_w2(a, b, 64, rng) ** 2)
    mean = float(np.mean(vals))
    # the sampling-noise floor adds a positive bias on top of 1/D
    assert 0.5 / d < mean < 3.0 / d


def test_i_n_aggregate():
    times = np.array([0.5, 1.0])
    s1 = (times, np.array([1.0, 2.0]))
    s2 = (times, np.array([3.0, 4.0]))
    t, mean, se = metrics.i_n_aggregate([s1, s2])
    np.testing.assert_array_equal(mean, [2.0, 3.0])
    assert se[0] == pytest.approx(1.0)
    t, mean, se = metrics.i_n_aggregate([s1, s1, s1])
    assert np.all(se == 0.0)
    with pytest.raises(ValueError):
        metrics.i_n_aggregate([s1])
    with pytest.raises(ValueError):
        metrics.i_n_aggregate([s1, (times + 0.1, np.array([1.0, 2.0]))])


def test_fit_loglog_exact_power_laws():
    fit = metrics.fit_loglog_slope([(1, 1), (10, 0.1), (100, 0.01)])
    assert fit.slope == pytest.approx(-1.0)
    assert fit.r_squared == pytest.approx(1.0)
    fit = metrics.fit_loglog_slope([(x, 3 * x) for x in (1, 2, 4, 8)])
    assert fit.slope == pytest.approx(1.0)
    assert fit.intercept == pytest.approx(math.log(3))
    assert fit.predict(16) == pytest.approx(48.0)


def test_fit_loglog_validation():
    with pytest.raises(ValueError):
        metrics.fit_loglog_slope([(1, 2), (10, 20)])
    with pytest.raises(ValueError):
        metrics.fit_loglog_slope([(1, 1), (2, -1), (3, 1)])
    with pytest.raises(ValueError):
        metrics.fit_loglog_slope([(1, 1), (1, 2), (3, 1)])
