import math

import numpy as np
import pytest
from scipy.stats import chi2

from bgklab import mollifier as mo
from bgklab.torus import RandomStream

ALL_SPECS = [
    mo.MollifierSpec("uniform", 1),
    mo.MollifierSpec("uniform", 2),
    mo.MollifierSpec("bump", 1, 0.4),
    mo.MollifierSpec("bump", 1, 0.2),
    mo.MollifierSpec("bump", 1, 0.05),
    mo.MollifierSpec("bump", 2, 0.3),
]


def _c1_independent():
    """1-d bump normalization by plain trapezoid, independent of the module."""
    z = np.linspace(-0.5, 0.5, 200001)
    f = np.zeros_like(z)
    inside = np.abs(2 * z) < 1
    f[inside] = np.exp(-1.0 / (1.0 - (2 * z[inside]) ** 2))
    return 1.0 / np.trapezoid(f, z)


def test_spec_validation():
    with pytest.raises(ValueError):
        mo.MollifierSpec("box", 1)
    with pytest.raises(ValueError):
        mo.MollifierSpec("bump", 1)           # missing epsilon
    with pytest.raises(ValueError):
        mo.MollifierSpec("bump", 1, 1.5)
    with pytest.raises(ValueError):
        mo.MollifierSpec("uniform", 1, 0.2)   # epsilon not allowed


def test_serialization_roundtrip():
    spec = mo.MollifierSpec("bump", 1, 0.2)
    assert mo.MollifierSpec.from_dict(spec.to_dict(), 1) == spec
    u = mo.MollifierSpec("uniform", 2)
    assert mo.MollifierSpec.from_dict(u.to_dict(), 2) == u


def test_evaluate_uniform_is_one():
    spec = mo.MollifierSpec("uniform", 2)
    assert mo.evaluate(spec, [0.3, -0.4]) == 1.0


def test_evaluate_bump_outside_support():
    # outside the scaled support the value is the constant eps/(1+eps)
    spec = mo.MollifierSpec("bump", 1, 0.2)
    assert mo.evaluate(spec, [0.1]) == pytest.approx(0.2 / 1.2)
    assert mo.evaluate(spec, [0.45]) == pytest.approx(1.0 / 6.0)


def test_evaluate_bump_at_origin_matches_substitution():
    eps = 0.25
    spec = mo.MollifierSpec("bump", 1, eps)
    phimax = _c1_independent() * math.exp(-1.0)
    expected = (eps + phimax / eps) / (1.0 + eps)
    assert mo.evaluate(spec, [0.0]) == pytest.approx(expected, rel=1e-8)


def test_evaluate_even_exactly():
    spec = mo.MollifierSpec("bump", 2, 0.3)
    rng = np.random.default_rng(2)
    x = rng.uniform(-0.5, 0.5, (50, 2))
    np.testing.assert_array_equal(mo.evaluate(spec, x), mo.evaluate(spec, -x))


@pytest.mark.parametrize("spec", ALL_SPECS, ids=str)
def test_unit_mass_by_quadrature(spec):
    assert mo.quadrature_mass(spec) == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("spec", ALL_SPECS, ids=str)
def test_strict_positivity(spec):
    rng = np.random.default_rng(3)
    x = rng.uniform(-0.5, 0.5, (200, spec.dim))
    assert np.all(mo.evaluate(spec, x) > 0)


def test_constants_uniform():
    c = mo.constants(mo.MollifierSpec("uniform", 1))
    assert (c.c_phi, c.sup_phi, c.sup_grad_phi) == (1.0, 1.0, 0.0)
    assert c.gamma_phi == 4.0


def test_constants_bump_min_is_constant_branch():
    c = mo.constants(mo.MollifierSpec("bump", 1, 0.5))
    assert c.c_phi == pytest.approx(3.0)


@pytest.mark.parametrize("spec", ALL_SPECS, ids=str)
def test_gamma_at_least_four(spec):
    assert mo.constants(spec).gamma_phi >= 4.0


def test_constants_match_grid_extrema():
    # analytic sup / min agree with a dense scan of evaluate
    spec = mo.MollifierSpec("bump", 1, 0.3)
    c = mo.constants(spec)
    x = np.linspace(-0.5, 0.5, 100001)[:-1][:, None]
    vals = mo.evaluate(spec, x)
    assert vals.max() == pytest.approx(c.sup_phi, rel=1e-6)
    assert 1.0 / vals.min() == pytest.approx(c.c_phi, rel=1e-12)
    grad = np.abs(np.gradient(vals, x[:, 0]))
    assert grad.max() == pytest.approx(c.sup_grad_phi, rel=1e-3)


def test_family_scaling_bounds():
    # sup*eps^d, grad*eps^(d+1), c_phi*eps stay within fixed constants
    eps_list = [0.4, 0.2, 0.1, 0.05, 0.025]
    sup_s, grad_s, c_s = [], [], []
    for eps in eps_list:
        c = mo.constants(mo.MollifierSpec("bump", 1, eps))
        sup_s.append(c.sup_phi * eps)
        grad_s.append(c.sup_grad_phi * eps ** 2)
        c_s.append(c.c_phi * eps)
    for seq in (sup_s, grad_s, c_s):
        assert max(seq) <= 4.0 * min(seq)
        assert max(seq) < 20.0


def test_sample_shift_uniform_mean():
    spec = mo.MollifierSpec("uniform", 2)
    rng = RandomStream(11).generator()
    draws = mo.sample_shifts(spec, rng, 10 ** 5)
    sigma = math.sqrt(1.0 / 12.0 / 10 ** 5)
    assert np.all(np.abs(draws.mean(axis=0)) < 3 * sigma)


def test_sample_shift_bump_tail_fraction():
    # constant branch integrates to eps(1 - eps)/(1 + eps) outside the support
    eps = 0.2
    spec = mo.MollifierSpec("bump", 1, eps)
    rng = RandomStream(12).generator()
    n = 10 ** 5
    draws = mo.sample_shifts(spec, rng, n)
    frac = float(np.mean(np.abs(draws[:, 0]) > eps / 2))
    expected = eps * (1 - eps) / (1 + eps)
    assert abs(frac - expected) < 4 * math.sqrt(expected * (1 - expected) / n)


def test_sample_shift_odd_moments_vanish():
    spec = mo.MollifierSpec("bump", 1, 0.4)
    rng = RandomStream(13).generator()
    draws = mo.sample_shifts(spec, rng, 10 ** 5)[:, 0]
    for p in (1, 3):
        m = np.mean(draws ** p)
        se = np.std(draws ** p) / math.sqrt(len(draws))
        assert abs(m) < 4 * se


def test_sample_shift_scalar_matches_density_chi2():
    spec = mo.MollifierSpec("bump", 1, 0.3)
    rng = RandomStream(14).generator()
    n = 10 ** 5
    draws = mo.sample_shifts(spec, rng, n)[:, 0]
    bins = np.linspace(-0.5, 0.5, 33)
    counts, _ = np.histogram(draws, bins)
    fine = np.linspace(-0.5, 0.5, 32 * 200 + 1)[:-1] + 0.5 / (32 * 200)
    dens = mo.evaluate(spec, fine[:, None]).reshape(32, 200)
    expected = dens.mean(axis=1) * (1.0 / 32) * n
    stat = float(((counts - expected) ** 2 / expected).sum())
    assert stat < chi2.ppf(0.99, 31)


def test_sample_shift_single_draws_reproducible():
    spec = mo.MollifierSpec("bump", 1, 0.2)
    a = [mo.sample_shift(spec, RandomStream(9, k).generator()) for k in range(5)]
    b = [mo.sample_shift(spec, RandomStream(9, k).generator()) for k in range(5)]
    assert all(np.array_equal(x, y) for x, y in zip(a, b))


def test_convolve_uniform_gives_mean():
    spec = mo.MollifierSpec("uniform", 1)
    f = 1.0 + 0.3 * np.sin(2 * np.pi * (np.arange(64) / 64 - 0.5))
    out = mo.convolve_grid(spec, f)
    np.testing.assert_allclose(out, f.mean(), rtol=1e-14)


def test_convolve_constant_field_unchanged():
    spec = mo.MollifierSpec("bump", 1, 0.2)
    out = mo.convolve_grid(spec, np.full(128, 2.5))
    np.testing.assert_allclose(out, 2.5, rtol=1e-13)


def test_convolve_mass_and_positivity():
    rng = np.random.default_rng(4)
    f = rng.random(256) + 1e-3
    spec = mo.MollifierSpec("bump", 1, 0.1)
    out = mo.convolve_grid(spec, f)
    assert np.all(out > 0)
    assert abs(out.sum() - f.sum()) <= 1e-10 * f.sum()


def test_convolve_2d_mass_and_shape():
    rng = np.random.default_rng(5)
    f = rng.random((32, 32)) + 0.1
    spec = mo.MollifierSpec("bump", 2, 0.3)
    out = mo.convolve_grid(spec, f)
    assert out.shape == f.shape
    assert np.all(out > 0)
    assert abs(out.sum() - f.sum()) <= 1e-10 * f.sum()


def test_convolve_dimension_mismatch():
    spec = mo.MollifierSpec("bump", 2, 0.3)
    with pytest.raises(ValueError):
        mo.convolve_grid(spec, np.ones(16))


def test_convolution_error_linear_in_eps():
    # |phi_eps * J - J| scales like eps on a smooth test function
    nx = 512
    x = -0.5 + np.arange(nx) / nx
    j = 1.0 + 0.5 * np.sin(2 * np.pi * x) + 0.2 * np.cos(4 * np.pi * x)
    errs = []
    eps_list = [0.4, 0.2, 0.1, 0.05]
    for eps in eps_list:
        out = mo.convolve_grid(mo.MollifierSpec("bump", 1, eps), j)
        errs.append(float(np.max(np.abs(out - j))))
    slope = np.polyfit(np.log(eps_list), np.log(errs), 1)[0]
    assert 0.8 <= slope <= 1.2
