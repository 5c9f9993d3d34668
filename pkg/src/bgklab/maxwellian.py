"""Isotropic Gaussian velocity densities, exact sampling, the closed-form
squared 2-Wasserstein distance between two of them, and the optimal-map
coupled draw used by the coupled jump process."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class DegenerateTemperature(ValueError):
    """Raised when a density value is requested at temperature zero; callers
    handle the Dirac branch themselves."""


@dataclass(frozen=True)
class MaxwellianParams:
    """Mean velocity u and scalar temperature t (variance per component).

    t == 0 is allowed and marks the degenerate Dirac case.
    """

    u: np.ndarray
    t: float

    def __post_init__(self):
        object.__setattr__(self, "u", np.atleast_1d(np.asarray(self.u, dtype=float)))
        if self.t < 0:
            raise ValueError("temperature must be nonnegative")

    @property
    def dim(self) -> int:
        return self.u.shape[0]


def density(p: MaxwellianParams, v) -> float:
    """(2 pi t)^(-d/2) exp(-|v - u|^2 / (2 t)); t must be positive."""
    if p.t == 0.0:
        raise DegenerateTemperature("density undefined at t == 0 (Dirac case)")
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if v.shape != p.u.shape:
        raise ValueError("velocity dimension mismatch")
    dv = v - p.u
    return float((2.0 * math.pi * p.t) ** (-p.dim / 2.0) * math.exp(-(dv @ dv) / (2.0 * p.t)))


def sample(p: MaxwellianParams, rng: np.random.Generator, size: int | None = None):
    """Draw from the density: i.i.d. Gaussian components, or exactly u when
    t == 0 (no stream consumption in the Dirac branch)."""
    if p.t == 0.0:
        return p.u.copy() if size is None else np.tile(p.u, (size, 1))
    shape = (p.dim,) if size is None else (size, p.dim)
    return p.u + math.sqrt(p.t) * rng.standard_normal(shape)


def w2_squared(a: MaxwellianParams, b: MaxwellianParams) -> float:
    """|u_a - u_b|^2 + d (sqrt(t_a) - sqrt(t_b))^2, extended to t = 0."""
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    du = a.u - b.u
    return float(du @ du + a.dim * (math.sqrt(a.t) - math.sqrt(b.t)) ** 2)


def coupled_sample(a: MaxwellianParams, b: MaxwellianParams,
                   rng: np.random.Generator, size: int | None = None):
    """Pair (v, w) with marginals a and b whose mean squared gap attains
    w2_squared: the monotone map w = u_b + sqrt(t_b/t_a)(v - u_a), realized
    by sharing the standard normal draw.  If exactly one side is degenerate
    the product coupling is used (it is optimal against a Dirac)."""
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    shape = (a.dim,) if size is None else (size, a.dim)
    if a.t == 0.0 and b.t == 0.0:
        eta = np.zeros(shape)
    else:
        eta = rng.standard_normal(shape)
    v = a.u + math.sqrt(a.t) * eta
    w = b.u + math.sqrt(b.t) * eta
    return v, w
