"""Smeared empirical hydrodynamic fields of a particle configuration.

For a configuration and smearing function phi, the fields at a point x are
    rho = (1/N) sum_j phi(x - x_j)
    u   = sum_j phi(x - x_j) v_j / sum_j phi(x - x_j)
    T   = sum_j phi(x - x_j) |v_j - u|^2 / (d sum_j phi(x - x_j))
with the minimal-image displacement on the torus.  The temperature uses the
two-pass centered form (first u, then the centered second moment).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .mollifier import MollifierSpec
from .torus import ParticleConfig, wrap


@dataclass(frozen=True)
class HydroFields:
    """Density, bulk velocity, temperature at one point."""

    rho: float
    u: np.ndarray
    t: float


@dataclass(frozen=True)
class HydroFieldsGrid:
    """Fields tabulated on a batch of points: rho (G,), u (G, d), t (G,)."""

    rho: np.ndarray
    u: np.ndarray
    t: np.ndarray

    def at(self, i: int) -> HydroFields:
        return HydroFields(float(self.rho[i]), self.u[i].copy(), float(self.t[i]))


def eval_empirical(cfg: ParticleConfig, spec: MollifierSpec, x) -> HydroFields:
    """Smeared empirical fields of cfg at torus point x."""
    if spec.dim != cfg.dim:
        raise ValueError("smearing spec dimension does not match the configuration")
    x = np.ascontiguousarray(wrap(np.asarray(x, dtype=float)).reshape(cfg.dim))
    kind, eps, amp = spec.kernel_params
    wsum, u, t = kernels.point_fields(cfg.positions, cfg.velocities, x, kind, eps, amp)
    return HydroFields(wsum / cfg.n, u, t)


def eval_empirical_grid(cfg: ParticleConfig, spec: MollifierSpec, xnodes) -> HydroFieldsGrid:
    """Batched eval_empirical; node i matches the pointwise call bit for bit."""
    if spec.dim != cfg.dim:
        raise ValueError("smearing spec dimension does not match the configuration")
    xnodes = np.ascontiguousarray(np.atleast_2d(np.asarray(xnodes, dtype=float)))
    if xnodes.shape[1] != cfg.dim:
        raise ValueError("grid node dimension mismatch")
    kind, eps, amp = spec.kernel_params
    wsum, u, t = kernels.grid_fields(cfg.positions, cfg.velocities, wrap(xnodes),
                                     kind, eps, amp)
    return HydroFieldsGrid(wsum / cfg.n, u, t)


class MaxwellianPhaseSampler:
    """Phase-space density uniform in x with a fixed Gaussian velocity law.

    Its smeared bulk velocity and temperature are (u, t) exactly, for every
    smearing function, which makes it the reference law for sampling-error
    measurements.
    """

    def __init__(self, u, t: float):
        self.u = np.atleast_1d(np.asarray(u, dtype=float))
        self.t = float(t)

    @property
    def dim(self) -> int:
        return self.u.shape[0]

    def sample(self, rng: np.random.Generator, n: int):
        pos = rng.uniform(-0.5, 0.5, (n, self.dim))
        vel = self.u + np.sqrt(self.t) * rng.standard_normal((n, self.dim))
        return pos, vel

    def smeared_fields(self, spec: MollifierSpec, x):
        return self.u.copy(), self.t


def lln_field_error(sampler, spec: MollifierSpec, n: int, x, rng: np.random.Generator) -> float:
    """|u_N - u_ref|^2 + (T_N - T_ref)^2 for one draw of n i.i.d. particles.

    The reference fields come from the sampler's own law; averaged over
    replicas the error decays like 1/n.
    """
    pos, vel = sampler.sample(rng, n)
    cfg = ParticleConfig(pos, vel)
    h = eval_empirical(cfg, spec, x)
    u_ref, t_ref = sampler.smeared_fields(spec, x)
    du = h.u - u_ref
    return float(du @ du + (h.t - t_ref) ** 2)
