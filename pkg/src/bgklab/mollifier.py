"""Smearing kernels on the torus: the uniform density and the compact
bump family phi_eps(x) = (eps + eps^-d Phi(x/eps)) / (1 + eps).

The base profile Phi is the standard C-infinity bump supported in the
Euclidean ball of radius 1/2, Phi(z) = c_d exp(-1/(1-|2z|^2)), normalized to
unit mass; every family member is strictly positive, even, and has unit mass
on the torus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import quad

from . import kernels
from .torus import wrap

_SURFACE = {1: 2.0, 2: 2.0 * math.pi, 3: 4.0 * math.pi}
_base_cache: dict = {}


def _base_profile_constants(dim: int):
    """(normalization c_d, sup Phi, sup |grad Phi|) of the base bump."""
    if dim not in _base_cache:
        val = quad(lambda r: r ** (dim - 1) * math.exp(-1.0 / (1.0 - 4.0 * r * r)),
                   0.0, 0.5, epsabs=1e-14, epsrel=1e-12)[0]
        c = 1.0 / (_SURFACE[dim] * val) if dim > 1 else 1.0 / (2.0 * val)
        r = np.linspace(0.0, 0.5, 400001)[:-1]
        s = 4.0 * r * r
        grad = c * np.exp(-1.0 / (1.0 - s)) * 8.0 * r / (1.0 - s) ** 2
        _base_cache[dim] = (c, c * math.exp(-1.0), float(grad.max()))
    return _base_cache[dim]


@dataclass(frozen=True)
class MollifierSpec:
    """A smearing function: kind "uniform" or "bump" (with width epsilon)."""

    kind: str
    dim: int
    epsilon: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("uniform", "bump"):
            raise ValueError(f"unknown smearing kind {self.kind!r}")
        if self.dim not in (1, 2, 3):
            raise ValueError("dim must be 1, 2 or 3")
        if self.kind == "bump":
            if self.epsilon is None or not (0.0 < self.epsilon <= 1.0):
                raise ValueError("bump kind needs epsilon in (0, 1]")
        elif self.epsilon is not None:
            raise ValueError("uniform kind takes no epsilon")

    @property
    def kind_code(self) -> int:
        return kernels.KIND_UNIFORM if self.kind == "uniform" else kernels.KIND_BUMP

    @property
    def kernel_params(self):
        """(kind_code, eps, amp) triple consumed by the hot kernels."""
        if self.kind == "uniform":
            return kernels.KIND_UNIFORM, 1.0, 0.0
        amp = _base_profile_constants(self.dim)[0]
        return kernels.KIND_BUMP, float(self.epsilon), amp

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "bump":
            d["epsilon"] = self.epsilon
        return d

    @staticmethod
    def from_dict(d: dict, dim: int) -> "MollifierSpec":
        return MollifierSpec(d["kind"], dim, d.get("epsilon"))


@dataclass(frozen=True)
class MollifierConstants:
    """Extremal constants of a smearing function and their product bound."""

    c_phi: float          # 1 / min phi
    sup_phi: float        # sup phi
    sup_grad_phi: float   # sup |grad phi|
    gamma_phi: float      # (1 + c^8)(1 + sup^8)(1 + grad^2)


def evaluate(spec: MollifierSpec, x) -> np.ndarray:
    """Smearing value at torus point(s) x; x has shape (d,) or (G, d)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[-1] != spec.dim:
        raise ValueError("point dimension does not match the spec")
    z = wrap(x)
    r2 = np.einsum("ij,ij->i", z, z)
    kind, eps, amp = spec.kernel_params
    out = kernels.phi_of_r2_numpy(r2, kind, eps, amp, spec.dim)
    return out[0] if out.shape == (1,) else out


def constants(spec: MollifierSpec) -> MollifierConstants:
    """Extremal constants, analytic for both shipped kinds."""
    if spec.kind == "uniform":
        c, sup, grad = 1.0, 1.0, 0.0
    else:
        eps = spec.epsilon
        _, phimax, gradmax = _base_profile_constants(spec.dim)
        c = (1.0 + eps) / eps                              # min is eps/(1+eps)
        sup = (eps + eps ** (-spec.dim) * phimax) / (1.0 + eps)
        grad = eps ** (-(spec.dim + 1)) * gradmax / (1.0 + eps)
    gamma = (1.0 + c ** 8) * (1.0 + sup ** 8) * (1.0 + grad ** 2)
    return MollifierConstants(c, sup, grad, gamma)


def sample_shift(spec: MollifierSpec, rng: np.random.Generator) -> np.ndarray:
    """One draw from the smearing density (rejection against the uniform
    envelope scaled by sup phi)."""
    if spec.kind == "uniform":
        return rng.uniform(-0.5, 0.5, spec.dim)
    sup = constants(spec).sup_phi
    kind, eps, amp = spec.kernel_params
    while True:
        z = rng.uniform(-0.5, 0.5, spec.dim)
        u = rng.random()
        r2 = float(z @ z)
        if u * sup <= kernels.phi_of_r2_numpy(np.array([r2]), kind, eps, amp, spec.dim)[0]:
            return z


def sample_shifts(spec: MollifierSpec, rng: np.random.Generator, n: int) -> np.ndarray:
    """n independent draws, block-rejection variant of sample_shift."""
    if spec.kind == "uniform":
        return rng.uniform(-0.5, 0.5, (n, spec.dim))
    sup = constants(spec).sup_phi
    kind, eps, amp = spec.kernel_params
    out = np.empty((n, spec.dim))
    filled = 0
    while filled < n:
        block = max(int(1.2 * (n - filled) * sup) + 16, 64)
        z = rng.uniform(-0.5, 0.5, (block, spec.dim))
        u = rng.random(block)
        r2 = np.einsum("ij,ij->i", z, z)
        acc = z[u * sup <= kernels.phi_of_r2_numpy(r2, kind, eps, amp, spec.dim)]
        take = min(len(acc), n - filled)
        out[filled:filled + take] = acc[:take]
        filled += take
    return out


def kernel_on_grid(spec: MollifierSpec, nx: int) -> np.ndarray:
    """Smearing function sampled at grid offsets k/nx, normalized so the
    discrete mass (cell volume nx^-d times the sum) is exactly one."""
    offs = wrap(np.arange(nx) / nx)
    grids = np.meshgrid(*([offs] * spec.dim), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    k = np.asarray(evaluate(spec, pts), dtype=float).reshape((nx,) * spec.dim)
    return k / (k.sum() / nx ** spec.dim)


def convolve_grid(spec: MollifierSpec, field: np.ndarray) -> np.ndarray:
    """Periodic convolution of a spatial grid field with the smearing
    function (trapezoid weights; discrete kernel normalized to unit mass, so
    total mass is preserved).  Direct circulant sums for d <= 2 keep
    positivity bit-exact; d = 3 uses FFT with a clip at zero."""
    field = np.asarray(field, dtype=float)
    if field.ndim != spec.dim:
        raise ValueError(f"field has {field.ndim} axes, spec dimension is {spec.dim}")
    nx = field.shape[0]
    if any(s != nx for s in field.shape):
        raise ValueError("spatial grid must have equal size along every axis")
    kern = kernel_on_grid(spec, nx)
    cell = nx ** (-spec.dim)
    diff = np.mod(np.arange(nx)[:, None] - np.arange(nx)[None, :], nx)
    if spec.dim == 1:
        return (kern[diff] @ field) * cell
    if spec.dim == 2 and nx <= 64:
        circ = kern[diff[:, None, :, None], diff[None, :, None, :]]
        return np.einsum("ikjl,jl->ik", circ, field) * cell
    conv = np.real(np.fft.ifftn(np.fft.fftn(field) * np.fft.fftn(kern))) * cell
    return np.maximum(conv, 0.0)


def quadrature_mass(spec: MollifierSpec, n: int = 4096) -> float:
    """Torus mass of the smearing function by n^d-point quadrature."""
    n = min(n, {1: 4096, 2: 512, 3: 128}[spec.dim])
    offs = -0.5 + np.arange(n) / n
    grids = np.meshgrid(*([offs] * spec.dim), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    vals = np.asarray(evaluate(spec, pts), dtype=float)
    return float(vals.sum() / n ** spec.dim)
