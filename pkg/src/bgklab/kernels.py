"""Hot numeric kernels: smeared empirical moments and the 1-d solver update.

Every kernel exists twice -- a numba @njit loop and a pure-numpy fallback --
selected at import time by BGKLAB_NUMBA (see accel.py).  The public names
(point_fields, grid_fields, transport_1d, relax_1d) are bound to whichever
path is active; both variants stay importable for the benchmark and the
agreement tests.

Kernel-level smearing functions are parametrized by (kind, eps, amp):
kind 0 is the uniform density (value 1), kind 1 is the compact bump family
phi_eps(x) = (eps + eps^-d * amp * exp(-1/(1 - |2x/eps|^2))) / (1 + eps)
with amp the bump normalization constant for the given dimension.
"""

from __future__ import annotations

import math

import numpy as np

from .accel import NUMBA_ENABLED, njit

KIND_UNIFORM = 0
KIND_BUMP = 1


# ---------------------------------------------------------------------------
# numpy fallbacks
# ---------------------------------------------------------------------------

def phi_of_r2_numpy(r2, kind, eps, amp, dim):
    """Smearing value at squared (minimal-image) distance r2; array-valued."""
    r2 = np.asarray(r2, dtype=float)
    if kind == KIND_UNIFORM:
        return np.ones_like(r2)
    s = 4.0 * r2 / (eps * eps)
    inside = s < 1.0
    core = np.zeros_like(r2)
    # exp argument only evaluated strictly inside the support
    core[inside] = amp * np.exp(-1.0 / (1.0 - s[inside]))
    return (eps + eps ** (-dim) * core) / (1.0 + eps)


def _point_fields_numpy(pos, vel, x, kind, eps, amp):
    n, dim = pos.shape
    dz = x[None, :] - pos
    dz -= np.floor(dz + 0.5)
    r2 = np.einsum("ij,ij->i", dz, dz)
    w = phi_of_r2_numpy(r2, kind, eps, amp, dim)
    wsum = float(np.sum(w))
    u = (w @ vel) / wsum
    dv = vel - u
    t = float(w @ np.einsum("ij,ij->i", dv, dv)) / (dim * wsum)
    return wsum, u, t


def _grid_fields_numpy(pos, vel, xnodes, kind, eps, amp):
    g, dim = xnodes.shape
    wsum = np.empty(g)
    u = np.empty((g, dim))
    t = np.empty(g)
    for i in range(g):
        wsum[i], u[i], t[i] = _point_fields_numpy(pos, vel, xnodes[i], kind, eps, amp)
    return wsum, u, t


def _transport_1d_numpy(values, kshift, frac):
    nx, nv = values.shape
    idx = np.arange(nx)[:, None] - kshift[None, :]
    i0 = np.mod(idx, nx)
    i1 = np.mod(idx - 1, nx)
    cols = np.broadcast_to(np.arange(nv)[None, :], (nx, nv))
    return values[i0, cols] * (1.0 - frac[None, :]) + values[i1, cols] * frac[None, :]


def _relax_1d_numpy(ftr, rho, u, temp, vgrid, wf, ws):
    norm = 1.0 / np.sqrt(2.0 * np.pi * temp)
    arg = (vgrid[None, :] - u[:, None]) ** 2 / (2.0 * temp[:, None])
    maxw = norm[:, None] * np.exp(-arg)
    return wf * ftr + ws * rho[:, None] * maxw


# ---------------------------------------------------------------------------
# numba variants
# ---------------------------------------------------------------------------

if NUMBA_ENABLED:

    @njit(cache=True, inline="always")
    def _phi_scalar(r2, kind, eps, amp, dim):
        if kind == KIND_UNIFORM:
            return 1.0
        s = 4.0 * r2 / (eps * eps)
        core = 0.0
        if s < 1.0:
            core = amp * math.exp(-1.0 / (1.0 - s))
        return (eps + eps ** (-dim) * core) / (1.0 + eps)

    @njit(cache=True)
    def _point_fields_numba(pos, vel, x, kind, eps, amp):
        n, dim = pos.shape
        w = np.empty(n)
        wsum = 0.0
        u = np.zeros(dim)
        for j in range(n):
            r2 = 0.0
            for k in range(dim):
                dz = x[k] - pos[j, k]
                dz -= math.floor(dz + 0.5)
                r2 += dz * dz
            wj = _phi_scalar(r2, kind, eps, amp, dim)
            w[j] = wj
            wsum += wj
            for k in range(dim):
                u[k] += wj * vel[j, k]
        for k in range(dim):
            u[k] /= wsum
        tsum = 0.0
        for j in range(n):
            dv2 = 0.0
            for k in range(dim):
                dv = vel[j, k] - u[k]
                dv2 += dv * dv
            tsum += w[j] * dv2
        return wsum, u, tsum / (dim * wsum)

    @njit(cache=True)
    def _grid_fields_numba(pos, vel, xnodes, kind, eps, amp):
        g, dim = xnodes.shape
        wsum = np.empty(g)
        u = np.empty((g, dim))
        t = np.empty(g)
        for i in range(g):
            ws, ui, ti = _point_fields_numba(pos, vel, xnodes[i], kind, eps, amp)
            wsum[i] = ws
            u[i] = ui
            t[i] = ti
        return wsum, u, t

    @njit(cache=True)
    def _transport_1d_numba(values, kshift, frac):
        nx, nv = values.shape
        out = np.empty_like(values)
        for j in range(nv):
            k = kshift[j]
            fr = frac[j]
            for i in range(nx):
                i0 = (i - k) % nx
                i1 = (i - k - 1) % nx
                out[i, j] = values[i0, j] * (1.0 - fr) + values[i1, j] * fr
        return out

    @njit(cache=True)
    def _relax_1d_numba(ftr, rho, u, temp, vgrid, wf, ws):
        nx, nv = ftr.shape
        out = np.empty_like(ftr)
        for i in range(nx):
            norm = 1.0 / math.sqrt(2.0 * math.pi * temp[i])
            inv2t = 1.0 / (2.0 * temp[i])
            gain = ws * rho[i]
            for j in range(nv):
                dv = vgrid[j] - u[i]
                out[i, j] = wf * ftr[i, j] + gain * norm * math.exp(-dv * dv * inv2t)
        return out

    point_fields = _point_fields_numba
    grid_fields = _grid_fields_numba
    transport_1d = _transport_1d_numba
    relax_1d = _relax_1d_numba
else:
    point_fields = _point_fields_numpy
    grid_fields = _grid_fields_numpy
    transport_1d = _transport_1d_numpy
    relax_1d = _relax_1d_numpy
