"""Semi-Lagrangian phase-space solver for the BGK equation and its
field-smeared variant.

State is tabulated on a uniform periodic x-grid times a truncated uniform
v-box.  One step transports by periodic linear interpolation at the foot
points x - v dt and then relaxes toward rho * Maxwellian built from the
(plain or smeared) transported fields.  The default relaxation weights are
the first-order Euler pair (1 - dt, dt); the exponential pair
(e^-dt, 1 - e^-dt) is available as scheme="exponential" and reproduces the
spatially homogeneous dynamics exactly in time, which makes time-refinement
studies degenerate -- hence the Euler default.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import kernels, mollifier
from .fields import HydroFieldsGrid
from .mollifier import MollifierSpec


class ConfigurationError(ValueError):
    """Grid/config cannot support the requested computation."""


class DegenerateState(RuntimeError):
    """Vanishing local density: hydrodynamic fields are undefined."""


class NumericalFailure(RuntimeError):
    """Non-finite values appeared; carries a diagnostics dump."""

    def __init__(self, message: str, dump: dict):
        super().__init__(f"{message}: {dump}")
        self.dump = dump


@dataclass
class PhaseGrid:
    """Uniform periodic x-grid (spacing 1/nx on the unit torus) times the
    uniform velocity box [-v_max, v_max]^d with nv nodes per axis."""

    nx: int
    nv: int
    v_max: float
    dim: int = 1

    def __post_init__(self):
        if self.nx < 4 or self.nv < 4:
            raise ConfigurationError("nx and nv must both be at least 4")
        if self.v_max <= 0:
            raise ConfigurationError("v_max must be positive")
        if self.dim not in (1, 2, 3):
            raise ConfigurationError("dim must be 1, 2 or 3")
        self.dx = 1.0 / self.nx
        self.dv = 2.0 * self.v_max / (self.nv - 1)
        self.xnodes_1d = -0.5 + np.arange(self.nx) / self.nx
        self.vnodes_1d = np.linspace(-self.v_max, self.v_max, self.nv)
        xg = np.meshgrid(*([self.xnodes_1d] * self.dim), indexing="ij")
        self.x_flat = np.ascontiguousarray(
            np.stack([g.ravel() for g in xg], axis=-1))
        vg = np.meshgrid(*([self.vnodes_1d] * self.dim), indexing="ij")
        self.v_flat = np.ascontiguousarray(
            np.stack([g.ravel() for g in vg], axis=-1))
        w1 = np.full(self.nv, self.dv)
        w1[0] *= 0.5
        w1[-1] *= 0.5
        wg = np.meshgrid(*([w1] * self.dim), indexing="ij")
        self.vw_flat = np.prod(np.stack([g.ravel() for g in wg]), axis=0)
        self.vsq_flat = np.einsum("ij,ij->i", self.v_flat, self.v_flat)
        self.cell_x = self.dx ** self.dim

    @property
    def xshape(self):
        return (self.nx,) * self.dim

    @property
    def vshape(self):
        return (self.nv,) * self.dim

    @property
    def shape(self):
        return self.xshape + self.vshape

    def same_layout(self, other: "PhaseGrid") -> bool:
        return (self.nx, self.nv, self.v_max, self.dim) == \
               (other.nx, other.nv, other.v_max, other.dim)


@dataclass
class MixtureComponent:
    """One Maxwellian component: spatial weight (callable on (G, d) points
    or a constant), mean velocity, temperature."""

    weight: Callable | float
    u: np.ndarray
    t: float

    def __post_init__(self):
        self.u = np.atleast_1d(np.asarray(self.u, dtype=float))
        if self.t <= 0:
            raise ConfigurationError("component temperatures must be positive")

    def weight_at(self, x_flat: np.ndarray) -> np.ndarray:
        if callable(self.weight):
            w = np.asarray(self.weight(x_flat), dtype=float)
        else:
            w = np.full(x_flat.shape[0], float(self.weight))
        if np.any(w <= 0):
            raise ConfigurationError("component weights must be strictly positive")
        return w


@dataclass
class InitialCondition:
    """Gaussian-dominated mixture datum f0(x, v) = sum_k w_k(x) M_k(v)."""

    components: Sequence[MixtureComponent]
    dim: int

    def __post_init__(self):
        if not self.components:
            raise ConfigurationError("need at least one mixture component")
        for c in self.components:
            if c.u.shape[0] != self.dim:
                raise ConfigurationError("component velocity dimension mismatch")

    def rho0(self, x_flat: np.ndarray) -> np.ndarray:
        return sum(c.weight_at(x_flat) for c in self.components)

    def density(self, x_flat: np.ndarray, v_flat: np.ndarray) -> np.ndarray:
        out = np.zeros((x_flat.shape[0], v_flat.shape[0]))
        for c in self.components:
            dv = v_flat - c.u
            g = (2.0 * math.pi * c.t) ** (-self.dim / 2.0) * \
                np.exp(-np.einsum("ij,ij->i", dv, dv) / (2.0 * c.t))
            out += c.weight_at(x_flat)[:, None] * g[None, :]
        return out

    def gaussian_bounds(self):
        """(C1, alpha) with f0 <= C1 exp(-alpha |v|^2) everywhere."""
        alpha = min(1.0 / (4.0 * c.t) for c in self.components)
        probe = np.linspace(-0.5, 0.5, 2049)[:-1]
        grids = np.meshgrid(*([probe[:: max(1, 2048 // 128)]] * self.dim), indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=-1)
        c1 = 0.0
        for c in self.components:
            wmax = float(np.max(c.weight_at(pts)))
            c1 += wmax * (2.0 * math.pi * c.t) ** (-self.dim / 2.0) * \
                math.exp(float(c.u @ c.u) / (2.0 * c.t))
        return c1, alpha

    def lower_envelope_mass(self, grid: PhaseGrid) -> float:
        """C2 = integral of min over x of f0(x, .), measured on the grid."""
        f0 = self.density(grid.x_flat, grid.v_flat)
        return float(f0.min(axis=0) @ grid.vw_flat)

    def sample(self, rng: np.random.Generator, n: int):
        """n i.i.d. phase-space draws from f0 (positions by rejection
        against the spatial density, then component choice, then Gaussian)."""
        probe = np.linspace(-0.5, 0.5, {1: 8193, 2: 257, 3: 65}[self.dim])[:-1]
        grids = np.meshgrid(*([probe] * self.dim), indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=-1)
        rho_sup = float(np.max(self.rho0(pts))) * (1.0 + 1e-9)
        pos = np.empty((n, self.dim))
        vel = np.empty((n, self.dim))
        for i in range(n):
            while True:
                x = rng.uniform(-0.5, 0.5, self.dim)
                if rng.random() * rho_sup <= float(self.rho0(x[None, :])[0]):
                    break
            w = np.array([float(c.weight_at(x[None, :])[0]) for c in self.components])
            k = int(rng.choice(len(w), p=w / w.sum())) if len(w) > 1 else 0
            comp = self.components[k]
            pos[i] = x
            vel[i] = comp.u + math.sqrt(comp.t) * rng.standard_normal(self.dim)
        return pos, vel


@dataclass
class KineticSolution:
    """Grid values of the distribution at one time; unit total mass."""

    grid: PhaseGrid
    values: np.ndarray
    time: float = 0.0
    regularized: bool = False
    spec: Optional[MollifierSpec] = None
    mass_drift: float = 0.0   # pre-renormalization drift of the last step

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ValueError("values shape does not match the grid")
        if self.regularized and self.spec is None:
            raise ConfigurationError("regularized solutions need a smearing spec")

    @property
    def flat(self) -> np.ndarray:
        px = self.grid.nx ** self.grid.dim
        return self.values.reshape(px, -1)

    def mass(self) -> float:
        return float((self.flat @ self.grid.vw_flat).sum() * self.grid.cell_x)

    def copy(self) -> "KineticSolution":
        return KineticSolution(self.grid, self.values.copy(), self.time,
                               self.regularized, self.spec, self.mass_drift)


@dataclass
class SolutionDiagnostics:
    """Per-step monitors: weighted sup norm, field extremes, gradient norm."""

    time: float
    nq: float
    rho_min: float
    t_min: float
    u_max: float
    t_max: float
    grad_nq: float
    mass_drift: float = 0.0


@dataclass
class SnapshotSeries:
    """Smeared fields on the spatial grid at the step times of one run.

    Queries interpolate periodic-linearly in x and piecewise-constant
    backward in t.
    """

    times: np.ndarray
    rho: np.ndarray     # (M,) + xshape
    u: np.ndarray       # (M,) + xshape + (d,)
    temp: np.ndarray    # (M,) + xshape
    nx: int
    dim: int

    def covers(self, t0: float, t1: float) -> bool:
        gap = self.times[1] - self.times[0] if len(self.times) > 1 else 0.0
        return self.times[0] <= t0 + 1e-9 and self.times[-1] >= t1 - gap - 1e-9

    def query(self, x, t: float):
        """(bulk velocity, temperature) at torus point x, time t."""
        it = int(np.searchsorted(self.times, t + 1e-12, side="right")) - 1
        it = min(max(it, 0), len(self.times) - 1)
        x = np.atleast_1d(np.asarray(x, dtype=float))
        pos = (x + 0.5) * self.nx
        i0 = np.floor(pos).astype(int)
        fr = pos - i0
        i0 = np.mod(i0, self.nx)
        u = np.zeros(self.dim)
        temp = 0.0
        for corner in range(1 << self.dim):
            idx = []
            w = 1.0
            for a in range(self.dim):
                if corner >> a & 1:
                    idx.append((i0[a] + 1) % self.nx)
                    w *= fr[a]
                else:
                    idx.append(i0[a])
                    w *= 1.0 - fr[a]
            sel = (it, *idx)
            u += w * self.u[sel]
            temp += w * self.temp[sel]
        return u, max(temp, 0.0)


@dataclass(frozen=True)
class StationaryFieldSource:
    """Constant-in-space-and-time field source (exact stationary law)."""

    u: np.ndarray
    t: float

    def covers(self, t0: float, t1: float) -> bool:
        return True

    def query(self, x, t: float):
        return np.atleast_1d(np.asarray(self.u, dtype=float)).copy(), self.t


@dataclass
class SolverRun:
    """Return bundle of solve_to."""

    final: KineticSolution
    diagnostics: list
    snapshots: Optional[SnapshotSeries] = None


# ---------------------------------------------------------------------------
# field extraction
# ---------------------------------------------------------------------------

def _moments_flat(sol: KineticSolution):
    g = sol.grid
    f = sol.flat
    rho = f @ g.vw_flat
    if np.any(rho <= 0.0):
        raise DegenerateState("local density vanished at a grid node")
    mom = f @ (g.vw_flat[:, None] * g.v_flat)
    en = f @ (g.vw_flat * g.vsq_flat)
    u = mom / rho[:, None]
    temp = np.maximum((en / rho - np.einsum("ij,ij->i", u, u)) / g.dim, 0.0)
    return rho, u, temp, mom, en


def hydro_fields(sol: KineticSolution) -> HydroFieldsGrid:
    """Plain velocity-moment fields (rho, u, T) on the spatial grid."""
    rho, u, temp, _, _ = _moments_flat(sol)
    g = sol.grid
    return HydroFieldsGrid(rho.reshape(g.xshape),
                           u.reshape(g.xshape + (g.dim,)),
                           temp.reshape(g.xshape))


def _smeared_flat(sol: KineticSolution, spec: MollifierSpec):
    g = sol.grid
    rho, u, temp, mom, en = _moments_flat(sol)
    rho_s = mollifier.convolve_grid(spec, rho.reshape(g.xshape)).ravel()
    mom_s = np.stack([mollifier.convolve_grid(spec, mom[:, k].reshape(g.xshape)).ravel()
                      for k in range(g.dim)], axis=-1)
    en_s = mollifier.convolve_grid(spec, en.reshape(g.xshape)).ravel()
    if np.any(rho_s <= 0.0):
        raise DegenerateState("smeared density vanished at a grid node")
    u_s = mom_s / rho_s[:, None]
    t_s = np.maximum((en_s / rho_s - np.einsum("ij,ij->i", u_s, u_s)) / g.dim, 0.0)
    return rho_s, u_s, t_s


def smeared_fields(sol: KineticSolution, spec: MollifierSpec) -> HydroFieldsGrid:
    """Smearing-convolved fields; the temperature is centered at the smeared
    bulk velocity of the evaluation point, not the source point."""
    rho_s, u_s, t_s = _smeared_flat(sol, spec)
    g = sol.grid
    return HydroFieldsGrid(rho_s.reshape(g.xshape),
                           u_s.reshape(g.xshape + (g.dim,)),
                           t_s.reshape(g.xshape))


# ---------------------------------------------------------------------------
# initialization
# ---------------------------------------------------------------------------

def init(ic: InitialCondition, grid: PhaseGrid, regularized: bool = False,
         spec: Optional[MollifierSpec] = None) -> KineticSolution:
    """Sample the mixture datum on the grid and renormalize to unit mass.

    Rejects grids that cannot resolve the narrowest component or whose
    velocity box clips more than 1e-8 of any component's mass.
    """
    if ic.dim != grid.dim:
        raise ConfigurationError("datum and grid dimensions differ")
    t_min = min(c.t for c in ic.components)
    t_max = max(c.t for c in ic.components)
    u_max = max(float(np.linalg.norm(c.u)) for c in ic.components)
    if grid.dv > math.sqrt(t_min) / 4.0:
        raise ConfigurationError(
            f"dv={grid.dv:.4g} too coarse for sqrt(T_min)/4={math.sqrt(t_min)/4:.4g}")
    if grid.v_max < u_max + 6.0 * math.sqrt(t_max):
        raise ConfigurationError(
            f"v_max={grid.v_max:.4g} below required {u_max + 6*math.sqrt(t_max):.4g}")
    for c in ic.components:
        dv = grid.v_flat - c.u
        gv = (2.0 * math.pi * c.t) ** (-grid.dim / 2.0) * \
            np.exp(-np.einsum("ij,ij->i", dv, dv) / (2.0 * c.t))
        defect = abs(float(gv @ grid.vw_flat) - 1.0)
        if defect > 1e-8:
            raise ConfigurationError(
                f"velocity box clips component mass by {defect:.2e} (> 1e-8)")
    w_total = float(ic.rho0(grid.x_flat).sum() * grid.cell_x)
    if abs(w_total - 1.0) > 1e-6:
        raise ConfigurationError(f"mixture weights integrate to {w_total}, not 1")
    vals = ic.density(grid.x_flat, grid.v_flat)
    mass = float((vals @ grid.vw_flat).sum() * grid.cell_x)
    vals /= mass
    return KineticSolution(grid, vals.reshape(grid.shape), 0.0, regularized, spec)


# ---------------------------------------------------------------------------
# time stepping
# ---------------------------------------------------------------------------

def _transport(values: np.ndarray, grid: PhaseGrid, dt: float) -> np.ndarray:
    d = grid.dim
    s = grid.vnodes_1d * dt / grid.dx
    k = np.floor(s).astype(np.int64)
    fr = s - k
    f = values
    for a in range(d):
        f = np.moveaxis(f, (a, d + a), (0, 1))
        shp = f.shape
        rest = int(np.prod(shp[2:], dtype=np.int64)) if len(shp) > 2 else 1
        f2 = np.ascontiguousarray(f.reshape(shp[0], shp[1] * rest))
        kcol = np.repeat(k, rest)
        frcol = np.repeat(fr, rest)
        f2 = kernels.transport_1d(f2, kcol, frcol)
        f = np.moveaxis(f2.reshape(shp), (0, 1), (a, d + a))
    return np.ascontiguousarray(f)


def step(sol: KineticSolution, dt: float, scheme: str = "euler") -> KineticSolution:
    """One transport-then-relax step of size dt (dt <= 0.1 enforced)."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    if dt > 0.1 + 1e-12:
        raise ValueError("dt must not exceed 0.1")
    if scheme == "euler":
        wf, ws = 1.0 - dt, dt
    elif scheme == "exponential":
        wf, ws = math.exp(-dt), 1.0 - math.exp(-dt)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")

    g = sol.grid
    ftr = _transport(sol.values, g, dt)
    moved = KineticSolution(g, ftr, sol.time, sol.regularized, sol.spec)
    if sol.regularized:
        rho_gain, u_used, t_used = _smeared_flat(moved, sol.spec)
    else:
        rho_gain, u_used, t_used, _, _ = _moments_flat(moved)
    if np.any(t_used <= 0.0):
        raise NumericalFailure("nonpositive relaxation temperature",
                               {"time": sol.time, "t_min": float(t_used.min())})

    if g.dim == 1:
        new = kernels.relax_1d(ftr.reshape(g.nx, g.nv), rho_gain, u_used[:, 0],
                               t_used, g.vnodes_1d, wf, ws)
    else:
        usq = np.einsum("ij,ij->i", u_used, u_used)
        arg = (g.vsq_flat[None, :] - 2.0 * u_used @ g.v_flat.T + usq[:, None]) \
            / (2.0 * t_used[:, None])
        maxw = (2.0 * math.pi * t_used[:, None]) ** (-g.dim / 2.0) * np.exp(-arg)
        new = wf * ftr.reshape(maxw.shape) + ws * rho_gain[:, None] * maxw
    new = np.maximum(new, 0.0).reshape(g.shape)

    if not np.all(np.isfinite(new)):
        raise NumericalFailure("non-finite solution values", {
            "time": sol.time, "dt": dt,
            "max": float(np.nanmax(new)), "min": float(np.nanmin(new)),
        })
    mass = float((new.reshape(g.nx ** g.dim, -1) @ g.vw_flat).sum() * g.cell_x)
    drift = mass - 1.0
    new /= mass
    return KineticSolution(g, new, sol.time + dt, sol.regularized, sol.spec, drift)


def _diagnostics(sol: KineticSolution, q: int) -> SolutionDiagnostics:
    g = sol.grid
    rho, u, temp, _, _ = _moments_flat(sol)
    if sol.regularized:
        _, u_mon, t_mon = _smeared_flat(sol, sol.spec)
    else:
        u_mon, t_mon = u, temp
    vq = 1.0 + g.vsq_flat ** (q / 2.0)
    nq = float((sol.flat * vq[None, :]).max())
    grads = np.zeros(sol.grid.shape)
    for a in range(g.dim):
        grads += ((np.roll(sol.values, -1, axis=a) -
                   np.roll(sol.values, 1, axis=a)) / (2.0 * g.dx)) ** 2
    gmag = np.sqrt(grads).reshape(sol.flat.shape)
    grad_nq = float((gmag * vq[None, :]).max())
    return SolutionDiagnostics(
        time=sol.time,
        nq=nq,
        rho_min=float(rho.min()),
        t_min=float(t_mon.min()),
        u_max=float(np.sqrt(np.einsum("ij,ij->i", u_mon, u_mon)).max()),
        t_max=float(t_mon.max()),
        grad_nq=grad_nq,
        mass_drift=sol.mass_drift,
    )


def solve_to(sol: KineticSolution, t_end: float, dt: float, *,
             scheme: str = "euler", q: Optional[int] = None,
             collect_snapshots: bool = False,
             collect_diagnostics: bool = True) -> SolverRun:
    """March to t_end in steps of dt (last step shortened to land exactly),
    recording diagnostics each step and, optionally, smeared-field snapshots
    for driving the jump processes."""
    if t_end < sol.time:
        raise ValueError("t_end precedes the solution time")
    q = q if q is not None else sol.grid.dim + 3
    if collect_snapshots and not sol.regularized:
        raise ConfigurationError("snapshots require a regularized run")

    diags = []
    snaps_t, snaps_rho, snaps_u, snaps_temp = [], [], [], []

    def record(s: KineticSolution):
        if collect_diagnostics:
            diags.append(_diagnostics(s, q))
        if collect_snapshots:
            rho_s, u_s, t_s = _smeared_flat(s, s.spec)
            g = s.grid
            snaps_t.append(s.time)
            snaps_rho.append(rho_s.reshape(g.xshape))
            snaps_u.append(u_s.reshape(g.xshape + (g.dim,)))
            snaps_temp.append(t_s.reshape(g.xshape))

    record(sol)
    cur = sol
    while cur.time < t_end - 1e-12:
        h = min(dt, t_end - cur.time)
        cur = step(cur, h, scheme=scheme)
        record(cur)

    snapshots = None
    if collect_snapshots:
        snapshots = SnapshotSeries(np.array(snaps_t), np.stack(snaps_rho),
                                   np.stack(snaps_u), np.stack(snaps_temp),
                                   sol.grid.nx, sol.grid.dim)
    return SolverRun(cur, diags, snapshots)


def field_snapshot_series(run: SolverRun) -> SnapshotSeries:
    """Snapshot table of a regularized run (solve_to with collect_snapshots)."""
    if run.snapshots is None:
        raise ValueError("run was produced without snapshot collection")
    return run.snapshots


# ---------------------------------------------------------------------------
# distances and I/O
# ---------------------------------------------------------------------------

def sample_solution(sol: KineticSolution, rng: np.random.Generator, m: int):
    """m phase-space points approximately distributed like the grid solution
    (categorical over cells with uniform jitter inside each cell).

    Used for two-sample distance estimates against particle clouds; the
    cell-width jitter is part of the reported sampling error.
    """
    g = sol.grid
    w = (sol.flat * g.vw_flat[None, :]).ravel()
    p = np.maximum(w, 0.0)
    p /= p.sum()
    idx = rng.choice(len(p), size=m, p=p)
    ix, iv = np.divmod(idx, g.nv ** g.dim)
    pos = g.x_flat[ix] + rng.uniform(-0.5, 0.5, (m, g.dim)) * g.dx
    pos -= np.floor(pos + 0.5)
    vel = g.v_flat[iv] + rng.uniform(-0.5, 0.5, (m, g.dim)) * g.dv
    return pos, vel


def weighted_l1_distance(a: KineticSolution, b: KineticSolution) -> float:
    """Quadrature of (1 + |v|^2) |a - b| over phase space."""
    if not a.grid.same_layout(b.grid):
        raise ValueError("solutions live on different grids")
    if abs(a.time - b.time) > 1e-9:
        raise ValueError("solutions are at different times")
    g = a.grid
    w = (1.0 + g.vsq_flat) * g.vw_flat
    return float((np.abs(a.flat - b.flat) @ w).sum() * g.cell_x)


def save_checkpoint(sol: KineticSolution, path: str) -> None:
    """Flat binary checkpoint (header: dim, nx, nv, v_max, time; payload:
    row-major values) plus a JSON sidecar with the run metadata."""
    g = sol.grid
    with open(path, "wb") as fh:
        fh.write(struct.pack("<iiidd", g.dim, g.nx, g.nv, g.v_max, sol.time))
        fh.write(np.ascontiguousarray(sol.values, dtype="<f8").tobytes())
    sidecar = {
        "regularized": sol.regularized,
        "spec": sol.spec.to_dict() if sol.spec is not None else None,
        "mass_drift": sol.mass_drift,
    }
    with open(path + ".json", "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)


def load_checkpoint(path: str) -> KineticSolution:
    with open(path, "rb") as fh:
        head = fh.read(struct.calcsize("<iiidd"))
        dim, nx, nv, v_max, time = struct.unpack("<iiidd", head)
        grid = PhaseGrid(nx, nv, v_max, dim)
        vals = np.frombuffer(fh.read(), dtype="<f8").reshape(grid.shape).copy()
    with open(path + ".json") as fh:
        side = json.load(fh)
    spec = MollifierSpec.from_dict(side["spec"], dim) if side["spec"] else None
    return KineticSolution(grid, vals, time, side["regularized"], spec,
                           side.get("mass_drift", 0.0))


def export_fields_csv(sol: KineticSolution, path: str) -> None:
    """Field table on the spatial grid (plus smeared fields when present)."""
    g = sol.grid
    h = hydro_fields(sol)
    cols = [g.x_flat[:, k] for k in range(g.dim)]
    names = [f"x{k}" for k in range(g.dim)]
    cols += [h.rho.ravel()]
    names += ["rho"]
    cols += [h.u.reshape(-1, g.dim)[:, k] for k in range(g.dim)]
    names += [f"u{k}" for k in range(g.dim)]
    cols += [h.t.ravel()]
    names += ["T"]
    if sol.regularized:
        s = smeared_fields(sol, sol.spec)
        cols += [s.rho.ravel()]
        names += ["rho_smeared"]
        cols += [s.u.reshape(-1, g.dim)[:, k] for k in range(g.dim)]
        names += [f"u{k}_smeared" for k in range(g.dim)]
        cols += [s.t.ravel()]
        names += ["T_smeared"]
    with open(path, "w") as fh:
        fh.write(",".join(names) + "\n")
        for i in range(g.nx ** g.dim):
            fh.write(",".join(repr(float(c[i])) for c in cols) + "\n")
