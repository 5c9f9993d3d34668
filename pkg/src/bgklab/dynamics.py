"""Event-driven jump-process simulators.

Three modes share one event mechanism (exact Gillespie scheme: the total
jump rate is the constant N, so inter-event gaps are Exponential(N) draws
and there is no time-discretization error):

* interacting -- at each event a uniformly chosen particle jumps to a
  position shifted by xi ~ phi and redraws its velocity from the Maxwellian
  of the smeared empirical fields of the pre-jump configuration, evaluated
  at the post-jump position (the jumping particle's own pre-jump state is
  included in the fields);
* auxiliary   -- N independent one-particle processes with rate-1 clocks,
  velocities drawn from grid-solver field snapshots;
* coupled     -- both sides share the clock, the particle choice, and the
  position shift; the two velocities are drawn through the optimal
  Gaussian coupling (a common standard-normal draw).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import kernels, maxwellian
from .mollifier import MollifierSpec, sample_shift
from .solver import ConfigurationError
from .torus import CoupledConfig, ParticleConfig, RandomStream

MODES = ("interacting", "auxiliary", "coupled")


@dataclass
class JumpEvent:
    """One thermalization jump, recorded for replay."""

    time: float
    particle: int
    xi: np.ndarray
    velocity_draw: Optional[np.ndarray]   # the standard-normal draw; None for a Dirac jump


@dataclass
class SimulationPlan:
    """What to simulate: size, horizon, smearing, mode, field source, seed."""

    n_particles: int
    t_end: float
    spec: MollifierSpec
    mode: str
    stream: RandomStream
    observation_times: Sequence[float]
    snapshots: object = None          # field source with .query/.covers
    record_events: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigurationError(f"mode must be one of {MODES}")
        if self.n_particles < 1:
            raise ConfigurationError("need at least one particle")
        obs = np.asarray(sorted(float(t) for t in self.observation_times))
        if len(obs) == 0 or obs[0] < 0 or obs[-1] > self.t_end + 1e-12:
            raise ConfigurationError("observation times must lie in [0, t_end]")
        self.observation_times = obs
        if self.mode in ("auxiliary", "coupled"):
            if self.snapshots is None:
                raise ConfigurationError(f"{self.mode} mode needs a snapshot source")
            if not self.snapshots.covers(0.0, self.t_end):
                raise ConfigurationError("snapshot source does not cover [0, t_end]")


@dataclass
class TrajectoryResult:
    configs: list
    events: Optional[list] = None


@dataclass
class CoupledResult:
    configs: list
    i_series: np.ndarray              # mean squared phase gap at observation times
    events: Optional[list] = None


def _advance(pos: np.ndarray, vel: np.ndarray, gap: float) -> None:
    """Free streaming with torus wrap, in place."""
    pos += vel * gap
    pos -= np.floor(pos + 0.5)


def simulate_interacting(plan: SimulationPlan, init: ParticleConfig) -> TrajectoryResult:
    """Trajectory of the N-particle thermalization process at the plan's
    observation times."""
    if plan.mode != "interacting":
        raise ConfigurationError("plan mode is not 'interacting'")
    if init.n != plan.n_particles:
        raise ConfigurationError("initial configuration size mismatch")
    n, dim = init.n, init.dim
    kind, eps, amp = plan.spec.kernel_params
    rng = plan.stream.generator()
    pos = init.positions.copy()
    vel = init.velocities.copy()
    t = init.time
    out, events = [], [] if plan.record_events else None
    obs = plan.observation_times
    oi = 0
    while oi < len(obs):
        gap = rng.exponential(1.0 / n)
        t_event = t + gap
        while oi < len(obs) and obs[oi] <= t_event:
            _advance(pos, vel, obs[oi] - t)
            t = obs[oi]
            out.append(ParticleConfig(pos.copy(), vel.copy(), t))
            oi += 1
        if oi >= len(obs):
            break
        _advance(pos, vel, t_event - t)
        t = t_event
        i = int(rng.integers(0, n))
        xi = sample_shift(plan.spec, rng)
        xt = pos[i] + xi
        xt -= np.floor(xt + 0.5)
        xt = np.ascontiguousarray(xt)
        _, u, temp = kernels.point_fields(pos, vel, xt, kind, eps, amp)
        if temp > 0.0:
            eta = rng.standard_normal(dim)
            vnew = u + math.sqrt(temp) * eta
        else:
            eta = None
            vnew = u
        pos[i] = xt
        vel[i] = vnew
        if events is not None:
            events.append(JumpEvent(t, i, xi, eta))
    return TrajectoryResult(out, events)


def simulate_auxiliary(plan: SimulationPlan, init: ParticleConfig,
                       particle_streams: Optional[Sequence[RandomStream]] = None
                       ) -> TrajectoryResult:
    """N independent one-particle jump processes driven by solver snapshots.

    Each particle owns a random stream (derived from the plan stream by slot
    index unless given explicitly), so permuting particles together with
    their streams permutes the trajectories exactly.
    """
    if plan.mode != "auxiliary":
        raise ConfigurationError("plan mode is not 'auxiliary'")
    if init.n != plan.n_particles:
        raise ConfigurationError("initial configuration size mismatch")
    n, dim = init.n, init.dim
    if particle_streams is None:
        particle_streams = [plan.stream.child(j) for j in range(n)]
    obs = plan.observation_times
    pos_out = np.empty((len(obs), n, dim))
    vel_out = np.empty((len(obs), n, dim))
    events = [] if plan.record_events else None
    for j in range(n):
        rng = particle_streams[j].generator()
        x = init.positions[j].copy()
        v = init.velocities[j].copy()
        t = init.time
        oi = 0
        while oi < len(obs):
            gap = rng.exponential(1.0)
            t_event = t + gap
            while oi < len(obs) and obs[oi] <= t_event:
                pos_out[oi, j] = _wrap1(x + v * (obs[oi] - t))
                vel_out[oi, j] = v
                oi += 1
            if oi >= len(obs):
                break
            x = _wrap1(x + v * (t_event - t))
            t = t_event
            xi = sample_shift(plan.spec, rng)
            x = _wrap1(x + xi)
            u, temp = plan.snapshots.query(x, t)
            if temp > 0.0:
                eta = rng.standard_normal(dim)
                v = u + math.sqrt(temp) * eta
            else:
                eta = None
                v = u.copy()
            if events is not None:
                events.append(JumpEvent(t, j, xi, eta))
    if events is not None:
        events.sort(key=lambda e: e.time)
    configs = [ParticleConfig(pos_out[k], vel_out[k], float(obs[k]))
               for k in range(len(obs))]
    return TrajectoryResult(configs, events)


def _wrap1(x: np.ndarray) -> np.ndarray:
    return x - np.floor(x + 0.5)


def _mean_square_gap(zp, zv, sp, sv) -> float:
    dx = zp - sp
    dx -= np.floor(dx + 0.5)
    dv = zv - sv
    return float(np.mean(np.einsum("ij,ij->i", dx, dx) +
                         np.einsum("ij,ij->i", dv, dv)))


def simulate_coupled(plan: SimulationPlan, init: CoupledConfig) -> CoupledResult:
    """Coupled pair (interacting side, auxiliary side) sharing the Poisson
    clock, the particle choice, and the position shift; velocity pairs come
    from the optimal Gaussian coupling between the empirical Maxwellian and
    the snapshot-field Maxwellian.  Starts from the diagonal."""
    if plan.mode != "coupled":
        raise ConfigurationError("plan mode is not 'coupled'")
    if init.n != plan.n_particles:
        raise ConfigurationError("initial configuration size mismatch")
    if not (np.array_equal(init.z.positions, init.sigma.positions)
            and np.array_equal(init.z.velocities, init.sigma.velocities)):
        raise ConfigurationError("coupled runs start from the diagonal (z == sigma)")
    n, dim = init.n, init.dim
    kind, eps, amp = plan.spec.kernel_params
    rng = plan.stream.generator()
    zp, zv = init.z.positions.copy(), init.z.velocities.copy()
    sp, sv = init.sigma.positions.copy(), init.sigma.velocities.copy()
    t = init.z.time
    out, events = [], [] if plan.record_events else None
    i_series = np.empty(len(plan.observation_times))
    obs = plan.observation_times
    oi = 0
    while oi < len(obs):
        gap = rng.exponential(1.0 / n)
        t_event = t + gap
        while oi < len(obs) and obs[oi] <= t_event:
            d = obs[oi] - t
            _advance(zp, zv, d)
            _advance(sp, sv, d)
            t = obs[oi]
            out.append(CoupledConfig(ParticleConfig(zp.copy(), zv.copy(), t),
                                     ParticleConfig(sp.copy(), sv.copy(), t)))
            i_series[oi] = _mean_square_gap(zp, zv, sp, sv)
            oi += 1
        if oi >= len(obs):
            break
        d = t_event - t
        _advance(zp, zv, d)
        _advance(sp, sv, d)
        t = t_event
        i = int(rng.integers(0, n))
        xi = sample_shift(plan.spec, rng)
        zxt = np.ascontiguousarray(_wrap1(zp[i] + xi))
        sxt = _wrap1(sp[i] + xi)
        _, u_z, t_z = kernels.point_fields(zp, zv, zxt, kind, eps, amp)
        u_g, t_g = plan.snapshots.query(sxt, t)
        va = maxwellian.MaxwellianParams(u_z, max(t_z, 0.0))
        vb = maxwellian.MaxwellianParams(u_g, max(t_g, 0.0))
        vnew, wnew = maxwellian.coupled_sample(va, vb, rng)
        zp[i], zv[i] = zxt, vnew
        sp[i], sv[i] = sxt, wnew
        if events is not None:
            if t_z > 0.0:
                eta = (vnew - u_z) / math.sqrt(t_z)
            elif t_g > 0.0:
                eta = (wnew - u_g) / math.sqrt(t_g)
            else:
                eta = None
            events.append(JumpEvent(t, i, xi, eta))
    return CoupledResult(out, i_series, events)


def moment_diagnostic(traj: Sequence[ParticleConfig], p: int):
    """(times, empirical p-th velocity moments (1/N) sum |v_j|^p)."""
    if p not in (2, 4, 8, 16):
        raise ValueError("p must be one of 2, 4, 8, 16")
    times = np.array([c.time for c in traj])
    vals = np.array([
        float(np.mean(np.einsum("ij,ij->i", c.velocities, c.velocities) ** (p // 2)))
        for c in traj
    ])
    return times, vals


def trajectory_to_csv(traj: Sequence[ParticleConfig], path: str) -> None:
    """Stream observations as rows (time, particle, x..., v...)."""
    dim = traj[0].dim
    header = ["time", "particle"] + [f"x{k}" for k in range(dim)] + \
        [f"v{k}" for k in range(dim)]
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for c in traj:
            for j in range(c.n):
                row = [repr(float(c.time)), str(j)]
                row += [repr(float(x)) for x in c.positions[j]]
                row += [repr(float(v)) for v in c.velocities[j]]
                fh.write(",".join(row) + "\n")
