"""Named experiments reproducing the convergence statements, with
machine-readable outputs.

Each run_* function simulates, writes raw tables (CSV or JSON per config)
plus a report.json into the output directory, and returns the report dict.
Verdicts are recomputed from the stored raw tables by the evaluate_*
functions, so a PASS/FAIL can be re-derived without re-simulating.
Identical configs produce byte-identical raw tables.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from typing import Optional, Sequence

import numpy as np

from . import __version__, dynamics, metrics, solver
from .mollifier import MollifierSpec
from .solver import (ConfigurationError, InitialCondition, MixtureComponent,
                     PhaseGrid)
from .torus import CoupledConfig, ParticleConfig, RandomStream

EXPERIMENTS = ("stationarity", "homogeneous-oracle", "converge-n",
               "converge-eps", "combined", "diagnostics")

_DEFAULTS = {
    "converge-n": dict(n_list=[128, 256, 512, 1024, 2048], eps_list=[0.2],
                       t_end=1.0, dt=0.01, nx=128, nv=64, replicas=16),
    "converge-eps": dict(eps_list=[0.4, 0.2, 0.1, 0.05], t_end=1.0, dt=0.01,
                         nx=256, nv=64, replicas=1),
    "combined": dict(n_list=[256, 1024, 4096], gamma=25.0, t_end=1.0, dt=0.01,
                     nx=128, nv=64, replicas=8),
    "stationarity": dict(t_end=5.0, dt=0.01, nx=32, nv=64, n_list=[256],
                         replicas=8, t_particles=2.0),
    "homogeneous-oracle": dict(t_end=1.0, dt=0.02, nx=16, nv=96, replicas=1),
    "diagnostics": dict(t_end=5.0, dt=0.01, nx=128, nv=64, eps_list=[0.2],
                        n_list=[1024], replicas=1),
}


@dataclass
class ExperimentConfig:
    """Resolved configuration of one experiment run."""

    experiment: str
    d: int = 1
    n_list: list = field(default_factory=list)
    eps_list: list = field(default_factory=list)
    gamma: float = 25.0
    t_end: float = 1.0
    dt: float = 0.01
    nx: int = 128
    nv: int = 64
    v_max: Optional[float] = None
    replicas: int = 16
    seed: int = 1234
    out_dir: str = "out"
    fmt: str = "csv"
    workers: int = 1
    t_particles: float = 2.0
    u0: float = 0.35
    temp_hi: float = 1.0
    temp_lo: float = 0.9
    wave_amp: float = 0.5
    mollifier: Optional[dict] = None   # {kind, epsilon} override where allowed

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigurationError(f"unknown experiment {self.experiment!r}")
        if self.fmt not in ("csv", "json"):
            raise ConfigurationError("format must be csv or json")
        if self.d not in (1, 2, 3):
            raise ConfigurationError("d must be 1, 2 or 3")
        self.n_list = [int(n) for n in self.n_list]
        self.eps_list = [float(e) for e in self.eps_list]
        if self.experiment == "converge-n":
            if len(self.n_list) < 4:
                raise ConfigurationError("converge-n needs at least 4 N values")
            if any(b <= a for a, b in zip(self.n_list, self.n_list[1:])):
                raise ConfigurationError("N list must be strictly increasing")
            if len(self.eps_list) != 1:
                raise ConfigurationError("converge-n uses a single fixed epsilon")
            if self.replicas < 2:
                raise ConfigurationError("need at least 2 replicas")
        if self.experiment == "converge-eps":
            if len(self.eps_list) < 4:
                raise ConfigurationError("converge-eps needs at least 4 epsilon values")
            if any(b >= a for a, b in zip(self.eps_list, self.eps_list[1:])):
                raise ConfigurationError("epsilon list must be strictly decreasing")
        if self.experiment == "combined":
            eta = 10.0 * (self.d + 1)
            if self.gamma <= eta:
                raise ConfigurationError(
                    f"combined experiment requires gamma > {eta} (10(d+1)), got {self.gamma}")
            if len(self.n_list) < 2:
                raise ConfigurationError("combined needs at least 2 N values")
            if any(b <= a for a, b in zip(self.n_list, self.n_list[1:])):
                raise ConfigurationError("N list must be strictly increasing")
        if self.mollifier is not None:
            if self.experiment in ("converge-eps", "combined"):
                raise ConfigurationError(
                    f"{self.experiment} sweeps the smearing width; "
                    "a fixed mollifier entry is not allowed")
            MollifierSpec.from_dict(self.mollifier, self.d)   # validates

    def smearing_spec(self, default_kind: str = "bump") -> MollifierSpec:
        """The smearing function this run uses: the config's {kind, epsilon}
        entry when present, else the experiment default."""
        if self.mollifier is not None:
            return MollifierSpec.from_dict(self.mollifier, self.d)
        if default_kind == "uniform":
            return MollifierSpec("uniform", self.d)
        return MollifierSpec("bump", self.d, self.eps_list[0] if self.eps_list else 0.2)

    @staticmethod
    def build(experiment: str, overrides: Optional[dict] = None) -> "ExperimentConfig":
        params = dict(_DEFAULTS.get(experiment, {}))
        params.update(overrides or {})
        params.pop("experiment", None)
        known = {f for f in ExperimentConfig.__dataclass_fields__}
        bad = set(params) - known
        if bad:
            raise ConfigurationError(f"unknown config keys: {sorted(bad)}")
        return ExperimentConfig(experiment=experiment, **params)


# ---------------------------------------------------------------------------
# shared pieces
# ---------------------------------------------------------------------------

class SineWeight:
    """Picklable smooth positive weight (1 + sign * amp * sin(2 pi x_0)) / 2."""

    def __init__(self, amp: float, sign: float):
        self.amp = amp
        self.sign = sign

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return 0.5 * (1.0 + self.sign * self.amp * np.sin(2.0 * np.pi * x[:, 0]))


def default_datum(cfg: ExperimentConfig) -> InitialCondition:
    """The x-modulated two-Maxwellian mixture used by the rate experiments:
    w(x) M_{+u0,T1} + (1-w(x)) M_{-u0,T2} with w = (1 + a sin(2 pi x_0))/2.
    Its spatial density is identically one."""
    a = cfg.wave_amp
    if not 0.0 < a < 1.0:
        raise ConfigurationError("wave_amp must lie in (0, 1)")
    up = np.zeros(cfg.d)
    up[0] = cfg.u0
    return InitialCondition([
        MixtureComponent(SineWeight(a, 1.0), up, cfg.temp_hi),
        MixtureComponent(SineWeight(a, -1.0), -up, cfg.temp_lo),
    ], dim=cfg.d)


def auto_v_max(ic: InitialCondition) -> float:
    u_max = max(float(np.linalg.norm(c.u)) for c in ic.components)
    t_max = max(c.t for c in ic.components)
    return u_max + 6.0 * math.sqrt(t_max) + 0.15


def make_grid(cfg: ExperimentConfig, ic: InitialCondition) -> PhaseGrid:
    v_max = cfg.v_max if cfg.v_max is not None else auto_v_max(ic)
    return PhaseGrid(cfg.nx, cfg.nv, v_max, cfg.d)


def _fmt_cell(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def write_table(out_dir: str, name: str, header: Sequence[str], rows, fmt: str) -> str:
    """Raw table writer; CSV uses shortest-roundtrip float format, JSON a
    list of row objects.  Deterministic for identical inputs."""
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"{name}.{fmt}")
    if fmt == "csv":
        with open(path, "w") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(_fmt_cell(v) for v in row) + "\n")
    else:
        payload = [dict(zip(header, [float(v) if isinstance(v, (float, np.floating))
                                     else int(v) for v in row])) for row in rows]
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
            fh.write("\n")
    return path


def read_table(path: str):
    """Inverse of write_table: (header, rows of floats)."""
    if path.endswith(".json"):
        with open(path) as fh:
            payload = json.load(fh)
        header = sorted(payload[0]) if payload else []
        return header, [[float(r[h]) for h in header] for r in payload]
    with open(path) as fh:
        lines = fh.read().strip().splitlines()
    header = lines[0].split(",")
    return header, [[float(v) for v in ln.split(",")] for ln in lines[1:]]


def _table_path(out_dir: str, name: str) -> str:
    for ext in ("csv", "json"):
        p = os.path.join(out_dir, f"{name}.{ext}")
        if os.path.exists(p):
            return p
    raise FileNotFoundError(f"no table {name} in {out_dir}")


def write_gnuplot_slope(out_dir: str, name: str, table: str, fit: metrics.SlopeFit,
                        xlabel: str, ylabel: str) -> str:
    path = os.path.join(out_dir, f"{name}.gp")
    with open(path, "w") as fh:
        fh.write(
            "set datafile separator \",\"\n"
            "set logscale xy\n"
            f"set xlabel \"{xlabel}\"\n"
            f"set ylabel \"{ylabel}\"\n"
            f"set title \"slope {fit.slope:.3f}, r^2 {fit.r_squared:.3f}\"\n"
            f"plot \"{table}\" every ::1 using 1:2 with points pt 7 title \"measured\", \\\n"
            f"     exp({fit.intercept!r}) * x**({fit.slope!r}) title \"fit\"\n")
    return path


def _write_report(out_dir: str, cfg: ExperimentConfig, verdict: dict,
                  wallclock: float, extra: Optional[dict] = None) -> dict:
    report = {
        "experiment": cfg.experiment,
        "config": asdict(cfg),
        "code_version": __version__,
        "wallclock_s": wallclock,
        "verdict": verdict,
    }
    if extra:
        report.update(extra)
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "report.json"), "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")
    return report


def _sample_datum_config(ic: InitialCondition, n: int, stream: RandomStream) -> ParticleConfig:
    pos, vel = ic.sample(stream.generator(), n)
    return ParticleConfig(pos, vel)


# ---------------------------------------------------------------------------
# coupled replica machinery (shared by converge-n and combined)
# ---------------------------------------------------------------------------

def _coupled_worker(payload):
    """One coupled replica; top-level so worker pools can pickle it."""
    cfg, ic, spec_dict, snapshots, n, obs, stream_key, replica = payload
    spec = MollifierSpec.from_dict(spec_dict, cfg.d)
    st = RandomStream(cfg.seed).child(stream_key).child(replica)
    init = _sample_datum_config(ic, n, st.child(0))
    plan = dynamics.SimulationPlan(n, cfg.t_end, spec, "coupled",
                                   st.child(1), obs, snapshots=snapshots)
    return dynamics.simulate_coupled(plan, CoupledConfig(init, init.copy()))


def _run_coupled_replicas(cfg: ExperimentConfig, ic: InitialCondition,
                          spec: MollifierSpec, snapshots, n: int,
                          obs: np.ndarray, stream_key: int):
    """Replica block of coupled runs, returned in replica order regardless
    of scheduling."""
    payloads = [(cfg, ic, spec.to_dict(), snapshots, n, obs, stream_key, r)
                for r in range(cfg.replicas)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(_coupled_worker, payloads))
    return [_coupled_worker(p) for p in payloads]


# ---------------------------------------------------------------------------
# converge-n
# ---------------------------------------------------------------------------

def run_converge_n(cfg: ExperimentConfig) -> dict:
    """Propagation-of-chaos rate: replica-mean coupled gap I_N(t) vs N must
    fit a log-log slope in [-1.3, -0.7] with r^2 >= 0.9."""
    t0 = time.perf_counter()
    spec = cfg.smearing_spec()
    ic = default_datum(cfg)
    grid = make_grid(cfg, ic)
    sol = solver.init(ic, grid, regularized=True, spec=spec)
    run = solver.solve_to(sol, cfg.t_end, cfg.dt, collect_snapshots=True,
                          collect_diagnostics=False)
    snapshots = run.snapshots
    obs = np.linspace(cfg.t_end / 4.0, cfg.t_end, 4)

    raw_rows = []
    marginal_rows = []
    for idx, n in enumerate(cfg.n_list):
        results = _run_coupled_replicas(cfg, ic, spec, snapshots, n, obs,
                                        stream_key=n)
        for r, res in enumerate(results):
            for k, t in enumerate(obs):
                raw_rows.append((n, r, float(t), float(res.i_series[k])))
        if n <= metrics.ASSIGNMENT_CAP:
            final0 = results[0].configs[-1]
            w2 = metrics.w2_assignment(final0.z, final0.sigma)
            marginal_rows.append((n, w2.squared, float(results[0].i_series[-1])))

    raw_path = write_table(cfg.out_dir, "i_n_raw", ("n", "replica", "time", "i_n"),
                           raw_rows, cfg.fmt)
    write_table(cfg.out_dir, "marginal_check",
                ("n", "w2_squared_marginal", "i_n_replica0"), marginal_rows, cfg.fmt)

    verdict, fit, mean_rows = evaluate_converge_n(cfg.out_dir, cfg.t_end)
    write_table(cfg.out_dir, "i_n_mean", ("n", "i_n_mean", "i_n_se"), mean_rows, "csv")
    write_gnuplot_slope(cfg.out_dir, "i_n_slope", "i_n_mean.csv", fit, "N", "I_N")
    return _write_report(cfg.out_dir, cfg, verdict, time.perf_counter() - t0,
                         {"fit": asdict_fit(fit), "mollifier": spec.to_dict()})


def evaluate_converge_n(out_dir: str, t_end: float):
    """Pure re-evaluation from the stored raw table."""
    header, rows = read_table(_table_path(out_dir, "i_n_raw"))
    col = {h: i for i, h in enumerate(header)}
    at_end = [r for r in rows if abs(r[col["time"]] - t_end) < 1e-9]
    ns = sorted({int(r[col["n"]]) for r in at_end})
    mean_rows = []
    for n in ns:
        vals = [r[col["i_n"]] for r in at_end if int(r[col["n"]]) == n]
        mean = math.fsum(vals) / len(vals)
        se = math.sqrt(math.fsum((v - mean) ** 2 for v in vals)
                       / (len(vals) - 1)) / math.sqrt(len(vals))
        mean_rows.append((n, mean, se))
    fit = metrics.fit_loglog_slope([(n, m) for n, m, _ in mean_rows])
    passed = -1.3 <= fit.slope <= -0.7 and fit.r_squared >= 0.9
    monotone_ok = all(b[1] <= a[1] + 2.0 * (a[2] + b[2])
                      for a, b in zip(mean_rows, mean_rows[1:]))

    header_m, rows_m = read_table(_table_path(out_dir, "marginal_check"))
    cm = {h: i for i, h in enumerate(header_m)}
    marginal_ok = all(r[cm["w2_squared_marginal"]] <= r[cm["i_n_replica0"]] + 1e-12
                      for r in rows_m)
    verdict = {
        "passed": bool(passed and marginal_ok and monotone_ok),
        "slope": fit.slope,
        "slope_window": [-1.3, -0.7],
        "r_squared": fit.r_squared,
        "monotone_ok": bool(monotone_ok),
        "marginal_bound_ok": bool(marginal_ok),
    }
    return verdict, fit, mean_rows


def asdict_fit(fit: metrics.SlopeFit) -> dict:
    return {"slope": fit.slope, "intercept": fit.intercept,
            "r_squared": fit.r_squared, "points": [list(p) for p in fit.points]}


# ---------------------------------------------------------------------------
# converge-eps
# ---------------------------------------------------------------------------

def run_converge_eps(cfg: ExperimentConfig) -> dict:
    """Cut-off removal rate: weighted-L1 distance between the plain and the
    smeared-field solutions vs epsilon; floor-corrected slope in [0.7, 1.3]."""
    t0 = time.perf_counter()
    ic = default_datum(cfg)
    grid = make_grid(cfg, ic)
    plain = solver.solve_to(solver.init(ic, grid), cfg.t_end, cfg.dt,
                            collect_diagnostics=False).final
    rows = []
    for eps in cfg.eps_list:
        spec = MollifierSpec("bump", cfg.d, eps)
        reg = solver.solve_to(solver.init(ic, grid, regularized=True, spec=spec),
                              cfg.t_end, cfg.dt, collect_diagnostics=False).final
        rows.append((float(eps), solver.weighted_l1_distance(plain, reg)))

    # discretization floor from one refinement pair at the smallest epsilon
    eps_ref = cfg.eps_list[-1]
    fine_cfg_grid = PhaseGrid(2 * cfg.nx, cfg.nv, grid.v_max, cfg.d)
    plain_f = solver.solve_to(solver.init(ic, fine_cfg_grid), cfg.t_end,
                              cfg.dt / 2.0, collect_diagnostics=False).final
    spec_ref = MollifierSpec("bump", cfg.d, eps_ref)
    reg_f = solver.solve_to(solver.init(ic, fine_cfg_grid, regularized=True,
                                        spec=spec_ref), cfg.t_end, cfg.dt / 2.0,
                            collect_diagnostics=False).final
    d_fine = solver.weighted_l1_distance(plain_f, reg_f)
    d_coarse = dict((e, v) for e, v in rows)[eps_ref]
    floor = abs(d_coarse - d_fine)

    raw = [(e, v, math.sqrt(max(v * v - floor * floor, 1e-300))) for e, v in rows]
    write_table(cfg.out_dir, "distances", ("eps", "distance", "corrected"),
                raw, cfg.fmt)
    with open(os.path.join(cfg.out_dir, "floor.json"), "w") as fh:
        json.dump({"floor": floor, "eps_ref": eps_ref,
                   "d_coarse": d_coarse, "d_fine": d_fine}, fh, indent=2)
        fh.write("\n")

    verdict, fit = evaluate_converge_eps(cfg.out_dir)
    write_table(cfg.out_dir, "distances_mean", ("eps", "corrected"),
                [(e, c) for e, _, c in raw], "csv")
    write_gnuplot_slope(cfg.out_dir, "eps_slope", "distances_mean.csv", fit,
                        "epsilon", "weighted L1 distance")
    return _write_report(cfg.out_dir, cfg, verdict, time.perf_counter() - t0,
                         {"fit": asdict_fit(fit), "floor": floor})


def evaluate_converge_eps(out_dir: str):
    header, rows = read_table(_table_path(out_dir, "distances"))
    col = {h: i for i, h in enumerate(header)}
    pts = [(r[col["eps"]], r[col["corrected"]]) for r in rows]
    fit = metrics.fit_loglog_slope(pts)
    passed = 0.7 <= fit.slope <= 1.3 and fit.r_squared >= 0.9
    return {"passed": bool(passed), "slope": fit.slope,
            "slope_window": [0.7, 1.3], "r_squared": fit.r_squared}, fit


# ---------------------------------------------------------------------------
# combined
# ---------------------------------------------------------------------------

def run_combined(cfg: ExperimentConfig) -> dict:
    """Joint limit with epsilon_N = (log N)^(-1/gamma): the two-term error
    proxy sqrt(I_N) + weighted-L1(f, g^eps_N) must be nonincreasing in N."""
    t0 = time.perf_counter()
    ic = default_datum(cfg)
    grid = make_grid(cfg, ic)
    plain = solver.solve_to(solver.init(ic, grid), cfg.t_end, cfg.dt,
                            collect_diagnostics=False).final
    obs = np.array([cfg.t_end])
    rows = []
    for n in cfg.n_list:
        eps_n = (math.log(n)) ** (-1.0 / cfg.gamma)
        spec = MollifierSpec("bump", cfg.d, eps_n)
        reg_run = solver.solve_to(solver.init(ic, grid, regularized=True, spec=spec),
                                  cfg.t_end, cfg.dt, collect_snapshots=True,
                                  collect_diagnostics=False)
        dist = solver.weighted_l1_distance(plain, reg_run.final)
        results = _run_coupled_replicas(cfg, ic, spec, reg_run.snapshots, n, obs,
                                        stream_key=n)
        i_vals = [float(r.i_series[-1]) for r in results]
        mean = math.fsum(i_vals) / len(i_vals)
        se = math.sqrt(math.fsum((v - mean) ** 2 for v in i_vals)
                       / max(len(i_vals) - 1, 1)) / math.sqrt(len(i_vals))
        sqrt_i = math.sqrt(mean)
        sqrt_se = se / (2.0 * sqrt_i) if sqrt_i > 0 else 0.0
        rows.append((n, eps_n, sqrt_i, sqrt_se, dist, sqrt_i + dist))
    write_table(cfg.out_dir, "combined",
                ("n", "eps_n", "sqrt_i_n", "sqrt_i_n_se", "weighted_l1", "combined"),
                rows, cfg.fmt)
    verdict = evaluate_combined(cfg.out_dir)
    return _write_report(cfg.out_dir, cfg, verdict, time.perf_counter() - t0)


def evaluate_combined(out_dir: str):
    header, rows = read_table(_table_path(out_dir, "combined"))
    col = {h: i for i, h in enumerate(header)}
    rows = sorted(rows, key=lambda r: r[col["n"]])
    ok = True
    for a, b in zip(rows, rows[1:]):
        slack = 2.0 * (a[col["sqrt_i_n_se"]] + b[col["sqrt_i_n_se"]])
        if b[col["combined"]] > a[col["combined"]] + slack:
            ok = False
    eps_monotone = all(b[col["eps_n"]] < a[col["eps_n"]]
                       for a, b in zip(rows, rows[1:]))
    return {"passed": bool(ok and eps_monotone),
            "nonincreasing": bool(ok), "eps_decreasing": bool(eps_monotone),
            "combined": [r[col["combined"]] for r in rows]}


# ---------------------------------------------------------------------------
# stationarity
# ---------------------------------------------------------------------------

def run_stationarity(cfg: ExperimentConfig) -> dict:
    """Fixed-point drift of the solver on a global Maxwellian datum plus an
    MC band check of kinetic-energy stationarity for the interacting system."""
    t0 = time.perf_counter()
    ic = InitialCondition([MixtureComponent(1.0, np.zeros(cfg.d), 1.0)], dim=cfg.d)
    grid = make_grid(cfg, ic)
    sol0 = solver.init(ic, grid)
    ref = np.max(np.abs(sol0.values))
    cur = sol0
    drift_rows = [(0.0, 0.0)]
    while cur.time < cfg.t_end - 1e-12:
        cur = solver.step(cur, min(cfg.dt, cfg.t_end - cur.time))
        drift_rows.append((cur.time, float(np.max(np.abs(cur.values - sol0.values)) / ref)))
    write_table(cfg.out_dir, "solver_drift", ("time", "rel_drift"), drift_rows, cfg.fmt)

    n = cfg.n_list[0] if cfg.n_list else 256
    spec = cfg.smearing_spec("uniform")
    obs = np.linspace(0.0, cfg.t_particles, 9)[1:]
    energy_rows = []
    for r in range(cfg.replicas):
        st = RandomStream(cfg.seed).child(1000).child(r)
        g = st.child(0).generator()
        init = ParticleConfig(g.uniform(-0.5, 0.5, (n, cfg.d)),
                              g.standard_normal((n, cfg.d)))
        e0 = float(np.mean(np.einsum("ij,ij->i", init.velocities, init.velocities)))
        plan = dynamics.SimulationPlan(n, cfg.t_particles, spec, "interacting",
                                       st.child(1), obs)
        res = dynamics.simulate_interacting(plan, init)
        _, moments = dynamics.moment_diagnostic(res.configs, 2)
        energy_rows.append((r, e0, *[float(m) for m in moments]))
    header = ("replica", "energy_t0") + tuple(f"energy_t{k+1}" for k in range(len(obs)))
    write_table(cfg.out_dir, "particle_energy", header, energy_rows, cfg.fmt)

    verdict = evaluate_stationarity(cfg.out_dir)
    return _write_report(cfg.out_dir, cfg, verdict, time.perf_counter() - t0)


def evaluate_stationarity(out_dir: str):
    _, drift_rows = read_table(_table_path(out_dir, "solver_drift"))
    max_drift = max(r[1] for r in drift_rows)
    header, erows = read_table(_table_path(out_dir, "particle_energy"))
    e0 = np.array([r[1] for r in erows])
    efin = np.array([r[-1] for r in erows])
    diff = efin - e0
    se = float(np.std(diff, ddof=1) / math.sqrt(len(diff))) if len(diff) > 1 else 1.0
    z = abs(float(np.mean(diff))) / se if se > 0 else 0.0
    return {"passed": bool(max_drift <= 1e-6 and z <= 4.0),
            "max_solver_drift": max_drift, "drift_tol": 1e-6,
            "energy_z_score": z, "z_tol": 4.0}


# ---------------------------------------------------------------------------
# homogeneous oracle
# ---------------------------------------------------------------------------

def run_homogeneous_oracle(cfg: ExperimentConfig) -> dict:
    """Solver vs the analytic homogeneous relaxation
    e^-t f0 + (1 - e^-t) rho0 M; the error must halve when dt halves."""
    t0 = time.perf_counter()
    temp = cfg.temp_hi
    up = np.zeros(cfg.d)
    up[0] = cfg.u0
    ic = InitialCondition([MixtureComponent(0.5, up, temp),
                           MixtureComponent(0.5, -up, temp)], dim=cfg.d)
    grid = make_grid(cfg, ic)
    sol0 = solver.init(ic, grid)
    t_mix = temp + float(up @ up) / cfg.d
    dvv = grid.v_flat
    m = (2.0 * math.pi * t_mix) ** (-cfg.d / 2.0) * \
        np.exp(-np.einsum("ij,ij->i", dvv, dvv) / (2.0 * t_mix))
    oracle = (math.exp(-cfg.t_end) * sol0.flat +
              (1.0 - math.exp(-cfg.t_end)) * m[None, :]).reshape(grid.shape)
    rows = []
    for dt in (cfg.dt, cfg.dt / 2.0):
        fin = solver.solve_to(sol0, cfg.t_end, dt, collect_diagnostics=False).final
        rows.append((dt, float(np.max(np.abs(fin.values - oracle)))))
    write_table(cfg.out_dir, "oracle_errors", ("dt", "max_error"), rows, cfg.fmt)
    verdict = evaluate_homogeneous_oracle(cfg.out_dir, grid.dv)
    return _write_report(cfg.out_dir, cfg, verdict, time.perf_counter() - t0)


def evaluate_homogeneous_oracle(out_dir: str, dv: float):
    _, rows = read_table(_table_path(out_dir, "oracle_errors"))
    rows = sorted(rows, key=lambda r: -r[0])
    ratio = rows[0][1] / rows[1][1] if rows[1][1] > 0 else float("inf")
    bound_ok = all(err <= 5.0 * (dt + dv * dv) for dt, err in rows)
    return {"passed": bool(1.7 <= ratio <= 2.3 and bound_ok),
            "richardson_ratio": ratio, "ratio_window": [1.7, 2.3],
            "bound_ok": bool(bound_ok),
            "errors": {repr(dt): err for dt, err in rows}}


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------

def run_diagnostics(cfg: ExperimentConfig) -> dict:
    """Long-horizon monitors: field lower bounds and norm/moment boundedness
    for the smeared-field solver run and the interacting particle run."""
    t0 = time.perf_counter()
    spec = cfg.smearing_spec()
    ic = default_datum(cfg)
    grid = make_grid(cfg, ic)
    c2 = ic.lower_envelope_mass(grid)
    run = solver.solve_to(solver.init(ic, grid, regularized=True, spec=spec),
                          cfg.t_end, cfg.dt)
    rows = [(d.time, d.nq, d.rho_min, d.t_min, d.u_max, d.t_max, d.grad_nq,
             d.mass_drift, 0.5 * c2 * math.exp(-d.time)) for d in run.diagnostics]
    write_table(cfg.out_dir, "solver_diagnostics",
                ("time", "nq", "rho_min", "t_min", "u_max", "t_max", "grad_nq",
                 "mass_drift", "rho_floor"), rows, cfg.fmt)

    n = cfg.n_list[0] if cfg.n_list else 1024
    st = RandomStream(cfg.seed).child(2000)
    init = _sample_datum_config(ic, n, st.child(0))
    obs = np.linspace(0.0, cfg.t_end, 21)[1:]
    plan = dynamics.SimulationPlan(n, cfg.t_end, spec, "interacting",
                                   st.child(1), obs)
    res = dynamics.simulate_interacting(plan, init)
    times, m2 = dynamics.moment_diagnostic(res.configs, 2)
    _, m8 = dynamics.moment_diagnostic(res.configs, 8)
    write_table(cfg.out_dir, "particle_moments", ("time", "p2", "p8"),
                [(float(t), float(a), float(b)) for t, a, b in zip(times, m2, m8)],
                cfg.fmt)
    verdict = evaluate_diagnostics(cfg.out_dir)
    return _write_report(cfg.out_dir, cfg, verdict, time.perf_counter() - t0,
                         {"c2": c2, "mollifier": spec.to_dict()})


def evaluate_diagnostics(out_dir: str):
    header, rows = read_table(_table_path(out_dir, "solver_diagnostics"))
    col = {h: i for i, h in enumerate(header)}
    rho_ok = all(r[col["rho_min"]] >= r[col["rho_floor"]] for r in rows)
    finite = all(np.isfinite(r[col["nq"]]) and np.isfinite(r[col["grad_nq"]])
                 for r in rows)
    t_pos = all(r[col["t_min"]] > 0 for r in rows)
    header_m, mrows = read_table(_table_path(out_dir, "particle_moments"))
    cm = {h: i for i, h in enumerate(header_m)}
    p8 = [r[cm["p8"]] for r in mrows]
    running_median = float(np.median(p8))
    moment_ok = p8[-1] <= 2.0 * running_median
    return {"passed": bool(rho_ok and finite and t_pos and moment_ok),
            "rho_floor_ok": bool(rho_ok), "norms_finite": bool(finite),
            "smeared_temperature_positive": bool(t_pos),
            "p8_final": p8[-1], "p8_median": running_median,
            "moment_ok": bool(moment_ok)}


RUNNERS = {
    "converge-n": run_converge_n,
    "converge-eps": run_converge_eps,
    "combined": run_combined,
    "stationarity": run_stationarity,
    "homogeneous-oracle": run_homogeneous_oracle,
    "diagnostics": run_diagnostics,
}
