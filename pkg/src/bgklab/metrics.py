"""Wasserstein estimators and rate extraction.

The exact empirical 2-Wasserstein distance between equal-weight point clouds
is computed by optimal assignment (shortest augmenting path via scipy's
linear_sum_assignment) under the phase-space ground metric
|x - y|^2 (minimal image) + |v - w|^2.  Beyond the size cap a sliced
projection proxy is provided.  Log-log slope fits turn distance tables into
convergence rates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

ASSIGNMENT_CAP = 2048


class AssignmentDistance(NamedTuple):
    value: float      # the distance
    squared: float    # minimal mean squared cost


def _cloud(c):
    """Accept a ParticleConfig or a (positions, velocities) pair."""
    if hasattr(c, "positions"):
        return c.positions, c.velocities
    pos, vel = c
    return np.atleast_2d(np.asarray(pos, dtype=float)), \
        np.atleast_2d(np.asarray(vel, dtype=float))


def phase_cost_matrix(cloud_a, cloud_b) -> np.ndarray:
    """Pairwise squared phase-space distances between two clouds."""
    pa, va = _cloud(cloud_a)
    pb, vb = _cloud(cloud_b)
    dx = pa[:, None, :] - pb[None, :, :]
    dx -= np.floor(dx + 0.5)
    dv = va[:, None, :] - vb[None, :, :]
    return np.einsum("ijk,ijk->ij", dx, dx) + np.einsum("ijk,ijk->ij", dv, dv)


def w2_assignment(cloud_a, cloud_b) -> AssignmentDistance:
    """Exact empirical 2-Wasserstein distance (equal-weight clouds of equal
    size M <= 2048): minimal mean squared cost over permutations."""
    pa, va = _cloud(cloud_a)
    pb, vb = _cloud(cloud_b)
    if pa.shape != pb.shape or va.shape != vb.shape:
        raise ValueError("clouds must have equal size and dimension")
    m = pa.shape[0]
    if m > ASSIGNMENT_CAP:
        raise ValueError(f"cloud size {m} exceeds the cap {ASSIGNMENT_CAP}; "
                         "use sliced_w2")
    cost = phase_cost_matrix((pa, va), (pb, vb))
    rows, cols = linear_sum_assignment(cost)
    squared = float(cost[rows, cols].mean())
    return AssignmentDistance(math.sqrt(squared), squared)


def sliced_w2(cloud_a: np.ndarray, cloud_b: np.ndarray, n_projections: int,
              rng: np.random.Generator) -> float:
    """Sliced proxy: sqrt of the average over random unit directions of the
    squared exact 1-d transport cost (sorted matching).  Clouds are plain
    (M, D) coordinate arrays; no relation to the exact assignment value is
    claimed."""
    a = np.atleast_2d(np.asarray(cloud_a, dtype=float))
    b = np.atleast_2d(np.asarray(cloud_b, dtype=float))
    if a.shape != b.shape:
        raise ValueError("clouds must have equal size and dimension")
    dim = a.shape[1]
    total = 0.0
    for _ in range(n_projections):
        if dim == 1:
            theta = np.ones(1)
        else:
            theta = rng.standard_normal(dim)
            theta /= np.linalg.norm(theta)
        pa = np.sort(a @ theta)
        pb = np.sort(b @ theta)
        total += float(np.mean((pa - pb) ** 2))
    return math.sqrt(total / n_projections)


def i_n_aggregate(series: Sequence[tuple]):
    """Replica mean and standard error of coupled-gap series.

    series: list of (times, values) pairs on a common observation grid.
    Returns (times, mean, standard_error); reductions use exact summation so
    the result does not depend on replica ordering.
    """
    if len(series) < 2:
        raise ValueError("need at least two replicas")
    times0 = np.asarray(series[0][0], dtype=float)
    vals = []
    for times, v in series:
        if not np.array_equal(np.asarray(times, dtype=float), times0):
            raise ValueError("replica observation grids differ")
        vals.append(np.asarray(v, dtype=float))
    r = len(vals)
    mean = np.array([math.fsum(v[k] for v in vals) / r for k in range(len(times0))])
    se = np.empty(len(times0))
    for k in range(len(times0)):
        ss = math.fsum((v[k] - mean[k]) ** 2 for v in vals)
        se[k] = math.sqrt(ss / (r - 1)) / math.sqrt(r)
    return times0, mean, se


@dataclass(frozen=True)
class SlopeFit:
    """Least-squares line through (log x, log y)."""

    slope: float
    intercept: float
    r_squared: float
    points: tuple

    def predict(self, x: float) -> float:
        return math.exp(self.intercept + self.slope * math.log(x))


def fit_loglog_slope(points) -> SlopeFit:
    """Fit log y = intercept + slope log x; needs >= 3 points with positive,
    distinct abscissas and positive ordinates."""
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 3:
        raise ValueError("need at least 3 points for a slope fit")
    xs = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ValueError("log-log fit needs positive coordinates")
    if len(np.unique(xs)) != len(xs):
        raise ValueError("abscissas must be distinct")
    lx, ly = np.log(xs), np.log(ys)
    a = np.stack([lx, np.ones_like(lx)], axis=1)
    (slope, intercept), *_ = np.linalg.lstsq(a, ly, rcond=None)
    resid = ly - (slope * lx + intercept)
    ss_res = float(resid @ resid)
    ss_tot = float(((ly - ly.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return SlopeFit(float(slope), float(intercept), r2, tuple(pts))
