"""Torus geometry, particle containers, and reproducible random streams.

Positions live on the d-torus of side one with coordinates in [-1/2, 1/2)
(the boundary +1/2 maps to -1/2); velocities are plain vectors in R^d.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def wrap(p) -> np.ndarray:
    """Map raw coordinates to the torus representative in [-1/2, 1/2)."""
    p = np.asarray(p, dtype=float)
    if not np.all(np.isfinite(p)):
        raise ValueError("non-finite coordinates cannot be wrapped")
    return p - np.floor(p + 0.5)


def displacement(a, b) -> np.ndarray:
    """Minimal-image representative of a - b, componentwise in [-1/2, 1/2)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    d = a - b
    return d - np.floor(d + 0.5)


def squared_distance_phase(a, b) -> float:
    """Squared phase-space distance |x-y|^2 (minimal image) + |v-w|^2.

    a, b are (position, velocity) pairs with matching dimension.
    """
    xa, va = a
    xb, vb = b
    dx = displacement(xa, xb)
    dv = np.asarray(va, dtype=float) - np.asarray(vb, dtype=float)
    if dx.shape != dv.shape:
        raise ValueError("position/velocity dimension mismatch")
    return float(dx @ dx + dv @ dv)


@dataclass
class ParticleConfig:
    """Positions and velocities of N particles on the torus at a given time.

    positions: (N, d) array with entries in [-1/2, 1/2); velocities: (N, d).
    """

    positions: np.ndarray
    velocities: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.positions = np.atleast_2d(np.asarray(self.positions, dtype=float))
        self.velocities = np.atleast_2d(np.asarray(self.velocities, dtype=float))
        if self.positions.shape != self.velocities.shape:
            raise ValueError("positions and velocities must have equal shape")
        if self.positions.shape[0] < 1:
            raise ValueError("need at least one particle")
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dimension must be 1, 2 or 3, got {self.dim}")
        if not np.all(np.isfinite(self.velocities)):
            raise ValueError("velocities must be finite")
        if self.time < 0:
            raise ValueError("time must be nonnegative")
        self.positions = wrap(self.positions)

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    @property
    def dim(self) -> int:
        return self.positions.shape[1]

    def copy(self) -> "ParticleConfig":
        return ParticleConfig(self.positions.copy(), self.velocities.copy(), self.time)


@dataclass
class CoupledConfig:
    """Paired configurations (interacting side z, auxiliary side sigma)."""

    z: ParticleConfig
    sigma: ParticleConfig

    def __post_init__(self):
        if self.z.n != self.sigma.n or self.z.dim != self.sigma.dim:
            raise ValueError("coupled sides must share N and dimension")
        if self.z.time != self.sigma.time:
            raise ValueError("coupled sides must share the time stamp")

    @property
    def n(self) -> int:
        return self.z.n

    @property
    def dim(self) -> int:
        return self.z.dim

    def copy(self) -> "CoupledConfig":
        return CoupledConfig(self.z.copy(), self.sigma.copy())


@dataclass(frozen=True)
class RandomStream:
    """Deterministic, splittable random stream keyed by (seed, stream_id).

    Equal keys give bit-identical sequences; distinct stream_ids give
    statistically independent sequences (Philox counter-based generator
    seeded through SeedSequence).  Replicas and per-particle clocks get
    their own child streams so results do not depend on scheduling.
    """

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence((self.seed, self.stream_id))
        return np.random.Generator(np.random.Philox(ss))

    def child(self, key: int) -> "RandomStream":
        """Derive an independent stream; deterministic in (self, key)."""
        mixed = np.random.SeedSequence((self.stream_id, key)).generate_state(1, np.uint64)[0]
        return RandomStream(self.seed, int(mixed))
