"""Simulation laboratory for the particle approximation of the BGK equation.

Core pieces: torus phase-space containers, smearing kernels, Maxwellian
sampling and optimal couplings, a semi-Lagrangian grid solver for the plain
and field-smeared BGK equations, event-driven jump-process simulators
(interacting, auxiliary, coupled), Wasserstein estimators, and a CLI that
runs the convergence-rate experiments.
"""

__version__ = "0.1.0"

from .torus import ParticleConfig, CoupledConfig, RandomStream, wrap, displacement
from .mollifier import MollifierSpec
from .maxwellian import MaxwellianParams

__all__ = [
    "__version__",
    "ParticleConfig",
    "CoupledConfig",
    "RandomStream",
    "wrap",
    "displacement",
    "MollifierSpec",
    "MaxwellianParams",
]
