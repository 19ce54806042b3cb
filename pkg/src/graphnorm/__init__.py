"""Spectral simulator and verification suite for non-autonomous Schroedinger-type evolution.

Modules:

* :mod:`graphnorm.grid` -- periodic lattices, unitary FFTs, spectral multipliers;
* :mod:`graphnorm.norms` -- graph and Sobolev norms, operator-norm estimates;
* :mod:`graphnorm.potentials` -- potential catalog, Kato norms, N-particle lifts;
* :mod:`graphnorm.propagator` -- stepwise frozen-generator propagation and diagnostics;
* :mod:`graphnorm.inequalities` -- probe-based checks of the operator inequalities;
* :mod:`graphnorm.cli` -- the configuration-driven experiment runner.
"""

from .grid import Field, Grid, GridSpec, SpectralMultiplier, make_grid
from .norms import graph_norm, l2_norm, sobolev_norm
from .potentials import Envelope, PotentialSpec, System, TimePotential
from .propagator import Partition, PropagatorConfig, propagate

__version__ = "0.1.0"

__all__ = [
    "Field",
    "Grid",
    "GridSpec",
    "SpectralMultiplier",
    "make_grid",
    "graph_norm",
    "l2_norm",
    "sobolev_norm",
    "Envelope",
    "PotentialSpec",
    "System",
    "TimePotential",
    "Partition",
    "PropagatorConfig",
    "propagate",
]
