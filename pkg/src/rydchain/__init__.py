"""Thermalization analytics for a 1D chain of hardcore-blockaded Rydberg atoms.

Three routes to the same observables, for quantitative comparison:

* exact diagonalization of the laser-driving Hamiltonian restricted to the
  blockade-allowed subspace, with infinite-time averaging,
* closed-form microcanonical-ensemble predictions (state counting and
  spatial excitation density), cross-validated by exact uniform Monte-Carlo
  sampling,
* a reduced few-state model explaining the excitation-localization peaks.
"""

from .basis import (
    AllowedBasis,
    BasisSizeError,
    ChainSpec,
    Configuration,
    build_basis,
    is_allowed,
)
from .micro import (
    ExcitationStats,
    count_continuous,
    count_discrete,
    nu_distribution,
    spatial_density,
    total_spatial_distribution,
)

__version__ = "0.1.0"
