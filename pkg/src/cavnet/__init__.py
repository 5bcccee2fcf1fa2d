"""Noise-assisted single-photon transport through coupled optical cavities.

Library layout:
  statespace  -- single-excitation basis, density matrices, trajectories
  optics      -- hardware-to-rates derivation (loss, dissipation, couplings)
  liouville   -- generator assembly and master-equation integration
  experiments -- transport, robustness, disorder and entanglement studies
  oracle      -- full-Fock brute-force propagator (verification only)
  cli         -- JSON-configured command line front end
"""

__version__ = "0.1.0"

from .statespace import (Basis, DensityMatrix, Trajectory, build_basis,
                         initial_state, validate)
from .optics import (CavitySpec, NetworkSpec, RateSet, derive_rates,
                     paper_network)
from .liouville import Liouvillian, build_liouvillian, evolve, sink_probability_of
from .experiments import (DisorderConfig, EnsembleCurve, dephasing_sweep,
                          disorder_ensemble, efficiency_curves,
                          entanglement_protocol, log_negativity, partial_trace)

__all__ = [
    "Basis", "DensityMatrix", "Trajectory", "build_basis", "initial_state",
    "validate", "CavitySpec", "NetworkSpec", "RateSet", "derive_rates",
    "paper_network", "Liouvillian", "build_liouvillian", "evolve",
    "sink_probability_of", "DisorderConfig", "EnsembleCurve",
    "dephasing_sweep", "disorder_ensemble", "efficiency_curves",
    "entanglement_protocol", "log_negativity", "partial_trace",
    "__version__",
]
