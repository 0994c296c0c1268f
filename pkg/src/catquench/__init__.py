"""Multicomponent Schroedinger-cat generation in the extended Rabi/Dicke model.

Exact quantum quench dynamics in the truncated Fock x spin space, phase-space
diagnostics (Wigner function, purity, negativity) and the full semiclassical
companion theory (branch amplitudes, special quenches, classical orbit
periods), with quantum <-> semiclassical cross-validation.
"""

__version__ = "0.1.0"

from .hilbert import (BasisDescriptor, ModelParams, OperatorMatrix,  # noqa: F401
                      adaptive_n_max, build_basis, build_hamiltonian,
                      build_parity, build_quadratures, build_spin_ops,
                      effective_field)
from .quench import (QuantumState, QuenchSpec, ReducedDensity, evolve,  # noqa: F401
                     expectation, local_survival, prepare_initial_state,
                     rabi_frequency, reduced_density, survival_probability)
from .spectrum import (EigenDecomposition, StrengthFunction,  # noqa: F401
                       assign_peaks, diagonalize, ground_doublet,
                       strength_function)
from .phasespace import (WignerGrid, marginals, negativity, purity,  # noqa: F401
                         wigner)
from . import semiclassics  # noqa: F401
