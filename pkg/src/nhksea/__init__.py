"""Free-fermion solution of the non-Hermitian iXY chain with KSEA interaction.

Ground-state correlators and nearest-neighbour entanglement, exceptional
and factorization fields, quench dynamics (Loschmidt echo, dynamical
transitions, entanglement fluctuations) and dense small-N oracles.
"""

from .correlations import (CorrelatorSet, TwoQubitState, correlators, entanglement,
                           entanglement_scan, find_entanglement_zero, log_negativity,
                           two_site_density_matrix)
from .groundstate import (BlockState, BogoliubovCoeffs, bogoliubov_coefficients,
                          ground_block_amplitudes, ground_energy)
from .model import (THERMODYNAMIC, BlockHamiltonian, ModelParams, MomentumGrid, PhaseLabel,
                    Region, block_hamiltonian, broken_momentum_window, classify_phase,
                    momentum_grid)
from .quench import (DqptSolution, QuenchSpec, TimeSeries, dqpt_condition, evolve_block,
                     evolved_correlators, loschmidt_echo, quadrant_map, rate_function_series,
                     sigma_entanglement)

__all__ = [
    "THERMODYNAMIC", "BlockHamiltonian", "BlockState", "BogoliubovCoeffs", "CorrelatorSet",
    "DqptSolution", "ModelParams", "MomentumGrid", "PhaseLabel", "QuenchSpec", "Region",
    "TimeSeries", "TwoQubitState", "block_hamiltonian", "bogoliubov_coefficients",
    "broken_momentum_window", "classify_phase", "correlators", "dqpt_condition",
    "entanglement", "entanglement_scan", "evolve_block", "evolved_correlators",
    "find_entanglement_zero", "ground_block_amplitudes", "ground_energy", "log_negativity",
    "loschmidt_echo", "momentum_grid", "quadrant_map", "rate_function_series",
    "sigma_entanglement", "two_site_density_matrix",
]
