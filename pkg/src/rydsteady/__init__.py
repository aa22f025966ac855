"""Steady-state entanglement of driven, dissipative Rydberg atoms.

Library layout:

  * :mod:`rydsteady.opalg`        operator-algebra kernel
  * :mod:`rydsteady.model`        Hamiltonians, collapse operators, targets
  * :mod:`rydsteady.dynamics`     integrators and steady-state solver
  * :mod:`rydsteady.metrics`      negativity, fidelity, populations
  * :mod:`rydsteady.experiments`  sweeps, figure pipelines, CLI
"""

__version__ = "0.1.0"

from .opalg import (DensityMatrix, DimensionError, Liouvillian, Operator,
                    hermitian_eigenvalues, kron, liouvillian_matrix,
                    partial_trace, partial_transpose, trace_norm_hermitian,
                    unvec, vec)
from .model import (ConfigError, ModelSpec, collapse_ops,
                    effective_hamiltonian, full_hamiltonian, hamiltonian,
                    interaction_hamiltonian, microwave_hamiltonian,
                    single_atom_hamiltonian, spec_from_config, spec_to_config,
                    target_state, three_atom_spec, two_atom_spec,
                    uniform_ground_mixture)
from .dynamics import (SolverError, SteadyState, StepperConfig, System,
                       TrajectoryRecord, evolve, lindblad_rhs, steady_state)
from .metrics import (MetricReport, fidelity_pure, negativity, populations,
                      report, steady_residual)
from .experiments import (SweepSpec, SweepTable, cli_main, reproduce_figure,
                          rerun_from_metadata, run_sweep, run_trajectory,
                          write_table)

__all__ = [name for name in dir() if not name.startswith("_")]
