"""Variational quantum solver for the 1D Poisson equation, with ablation tooling."""
from .ansatz import AnsatzSpec, amplitude_encode, build_ansatz
from .circuit import Gate, LogicalCircuit
from .cost import PoissonCost, cost_lower_bound, evaluate_cost_exact, extract_solution
from .operators import BoundaryCondition, PoissonProblem, laplacian_pauli, shift_circuit, shift_pauli
from .optimize import OptimizerConfig, minimize
from .oracle import compare_solutions, solve_classical
from .pauli import PauliSum, decompose_matrix
from .simulator import Statevector, run_statevector
from .transpile import CouplingMap, transpile

__version__ = "0.1.0"
