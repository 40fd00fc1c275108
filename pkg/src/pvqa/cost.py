"""Variational Poisson cost ``E(r, theta) = r^2/2 <psi|A|psi> - r <f|psi>``.

The source is normalized once; ``r`` and the stored norm carry the physical
scale back when a solution vector is extracted. The overlap term is also
available as the ancilla-X expectation of the extended state
``(|0>|f> + |1>|psi>)/sqrt(2)``, which is how a device would measure it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ansatz import AnsatzSpec, amplitude_encode, build_ansatz, controlled_version
from .circuit import LogicalCircuit
from .errors import CircuitError, DegenerateCostError
from .operators import PoissonProblem, laplacian_matrix, laplacian_pauli
from .pauli import PauliSum, measurement_bases, z_expectation_from_counts
from .simulator import Statevector, expectation, run_statevector, sample_counts

DEGENERATE_A = 1e-12
OVERLAP_AGREEMENT = 1e-9


@dataclass(frozen=True)
class CostBreakdown:
    a_expectation: float
    overlap: float
    r: float
    value: float
    a_stderr: float | None = None
    overlap_stderr: float | None = None

    @property
    def value_stderr(self) -> float | None:
        if self.a_stderr is None:
            return None
        return float(np.hypot(0.5 * self.r**2 * self.a_stderr, self.r * self.overlap_stderr))


@dataclass(frozen=True)
class PlateauReport:
    num_qubits: int
    family: str
    layers: int
    gradient_variance: float
    samples: int
    seed: int
    delta: float


def optimal_r(a_expectation: float, overlap: float) -> float:
    """Minimizer of the cost's quadratic in ``r`` for fixed ``theta``."""
    if a_expectation <= DEGENERATE_A:
        raise DegenerateCostError(
            f"<psi|A|psi> = {a_expectation:.3e}; the state sits in A's null space"
        )
    return overlap / a_expectation


def cost_value(a_expectation: float, overlap: float, r: float) -> float:
    return 0.5 * r * r * a_expectation - r * overlap


def extended_state(f_hat: np.ndarray, psi: Statevector) -> Statevector:
    """``(|0>|f> + |1>|psi>)/sqrt(2)`` with the ancilla as the top qubit."""
    return Statevector(np.concatenate([f_hat, psi.amplitudes]) / np.sqrt(2))


def extended_state_circuit(f: np.ndarray, bound_ansatz: LogicalCircuit) -> LogicalCircuit:
    """Gate-level preparation of the extended state on ``n + 1`` qubits."""
    n = bound_ansatz.num_qubits
    anc = n
    encode = controlled_version(amplitude_encode(f, n), anc)
    train = controlled_version(bound_ansatz, anc)
    circ = LogicalCircuit(n + 1).add("H", anc).add("X", anc)
    circ = circ.compose(encode.widen(n + 1)).add("X", anc)
    return circ.compose(train.widen(n + 1))


def _ancilla_x(n: int) -> PauliSum:
    return PauliSum(n + 1, ((1.0, "I" * n + "X"),))


class PoissonCost:
    """Cost evaluator bound to one problem and one ansatz.

    ``ansatz`` may be an :class:`AnsatzSpec` or an already-built
    parameterized circuit on ``problem.num_qubits`` qubits.
    """

    def __init__(self, problem: PoissonProblem, ansatz: AnsatzSpec | LogicalCircuit):
        self.problem = problem
        self.circuit = build_ansatz(ansatz) if isinstance(ansatz, AnsatzSpec) else ansatz
        if self.circuit.num_qubits != problem.num_qubits:
            raise CircuitError("ansatz width does not match the problem")
        self.spec = ansatz if isinstance(ansatz, AnsatzSpec) else None
        self.operator = laplacian_pauli(problem)
        self.f_hat = problem.normalized_source
        self._x_anc = _ancilla_x(problem.num_qubits)

    @property
    def num_parameters(self) -> int:
        return self.circuit.num_parameters

    def state(self, theta) -> Statevector:
        return run_statevector(self.circuit.bind_parameters(theta))

    def terms(self, theta, check_extended: bool = True) -> tuple[float, float]:
        """Exact ``(<psi|A|psi>, Re<f|psi>)``."""
        psi = self.state(theta)
        a = expectation(psi, self.operator)
        overlap = float(np.real(np.vdot(self.f_hat, psi.amplitudes)))
        if check_extended:
            via_ancilla = expectation(extended_state(self.f_hat, psi), self._x_anc)
            if abs(via_ancilla - overlap) > OVERLAP_AGREEMENT:
                raise ArithmeticError(
                    f"overlap mismatch: direct {overlap} vs ancilla {via_ancilla}"
                )
        return a, overlap

    def exact(self, theta, r: float) -> CostBreakdown:
        a, ov = self.terms(theta)
        return CostBreakdown(a, ov, float(r), cost_value(a, ov, r))

    def at_optimal_r(self, theta) -> CostBreakdown:
        a, ov = self.terms(theta, check_extended=False)
        r = optimal_r(a, ov)
        return CostBreakdown(a, ov, r, cost_value(a, ov, r))

    def reduced(self, theta) -> float:
        """``min_r E(r, theta)``; zero (the ``r = 0`` value) on degenerate states."""
        a, ov = self.terms(theta, check_extended=False)
        if a <= DEGENERATE_A:
            return 0.0
        return -0.5 * ov * ov / a

    def shots(self, theta, r: float, shots: int, seed) -> CostBreakdown:
        if shots < 1:
            raise ValueError("shots must be positive")
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        psi = self.state(theta)
        bases, offset = measurement_bases(self.operator)
        a, var = offset, 0.0
        for basis in bases:
            rotated = run_statevector(basis.rotation, initial=psi)
            mean, se = z_expectation_from_counts(sample_counts(rotated, shots, rng), basis.z_mask)
            a += basis.weight * mean
            var += (basis.weight * se) ** 2
        n = self.problem.num_qubits
        ext = extended_state(self.f_hat, psi)
        rotated = run_statevector(LogicalCircuit(n + 1).add("H", n), initial=ext)
        ov, ov_se = z_expectation_from_counts(sample_counts(rotated, shots, rng), 1 << n)
        r = float(r)
        return CostBreakdown(a, ov, r, cost_value(a, ov, r), float(np.sqrt(var)), ov_se)

    def solution(self, theta, r: float) -> np.ndarray:
        """Grid values ``r * ||f|| * Re(psi)``."""
        psi = self.state(theta)
        return float(r) * self.problem.source_norm * psi.amplitudes.real

    def lower_bound(self) -> float:
        return cost_lower_bound(self.problem)


def evaluate_cost_exact(problem: PoissonProblem, spec, theta, r: float) -> CostBreakdown:
    return PoissonCost(problem, spec).exact(theta, r)


def evaluate_cost_shots(problem: PoissonProblem, spec, theta, r: float, shots: int,
                        seed: int) -> CostBreakdown:
    return PoissonCost(problem, spec).shots(theta, r, shots, seed)


def extract_solution(problem: PoissonProblem, spec, theta, r: float) -> np.ndarray:
    return PoissonCost(problem, spec).solution(theta, r)


def cost_lower_bound(problem: PoissonProblem) -> float:
    """``-1/2 <f|A^+|f>`` for the normalized source: no ``(r, theta)`` goes below it."""
    a = laplacian_matrix(problem)
    f = problem.normalized_source
    return float(-0.5 * f @ np.linalg.pinv(a, hermitian=True) @ f)


def plateau_probe(problem: PoissonProblem, ansatz, samples: int, delta: float = 1e-3,
                  seed: int = 0) -> PlateauReport:
    """Sample variance of the central-difference slope along the first parameter.

    Parameters are drawn uniformly from ``[0, 2 pi)`` and ``r`` is held at 1.
    A variance near zero means the landscape is flat at this scale.
    """
    if samples < 2:
        raise ValueError("need at least two samples for a variance")
    cost = PoissonCost(problem, ansatz)
    p = cost.num_parameters
    if p == 0:
        raise ValueError("ansatz has no parameters to probe")
    rng = np.random.default_rng(seed)
    step = np.zeros(p)
    step[0] = delta
    slopes = []
    for _ in range(samples):
        theta = rng.uniform(0, 2 * np.pi, size=p)
        hi = cost.exact(theta + step, 1.0).value
        lo = cost.exact(theta - step, 1.0).value
        slopes.append((hi - lo) / (2 * delta))
    spec = cost.spec
    return PlateauReport(
        num_qubits=problem.num_qubits,
        family=spec.family if spec else "custom",
        layers=spec.layers if spec else 1,
        gradient_variance=float(np.var(slopes, ddof=1)),
        samples=samples,
        seed=seed,
        delta=delta,
    )


__all__ = [
    "CostBreakdown",
    "PlateauReport",
    "PoissonCost",
    "optimal_r",
    "cost_value",
    "evaluate_cost_exact",
    "evaluate_cost_shots",
    "extract_solution",
    "extended_state",
    "extended_state_circuit",
    "cost_lower_bound",
    "plateau_probe",
]
