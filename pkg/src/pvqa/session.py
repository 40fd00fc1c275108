"""Scoped execution settings.

Circuit builders take no shots, seeds or coupling maps. Those live here and
are fixed when a session is entered, so the same circuit can be run under
different execution settings without being rebuilt.
"""
from __future__ import annotations

import numpy as np

from .circuit import LogicalCircuit
from .cost import DEGENERATE_A, CostBreakdown, PoissonCost
from .transpile import CouplingMap, PhysicalCircuit, decompose_to_basis, expand_mcx, route


class _Scoped:
    def __init__(self):
        self._state = "new"

    def __enter__(self):
        if self._state != "new":
            raise RuntimeError(f"{type(self).__name__} can only be entered once")
        self._state = "open"
        self._bind()
        return self

    def __exit__(self, *exc):
        self._state = "closed"
        return False

    def _bind(self) -> None:
        pass

    def _require_open(self) -> None:
        if self._state != "open":
            raise RuntimeError(f"{type(self).__name__} used outside its with-block")


class SamplerSession(_Scoped):
    """Evaluates the cost at the closed-form optimal ``r``.

    ``mode="exact"`` uses statevector expectations. ``mode="shots"`` estimates
    both terms from ``shots`` samples per measurement basis, with every
    evaluation drawing from one generator seeded at entry.
    """

    def __init__(self, mode: str = "exact", shots: int = 1000, seed: int = 0):
        super().__init__()
        if mode not in ("exact", "shots"):
            raise ValueError(f"unknown sampler mode {mode!r}")
        if shots < 1:
            raise ValueError("shots must be positive")
        self.mode, self.shots, self.seed = mode, int(shots), int(seed)
        self._rng: np.random.Generator | None = None
        self.evaluations = 0

    def _bind(self) -> None:
        self._rng = np.random.default_rng(self.seed)

    def evaluate(self, cost: PoissonCost, theta) -> CostBreakdown:
        """Cost at ``r*``; a degenerate state (``a ~ 0``) reports ``r = 0``, value 0."""
        self._require_open()
        self.evaluations += 1
        if self.mode == "exact":
            a, ov = cost.terms(theta, check_extended=False)
            a_se = ov_se = None
        else:
            est = cost.shots(theta, 0.0, self.shots, self._rng)
            a, ov, a_se, ov_se = est.a_expectation, est.overlap, est.a_stderr, est.overlap_stderr
        if a <= DEGENERATE_A:
            return CostBreakdown(a, ov, 0.0, 0.0, a_se, ov_se)
        r = ov / a
        return CostBreakdown(a, ov, r, 0.5 * r * r * a - r * ov, a_se, ov_se)


class TranspilerSession(_Scoped):
    """Lowers circuits onto ``coupling``: ``linear`` or ``none`` (all-to-all)."""

    def __init__(self, coupling: str = "linear"):
        super().__init__()
        if coupling not in ("linear", "none"):
            raise ValueError(f"unknown coupling {coupling!r}")
        self.coupling = coupling

    def run(self, circuit: LogicalCircuit) -> PhysicalCircuit:
        self._require_open()
        # MCX expansion may widen the register, so size the device afterwards
        basis = decompose_to_basis(expand_mcx(circuit))
        width = max(basis.num_qubits, 1)
        device = CouplingMap.linear(width) if self.coupling == "linear" else CouplingMap.full(width)
        return route(basis, device)
