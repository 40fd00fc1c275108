"""End-to-end runs and ablation sweeps, written out as CSV."""
from __future__ import annotations

import csv
import io
import logging
import os
import tempfile
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import config as config_mod
from .ansatz import AnsatzSpec, build_ansatz, canonical_family
from .circuit import LogicalCircuit
from .config import RunConfig
from .cost import PoissonCost, cost_lower_bound, extended_state_circuit, plateau_probe
from .errors import ConfigError, DegenerateCostError, ProblemError
from .operators import BoundaryCondition, PoissonProblem, laplacian_pauli, make_source, shift_circuit
from .optimize import OptimizerConfig, OptimizerTrace, minimize
from .oracle import compare_solutions, gauge_like, solve_classical
from .pauli import measurement_bases
from .session import SamplerSession, TranspilerSession
from .simulator import run_density_with_noise, run_statevector, state_fidelity
from .transpile import CouplingMap, PhysicalCircuit, fidelity_product, noise_model_factory, transpile

log = logging.getLogger(__name__)

MAX_SIMULATED_FIDELITY_QUBITS = 8
DEPTH_VARIANTS = ("shift-add-vchain", "pauli-term-max", "hea-layer", "ttnpp-layer")
TN_FAMILIES = ("mps", "custom-mps", "ttn", "ttnpp")

DEPTH_COLUMNS = ("n", "variant", "depth", "cx_count", "swap_count")
FIDELITY_COLUMNS = ("family", "fidelity_simulated", "fidelity_proxy", "swap_count")
PLATEAU_COLUMNS = ("family", "num_qubits", "layers", "gradient_variance", "samples", "seed", "delta")
SOLUTION_COLUMNS = ("grid_index", "u_classical", "u_quantum")
TRACE_COLUMNS = ("eval", "cost", "best_so_far")


@dataclass(frozen=True)
class AblationRecord:
    config_hash: str
    depth: int
    cx_count: int
    swap_count: int
    fidelity_proxy: float
    fidelity_simulated: float | None
    best_cost: float
    overlap_vs_oracle: float
    l2_relative_error: float
    cost_lower_bound: float
    evals_used: int
    wall_time: float


RECORD_COLUMNS = tuple(f.name for f in fields(AblationRecord))


@dataclass
class SolveResult:
    record: AblationRecord
    run_dir: Path
    trace: OptimizerTrace
    u_classical: np.ndarray
    u_quantum: np.ndarray


# -- output plumbing ---------------------------------------------------------------
def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def csv_text(columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_atomic(path: Path, text: str) -> None:
    """Write to a temp file in the same directory, then rename over ``path``."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: Path, columns: Sequence[str], rows: Iterable[Sequence]) -> Path:
    write_atomic(path, csv_text(columns, rows))
    return path


# -- problem assembly --------------------------------------------------------------
def build_problem(cfg: RunConfig) -> PoissonProblem:
    """Resolve the configured source and boundary into a solvable problem.

    Periodic and Neumann operators annihilate constants, so a source with a
    nonzero mean is projected onto mean zero with a warning. A source that
    projects to nothing (``ones`` on a periodic grid) is a config error.
    """
    p = cfg.problem
    n = p.qubits
    path = cfg.source_path()
    if path is None:
        f = make_source(p.source, n)
    else:
        try:
            f = np.loadtxt(path, dtype=float, ndmin=1).reshape(-1)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read source file {path}: {exc}") from None
        if f.shape[0] != 2**n:
            raise ConfigError(f"source file has {f.shape[0]} values, need {2**n}")
    bc = BoundaryCondition(p.bc)
    if bc is not BoundaryCondition.DIRICHLET and abs(f.mean()) > 1e-10:
        projected = f - f.mean()
        if np.linalg.norm(projected) < 1e-10 * max(1.0, np.linalg.norm(f)):
            raise ConfigError(
                f"source {p.source!r} is constant, so nothing is left after "
                f"projecting onto the solvable subspace of a {bc.value} problem"
            )
        log.warning("projecting %s source onto mean zero (mean was %.3g)", bc.value, f.mean())
        f = projected
    try:
        return PoissonProblem(n, bc, f, p.grid_spacing)
    except ProblemError as exc:
        raise ConfigError(str(exc)) from None


def optimizer_config(cfg: RunConfig) -> OptimizerConfig:
    o = cfg.optimizer
    return OptimizerConfig(
        method=o.method,
        max_evals=o.max_evals,
        x_tolerance=o.x_tolerance,
        f_tolerance=o.f_tolerance,
        initial_simplex_scale=o.scale,
        restarts=o.restarts,
        seed=cfg.optimizer_seed,
    )


def physical_fidelity(phys: PhysicalCircuit, noise) -> float | None:
    """Noisy-vs-ideal state fidelity by density simulation, if small enough."""
    logical = phys.as_logical()
    if logical.num_qubits > MAX_SIMULATED_FIDELITY_QUBITS:
        return None
    ideal = run_statevector(logical)
    return state_fidelity(ideal, run_density_with_noise(logical, noise))


def run_dir_for(cfg: RunConfig, out_root: str | Path) -> Path:
    return Path(out_root) / f"solve-{cfg.config_hash()[:12]}"


def run_solve(cfg: RunConfig, out_root: str | Path) -> SolveResult:
    """Encode, optimize at the closed-form ``r``, extract and compare with the oracle.

    Writes ``solution.csv``, ``trace.csv``, ``record.csv`` and the resolved
    ``config.toml`` into ``out_root/solve-<hash12>``.
    """
    start = time.perf_counter()
    problem = build_problem(cfg)
    spec = AnsatzSpec(canonical_family(cfg.ansatz.family), problem.num_qubits,
                      cfg.ansatz.layers, cfg.execution.seed)
    cost = PoissonCost(problem, spec)
    opt = optimizer_config(cfg)
    x0 = np.random.default_rng([cfg.optimizer_seed, 1]).uniform(0, 2 * np.pi, cost.num_parameters)

    ex = cfg.execution
    with SamplerSession(ex.mode, ex.shots, ex.seed) as sampler:
        trace = minimize(lambda th: sampler.evaluate(cost, th).value, x0, opt)
        final = sampler.evaluate(cost, trace.best_x)
    if final.a_expectation <= 1e-12:
        raise DegenerateCostError(
            "best state after all restarts lies in the operator's null space"
        )

    u_quantum = cost.solution(trace.best_x, final.r)
    reference = solve_classical(problem)
    u_quantum = gauge_like(reference, u_quantum)
    metrics = compare_solutions(reference.u, u_quantum)

    bound = cost.circuit.bind_parameters(trace.best_x)
    prep = extended_state_circuit(problem.normalized_source, bound)
    with TranspilerSession(cfg.transpile.coupling) as tsession:
        phys = tsession.run(prep)
    nz = cfg.noise
    noise = noise_model_factory(nz.profile, nz.eps_1q, nz.eps_2q, nz.eps_3q)

    record = AblationRecord(
        config_hash=cfg.config_hash(),
        depth=phys.depth(),
        cx_count=phys.cx_count,
        swap_count=phys.swap_count,
        fidelity_proxy=fidelity_product(phys, noise),
        fidelity_simulated=physical_fidelity(phys, noise),
        best_cost=trace.best_f,
        overlap_vs_oracle=metrics["overlap"],
        l2_relative_error=metrics["l2_relative_error"],
        cost_lower_bound=cost_lower_bound(problem),
        evals_used=trace.evals_used,
        wall_time=time.perf_counter() - start,
    )

    run_dir = run_dir_for(cfg, out_root)
    running = trace.running_min()
    write_csv(run_dir / "solution.csv", SOLUTION_COLUMNS,
              zip(range(problem.size), reference.u, u_quantum))
    write_csv(run_dir / "trace.csv", TRACE_COLUMNS,
              ((i, f, b) for (i, f), b in zip(trace.history, running)))
    write_csv(run_dir / "record.csv", RECORD_COLUMNS, [list(asdict(record).values())])
    write_atomic(run_dir / "config.toml", config_mod.dumps(cfg))
    return SolveResult(record, run_dir, trace, reference.u, u_quantum)


# -- depth ablation --------------------------------------------------------------
def _alternating_problem(n: int) -> PoissonProblem:
    return PoissonProblem(n, BoundaryCondition.PERIODIC, make_source("alternating", n))


def _deepest_basis_change(n: int, coupling: str) -> tuple[LogicalCircuit, PhysicalCircuit]:
    """The measurement-basis rotation of the periodic Laplacian with the largest transpiled depth."""
    bases, _ = measurement_bases(laplacian_pauli(_alternating_problem(n)))
    best = None
    with TranspilerSession(coupling) as ts:
        for b in bases:
            phys = ts.run(b.rotation)
            if best is None or phys.depth() > best[1].depth():
                best = (b.rotation, phys)
    return best


def depth_row(n: int, variant: str, coupling: str = "linear") -> tuple:
    """One ``(n, variant, depth, cx_count, swap_count)`` row.

    ``shift-add-vchain`` is the shift operator as a circuit with V-chain
    multi-controlled gates. ``pauli-term-max`` is the deepest per-term
    basis-change circuit of the sparse-Pauli Laplacian. The two ansatz
    variants are one layer of that family followed by that same deepest
    basis change, which is what one expectation-value circuit costs.
    """
    if variant == "shift-add-vchain":
        with TranspilerSession(coupling) as ts:
            phys = ts.run(shift_circuit(n, "vchain"))
    elif variant == "pauli-term-max":
        _, phys = _deepest_basis_change(n, coupling)
    elif variant in ("hea-layer", "ttnpp-layer"):
        family = variant.split("-")[0]
        layer = build_ansatz(AnsatzSpec(family, n, 1))
        bound = layer.bind_parameters(np.zeros(layer.num_parameters))
        rotation, _ = _deepest_basis_change(n, coupling)
        with TranspilerSession(coupling) as ts:
            phys = ts.run(bound.compose(rotation))
    else:
        raise ValueError(f"unknown depth variant {variant!r}")
    return n, variant, phys.depth(), phys.cx_count, phys.swap_count


def depth_ablation(qubits: Iterable[int], variants: Sequence[str] = DEPTH_VARIANTS,
                   coupling: str = "linear") -> list[tuple]:
    rows = []
    for n in qubits:
        if not 2 <= n <= 10:
            raise ValueError("depth ablation covers 2..10 qubits")
        rows.extend(depth_row(n, v, coupling) for v in variants)
    return rows


# -- fidelity ablation -----------------------------------------------------------
def fidelity_ablation(num_qubits: int = 4, families: Sequence[str] = TN_FAMILIES,
                      noise_profile: str = "osaka-like", layers: int = 1, seed: int = 0,
                      eps: tuple[float | None, float | None, float | None] = (None, None, None),
                      ) -> list[tuple]:
    """Per family: transpile to a linear chain, depolarize, compare with the ideal state.

    Every family gets parameters drawn from the same seeded generator, so
    runs are reproducible and families are compared on equal footing.
    """
    if num_qubits > MAX_SIMULATED_FIDELITY_QUBITS:
        raise ValueError(f"fidelity ablation is limited to {MAX_SIMULATED_FIDELITY_QUBITS} qubits")
    noise = noise_model_factory(noise_profile, *eps)
    rows = []
    for family in families:
        fam = canonical_family(family)
        circ = build_ansatz(AnsatzSpec(fam, num_qubits, layers))
        theta = np.random.default_rng(seed).uniform(0, 2 * np.pi, circ.num_parameters)
        phys = transpile(circ.bind_parameters(theta), CouplingMap.linear(num_qubits))
        rows.append((fam, physical_fidelity(phys, noise), fidelity_product(phys, noise),
                     phys.swap_count))
    return rows


# -- plateau sweep ---------------------------------------------------------------
def plateau_sweep(families: Sequence[str], qubits: Iterable[int], layers: str | int = "n",
                  samples: int = 50, seed: int = 0, delta: float = 1e-3) -> list[tuple]:
    """Gradient-variance rows over ``families x qubits``; ``layers="n"`` uses ``L = n``."""
    rows = []
    for family in families:
        fam = canonical_family(family)
        for n in qubits:
            if fam == "ttn" and n & (n - 1):
                continue
            depth_l = n if layers == "n" else int(layers)
            problem = PoissonProblem(n, BoundaryCondition.DIRICHLET, make_source("ones", n))
            rep = plateau_probe(problem, AnsatzSpec(fam, n, depth_l), samples, delta, seed)
            rows.append((rep.family, rep.num_qubits, rep.layers, rep.gradient_variance,
                         rep.samples, rep.seed, rep.delta))
    return rows
