"""Derivative-free minimizers (Nelder-Mead, Powell) with random restarts.

The objective is a black box ``f(x) -> float``. Budgets count objective
calls, not iterations, because each call may be a batch of circuit
executions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

Objective = Callable[[np.ndarray], float]

GOLDEN = 1.618033988749895


@dataclass(frozen=True)
class OptimizerConfig:
    method: str = "nelder-mead"
    max_evals: int = 2000
    x_tolerance: float = 1e-8
    f_tolerance: float = 1e-10
    initial_simplex_scale: float = 0.5
    restarts: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.method not in ("nelder-mead", "powell"):
            raise ValueError(f"unknown optimizer {self.method!r}")
        if self.max_evals < 1:
            raise ValueError("max_evals must be at least 1")
        if self.x_tolerance <= 0 or self.f_tolerance <= 0:
            raise ValueError("tolerances must be positive")
        if self.restarts < 0:
            raise ValueError("restarts must be nonnegative")
        if self.initial_simplex_scale <= 0:
            raise ValueError("initial scale must be positive")


@dataclass
class OptimizerTrace:
    best_x: np.ndarray
    best_f: float
    evals_used: int
    history: list[tuple[int, float]] = field(default_factory=list)
    converged: bool = False
    best_restart: int = 0
    restart_bests: list[float] = field(default_factory=list)

    def running_min(self) -> np.ndarray:
        return np.minimum.accumulate([f for _, f in self.history])


class _BudgetExhausted(Exception):
    pass


class _Counted:
    """Objective wrapper that logs every call and enforces the budget."""

    def __init__(self, fun: Objective, budget: int, history: list, offset: int):
        self.fun = fun
        self.budget = budget
        self.calls = 0
        self.history = history
        self.offset = offset
        self.best_x: np.ndarray | None = None
        self.best_f = np.inf

    def __call__(self, x: np.ndarray) -> float:
        if self.calls >= self.budget:
            raise _BudgetExhausted
        x = np.array(x, dtype=float)
        fx = float(self.fun(x))
        self.calls += 1
        self.history.append((self.offset + self.calls, fx))
        if fx < self.best_f:
            self.best_f, self.best_x = fx, x
        return fx


def _nelder_mead_run(f: _Counted, x0: np.ndarray, cfg: OptimizerConfig) -> bool:
    d = x0.size
    simplex = np.vstack([x0, x0 + cfg.initial_simplex_scale * np.eye(d)])
    values = np.array([f(x) for x in simplex])
    while True:
        order = np.argsort(values, kind="stable")
        simplex, values = simplex[order], values[order]
        diameter = max(np.linalg.norm(simplex[i] - simplex[j])
                       for i in range(d + 1) for j in range(i + 1, d + 1))
        if diameter < cfg.x_tolerance and values[-1] - values[0] < cfg.f_tolerance:
            return True
        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        xr = centroid + (centroid - worst)
        fr = f(xr)
        if fr < values[0]:
            xe = centroid + 2.0 * (xr - centroid)
            fe = f(xe)
            simplex[-1], values[-1] = (xe, fe) if fe < fr else (xr, fr)
            continue
        if fr < values[-2]:
            simplex[-1], values[-1] = xr, fr
            continue
        if fr < values[-1]:
            xc = centroid + 0.5 * (xr - centroid)
            fc = f(xc)
            if fc <= fr:
                simplex[-1], values[-1] = xc, fc
                continue
        else:
            xc = centroid + 0.5 * (worst - centroid)
            fc = f(xc)
            if fc < values[-1]:
                simplex[-1], values[-1] = xc, fc
                continue
        best = simplex[0]
        for i in range(1, d + 1):
            simplex[i] = best + 0.5 * (simplex[i] - best)
            values[i] = f(simplex[i])


def _line_minimize(f: _Counted, x: np.ndarray, fx: float, direction: np.ndarray,
                   step: float, tol: float) -> tuple[np.ndarray, float]:
    """Bracket along ``direction`` starting at ``step``, then Brent inside the bracket."""
    cache = {0.0: fx}

    def phi(t: float) -> float:
        if t not in cache:
            cache[t] = f(x + t * direction)
        return cache[t]

    if phi(step) < fx:
        a, b = 0.0, step
    elif phi(-step) < fx:
        a, b = 0.0, -step
    else:
        a, b = -step, 0.0
    if b != 0.0:
        c = b + GOLDEN * (b - a)
        for _ in range(60):
            if phi(c) > phi(b):
                break
            a, b = b, c
            c = b + GOLDEN * (b - a)
    else:
        c = step
    if phi(b) < phi(a) and phi(b) < phi(c):
        lo, hi = min(a, c), max(a, c)
        res = minimize_scalar(phi, bracket=(lo, b, hi), method="brent",
                              options={"xtol": tol, "maxiter": 200})
        phi(float(res.x))
    t_best = min(cache, key=lambda t: (cache[t], abs(t)))
    return x + t_best * direction, cache[t_best]


def _powell_run(f: _Counted, x0: np.ndarray, cfg: OptimizerConfig) -> bool:
    d = x0.size
    directions = list(np.eye(d))
    x = x0.copy()
    fx = f(x)
    line_tol = max(cfg.x_tolerance, 1e-10)
    while True:
        x_start, f_start = x.copy(), fx
        biggest, biggest_drop = 0, 0.0
        for i, u in enumerate(directions):
            f_before = fx
            x, fx = _line_minimize(f, x, fx, u, cfg.initial_simplex_scale, line_tol)
            if f_before - fx > biggest_drop:
                biggest, biggest_drop = i, f_before - fx
        moved = np.linalg.norm(x - x_start)
        if moved < cfg.x_tolerance and f_start - fx < cfg.f_tolerance:
            return True
        new_dir = x - x_start
        if moved == 0:
            continue
        f_ext = f(2 * x - x_start)
        if f_ext < f_start:
            lhs = 2 * (f_start - 2 * fx + f_ext) * (f_start - fx - biggest_drop) ** 2
            rhs = biggest_drop * (f_start - f_ext) ** 2
            if lhs < rhs:
                new_dir = new_dir / np.linalg.norm(new_dir)
                x, fx = _line_minimize(f, x, fx, new_dir, cfg.initial_simplex_scale, line_tol)
                directions[biggest] = directions[-1]
                directions[-1] = new_dir


_RUNNERS = {"nelder-mead": _nelder_mead_run, "powell": _powell_run}


def _minimize(method: str, objective: Objective, x0, config: OptimizerConfig) -> OptimizerTrace:
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if x0.size < 1:
        raise ValueError("need at least one variable")
    rng = np.random.default_rng(config.seed)
    history: list[tuple[int, float]] = []
    run = _RUNNERS[method]
    trace = None
    used = 0
    for restart in range(config.restarts + 1):
        start = x0 if restart == 0 else rng.uniform(0, 2 * np.pi, size=x0.size)
        f = _Counted(objective, config.max_evals, history, used)
        try:
            converged = run(f, start, config)
        except _BudgetExhausted:
            converged = False
        used += f.calls
        if trace is None:
            trace = OptimizerTrace(f.best_x, f.best_f, used, history, converged, 0)
        elif f.best_f < trace.best_f:
            trace.best_x, trace.best_f = f.best_x, f.best_f
            trace.converged, trace.best_restart = converged, restart
        trace.restart_bests.append(f.best_f)
        trace.evals_used = used
    return trace


def minimize_nelder_mead(objective: Objective, x0, config: OptimizerConfig) -> OptimizerTrace:
    """Nelder-Mead with reflection 1, expansion 2, contraction 0.5, shrink 0.5.

    The first simplex is ``x0`` plus ``initial_simplex_scale`` along each axis.
    A run stops once the simplex diameter is below ``x_tolerance`` and the
    spread of its values is below ``f_tolerance``, or when its budget of
    ``max_evals`` calls runs out. Each restart starts from a point drawn
    uniformly in ``[0, 2 pi)^d``.
    """
    return _minimize("nelder-mead", objective, x0, config)


def minimize_powell(objective: Objective, x0, config: OptimizerConfig) -> OptimizerTrace:
    """Powell's direction-set method with bracketed Brent line searches.

    Each line search first tries a step of ``initial_simplex_scale`` and grows
    it by the golden ratio while the objective keeps falling, so a large scale
    lets the search leave a flat region.
    """
    return _minimize("powell", objective, x0, config)


def minimize(objective: Objective, x0, config: OptimizerConfig) -> OptimizerTrace:
    return _minimize(config.method, objective, x0, config)
