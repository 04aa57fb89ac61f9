"""Power iteration baseline (Jacobi-style full products) with optional relaxation."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError
from .report import SolverReport


@dataclass
class PowerState:
    X: np.ndarray
    relaxation: float = 1.0
    iterations: int = 0

    def __post_init__(self):
        if not 0 < self.relaxation <= 1:
            raise ValueError(f"relaxation must lie in (0, 1], got {self.relaxation}")
        self.X = np.array(self.X, dtype=np.float64)


def power_step(state: PowerState, m) -> float:
    """X <- (1 - w) X + w P.X in place; returns |X_new - X_old|_1.

    ``m`` is anything with ``dot`` (a SparseRowMatrix traverses rows).
    """
    px = m.dot(state.X)
    w = state.relaxation
    new = px if w == 1.0 else (1.0 - w) * state.X + w * px
    delta = float(np.abs(new - state.X).sum())
    state.X = new
    state.iterations += 1
    return delta


def power_solve(m, d: float, target: float, max_iter: int = 1_000_000, x0=None) -> SolverReport:
    """Iterate until the distance-to-limit estimate drops to ``target``.

    For d < 1 the estimate ``|X_{n+1} - X_n| * d / (1 - d)`` bounds the L1
    error of the returned iterate; at d = 1 the plain step size is used and
    relaxation 0.5 damps periodic oscillation.
    """
    if not 0 < d <= 1:
        raise ValueError(f"damping must lie in (0, 1], got {d}")
    n = m.n
    state = PowerState(np.full(n, 1.0 / n) if x0 is None else x0, 0.5 if d == 1.0 else 1.0)
    factor = 1.0 if d == 1.0 else d / (1.0 - d)
    start = time.perf_counter()
    trace = []
    estimate = float("inf")
    while state.iterations < max_iter:
        estimate = power_step(state, m) * factor
        trace.append((float(state.iterations), estimate))
        if estimate <= target:
            break
    report = SolverReport(
        method="pi",
        d=d,
        x=state.X,
        iterations=float(state.iterations),
        time_s=time.perf_counter() - start,
        error=estimate,
        converged=estimate <= target,
        cycles=state.iterations,
        trace=trace,
        heuristic_estimate=d == 1.0,
    )
    if not report.converged:
        raise ConvergenceError(f"power iteration: estimate {estimate:.3e} > {target:.3e} after {max_iter} products", report)
    return report
