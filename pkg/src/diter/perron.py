"""Dominant (Perron) eigenvector of a non-negative irreducible matrix.

Scaling by the spectral radius makes the dominant eigenvalue 1, after which
the zero-mass diffusion applies unchanged to ``(P / rho, P.e / rho - e)``.
"""

from __future__ import annotations

import dataclasses
import logging
import time
from dataclasses import dataclass

import numpy as np

from .diffusion import (
    DiffusionState,
    SelectionPolicy,
    StoppingRule,
    diffusion_trace,
    policy_sequence,
    run_cycles,
    uniform_vector,
)
from .errors import ConvergenceError
from .graph import SparseColumnMatrix
from .report import SolverReport

log = logging.getLogger(__name__)

# inner diffusion target = user target / SAFETY, absorbs error in rho
SAFETY = 2.0


@dataclass(frozen=True)
class PerronProblem:
    m: SparseColumnMatrix
    rho: float | None = None

    def __post_init__(self):
        if self.rho is not None and not self.rho > 0:
            raise ValueError(f"rho must be > 0, got {self.rho}")


@dataclass(frozen=True)
class LeftEigenvectorWeights:
    V: np.ndarray
    source: str = "user"

    def __post_init__(self):
        if np.any(np.asarray(self.V) <= 0):
            raise ValueError("left eigenvector weights must be strictly positive")

    def validate(self, scaled: SparseColumnMatrix, tol: float = 1e-8) -> float:
        """``|V^T P' - V^T|_1``; raises if above ``tol * |V|_1``."""
        v = np.asarray(self.V, dtype=np.float64)
        gap = float(np.abs(scaled.to_scipy().T @ v - v).sum())
        if gap > tol * np.abs(v).sum():
            raise ValueError(f"V is not a left eigenvector of the scaled matrix (gap {gap:.3e})")
        return gap


@dataclass(frozen=True)
class RhoEstimate:
    rho: float
    residual: float
    iterations: int
    converged: bool


def estimate_rho(m: SparseColumnMatrix, iters: int = 10_000, tol: float = 1e-13) -> RhoEstimate:
    """Power-method spectral radius from y = e.

    Each estimate is the geometric mean of the last two growth ratios
    ``|P.y| / |y|``, which cancels period-2 oscillation. The residual is the
    change between consecutive estimates, relative to the estimate.
    """
    if np.any(m.out_degree() == 0):
        raise ValueError("matrix has empty columns")
    y = uniform_vector(m.n)
    prev_ratio = None
    prev_est = None
    est = float("nan")
    residual = float("inf")
    for k in range(1, iters + 1):
        z = m.dot(y)
        s = z.sum()
        ratio = s / y.sum()
        y = z / s
        if prev_ratio is not None:
            est = float(np.sqrt(ratio * prev_ratio))
            if prev_est is not None:
                residual = abs(est - prev_est) / est
                if residual <= tol:
                    return RhoEstimate(est, residual, k, True)
            prev_est = est
        prev_ratio = ratio
    log.warning("rho estimate did not settle: residual %.3e after %d iterations", residual, iters)
    return RhoEstimate(est, residual, iters, False)


def _scaled(prob: PerronProblem, max_rho_residual: float) -> tuple[SparseColumnMatrix, float]:
    rho = prob.rho
    if rho is None:
        r = estimate_rho(prob.m)
        if not r.converged and r.residual > max_rho_residual:
            raise ConvergenceError(f"spectral radius estimate residual {r.residual:.3e} too large")
        rho = r.rho
    scaled = prob.m.scaled(1.0 / rho)
    if np.any(scaled.out_degree() == 0):
        raise ValueError("scaled matrix has empty columns")
    return scaled, rho


def perron_solve(
    prob: PerronProblem,
    policy: SelectionPolicy | None = None,
    target: float = 1e-8,
    *,
    max_cycles: int = 100_000,
    max_rho_residual: float = 1e-10,
) -> SolverReport:
    """Perron vector (positive, sum 1) by diffusion on ``(P', P'.e - e)``.

    Stops on ``|F| <= target / 2``. For non-stochastic ``P'`` that estimate is
    a heuristic, which the report flags. A fluid norm growing past 10x its
    initial value means rho was underestimated and raises DivergenceError.
    """
    policy = dataclasses.replace(policy or SelectionPolicy(), use_absolute_value=True)
    start = time.perf_counter()
    scaled, rho = _scaled(prob, max_rho_residual)
    e = uniform_vector(scaled.n)
    state = DiffusionState.from_fluid(scaled.dot(e) - e)
    report = run_cycles(
        state,
        scaled,
        policy,
        StoppingRule(target / SAFETY, "residual", max_cycles=max_cycles, diverge_factor=10.0),
        method="perron",
    )
    x = state.H + e
    report.x = x / x.sum()
    report.iterations += 1.0
    report.time_s = time.perf_counter() - start
    report.heuristic_estimate = True
    report.note = f"rho={rho!r}"
    if not report.converged:
        raise ConvergenceError(f"perron: estimate {report.error:.3e} above target after {report.cycles} cycles", report)
    return report


def v_norm_trace(
    prob: PerronProblem,
    V: LeftEigenvectorWeights,
    policy: SelectionPolicy | None = None,
    steps: int = 1000,
) -> np.ndarray:
    """Per-step ``|F_n|_V = sum_i |F_i v_i|`` along the policy's diffusion order.

    The first entry is the initial fluid. Row-wise diagnostics (sigma_V etc.)
    are available through :func:`diter.diffusion.diffusion_trace`.
    """
    policy = policy or SelectionPolicy()
    scaled, _ = _scaled(prob, 1e-10)
    V.validate(scaled)
    e = uniform_vector(scaled.n)
    f0 = scaled.dot(e) - e
    v = np.asarray(V.V, dtype=np.float64)
    nodes = policy_sequence(scaled, f0, policy, steps)
    rows = diffusion_trace(scaled, DiffusionState.from_fluid(f0), nodes, v)
    return np.concatenate([[np.abs(f0 * v).sum()], rows[:, 4]])
