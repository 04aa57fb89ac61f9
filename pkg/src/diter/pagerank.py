"""PageRank by zero-mass diffusion (DI+), classic D-iteration (DI) and power iteration.

The PageRank operator is ``X -> d Pbar.X + (1 - d) sigma(X) e`` where ``Pbar``
is the link matrix ``Pg`` with dangling columns replaced by ``e``. Neither the
dangling completion nor the teleport matrix is ever materialized.
"""

from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass

import numpy as np

from .diffusion import DiffusionState, SelectionPolicy, StoppingRule, run_cycles, uniform_vector
from .errors import ConvergenceError, UndefinedMethodError
from .graph import SparseColumnMatrix, closed_class_count
from .power import power_solve
from .report import SolverReport


@dataclass(frozen=True)
class PageRankProblem:
    pg: SparseColumnMatrix
    d: float = 0.85
    completed: bool = False

    def __post_init__(self):
        if not 0 < self.d <= 1:
            raise ValueError(f"damping must lie in (0, 1], got {self.d}")

    @property
    def n(self) -> int:
        return self.pg.n

    def dangling(self) -> np.ndarray:
        return self.pg.out_degree() == 0


@dataclass(frozen=True)
class RescalingCertificate:
    f1: float
    f2: float
    f: float
    scale: float


class PageRankOperator:
    """Action of the full PageRank matrix: sparse ``d Pg`` plus two rank-one terms."""

    def __init__(self, prob: PageRankProblem):
        self.prob = prob
        self.n = prob.n
        self.d = prob.d
        self.rows = prob.pg.to_rows()
        self.dangling = prob.dangling()

    def dot(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        d = self.d
        y = d * self.rows.dot(x)
        uniform = d * x[self.dangling].sum() + (1.0 - d) * x.sum()
        return y + uniform / self.n

    def to_dense(self) -> np.ndarray:
        return np.column_stack([self.dot(col) for col in np.eye(self.n)])


def build_full_operator(prob: PageRankProblem) -> PageRankOperator:
    return PageRankOperator(prob)


def di_plus_initial_fluid(prob: PageRankProblem) -> np.ndarray:
    """``F0 = d Pg.e - d sigma(Pg.e) e``: total mass exactly zero."""
    pe = prob.pg.dot(uniform_vector(prob.n))
    return prob.d * pe - prob.d * pe.sum() * uniform_vector(prob.n)


def rescaling_certificate(prob: PageRankProblem, x: np.ndarray, h: np.ndarray | None = None) -> RescalingCertificate:
    """f1 = 1 - sigma(Pg.e), f2 = sigma(H' - Pg.H') with H' = X - e."""
    d = prob.d
    e = uniform_vector(prob.n)
    f1 = 1.0 - prob.pg.dot(e).sum()
    hc = x - e
    f2 = float((hc - prob.pg.dot(hc)).sum())
    f = f1 + f2
    if d < 1:
        scale = (1 - d + d * f) / (1 - d + d * f1)
    else:
        scale = 1.0 / (h + e).sum() if h is not None else 1.0
    return RescalingCertificate(float(f1), f2, float(f), float(scale))


def di_plus_pagerank(
    prob: PageRankProblem,
    policy: SelectionPolicy | None = None,
    target: float = 1e-8,
    *,
    on_completed: bool = False,
    max_cycles: int = 100_000,
) -> tuple[SolverReport, RescalingCertificate]:
    """PageRank vector from diffusion on ``(d Pg, F0)`` followed by normalization of H + e.

    With ``on_completed`` the diffusion runs on ``d Pbar`` instead (dangling
    fluid spread uniformly); both give the same normalized vector. Stops on
    ``|F| / (1 - d) <= target`` for d < 1 and on the per-iteration change of
    H for d = 1. At d = 1 the chain must have a single closed class, otherwise
    no limit exists and the request is rejected as undefined.
    """
    d = prob.d
    n = prob.n
    if d == 1.0 and np.any(prob.dangling()):
        raise UndefinedMethodError("d = 1 needs a completed graph without dangling nodes")
    if d == 1.0 and (k := closed_class_count(prob.pg)) != 1:
        # H = Pg.H + F0 has no solution: the diffusion would run forever
        raise UndefinedMethodError(f"d = 1 needs a single closed class, the graph has {k}")
    policy = policy or SelectionPolicy()
    policy = dataclasses.replace(policy, use_absolute_value=True)
    start = time.perf_counter()
    state = DiffusionState.from_fluid(di_plus_initial_fluid(prob))
    if d < 1:
        stop = StoppingRule(target, "residual", scale=1.0 / (1.0 - d), max_cycles=max_cycles)
    else:
        stop = StoppingRule(target, "delta", max_cycles=max_cycles)
    report = run_cycles(
        state,
        prob.pg.scaled(d) if d != 1.0 else prob.pg,
        policy,
        stop,
        dangling_mass=d if on_completed else 0.0,
        n_links=prob.pg.nnz,
        method="di+",
    )
    h = state.H
    x = h + uniform_vector(n)
    x = x / x.sum()
    report.d = d
    report.x = x
    report.iterations += 1.0  # the initial product Pg.e
    report.time_s = time.perf_counter() - start
    report.heuristic_estimate = d == 1.0
    report.trace = [(c + 1.0, est) for c, est in report.trace]
    cert = rescaling_certificate(prob, x, h)
    if not report.converged:
        raise ConvergenceError(f"DI+: estimate {report.error:.3e} > {target:.3e} after {report.cycles} cycles", report)
    return report, cert


def di_pagerank(
    prob: PageRankProblem,
    policy: SelectionPolicy | None = None,
    target: float = 1e-8,
    *,
    max_cycles: int = 100_000,
    return_state: bool = False,
):
    """Classic D-iteration on ``(d Pbar, (1 - d) e)``; fluids stay non-negative.

    The stopping estimate ``|F| / (1 - d)`` equals the exact L1 distance of H
    to the fixed point. Not defined at d = 1.
    """
    d = prob.d
    if d >= 1.0:
        raise UndefinedMethodError("DI is not defined at d = 1")
    n = prob.n
    policy = policy or SelectionPolicy(use_absolute_value=False)
    policy = dataclasses.replace(policy, use_absolute_value=False)
    start = time.perf_counter()
    state = DiffusionState.from_fluid((1.0 - d) * uniform_vector(n))
    report = run_cycles(
        state,
        prob.pg.scaled(d),
        policy,
        StoppingRule(target, "residual", scale=1.0 / (1.0 - d), max_cycles=max_cycles),
        dangling_mass=d,
        n_links=prob.pg.nnz,
        method="di",
    )
    report.d = d
    report.x = state.H / state.H.sum()
    report.time_s = time.perf_counter() - start
    if not report.converged:
        raise ConvergenceError(f"DI: estimate {report.error:.3e} > {target:.3e} after {report.cycles} cycles", report)
    return (report, state) if return_state else report


def pi_pagerank(prob: PageRankProblem, target: float = 1e-8, max_iter: int = 1_000_000) -> SolverReport:
    return power_solve(build_full_operator(prob), prob.d, target, max_iter)


def verify_rescaling(prob: PageRankProblem, h_incomplete, h_complete) -> float:
    """L-infinity gap between ``H' + e`` and ``scale * (H + e)``.

    ``h_incomplete`` is the limit on ``(d Pg, F0)``, ``h_complete`` the limit
    on ``(d Pbar, F0)``; the scale comes from the f1/f2 algebra.
    """
    e = uniform_vector(prob.n)
    h = np.asarray(h_incomplete, dtype=np.float64)
    hc = np.asarray(h_complete, dtype=np.float64)
    cert = rescaling_certificate(prob, hc + e, h)
    return float(np.abs((hc + e) - cert.scale * (h + e)).max())
