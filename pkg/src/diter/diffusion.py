"""Residual-fluid diffusion (D-iteration) and its zero-mass initialization.

The solver keeps a history vector ``H`` and a residual fluid vector ``F``.
Diffusing node ``i`` moves its fluid into ``H[i]`` and pushes ``F[i] * p_ji``
to every out-neighbour ``j``. Throughout, ``H + F == P.H + F0`` holds.
Starting from ``F0 = P.e - e`` (total mass zero) the positive and negative
fluids cancel, and ``H + e`` converges to the fixed point of ``X = P.X``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DivergenceError
from .graph import SparseColumnMatrix
from .report import SolverReport


def uniform_vector(n: int) -> np.ndarray:
    """The vector e = (1/n, ..., 1/n)."""
    return np.full(n, 1.0 / n)


@dataclass
class DiffusionState:
    H: np.ndarray
    F: np.ndarray
    links_processed: int = 0
    diffusions: int = 0
    # uniform fluid not yet written into F (see _kernels.sweep)
    offset: np.ndarray = field(default_factory=lambda: np.zeros(1))

    @classmethod
    def from_fluid(cls, f0) -> "DiffusionState":
        f0 = np.array(f0, dtype=np.float64)
        return cls(H=np.zeros_like(f0), F=f0)

    @property
    def n(self) -> int:
        return self.F.shape[0]

    def fluid(self) -> np.ndarray:
        """Residual fluid with any pending uniform part folded in."""
        if self.offset[0] == 0.0:
            return self.F.copy()
        return self.F + self.offset[0] / self.n

    def residual_norm(self) -> float:
        return float(np.abs(self.fluid()).sum())

    def copy(self) -> "DiffusionState":
        return DiffusionState(
            self.H.copy(), self.F.copy(), self.links_processed, self.diffusions, self.offset.copy()
        )


@dataclass(frozen=True)
class SelectionPolicy:
    """Per-cycle threshold ``r0 * decay**cycle``; node i is diffused when its
    fluid exceeds ``r * max(out_i, 1) / L``."""

    r0: float = 1.0
    decay: float = 0.25
    use_absolute_value: bool = True

    def __post_init__(self):
        if not self.r0 > 0:
            raise ValueError(f"r0 must be > 0, got {self.r0}")
        if not 0 < self.decay < 1:
            raise ValueError(f"decay must lie in (0, 1), got {self.decay}")

    def threshold(self, cycle: int) -> float:
        return self.r0 * self.decay**cycle


@dataclass(frozen=True)
class StoppingRule:
    """When to stop a diffusion run.

    ``kind="residual"``: estimate is ``scale * |F|`` (``scale = 1/(1-d)`` gives
    the damped-system bound). ``kind="delta"``: estimate is ``|H_now - H_prev|``
    where the two snapshots are at least one full iteration (L links) apart.
    ``kind="contraction"``: estimate is ``|F| / (1 - g)`` with ``g`` the
    observed per-iteration contraction of ``|F|`` over the last such window;
    this is the damped bound with ``d`` replaced by the measured rate.
    """

    target: float
    kind: str = "residual"
    scale: float = 1.0
    max_cycles: int = 100_000
    diverge_factor: float | None = None

    def __post_init__(self):
        if self.kind not in ("residual", "delta", "contraction"):
            raise ValueError(f"unknown stopping rule {self.kind!r}")


def diffuse_node(state: DiffusionState, m: SparseColumnMatrix, i: int) -> DiffusionState:
    if not 0 <= i < m.n:
        raise IndexError(f"node {i} out of range [0, {m.n})")
    f = state.F[i]
    state.H[i] += f
    state.F[i] = 0.0
    lo, hi = m.indptr[i], m.indptr[i + 1]
    np.add.at(state.F, m.indices[lo:hi], f * m.data[lo:hi])
    state.links_processed += int(hi - lo)
    state.diffusions += 1
    return state


def init_di_plus(m: SparseColumnMatrix) -> DiffusionState:
    """``H = 0`` and ``F = P.e - e`` from one full product."""
    e = uniform_vector(m.n)
    return DiffusionState.from_fluid(m.dot(e) - e)


def check_identity(state: DiffusionState, m: SparseColumnMatrix, f0) -> float:
    """L1 norm of ``H + F - P.H - f0``; zero up to rounding for any diffusion history."""
    r = state.H + state.fluid() - m.dot(state.H) - np.asarray(f0, dtype=np.float64)
    return float(np.abs(r).sum())


def selection_weights(m: SparseColumnMatrix, n_links: int | None = None) -> np.ndarray:
    L = max(m.nnz if n_links is None else n_links, 1)
    return np.maximum(m.out_degree(), 1).astype(np.float64) / L


def run_cycles(
    state: DiffusionState,
    m: SparseColumnMatrix,
    policy: SelectionPolicy,
    stop: StoppingRule,
    *,
    dangling_mass: float = 0.0,
    n_links: int | None = None,
    method: str = "diffusion",
) -> SolverReport:
    """Sweep nodes 0..n-1 repeatedly under the policy until the stopping rule holds.

    ``dangling_mass`` is the share of fluid an empty column spreads uniformly
    over all nodes (``d`` for a dangling-completed PageRank matrix, else 0).
    ``n_links`` is the link count L used for thresholds and for the
    fractional iteration count (defaults to the stored entries of ``m``).
    Returns a report with ``converged=False`` when ``max_cycles`` runs out.
    """
    L = max(m.nnz if n_links is None else n_links, 1)
    weight = selection_weights(m, L)
    links0 = state.links_processed
    start = time.perf_counter()

    def cost():
        return (state.links_processed - links0) / L

    snapshot = state.H.copy()
    snapshot_links = state.links_processed
    res = state.residual_norm()
    snapshot_res = res
    limit = None if stop.diverge_factor is None else stop.diverge_factor * max(res, 1e-300)
    if res == 0.0:
        estimate = 0.0
    elif stop.kind == "residual":
        estimate = stop.scale * res
    else:
        estimate = float("inf")
    trace = [(0.0, estimate)]
    cycle = 0
    while estimate > stop.target and cycle < stop.max_cycles:
        nd, nl = _kernels.sweep(
            m.indptr, m.indices, m.data, weight, policy.threshold(cycle),
            policy.use_absolute_value, dangling_mass, state.F, state.H, state.offset,
        )
        cycle += 1
        state.diffusions += int(nd)
        state.links_processed += int(nl)
        res = state.residual_norm()
        if limit is not None and res > limit:
            raise DivergenceError(
                f"residual fluid grew to {res:.3e} (> {stop.diverge_factor}x initial)",
                SolverReport(method, error=res, cycles=cycle, iterations=cost()),
            )
        if res == 0.0:
            estimate = 0.0
        elif stop.kind == "residual":
            estimate = stop.scale * res
        elif state.links_processed - snapshot_links >= L:
            if stop.kind == "delta":
                estimate = float(np.abs(state.H - snapshot).sum())
            else:
                rate = (res / snapshot_res) ** (L / (state.links_processed - snapshot_links))
                estimate = stop.scale * res / (1.0 - rate) if rate < 1.0 else float("inf")
            snapshot = state.H.copy()
            snapshot_links = state.links_processed
            snapshot_res = res
        trace.append((cost(), estimate))
    return SolverReport(
        method=method,
        iterations=cost(),
        time_s=time.perf_counter() - start,
        error=estimate,
        converged=estimate <= stop.target,
        cycles=cycle,
        diffusions=state.diffusions,
        links_processed=state.links_processed - links0,
        trace=trace,
    )


def diffusion_trace(m: SparseColumnMatrix, state: DiffusionState, nodes, v=None) -> np.ndarray:
    """Diffuse the given node sequence in place, returning one row per step:
    ``sigma(F), sigma(H), |F|_1, sigma_v(F), |F|_v`` (``v`` defaults to ones)."""
    nodes = np.ascontiguousarray(nodes, dtype=np.int64)
    if nodes.size and (nodes.min() < 0 or nodes.max() >= m.n):
        raise IndexError("node sequence out of range")
    v = np.ones(m.n) if v is None else np.ascontiguousarray(v, dtype=np.float64)
    out = _kernels.trace_sequence(m.indptr, m.indices, m.data, nodes, state.F, state.H, v)
    state.diffusions += nodes.size
    state.links_processed += int(m.out_degree()[nodes].sum())
    return out


def policy_sequence(m: SparseColumnMatrix, f0, policy: SelectionPolicy, steps: int) -> np.ndarray:
    """The first ``steps`` node indices the sweep policy would diffuse from ``f0``."""
    F = np.array(f0, dtype=np.float64)
    weight = np.maximum(m.out_degree(), 1) / max(m.nnz, 1)
    nodes = []
    cycle = 0
    while len(nodes) < steps:
        r = policy.threshold(cycle)
        picked = False
        for i in range(m.n):
            if abs(F[i]) > r * weight[i]:
                f = F[i]
                F[i] = 0.0
                lo, hi = m.indptr[i], m.indptr[i + 1]
                np.add.at(F, m.indices[lo:hi], f * m.data[lo:hi])
                nodes.append(i)
                picked = True
                if len(nodes) == steps:
                    break
        if not picked and r == 0.0:
            break
        cycle += 1
    return np.asarray(nodes, dtype=np.int64)


def solve_stationary(
    m: SparseColumnMatrix,
    target: float,
    policy: SelectionPolicy | None = None,
    max_cycles: int = 100_000,
) -> tuple[SolverReport, DiffusionState]:
    """Stationary vector of a column-stochastic matrix by zero-mass diffusion.

    Stops when ``|F| / (1 - g) <= target``, ``g`` being the measured
    contraction rate of ``|F|`` per iteration. The returned ``x`` is
    ``H + e`` scaled to sum 1.
    """
    policy = policy or SelectionPolicy()
    start = time.perf_counter()
    state = init_di_plus(m)
    report = run_cycles(
        state, m, policy, StoppingRule(target, "contraction", max_cycles=max_cycles), method="di+"
    )
    x = state.H + uniform_vector(m.n)
    report.x = x / x.sum()
    report.iterations += 1.0  # the initial product P.e
    report.time_s = time.perf_counter() - start
    return report, state
