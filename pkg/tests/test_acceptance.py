"""Acceptance criteria, one test each, at the stated tolerances."""

import time

import numpy as np
import pytest

from corpus import random_positive, random_web, stochastic_corpus
from diter.bench import BenchConfig, run_bench
from diter.diffusion import (
    DiffusionState,
    SelectionPolicy,
    check_identity,
    diffusion_trace,
    init_di_plus,
    policy_sequence,
    solve_stationary,
    uniform_vector,
)
from diter.graph import EdgeList, build_stochastic, closed_class_count, complete_graph
from diter.oracle import dense_dominant_eigenpair, dense_linear_solve, dense_stationary
from diter.pagerank import PageRankProblem, build_full_operator, di_pagerank, di_plus_pagerank, pi_pagerank
from diter.perron import PerronProblem, perron_solve
from diter.synthetic import generate_synthetic

STEPS = 10_000


@pytest.fixture(scope="module")
def corpus():
    return stochastic_corpus(seed=2024, count=200, n_min=2, n_max=100)


@pytest.fixture(scope="module")
def traced_runs(corpus):
    """10^4 DI+ diffusion steps in policy order on every corpus matrix.

    Yields (matrix, per-step rows, initial |F|, final state, F0) and the wall time.
    """
    start = time.perf_counter()
    runs = []
    for m in corpus:
        state = init_di_plus(m)
        f0 = state.F.copy()
        nodes = policy_sequence(m, f0, SelectionPolicy(), STEPS)
        rows = diffusion_trace(m, state, nodes)
        runs.append((m, rows, np.abs(f0).sum(), state, f0))
    return runs, time.perf_counter() - start


def test_criterion_1_mass_conservation(traced_runs):
    runs, elapsed = traced_runs
    worst_f = max(np.abs(rows[:, 0]).max() for _, rows, *_ in runs if len(rows))
    worst_h = max(np.abs(rows[:, 1]).max() for _, rows, *_ in runs if len(rows))
    assert elapsed < 30.0, f"runtime {elapsed:.1f}s"
    assert worst_f <= 1e-10, f"max |sigma(F)| = {worst_f:.3e}"
    # sigma(H) grows by every diffused amount; it is zero for full products,
    # not for single-node diffusion (see the decisions ledger)
    assert worst_h <= 1e-10, f"max |sigma(F)| = {worst_f:.1e} holds, but max |sigma(H)| = {worst_h:.3e}"


def test_criterion_2_monotone_fluid(traced_runs):
    runs, _ = traced_runs
    worst = 0.0
    for _, rows, l1_start, *_ in runs:
        l1 = np.concatenate([[l1_start], rows[:, 2]])
        worst = max(worst, float(np.diff(l1).max(initial=-np.inf)))
    assert worst <= 1e-12, f"largest increase of |F| in one step: {worst:.3e}"


def test_criterion_3_fundamental_identity(traced_runs, corpus):
    runs, _ = traced_runs
    for m, _, _, state, f0 in runs:
        assert check_identity(state, m, f0) <= 1e-10 * m.n
    for m in corpus:
        r, state = solve_stationary(m, 1e-8)
        assert check_identity(state, m, init_di_plus(m).F) <= 1e-10 * m.n


def test_criterion_4_oracle_equivalence(corpus):
    target = 1e-8
    worst = 0.0
    for m in corpus:
        r, _ = solve_stationary(m, target)
        assert r.converged
        worst = max(worst, float(np.abs(r.x - dense_stationary(m)).sum()))
    assert worst <= 2 * target, f"worst L1 distance to the oracle {worst:.3e}"
    edge = build_stochastic(EdgeList(2, [(0, 1)]))
    r, _ = di_plus_pagerank(PageRankProblem(edge, 0.5), target=1e-10)
    h = dense_linear_solve(np.eye(2) - 0.5 * edge.to_dense(), [-0.125, 0.125])
    ref = (h + 0.5) / (h + 0.5).sum()
    assert np.abs(ref - [0.4, 0.6]).max() <= 1e-15
    assert np.abs(r.x - ref).max() <= 1e-8


@pytest.mark.parametrize("d", [0.5, 0.85, 0.99])
def test_criterion_5_error_estimators(d):
    rng = np.random.default_rng(int(d * 1000))
    for _ in range(20):
        prob = PageRankProblem(random_web(rng, int(rng.integers(2, 51))), d, completed=True)
        n = prob.n
        d_pbar = build_full_operator(prob).to_dense() - (1 - d) / n
        exact = dense_linear_solve(np.eye(n) - d_pbar, np.full(n, (1 - d) / n))
        for target in (1e-2, 1e-5, 1e-9):
            pi = pi_pagerank(prob, target)
            assert np.abs(pi.x - exact).sum() <= pi.error + 1e-15
            di, state = di_pagerank(prob, target=target, return_state=True)
            assert abs(np.abs(state.H - exact).sum() - di.error) <= 1e-9


@pytest.fixture(scope="module")
def gain_bench():
    start = time.perf_counter()
    reports, stats = run_bench(BenchConfig(synthetic=(1000, 13, 2.1), methods=("pi", "di+"), d_list=(0.85, 0.99)))
    return {(r.method, r.d): r for r in reports}, stats, time.perf_counter() - start


def test_criterion_6_gain_reproduction(gain_bench):
    cells, stats, elapsed = gain_bench
    assert stats.n == 1000 and 12.5 <= stats.L / stats.n <= 14.0
    for d in (0.85, 0.99):
        pi, dp = cells["pi", d], cells["di+", d]
        assert pi.converged and dp.converged
        assert dp.iterations < pi.iterations, f"d={d}: DI+ {dp.iterations:.1f} vs PI {pi.iterations:.0f}"
    gain = cells["pi", 0.99].iterations / cells["di+", 0.99].iterations
    assert gain >= 1.5, f"gain at d=0.99 is {gain:.2f}"
    assert elapsed < 60.0, f"runtime {elapsed:.1f}s"


@pytest.mark.parametrize("seed", range(4))
def test_criterion_7_d1_behavior(seed):
    reports, _ = run_bench(BenchConfig(synthetic=(50, 3, 2.1), methods=("di",), d_list=(1.0,), seed=seed))
    assert reports[0].undefined
    pg = build_stochastic(complete_graph(generate_synthetic(200, 13, 2.1, seed=seed), seed))
    assert closed_class_count(pg) == 1 and pg.to_scipy().shape == (200, 200)
    r, _ = di_plus_pagerank(PageRankProblem(pg, 1.0, completed=True), target=1e-10)
    assert r.converged
    assert np.abs(r.x - dense_stationary(pg)).sum() <= 1e-6


def test_criterion_8_perron_suite():
    rng = np.random.default_rng(808)
    target = 1e-8
    for _ in range(50):
        m = random_positive(rng, int(rng.integers(2, 31)))
        rho, right, left = dense_dominant_eigenpair(m)
        r = perron_solve(PerronProblem(m, rho), target=target)
        assert np.abs(r.x - right).sum() <= 2 * target
        # replay the solve's diffusion order with the oracle left vector as weights
        scaled = m.scaled(1.0 / rho)
        e = uniform_vector(m.n)
        f0 = scaled.dot(e) - e
        nodes = policy_sequence(scaled, f0, SelectionPolicy(), r.diffusions)
        rows = diffusion_trace(scaled, DiffusionState.from_fluid(f0), nodes, left)
        assert np.all(np.abs(rows[:, 3]) <= 1e-10)
        norms = np.concatenate([[np.abs(f0 * left).sum()], rows[:, 4]])
        assert np.all(np.diff(norms) <= 1e-12)


def test_criterion_9_determinism():
    cfg = BenchConfig(synthetic=(500, 8, 2.1), d_list=(0.5, 0.85, 0.99, 1.0), seed=7)
    a, _ = run_bench(cfg)
    b, _ = run_bench(cfg)
    for ra, rb in zip(a, b, strict=True):
        assert (ra.method, ra.d, ra.undefined, ra.converged) == (rb.method, rb.d, rb.undefined, rb.converged)
        assert ra.iterations == rb.iterations
        if ra.x is not None:
            assert ra.x.tobytes() == rb.x.tobytes()
