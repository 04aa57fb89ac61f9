"""Method comparison runs: PI / DI / DI+ across damping factors.

Each (method, d) cell is solved on the same matrix. Only the solve is timed,
not graph loading or completion. Gains are relative to PI in the same batch.
"""

from __future__ import annotations

import csv
import io
import itertools
import logging
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .diffusion import SelectionPolicy
from .errors import ConvergenceError, DiterError, UndefinedMethodError
from .graph import EdgeList, GraphStats, build_stochastic, complete_graph, compute_stats, load_edge_list
from .pagerank import PageRankProblem, di_pagerank, di_plus_pagerank, pi_pagerank
from .report import SolverReport
from .synthetic import generate_synthetic

log = logging.getLogger(__name__)

METHODS = ("pi", "di", "di+")
CSV_HEADER = ["method", "d", "iterations", "time_s", "error", "gain_iter", "gain_time"]


class AgreementError(DiterError):
    pass


@dataclass(frozen=True)
class BenchConfig:
    graph: str | None = None
    # (n, avg_degree, exponent) for the synthetic generator
    synthetic: tuple[int, float, float] | None = None
    methods: tuple[str, ...] = METHODS
    d_list: tuple[float, ...] = (0.5, 0.85, 0.99)
    target: float | None = None  # None means 1/N
    seed: int = 0
    max_cycles: int = 100_000
    r0: float = 1.0
    decay: float = 0.25
    fmt: str = "markdown"
    complete: bool = True
    on_completed: bool = False

    def __post_init__(self):
        if not self.methods:
            raise ValueError("at least one method is required")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ValueError(f"unknown methods {bad}; choose from {METHODS}")
        if any(not 0 < d <= 1 for d in self.d_list):
            raise ValueError("damping factors must lie in (0, 1]")
        if (self.graph is None) == (self.synthetic is None):
            raise ValueError("give exactly one of a graph path or synthetic generator settings")
        if self.fmt not in ("csv", "markdown"):
            raise ValueError(f"unknown format {self.fmt!r}")


def load_graph(cfg: BenchConfig) -> EdgeList:
    if cfg.synthetic is not None:
        n, deg, exp = cfg.synthetic
        return generate_synthetic(int(n), deg, exp, cfg.seed)
    with open(cfg.graph) as fh:
        return load_edge_list(fh)


def run_cell(prob: PageRankProblem, method: str, target: float, policy: SelectionPolicy, max_cycles: int,
             on_completed: bool = False) -> SolverReport:
    """Solve one cell; out-of-domain requests come back as ``undefined`` rows."""
    try:
        if method == "pi":
            return pi_pagerank(prob, target, max_iter=max_cycles)
        if method == "di":
            return di_pagerank(prob, policy, target, max_cycles=max_cycles)
        report, _ = di_plus_pagerank(prob, policy, target, on_completed=on_completed, max_cycles=max_cycles)
        return report
    except UndefinedMethodError as exc:
        return SolverReport(method, d=prob.d, undefined=True, note=str(exc))
    except ConvergenceError as exc:
        report = exc.report or SolverReport(method)
        report.d = prob.d
        report.converged = False
        report.note = str(exc)
        return report


def apply_gains(reports: list[SolverReport]) -> None:
    by_d = {}
    for r in reports:
        by_d.setdefault(r.d, []).append(r)
    for rows in by_d.values():
        pi = next((r for r in rows if r.method == "pi" and r.converged), None)
        for r in rows:
            if pi is None or r.undefined or not r.converged:
                r.gain_iter = r.gain_time = None
                continue
            r.gain_iter = pi.iterations / r.iterations if r.iterations > 0 else float("inf")
            r.gain_time = pi.time_s / r.time_s if r.time_s > 0 else float("inf")


def cross_check(reports: list[SolverReport], targets: dict[str, float]) -> None:
    """Converged methods at the same d < 1 must agree within 2x their summed targets.

    The factor 2 covers the final renormalization of DI / DI+ vectors. At d = 1
    the estimates are not bounds, so no check is made there.
    """
    by_d = {}
    for r in reports:
        if r.converged and not r.undefined and r.d < 1:
            by_d.setdefault(r.d, []).append(r)
    for d, rows in by_d.items():
        for a, b in itertools.combinations(rows, 2):
            gap = float(np.abs(a.x - b.x).sum())
            tol = 2.0 * (targets[a.method] + targets[b.method])
            if gap > tol:
                raise AgreementError(f"d={d}: {a.method} and {b.method} differ by {gap:.3e} > {tol:.3e}")


def run_bench(cfg: BenchConfig) -> tuple[list[SolverReport], GraphStats]:
    edges = load_graph(cfg)
    if cfg.complete:
        edges = complete_graph(edges, cfg.seed)
    pg = build_stochastic(edges)
    stats = compute_stats(pg)
    target = cfg.target if cfg.target is not None else 1.0 / pg.n
    policy = SelectionPolicy(cfg.r0, cfg.decay)
    _kernels.warm_up()
    reports = []
    for d in cfg.d_list:
        prob = PageRankProblem(pg, d, completed=cfg.complete)
        for method in cfg.methods:
            r = run_cell(prob, method, target, policy, cfg.max_cycles, cfg.on_completed)
            log.info("d=%s %s: iter=%.3f time=%.4fs converged=%s", d, method, r.iterations, r.time_s, r.converged)
            reports.append(r)
    apply_gains(reports)
    cross_check(reports, {m: target for m in cfg.methods})
    return reports, stats


def _num(x) -> str:
    return "" if x is None else repr(float(x))


def emit_csv(reports: list[SolverReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in reports:
        if r.undefined:
            w.writerow([r.method, r.d, "undefined", "undefined", "", "", ""])
            continue
        w.writerow([r.method, r.d, _num(r.iterations), _num(r.time_s), _num(r.error),
                    _num(r.gain_iter), _num(r.gain_time)])
    return buf.getvalue()


def _gain(r: SolverReport, value) -> str:
    if r.method == "pi":
        return "x"
    if value is None:
        return "x"
    if value == float("inf"):
        return "inf"
    return f"×{value:.1f}"


def stats_table(stats: GraphStats) -> str:
    ratios = stats.ratios()
    return "\n".join([
        "| N | L/N | D/N | E/N | O/N | max_in | max_out |",
        "|---|---|---|---|---|---|---|",
        f"| {stats.n} | {ratios['L/N']:.1f} | {ratios['D/N']:.3f} | {ratios['E/N']:.3f} | "
        f"{ratios['O/N']:.3f} | {stats.max_in} | {stats.max_out} |",
    ])


def emit_markdown(reports: list[SolverReport], stats: GraphStats | None = None) -> str:
    parts = []
    if stats is not None:
        parts.append(stats_table(stats))
    ds = list(dict.fromkeys(r.d for r in reports))
    for d in ds:
        lines = [f"d={d}", "", "| method | nb iter | gain | time (s) | gain |", "|---|---|---|---|---|"]
        for r in (r for r in reports if r.d == d):
            name = r.method.upper()
            if r.undefined:
                lines.append(f"| {name} | undefined | x | undefined | x |")
                continue
            it = f"{r.iterations:.1f}" if r.method != "pi" else f"{r.iterations:.0f}"
            if not r.converged:
                it += " (not converged)"
            lines.append(f"| {name} | {it} | {_gain(r, r.gain_iter)} | {r.time_s:.3g} | {_gain(r, r.gain_time)} |")
        parts.append("\n".join(lines))
    return "\n\n".join(parts) + "\n"


def emit_report(reports: list[SolverReport], stats: GraphStats | None, fmt: str = "csv") -> str:
    if fmt == "csv":
        return emit_csv(reports)
    if fmt == "markdown":
        return emit_markdown(reports, stats)
    raise ValueError(f"unknown format {fmt!r}")


def write_trace(reports: list[SolverReport], stream) -> None:
    """Error-vs-cost samples, one row per cycle (diffusion) or product (PI)."""
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["method", "d", "cost", "estimate"])
    for r in reports:
        for cost, est in r.trace:
            w.writerow([r.method, r.d, repr(cost), repr(est)])
