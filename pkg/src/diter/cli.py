"""Command line entry point: ``diter stats | solve | bench``.

Exit codes: 0 success, 1 usage or I/O error, 2 a requested solve did not converge.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .bench import AgreementError, BenchConfig, emit_report, run_bench, run_cell, write_trace
from .diffusion import SelectionPolicy
from .errors import DiterError
from .graph import build_stochastic, complete_graph, compute_stats, load_edge_list
from .pagerank import PageRankProblem

EXIT_OK, EXIT_USAGE, EXIT_NOCONV = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.split(",") if t)


def _synthetic(text: str) -> tuple[int, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected n,avg_degree,exponent")
    return int(parts[0]), float(parts[1]), float(parts[2])


def _load(path: str, complete: bool, seed: int):
    with open(path) as fh:
        edges = load_edge_list(fh)
    if complete:
        edges = complete_graph(edges, seed)
    return build_stochastic(edges)


def cmd_stats(args) -> int:
    s = compute_stats(_load(args.graph, args.complete, args.seed))
    print(f"N={s.n} L={s.L} D={s.D} E={s.E} O={s.O} max_in={s.max_in} max_out={s.max_out}")
    r = s.ratios()
    print(" ".join(f"{k}={v:.4g}" for k, v in r.items()))
    return EXIT_OK


def cmd_solve(args) -> int:
    pg = _load(args.graph, args.complete, args.seed)
    target = 1.0 / pg.n if args.target_inv_n else args.target
    prob = PageRankProblem(pg, args.d, completed=args.complete)
    policy = SelectionPolicy(args.r0, args.decay)
    report = run_cell(prob, args.method, target, policy, args.max_cycles, args.on_completed)
    if report.undefined:
        print(f"{args.method} undefined: {report.note}", file=sys.stderr)
        return EXIT_USAGE
    if report.x is not None:
        text = "".join(f"{float(v)!r}\n" for v in report.x)
        if args.output:
            with open(args.output, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    print(
        f"method={report.method} d={args.d} iterations={report.iterations:.3f} "
        f"time_s={report.time_s:.4f} error={report.error:.3e} converged={report.converged}",
        file=sys.stderr,
    )
    return EXIT_OK if report.converged else EXIT_NOCONV


def cmd_bench(args) -> int:
    cfg = BenchConfig(
        graph=args.graph,
        synthetic=args.synthetic,
        methods=tuple(args.methods.split(",")),
        d_list=args.d_list,
        target=None if args.target is None else args.target,
        seed=args.seed,
        max_cycles=args.max_cycles,
        r0=args.r0,
        decay=args.decay,
        fmt=args.format,
        complete=not args.no_complete,
        on_completed=args.on_completed,
    )
    reports, stats = run_bench(cfg)
    sys.stdout.write(emit_report(reports, stats, cfg.fmt))
    if args.trace:
        with open(args.trace, "w") as fh:
            write_trace(reports, fh)
    failed = [r for r in reports if not r.undefined and not r.converged]
    return EXIT_NOCONV if failed else EXIT_OK


def _policy_args(p):
    p.add_argument("--r0", type=float, default=1.0, help="initial selection threshold")
    p.add_argument("--decay", type=float, default=0.25, help="threshold decay per cycle")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-cycles", type=int, default=100_000)
    p.add_argument("--on-completed", action="store_true",
                   help="DI+: diffuse on the dangling-completed matrix instead of d*Pg")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="diter", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("stats", help="print graph statistics")
    p.add_argument("graph")
    p.add_argument("--complete", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("solve", help="compute a PageRank vector")
    p.add_argument("graph")
    p.add_argument("--method", choices=("pi", "di", "di+"), default="di+")
    p.add_argument("--d", type=float, default=0.85)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--target", type=float, default=1e-8)
    g.add_argument("--target-inv-n", action="store_true", help="target error 1/N")
    p.add_argument("--complete", action="store_true")
    p.add_argument("--output", help="write X here (one value per line) instead of stdout")
    _policy_args(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="compare methods across damping factors")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("graph", nargs="?")
    src.add_argument("--synthetic", type=_synthetic, metavar="N,DEG,EXP")
    p.add_argument("--methods", default="pi,di,di+")
    p.add_argument("--d-list", type=_floats, default=(0.5, 0.85, 0.99, 0.999, 1.0))
    p.add_argument("--target", type=float, default=None, help="default: 1/N")
    p.add_argument("--format", choices=("csv", "markdown"), default="markdown")
    p.add_argument("--trace", help="write error-vs-cost samples as CSV")
    p.add_argument("--no-complete", action="store_true", help="skip random completion")
    _policy_args(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError, AgreementError, DiterError) as exc:
        print(f"diter: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
