"""Reproducible power-law web-like graphs for desk-scale benchmarks."""

from __future__ import annotations

import numpy as np

from .graph import EdgeList
from .rng import SplitMix64


def _fit_scale(raw: np.ndarray, cap: int, total: float) -> float:
    lo, hi = 0.0, total + 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.minimum(np.floor(mid * raw), cap).sum() < total:
            lo = mid
        else:
            hi = mid
    return hi


def generate_synthetic(
    n: int,
    avg_degree: float,
    exponent: float = 2.1,
    seed: int = 0,
    *,
    locality: float = 0.99,
    host_size: int = 50,
) -> EdgeList:
    """Directed graph with Pareto-distributed out-degrees and web-like locality.

    Out-degrees are ``floor(c * (1 - u) ** (-1 / (exponent - 1)))`` capped at
    ``n - 1``, with ``c`` fitted so the mean out-degree is ``avg_degree``.
    Nodes are grouped into consecutive hosts of ``host_size`` ids. Each link
    stays inside the source's host with probability ``locality`` (uniform
    destination); otherwise it goes to a node drawn from an urn holding every
    node once plus one ball per link already received (preferential
    attachment). Destinations of one source are distinct. Identical arguments
    give identical edge lists.

    Locality is what makes the chain mix slowly, as crawled web graphs do;
    with ``locality=0`` power iteration converges in a handful of products.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not avg_degree >= 1 or avg_degree > n - 1:
        raise ValueError(f"avg_degree must lie in [1, n - 1], got {avg_degree}")
    if not exponent > 1:
        raise ValueError(f"exponent must be > 1, got {exponent}")
    if not 0 <= locality <= 1 or host_size < 1:
        raise ValueError("locality must lie in [0, 1] and host_size be >= 1")
    rng = SplitMix64(seed)
    u = np.array([rng.uniform() for _ in range(n)])
    raw = (1.0 - u) ** (-1.0 / (exponent - 1.0))
    c = _fit_scale(raw, n - 1, avg_degree * n)
    degrees = np.minimum(np.floor(c * raw), n - 1).astype(np.int64).tolist()

    urn = list(range(n))
    edges = []
    for src, k in enumerate(degrees):
        lo = (src // host_size) * host_size
        size = min(n, lo + host_size) - lo
        chosen = set()
        for _ in range(k):
            for _ in range(32):
                if locality and rng.uniform() < locality:
                    dst = lo + rng.below(size)
                else:
                    dst = urn[rng.below(len(urn))]
                if dst not in chosen:
                    break
            while dst in chosen:
                dst = (dst + 1) % n
            chosen.add(dst)
            edges.append((src, dst))
        urn.extend(dst for _, dst in edges[len(edges) - k:])
    return EdgeList(n, edges)
