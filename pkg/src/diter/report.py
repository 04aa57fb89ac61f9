from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class SolverReport:
    method: str
    d: float | None = None
    x: np.ndarray | None = None
    iterations: float = 0.0
    time_s: float = 0.0
    error: float = float("nan")
    converged: bool = False
    cycles: int = 0
    diffusions: int = 0
    links_processed: int = 0
    # (cost in iterations, error estimate) sampled once per cycle / product
    trace: list[tuple[float, float]] = field(default_factory=list)
    heuristic_estimate: bool = False
    undefined: bool = False
    gain_iter: float | None = None
    gain_time: float | None = None
    note: str = ""
