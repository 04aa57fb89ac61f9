"""Stationary and Perron vectors of sparse non-negative matrices by zero-mass diffusion."""

from .diffusion import (
    DiffusionState,
    SelectionPolicy,
    StoppingRule,
    check_identity,
    diffuse_node,
    init_di_plus,
    run_cycles,
    solve_stationary,
    uniform_vector,
)
from .errors import (
    CompletionError,
    ConvergenceError,
    DivergenceError,
    EdgeListError,
    EmptyInputError,
    SingularMatrixError,
    UndefinedMethodError,
)
from .graph import (
    EdgeList,
    GraphStats,
    SparseColumnMatrix,
    SparseRowMatrix,
    build_stochastic,
    closed_class_count,
    complete_graph,
    compute_stats,
    load_edge_list,
)
from .pagerank import (
    PageRankProblem,
    RescalingCertificate,
    build_full_operator,
    di_pagerank,
    di_plus_pagerank,
    pi_pagerank,
    verify_rescaling,
)
from .perron import LeftEigenvectorWeights, PerronProblem, estimate_rho, perron_solve, v_norm_trace
from .power import PowerState, power_solve, power_step
from .report import SolverReport

__version__ = "0.1.0"
