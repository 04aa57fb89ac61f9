"""Directed graphs, compressed stochastic matrices and graph statistics.

Columns index source nodes and rows index destinations, so a link ``j -> i``
is stored as entry ``p_ij`` in column ``j``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import CompletionError, EdgeListError, EmptyInputError
from .rng import SplitMix64

MAX_NODES = 2**31 - 1
STOCHASTIC_TOL = 1e-12


@dataclass(frozen=True)
class EdgeList:
    n: int
    edges: list[tuple[int, int]] = field(default_factory=list)

    def __post_init__(self):
        if self.n < 1:
            raise EdgeListError(f"node count must be >= 1, got {self.n}")
        for src, dst in self.edges:
            if not (0 <= src < self.n and 0 <= dst < self.n):
                raise EdgeListError(f"edge ({src}, {dst}) outside [0, {self.n})")

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        if not self.edges:
            return np.zeros(0, np.int64), np.zeros(0, np.int64)
        a = np.asarray(self.edges, dtype=np.int64)
        return a[:, 0].copy(), a[:, 1].copy()

    def __len__(self):
        return len(self.edges)


def load_edge_list(source: TextIO | Iterable[str]) -> EdgeList:
    """Parse ``src dst`` lines; ``#`` lines are comments, ``N <n>`` may open the file."""
    n_header = None
    edges = []
    max_id = -1
    seen_content = False
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if not seen_content and parts[0] == "N":
            seen_content = True
            if len(parts) != 2 or not parts[1].isdigit():
                raise EdgeListError(f"malformed header {line!r}", lineno)
            n_header = int(parts[1])
            if n_header < 1 or n_header > MAX_NODES:
                raise EdgeListError(f"dimension {n_header} out of range", lineno)
            continue
        seen_content = True
        if len(parts) != 2 or not (parts[0].isdigit() and parts[1].isdigit()):
            raise EdgeListError(f"expected two decimal node ids, got {line!r}", lineno)
        src, dst = int(parts[0]), int(parts[1])
        if src >= MAX_NODES or dst >= MAX_NODES:
            raise EdgeListError(f"node id overflow (limit {MAX_NODES - 1})", lineno)
        if n_header is not None and (src >= n_header or dst >= n_header):
            raise EdgeListError(f"node id exceeds declared dimension {n_header}", lineno)
        max_id = max(max_id, src, dst)
        edges.append((src, dst))
    if n_header is None and not edges:
        raise EmptyInputError()
    return EdgeList(n_header if n_header is not None else max_id + 1, edges)


def write_edge_list(edges: EdgeList, stream: TextIO) -> None:
    stream.write(f"N {edges.n}\n")
    for src, dst in edges.edges:
        stream.write(f"{src} {dst}\n")


@dataclass(frozen=True, eq=False)
class SparseColumnMatrix:
    """Column-compressed square matrix with non-negative float64 entries."""

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray
    is_column_stochastic: bool = False

    @classmethod
    def from_scipy(cls, m, stochastic: bool | None = None) -> "SparseColumnMatrix":
        m = sp.csc_matrix(m, dtype=np.float64)
        m.sum_duplicates()
        m.sort_indices()
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"matrix must be square, got {m.shape}")
        if m.nnz and m.data.min() < 0:
            raise ValueError("matrix entries must be non-negative")
        out = cls(
            m.shape[0],
            m.indptr.astype(np.int64),
            m.indices.astype(np.int64),
            m.data.astype(np.float64),
        )
        if stochastic is None:
            stochastic = out.check_column_stochastic()
        object.__setattr__(out, "is_column_stochastic", bool(stochastic))
        return out

    @classmethod
    def from_dense(cls, a) -> "SparseColumnMatrix":
        return cls.from_scipy(sp.csc_matrix(np.asarray(a, dtype=np.float64)))

    def to_scipy(self) -> sp.csc_matrix:
        return sp.csc_matrix((self.data, self.indices, self.indptr), shape=(self.n, self.n))

    def to_dense(self) -> np.ndarray:
        return self.to_scipy().toarray()

    def to_rows(self) -> "SparseRowMatrix":
        r = self.to_scipy().tocsr()
        r.sort_indices()
        return SparseRowMatrix(
            self.n, r.indptr.astype(np.int64), r.indices.astype(np.int64), r.data.astype(np.float64)
        )

    @property
    def nnz(self) -> int:
        return int(self.indptr[-1])

    def out_degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    def in_degree(self) -> np.ndarray:
        return np.bincount(self.indices, minlength=self.n)

    def column_sums(self) -> np.ndarray:
        cols = np.repeat(np.arange(self.n), self.out_degree())
        return np.bincount(cols, weights=self.data, minlength=self.n)

    def check_column_stochastic(self) -> bool:
        """True iff no column is empty and every column sums to 1 within 1e-12."""
        if np.any(self.out_degree() == 0):
            return False
        return bool(np.all(np.abs(self.column_sums() - 1.0) <= STOCHASTIC_TOL))

    def dot(self, x: np.ndarray) -> np.ndarray:
        return self.to_scipy() @ np.asarray(x, dtype=np.float64)

    def scaled(self, factor: float) -> "SparseColumnMatrix":
        out = SparseColumnMatrix(self.n, self.indptr, self.indices, self.data * factor)
        object.__setattr__(out, "is_column_stochastic", out.check_column_stochastic())
        return out

    def triplets(self) -> list[tuple[int, int, float]]:
        cols = np.repeat(np.arange(self.n), self.out_degree())
        return sorted(zip(self.indices.tolist(), cols.tolist(), self.data.tolist()))


@dataclass(frozen=True, eq=False)
class SparseRowMatrix:
    """Row-compressed mirror of a SparseColumnMatrix (same doubles)."""

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray

    def to_scipy(self) -> sp.csr_matrix:
        return sp.csr_matrix((self.data, self.indices, self.indptr), shape=(self.n, self.n))

    def to_columns(self) -> SparseColumnMatrix:
        return SparseColumnMatrix.from_scipy(self.to_scipy().tocsc())

    def dot(self, x: np.ndarray) -> np.ndarray:
        return self.to_scipy() @ np.asarray(x, dtype=np.float64)

    def triplets(self) -> list[tuple[int, int, float]]:
        rows = np.repeat(np.arange(self.n), np.diff(self.indptr))
        return sorted(zip(rows.tolist(), self.indices.tolist(), self.data.tolist()))


def _unique_edges(edges: EdgeList) -> tuple[np.ndarray, np.ndarray]:
    src, dst = edges.arrays()
    key = np.unique(src * edges.n + dst)
    return key // edges.n, key % edges.n


def build_stochastic(edges: EdgeList) -> SparseColumnMatrix:
    """Column j gets 1/k on each of its k distinct destinations; dangling columns stay empty."""
    n = edges.n
    src, dst = _unique_edges(edges)
    # np.unique sorts by (src, dst): already column-major with sorted rows
    out_deg = np.bincount(src, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(out_deg, out=indptr[1:])
    data = 1.0 / out_deg[src].astype(np.float64)
    m = SparseColumnMatrix(n, indptr, dst.astype(np.int64), data)
    object.__setattr__(m, "is_column_stochastic", bool(np.all(out_deg > 0)))
    return m


def complete_graph(edges: EdgeList, seed: int) -> EdgeList:
    """Give each dangling node one random out-link and each source one random in-link.

    Degrees are taken from the original graph. All outgoing fixes are drawn
    first, then all incoming fixes, each in ascending node order from a single
    SplitMix64 stream. Random draws never produce self-loops.
    """
    n = edges.n
    if n < 2:
        raise CompletionError("completion needs n >= 2 to avoid self-loops")
    src, dst = edges.arrays()
    out_deg = np.bincount(src, minlength=n)
    in_deg = np.bincount(dst, minlength=n)
    rng = SplitMix64(seed)
    added = []
    for i in np.flatnonzero(out_deg == 0).tolist():
        added.append((i, rng.other_than(i, n)))
    for i in np.flatnonzero(in_deg == 0).tolist():
        added.append((rng.other_than(i, n), i))
    return EdgeList(n, list(edges.edges) + added)


@dataclass(frozen=True)
class GraphStats:
    n: int
    L: int
    D: int
    E: int
    O: int
    max_in: int
    max_out: int

    def ratios(self) -> dict[str, float]:
        return {
            "L/N": self.L / self.n,
            "D/N": self.D / self.n,
            "E/N": self.E / self.n,
            "O/N": self.O / self.n,
        }


def recursive_sources(m: SparseColumnMatrix) -> np.ndarray:
    """Boolean mask of nodes all of whose in-neighbours are (recursively) such nodes.

    Worklist propagation seeded by in-degree-0 nodes. A self-loop counts as an
    in-link from a node outside the set, so looped nodes never qualify.
    """
    n = m.n
    pending = m.in_degree().astype(np.int64)
    in_set = np.zeros(n, dtype=bool)
    work = deque(np.flatnonzero(pending == 0).tolist())
    indptr, indices = m.indptr, m.indices
    while work:
        j = work.popleft()
        in_set[j] = True
        for i in indices[indptr[j]:indptr[j + 1]].tolist():
            if i == j:
                continue
            pending[i] -= 1
            if pending[i] == 0:
                work.append(i)
    return in_set


def closed_class_count(m: SparseColumnMatrix) -> int:
    """Number of strongly connected components with no link leaving them.

    A chain has a unique stationary vector exactly when this is 1.
    """
    k, label = connected_components(m.to_scipy(), directed=True, connection="strong")
    cols = np.repeat(np.arange(m.n), m.out_degree())
    leaving = label[m.indices] != label[cols]
    has_exit = np.zeros(k, dtype=bool)
    has_exit[label[cols[leaving]]] = True
    return int(k - np.count_nonzero(has_exit))


def compute_stats(m: SparseColumnMatrix) -> GraphStats:
    out_deg = m.out_degree()
    in_deg = m.in_degree()
    cols = np.repeat(np.arange(m.n), out_deg)
    return GraphStats(
        n=m.n,
        L=m.nnz,
        D=int(np.count_nonzero(out_deg == 0)),
        E=int(recursive_sources(m).sum()),
        O=int(np.count_nonzero((m.indices == cols) & (m.data != 0))),
        max_in=int(in_deg.max()) if m.n else 0,
        max_out=int(out_deg.max()) if m.n else 0,
    )
