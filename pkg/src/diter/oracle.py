"""Dense brute-force references for small problems (n <= 256).

These deliberately use different algorithms from the sparse solvers (dense
products, Gaussian elimination) so that agreement between the two is evidence.
"""

from __future__ import annotations

import numpy as np

from .errors import ConvergenceError, SingularMatrixError

MAX_DENSE = 256


def as_dense(m) -> np.ndarray:
    if hasattr(m, "to_dense"):
        m = m.to_dense()
    a = np.array(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] > MAX_DENSE:
        raise ValueError(f"dense oracle limited to n <= {MAX_DENSE}, got {a.shape[0]}")
    return a


def dense_stationary(m, max_iter: int = 200_000, tol: float = 1e-13) -> np.ndarray:
    """Limit of P^k.e for a column-stochastic P, normalized to sum 1.

    Falls back to the lazy chain (P + I)/2, which has the same stationary
    vectors but no periodicity, when plain iteration does not settle.
    """
    p = as_dense(m)
    n = p.shape[0]
    if np.any(np.abs(p.sum(axis=0) - 1.0) > 1e-10):
        raise ValueError("matrix is not column-stochastic")
    for op in (p, 0.5 * (p + np.eye(n))):
        x = np.full(n, 1.0 / n)
        for _ in range(max_iter):
            y = op @ x
            y /= y.sum()
            delta = np.abs(y - x).sum()
            x = y
            if delta <= tol:
                return x
    raise ConvergenceError(f"dense power iteration did not reach {tol} in {max_iter} steps")


def dense_linear_solve(a, b) -> np.ndarray:
    """Solve ``a x = b`` by Gaussian elimination with partial pivoting."""
    a = as_dense(a).copy()
    x = np.array(b, dtype=np.float64).copy()
    n = a.shape[0]
    if x.shape != (n,):
        raise ValueError(f"right-hand side must have shape ({n},)")
    scale = np.abs(a).max() if n else 0.0
    eps = n * np.finfo(float).eps * max(scale, 1e-300)
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[p, k]) <= eps:
            raise SingularMatrixError(f"pivot {k} vanishes (|a| <= {eps:.3e})")
        if p != k:
            a[[k, p]] = a[[p, k]]
            x[[k, p]] = x[[p, k]]
        factors = a[k + 1:, k] / a[k, k]
        a[k + 1:, k:] -= np.outer(factors, a[k, k:])
        x[k + 1:] -= factors * x[k]
    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - a[k, k + 1:] @ x[k + 1:]) / a[k, k]
    return x


def stationary_by_elimination(m) -> np.ndarray:
    """Solve (I - P) x = 0 with sum(x) = 1 by replacing one equation."""
    p = as_dense(m)
    n = p.shape[0]
    a = np.eye(n) - p
    a[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    return dense_linear_solve(a, b)


def _power_vector(a: np.ndarray, max_iter: int, tol: float) -> tuple[float, np.ndarray]:
    n = a.shape[0]
    # shift by the largest column sum so eigenvalues on the spectral circle other
    # than rho itself (periodic structure) lose modulus relative to rho
    shift = a.sum(axis=0).max()
    b = a + shift * np.eye(n)
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        y = b @ x
        y /= y.sum()
        if np.abs(y - x).sum() <= tol:
            x = y
            break
        x = y
    else:
        raise ConvergenceError(f"dense eigen-iteration did not reach {tol} in {max_iter} steps")
    y = a @ x
    z = a @ (y / y.sum())
    rho = np.sqrt((y.sum() / x.sum()) * (z.sum() / (y / y.sum()).sum()))
    return float(rho), x


def dense_dominant_eigenpair(m, max_iter: int = 1_000_000, tol: float = 1e-14):
    """(rho, right vector, left vector) of a non-negative irreducible matrix.

    Vectors are positive and sum to 1.
    """
    a = as_dense(m)
    if np.any(a < 0):
        raise ValueError("matrix must be non-negative")
    rho, right = _power_vector(a, max_iter, tol)
    _, left = _power_vector(a.T.copy(), max_iter, tol)
    return rho, right, left
