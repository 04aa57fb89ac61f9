"""Compiled inner loops for the diffusion solvers."""

import numpy as np
from numba import njit


@njit(cache=True)
def sweep(indptr, indices, data, weight, r, use_abs, dangling_mass, F, H, offset):
    """One ascending pass over all nodes; returns (diffusions, links traversed).

    The true fluid at node k is ``F[k] + offset[0] / n``: fluid leaving a
    dangling column is spread uniformly without touching every entry.
    """
    n = F.shape[0]
    inv_n = 1.0 / n
    diffusions = 0
    links = 0
    for i in range(n):
        f = F[i] + offset[0] * inv_n
        thr = r * weight[i]
        if use_abs:
            if not abs(f) > thr:
                continue
        elif not f > thr:
            continue
        H[i] += f
        F[i] = -offset[0] * inv_n
        start = indptr[i]
        end = indptr[i + 1]
        if start == end:
            offset[0] += dangling_mass * f
        else:
            for k in range(start, end):
                F[indices[k]] += f * data[k]
        diffusions += 1
        links += end - start
    return diffusions, links


@njit(cache=True)
def trace_sequence(indptr, indices, data, nodes, F, H, v):
    """Diffuse ``nodes`` in order; per step record sigma(F), sigma(H), |F|, sigma_v(F), |F|_v."""
    m = nodes.shape[0]
    n = F.shape[0]
    out = np.empty((m, 5))
    for s in range(m):
        i = nodes[s]
        f = F[i]
        H[i] += f
        F[i] = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            F[indices[k]] += f * data[k]
        sf = 0.0
        sh = 0.0
        af = 0.0
        svf = 0.0
        avf = 0.0
        for k in range(n):
            sf += F[k]
            sh += H[k]
            af += abs(F[k])
            svf += F[k] * v[k]
            avf += abs(F[k] * v[k])
        out[s, 0] = sf
        out[s, 1] = sh
        out[s, 2] = af
        out[s, 3] = svf
        out[s, 4] = avf
    return out


def warm_up():
    """Compile both kernels so the first timed solve does not pay for it."""
    indptr = np.array([0, 1], dtype=np.int64)
    indices = np.zeros(1, dtype=np.int64)
    data = np.ones(1)
    F = np.ones(1)
    sweep(indptr, indices, data, np.ones(1), 1.0, True, 0.0, F, np.zeros(1), np.zeros(1))
    trace_sequence(indptr, indices, data, np.zeros(1, dtype=np.int64), F, np.zeros(1), np.ones(1))
