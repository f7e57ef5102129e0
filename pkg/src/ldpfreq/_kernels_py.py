"""Pure-numpy sampling kernels.

Each kernel maps pre-drawn uniforms in [0, 1) to reports. The compiled module
``_ckernels`` implements the same maps and must agree bit for bit; the
uniforms are drawn by the caller so the choice of backend never changes the
output for a given generator state.
"""

import numpy as np


def _scaled_index(u, width):
    # floor(u * width), clamped: u * width can round up to width
    return np.minimum((u * width).astype(np.int64), width - 1)


def krr_sample(values, d, p_keep, u):
    values = np.asarray(values, dtype=np.int64)
    other = _scaled_index(u[:, 1], d - 1)
    other += other >= values
    return np.where(u[:, 0] < p_keep, values, other)


def _floyd(u, n_pool, m):
    """Floyd's algorithm, vectorised over rows: m distinct picks from range(n_pool)."""
    rows = u.shape[0]
    chosen = np.empty((rows, m), dtype=np.int64)
    for i, j in enumerate(range(n_pool - m, n_pool)):
        t = _scaled_index(u[:, i], j + 1)
        dup = (chosen[:, :i] == t[:, None]).any(axis=1)
        chosen[:, i] = np.where(dup, j, t)
    return chosen


def ksubset_sample(values, d, k, g, u):
    values = np.asarray(values, dtype=np.int64)
    n = values.shape[0]
    out = np.empty((n, k), dtype=np.int64)
    with_v = u[:, 0] < g
    for include, m in ((True, k - 1), (False, k)):
        rows = np.flatnonzero(with_v == include)
        if rows.size == 0:
            continue
        m = min(m, d - 1)
        v = values[rows, None]
        picks = _floyd(u[rows, 1:], d - 1, m)
        picks += picks >= v
        if include:
            picks = np.concatenate([v, picks], axis=1)
        out[rows] = np.sort(picks, axis=1)
    return out


def bits_sample(values, d, p_hot, p_cold, u):
    values = np.asarray(values, dtype=np.int64)
    thresh = np.full(u.shape, p_cold)
    thresh[np.arange(values.shape[0]), values] = p_hot
    return (u < thresh).astype(np.uint8)


def bits_count(values, d, p_hot, p_cold, u):
    return bits_sample(values, d, p_hot, p_cold, u).sum(axis=0, dtype=np.int64)


def table_sample(values, p_in, u, in_table, out_table):
    values = np.asarray(values, dtype=np.int64)
    inside = u[:, 0] < p_in
    a = in_table[values, _scaled_index(u[:, 1], in_table.shape[1])]
    if out_table.shape[1] == 0:
        return a
    b = out_table[values, _scaled_index(u[:, 1], out_table.shape[1])]
    return np.where(inside, a, b)
