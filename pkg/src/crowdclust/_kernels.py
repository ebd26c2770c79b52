"""Hot numeric kernels with twin implementations.

Every kernel exists in two semantically identical versions: a loop form
compiled with numba's ``@njit`` and a vectorized numpy form. The active
implementation is chosen once at import time; set the environment variable
``CROWDCLUST_NO_NUMBA=1`` before importing to force the pure-numpy path
(e.g. on platforms where numba is unavailable or misbehaves).

Determinism contract: samplers consume pre-drawn uniform variates passed in
as arrays, never an internal RNG, and both implementations consume the same
variate for the same cell. Outputs are therefore bit-identical across the
two paths, which the test suite asserts.

Symbols are small nonnegative ints (alphabet size <= a few dozen), so
inverse-CDF sampling uses a linear scan rather than binary search.
"""

import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    njit = None
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and os.environ.get("CROWDCLUST_NO_NUMBA", "0") != "1"


# ---------------------------------------------------------------------------
# loop implementations (numba-compatible subset of numpy)


def _row_counts_loops(mat, size):
    ell, n = mat.shape
    out = np.zeros((ell, size), np.int64)
    for i in range(ell):
        for j in range(n):
            out[i, mat[i, j]] += 1
    return out


def _pairwise_tv_loops(pmfs):
    m, s = pmfs.shape
    out = np.zeros((m, m), np.float64)
    for i in range(m):
        for j in range(i + 1, m):
            acc = 0.0
            for k in range(s):
                d = pmfs[i, k] - pmfs[j, k]
                acc += d if d >= 0.0 else -d
            out[i, j] = 0.5 * acc
            out[j, i] = out[i, j]
    return out


def _triple_mi_table_loops(mat, size):
    # entry [i, j] for 0 <= j < i: plug-in MI of (row i ; (row i-1, row j))
    ell, n = mat.shape
    s2 = size * size
    s3 = s2 * size
    out = np.zeros((ell, ell), np.float64)
    cx = np.zeros(size, np.int64)
    cyz = np.zeros(s2, np.int64)
    cxyz = np.zeros(s3, np.int64)
    nf = float(n)
    log2n = np.log2(nf)
    for i in range(1, ell):
        for j in range(i):
            for k in range(size):
                cx[k] = 0
            for k in range(s2):
                cyz[k] = 0
            for k in range(s3):
                cxyz[k] = 0
            for col in range(n):
                a = mat[i, col]
                b = mat[i - 1, col]
                d = mat[j, col]
                cx[a] += 1
                cyz[b * size + d] += 1
                cxyz[(a * size + b) * size + d] += 1
            sx = 0.0
            for k in range(size):
                if cx[k] > 0:
                    sx += cx[k] * np.log2(float(cx[k]))
            syz = 0.0
            for k in range(s2):
                if cyz[k] > 0:
                    syz += cyz[k] * np.log2(float(cyz[k]))
            sxyz = 0.0
            for k in range(s3):
                if cxyz[k] > 0:
                    sxyz += cxyz[k] * np.log2(float(cxyz[k]))
            # H(X) + H(YZ) - H(XYZ) with H = log2(n) - S/n
            mi = log2n + (sxyz - sx - syz) / nf
            if mi < 0.0:
                mi = 0.0  # roundoff only; plug-in MI is nonnegative
            out[i, j] = mi
    return out


def _sample_rows_loops(cdf_rows, u):
    ell, n = u.shape
    size = cdf_rows.shape[1]
    out = np.empty((ell, n), np.int64)
    for i in range(ell):
        for j in range(n):
            v = u[i, j]
            k = 0
            while k < size - 1 and v >= cdf_rows[i, k]:
                k += 1
            out[i, j] = k
    return out


def _sample_kernel_chain_loops(parent, trans_cdf, init_cdf, u):
    ell, n = u.shape
    size = init_cdf.shape[1]
    out = np.empty((ell, n), np.int64)
    for i in range(ell):
        p = parent[i]
        for j in range(n):
            v = u[i, j]
            if p < 0:
                row = init_cdf[i]
            else:
                row = trans_cdf[i, out[p, j]]
            k = 0
            while k < size - 1 and v >= row[k]:
                k += 1
            out[i, j] = k
    return out


def _sample_mixture_chain_loops(
    same_parents, n_same, rho_same, rho_prev, cdf_rows, u_choice, u_target, u_fresh
):
    ell, n = u_choice.shape
    size = cdf_rows.shape[1]
    out = np.empty((ell, n), np.int64)
    for i in range(ell):
        m = n_same[i]
        for j in range(n):
            c = u_choice[i, j]
            if c < rho_same and m > 0:
                t = int(u_target[i, j] * m)
                if t >= m:
                    t = m - 1
                out[i, j] = out[same_parents[i, t], j]
            elif rho_same <= c < rho_same + rho_prev and i > 0:
                out[i, j] = out[i - 1, j]
            else:
                v = u_fresh[i, j]
                k = 0
                while k < size - 1 and v >= cdf_rows[i, k]:
                    k += 1
                out[i, j] = k
    return out


# ---------------------------------------------------------------------------
# vectorized numpy implementations


def _row_counts_numpy(mat, size):
    ell = mat.shape[0]
    out = np.zeros((ell, size), np.int64)
    rows = np.repeat(np.arange(ell), mat.shape[1])
    np.add.at(out, (rows, mat.ravel()), 1)
    return out


def _pairwise_tv_numpy(pmfs):
    return 0.5 * np.abs(pmfs[:, None, :] - pmfs[None, :, :]).sum(axis=2)


def _clog2(counts):
    c = counts.astype(np.float64)
    out = np.zeros_like(c)
    nz = c > 0
    out[nz] = c[nz] * np.log2(c[nz])
    return out


def _triple_mi_table_numpy(mat, size):
    ell, n = mat.shape
    s2 = size * size
    s3 = s2 * size
    out = np.zeros((ell, ell), np.float64)
    nf = float(n)
    log2n = np.log2(nf)
    for i in range(1, ell):
        sx = _clog2(np.bincount(mat[i], minlength=size)).sum()
        base = mat[i] * size + mat[i - 1]
        for j in range(i):
            syz = _clog2(np.bincount(mat[i - 1] * size + mat[j], minlength=s2)).sum()
            sxyz = _clog2(np.bincount(base * size + mat[j], minlength=s3)).sum()
            mi = log2n + (sxyz - sx - syz) / nf
            out[i, j] = mi if mi > 0.0 else 0.0
    return out


def _inverse_cdf(cdf, u):
    # symbol = #{k : u >= cdf[k]}, clamped; matches the loop scan exactly
    idx = (u[..., None] >= cdf).sum(axis=-1)
    return np.minimum(idx, cdf.shape[-1] - 1)


def _sample_rows_numpy(cdf_rows, u):
    ell = u.shape[0]
    out = np.empty(u.shape, np.int64)
    for i in range(ell):
        out[i] = _inverse_cdf(cdf_rows[i], u[i])
    return out


def _sample_kernel_chain_numpy(parent, trans_cdf, init_cdf, u):
    ell = u.shape[0]
    out = np.empty(u.shape, np.int64)
    for i in range(ell):
        p = parent[i]
        if p < 0:
            out[i] = _inverse_cdf(init_cdf[i], u[i])
        else:
            rows = trans_cdf[i, out[p]]  # (n, size) cdf per column
            out[i] = np.minimum((u[i][:, None] >= rows).sum(axis=1), rows.shape[1] - 1)
    return out


def _sample_mixture_chain_numpy(
    same_parents, n_same, rho_same, rho_prev, cdf_rows, u_choice, u_target, u_fresh
):
    ell, n = u_choice.shape
    out = np.empty((ell, n), np.int64)
    cols = np.arange(n)
    for i in range(ell):
        m = n_same[i]
        fresh = _inverse_cdf(cdf_rows[i], u_fresh[i])
        row = fresh
        take_prev = (u_choice[i] >= rho_same) & (u_choice[i] < rho_same + rho_prev)
        if i > 0 and take_prev.any():
            row = np.where(take_prev, out[i - 1], row)
        if m > 0:
            take_same = u_choice[i] < rho_same
            t = np.minimum((u_target[i] * m).astype(np.int64), m - 1)
            src = out[same_parents[i, t], cols]
            row = np.where(take_same, src, row)
        out[i] = row
    return out


# ---------------------------------------------------------------------------
# dispatch

_LOOP_IMPLS = {
    "row_counts": _row_counts_loops,
    "pairwise_tv": _pairwise_tv_loops,
    "triple_mi_table": _triple_mi_table_loops,
    "sample_rows": _sample_rows_loops,
    "sample_kernel_chain": _sample_kernel_chain_loops,
    "sample_mixture_chain": _sample_mixture_chain_loops,
}

_NUMPY_IMPLS = {
    "row_counts": _row_counts_numpy,
    "pairwise_tv": _pairwise_tv_numpy,
    "triple_mi_table": _triple_mi_table_numpy,
    "sample_rows": _sample_rows_numpy,
    "sample_kernel_chain": _sample_kernel_chain_numpy,
    "sample_mixture_chain": _sample_mixture_chain_numpy,
}

if HAS_NUMBA:
    _NUMBA_IMPLS = {name: njit(cache=True)(fn) for name, fn in _LOOP_IMPLS.items()}
else:  # pragma: no cover
    _NUMBA_IMPLS = {}

_ACTIVE = _NUMBA_IMPLS if USE_NUMBA else _NUMPY_IMPLS

row_counts = _ACTIVE["row_counts"]
pairwise_tv = _ACTIVE["pairwise_tv"]
triple_mi_table = _ACTIVE["triple_mi_table"]
sample_rows = _ACTIVE["sample_rows"]
sample_kernel_chain = _ACTIVE["sample_kernel_chain"]
sample_mixture_chain = _ACTIVE["sample_mixture_chain"]


def implementations():
    """Both kernel families keyed by path name, for benchmarks and tests.

    Returns a dict with a "numpy" entry and, when numba is importable, a
    "numba" entry. Values map kernel names to callables.
    """
    out = {"numpy": dict(_NUMPY_IMPLS)}
    if HAS_NUMBA:
        out["numba"] = dict(_NUMBA_IMPLS)
    return out
