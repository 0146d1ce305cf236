"""Hot loops of the transforms and the tridiagonal propagator.

Each kernel exists twice: a numba ``@njit`` version and a pure-numpy
version.  The numba path is used when numba imports and the environment
variable ``WAVELET_QM_DISABLE_NUMBA`` is unset (or ``0``); ``set_backend``
switches at runtime.  Both paths sum every output element in a fixed order
that does not depend on the number of threads.

Lattice convention: sample positions ``x_i`` and wavelet positions ``b_l``
live on a common lattice of step ``h0`` with ``x_i - b_l = (s + i*rx - l*rb) * h0``.
A per-scale table holds the dilated atom at lattice offsets ``lo .. lo+len-1``.
"""
import os

import numpy as np
from scipy.linalg import solve_banded

try:
    import numba
    from numba import njit, prange
    HAS_NUMBA = True
    # the system TBB is too old for numba; omp keeps results identical anyway
    if "NUMBA_THREADING_LAYER" not in os.environ:
        numba.config.THREADING_LAYER = "omp"
except ImportError:  # pragma: no cover
    HAS_NUMBA = False

_CHUNK = 1 << 20


def _env_disabled():
    return os.environ.get("WAVELET_QM_DISABLE_NUMBA", "0").lower() not in ("", "0", "false", "no")


BACKEND = "numba" if HAS_NUMBA and not _env_disabled() else "numpy"


def set_backend(name):
    global BACKEND
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba is not installed")
    BACKEND = name


def set_threads(n):
    """Cap kernel parallelism; returns the thread count actually in effect."""
    if not HAS_NUMBA:
        return 1
    n = max(1, min(int(n), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(n)
    return n


# --------------------------------------------------------------------- numpy

def analysis_rows_numpy(table, lo, length, f, rx, rb, s, n_b):
    """out[j, l] = sum_i table[j, s + i*rx - l*rb - lo[j]] * f[i]."""
    n_s = table.shape[0]
    n_x = f.shape[0]
    out = np.zeros((n_s, n_b), dtype=np.complex128)
    i_lat = np.arange(n_x) * rx
    step = max(1, _CHUNK // n_x)
    for j in range(n_s):
        row = table[j, :length[j]]
        for start in range(0, n_b, step):
            ls = np.arange(start, min(start + step, n_b))
            n = (s - ls * rb - lo[j])[:, None] + i_lat[None, :]
            mask = (n >= 0) & (n < length[j])
            vals = np.where(mask, row[np.clip(n, 0, length[j] - 1)], 0.0)
            out[j, ls] = (vals * f[None, :]).sum(axis=1)
    return out


def synthesis_rows_numpy(table, lo, length, g, rx, rb, s, n_x):
    """out[j, i] = sum_l table[j, s + i*rx - l*rb - lo[j]] * g[j, l]."""
    n_s, n_b = g.shape
    out = np.zeros((n_s, n_x), dtype=np.complex128)
    i_lat = np.arange(n_x) * rx
    step = max(1, _CHUNK // n_x)
    for j in range(n_s):
        row = table[j, :length[j]]
        acc = np.zeros(n_x, dtype=np.complex128)
        for start in range(0, n_b, step):
            ls = np.arange(start, min(start + step, n_b))
            n = (s - ls * rb - lo[j])[:, None] + i_lat[None, :]
            mask = (n >= 0) & (n < length[j])
            vals = np.where(mask, row[np.clip(n, 0, length[j] - 1)], 0.0)
            acc += (vals * g[j, ls][:, None]).sum(axis=0)
        out[j] = acc
    return out


def tridiag_solve_numpy(lower, diag, upper, rhs):
    """Solve a tridiagonal system; ``lower[0]`` and ``upper[-1]`` are ignored."""
    ab = np.zeros((3, diag.shape[0]), dtype=np.complex128)
    ab[0, 1:] = upper[:-1]
    ab[1] = diag
    ab[2, :-1] = lower[1:]
    return solve_banded((1, 1), ab, rhs)


# --------------------------------------------------------------------- numba

if HAS_NUMBA:

    @njit(parallel=True, cache=True)
    def analysis_rows_numba(table, lo, length, f, rx, rb, s, n_b):
        n_s = table.shape[0]
        n_x = f.shape[0]
        out = np.zeros((n_s, n_b), dtype=np.complex128)
        for j in prange(n_s):
            ln = length[j]
            for l in range(n_b):
                base = s - l * rb - lo[j]
                # 0 <= base + i*rx < ln
                i0 = -((base) // rx)
                i1 = (ln - 1 - base) // rx
                if i0 < 0:
                    i0 = 0
                if i1 > n_x - 1:
                    i1 = n_x - 1
                acc = 0j
                for i in range(i0, i1 + 1):
                    acc += table[j, base + i * rx] * f[i]
                out[j, l] = acc
        return out

    @njit(parallel=True, cache=True)
    def synthesis_rows_numba(table, lo, length, g, rx, rb, s, n_x):
        n_s = g.shape[0]
        n_b = g.shape[1]
        out = np.zeros((n_s, n_x), dtype=np.complex128)
        for j in prange(n_s):
            ln = length[j]
            for i in range(n_x):
                base = s + i * rx - lo[j]
                # 0 <= base - l*rb < ln
                l0 = -((ln - 1 - base) // rb)
                l1 = base // rb
                if l0 < 0:
                    l0 = 0
                if l1 > n_b - 1:
                    l1 = n_b - 1
                acc = 0j
                for l in range(l0, l1 + 1):
                    acc += table[j, base - l * rb] * g[j, l]
                out[j, i] = acc
        return out

    @njit(cache=True)
    def tridiag_solve_numba(lower, diag, upper, rhs):
        n = diag.shape[0]
        cp = np.empty(n, dtype=np.complex128)
        dp = np.empty(n, dtype=np.complex128)
        cp[0] = upper[0] / diag[0]
        dp[0] = rhs[0] / diag[0]
        for i in range(1, n):
            m = diag[i] - lower[i] * cp[i - 1]
            cp[i] = upper[i] / m
            dp[i] = (rhs[i] - lower[i] * dp[i - 1]) / m
        x = np.empty(n, dtype=np.complex128)
        x[n - 1] = dp[n - 1]
        for i in range(n - 2, -1, -1):
            x[i] = dp[i] - cp[i] * x[i + 1]
        return x


# ------------------------------------------------------------------ dispatch

def analysis_rows(table, lo, length, f, rx, rb, s, n_b):
    if BACKEND == "numba":
        return analysis_rows_numba(table, lo, length, f, rx, rb, s, n_b)
    return analysis_rows_numpy(table, lo, length, f, rx, rb, s, n_b)


def synthesis_rows(table, lo, length, g, rx, rb, s, n_x):
    if BACKEND == "numba":
        return synthesis_rows_numba(table, lo, length, g, rx, rb, s, n_x)
    return synthesis_rows_numpy(table, lo, length, g, rx, rb, s, n_x)


def tridiag_solve(lower, diag, upper, rhs):
    if BACKEND == "numba":
        return tridiag_solve_numba(lower, diag, upper, rhs)
    return tridiag_solve_numpy(lower, diag, upper, rhs)
