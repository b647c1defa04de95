"""Hot numeric kernels: matrix permanents.

Each kernel exists twice, a numba ``@njit`` version and a pure-numpy
version.  The numba path is used when numba imports cleanly and the
environment variable ``FOCKBENCH_NUMBA`` is not set to ``0``.  Both paths
are always importable so tests and benchmarks can compare them directly.
"""

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is an optional accelerator
    numba = None

MAX_PERMANENT_SIZE = 20
# rows per block in the vectorized Ryser sum; bounds memory at ~n * 2**14 complex
_NUMPY_BLOCK = 1 << 14


def _env_wants_numba():
    return os.environ.get("FOCKBENCH_NUMBA", "1").strip().lower() not in {"0", "false", "no", "off"}


USE_NUMBA = numba is not None and _env_wants_numba()


def permanent_numpy(a):
    """Ryser formula, vectorized over blocks of column subsets."""
    a = np.asarray(a, dtype=np.complex128)
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    if n == 1:
        return complex(a[0, 0])
    # perm(A) = (-1)^n sum_S (-1)^|S| prod_i sum_{j in S} a_ij
    total = 0.0 + 0.0j
    shifts = np.arange(n, dtype=np.int64)
    stop = 1 << n
    for start in range(1, stop, _NUMPY_BLOCK):
        subsets = np.arange(start, min(start + _NUMPY_BLOCK, stop), dtype=np.int64)
        bits = ((subsets[:, None] >> shifts) & 1).astype(np.float64)
        rowsums = bits @ a.T
        signs = 1.0 - 2.0 * (bits.sum(axis=1) % 2)
        total += np.dot(signs, np.prod(rowsums, axis=1))
    return complex(total) * (-1.0) ** n


def _permanent_gray(a):
    # Ryser with Gray-code subset order: one column update per step, O(2^n n).
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    rowsum = np.zeros(n, dtype=np.complex128)
    total = 0.0 + 0.0j
    gray = 0
    for k in range(1, 1 << n):
        j = 0
        while not (k >> j) & 1:
            j += 1
        gray ^= 1 << j
        if (gray >> j) & 1:
            for i in range(n):
                rowsum[i] += a[i, j]
        else:
            for i in range(n):
                rowsum[i] -= a[i, j]
        prod = 1.0 + 0.0j
        for i in range(n):
            prod *= rowsum[i]
        # popcount parity of gray equals parity of k's Gray index
        c = gray
        bits = 0
        while c:
            c &= c - 1
            bits += 1
        if bits & 1:
            total -= prod
        else:
            total += prod
    if n & 1:
        total = -total
    return total


def _batch_amplitudes(u, rows, cols, norms):
    # rows[p], cols[p]: repeated mode indices for transition p.
    out = np.empty(rows.shape[0], dtype=np.complex128)
    n = rows.shape[1]
    sub = np.empty((n, n), dtype=np.complex128)
    for p in range(rows.shape[0]):
        for i in range(n):
            for j in range(n):
                sub[i, j] = u[rows[p, i], cols[p, j]]
        out[p] = _permanent_gray(sub) / norms[p]
    return out


def batch_amplitudes_numpy(u, rows, cols, norms):
    u = np.asarray(u, dtype=np.complex128)
    out = np.empty(rows.shape[0], dtype=np.complex128)
    for p in range(rows.shape[0]):
        out[p] = permanent_numpy(u[np.ix_(rows[p], cols[p])]) / norms[p]
    return out


if numba is not None:
    _permanent_gray_jit = numba.njit(cache=True)(_permanent_gray)
    _batch_amplitudes = numba.njit(cache=True)(_batch_amplitudes)
    _permanent_gray = _permanent_gray_jit

    def permanent_numba(a):
        return complex(_permanent_gray_jit(np.ascontiguousarray(a, dtype=np.complex128)))

    def batch_amplitudes_numba(u, rows, cols, norms):
        return _batch_amplitudes(
            np.ascontiguousarray(u, dtype=np.complex128),
            np.ascontiguousarray(rows, dtype=np.int64),
            np.ascontiguousarray(cols, dtype=np.int64),
            np.ascontiguousarray(norms, dtype=np.float64),
        )
else:  # pragma: no cover
    permanent_numba = None
    batch_amplitudes_numba = None


def permanent(a):
    """Permanent of a square complex matrix (n <= 20)."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"permanent needs a square matrix, got shape {a.shape}")
    if USE_NUMBA:
        return permanent_numba(a)
    return permanent_numpy(a)


def batch_amplitudes(u, rows, cols, norms):
    """Amplitudes perm(u[rows[p], cols[p]]) / norms[p] for every transition p."""
    if USE_NUMBA:
        return batch_amplitudes_numba(u, rows, cols, norms)
    return batch_amplitudes_numpy(u, rows, cols, norms)


def backend():
    return "numba" if USE_NUMBA else "numpy"
