"""Numeric inner loops, compiled with numba when available.

Set ``GAUSSMETRO_DISABLE_NUMBA=1`` to force the pure-numpy implementations
(the flag is read once at import time). Both paths are kept importable as
``numpy_*`` / ``numba_*`` so tests and the benchmark can compare them.
"""
from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("GAUSSMETRO_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}

try:
    if _DISABLED:
        raise ImportError("numba disabled by GAUSSMETRO_DISABLE_NUMBA")
    from numba import njit
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


# -- pure numpy -----------------------------------------------------------------

def numpy_quadratic_mean(c, l, A, d, gamma):
    return c + l @ d + d @ A @ d + 0.5 * np.sum(A * gamma)


def numpy_quadratic_variance(l, A, d, gamma):
    n = d.size // 2
    lp = l + 2.0 * A @ d
    AG = A @ gamma
    # Tr(A Omega A Omega) with Omega = [[0, I], [-I, 0]]
    Axx, Axp, Apx, App = A[:n, :n], A[:n, n:], A[n:, :n], A[n:, n:]
    tr_omega = 2.0 * (np.sum(Axp * Apx) - np.sum(Axx * App.T))
    return 0.5 * (lp @ gamma @ lp) + 0.5 * np.sum(AG * AG.T) + 0.5 * tr_omega


def numpy_qfi_pair_sum(lam, B, thresh):
    """``sum_{jk} 2 |B_jk|^2 / (lam_j + lam_k)`` over pairs with denominator > thresh."""
    den = lam[:, None] + lam[None, :]
    mask = den > thresh
    return float(np.sum(2.0 * np.abs(B[mask]) ** 2 / den[mask]))


# -- numba ----------------------------------------------------------------------

def _numba_quadratic_mean(c, l, A, d, gamma):
    m = d.size
    acc = c
    for i in range(m):
        acc += l[i] * d[i]
        for j in range(m):
            acc += A[i, j] * (d[i] * d[j] + 0.5 * gamma[i, j])
    return acc


def _numba_quadratic_variance(l, A, d, gamma):
    m = d.size
    n = m // 2
    lp = np.empty(m)
    for i in range(m):
        s = l[i]
        for j in range(m):
            s += 2.0 * A[i, j] * d[j]
        lp[i] = s
    AG = np.zeros((m, m))
    for i in range(m):
        for k in range(m):
            a = A[i, k]
            if a != 0.0:
                for j in range(m):
                    AG[i, j] += a * gamma[k, j]
    lin = 0.0
    for i in range(m):
        for j in range(m):
            lin += lp[i] * gamma[i, j] * lp[j]
    quad = 0.0
    for i in range(m):
        for j in range(m):
            quad += AG[i, j] * AG[j, i]
    tr_omega = 0.0
    for i in range(n):
        for j in range(n):
            tr_omega += A[i, j + n] * A[i + n, j] - A[i, j] * A[i + n, j + n]
    return 0.5 * lin + 0.5 * quad + tr_omega


def _numba_qfi_pair_sum(lam, B, thresh):
    k = lam.size
    acc = 0.0
    for j in range(k):
        for i in range(k):
            den = lam[i] + lam[j]
            if den > thresh:
                b = B[i, j]
                acc += 2.0 * (b.real * b.real + b.imag * b.imag) / den
    return acc


if HAVE_NUMBA:
    numba_quadratic_mean = njit(cache=True)(_numba_quadratic_mean)
    numba_quadratic_variance = njit(cache=True)(_numba_quadratic_variance)
    numba_qfi_pair_sum = njit(cache=True)(_numba_qfi_pair_sum)
    quadratic_mean = numba_quadratic_mean
    quadratic_variance = numba_quadratic_variance
    qfi_pair_sum = numba_qfi_pair_sum
else:
    numba_quadratic_mean = numba_quadratic_variance = numba_qfi_pair_sum = None
    quadratic_mean = numpy_quadratic_mean
    quadratic_variance = numpy_quadratic_variance
    qfi_pair_sum = numpy_qfi_pair_sum


def backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"
