"""Independent reference computations used as test oracles.

Nothing here calls into the code paths under test; each function is the
plain-loop or textbook version of a quantity the package computes.
"""

import itertools
import math

import numpy as np


def brute_contract(arr, x):
    """``(A x^{k-1})_i`` by looping over every index tuple."""
    arr = np.asarray(arr)
    n, k = arr.shape[0], arr.ndim
    out = np.zeros(n)
    for idx in itertools.product(range(n), repeat=k):
        term = arr[idx]
        for j in idx[1:]:
            term *= x[j]
        out[idx[0]] += term
    return out


def brute_row_sum(arr, p):
    """Sum of ``|A[p-1, I]|`` over all head tuples, by loop (``p`` 1-based)."""
    arr = np.asarray(arr)
    n, k = arr.shape[0], arr.ndim
    return sum(abs(arr[(p - 1,) + I]) for I in itertools.product(range(n), repeat=k - 1))


def bisect_root(f, lo, hi, iters=200):
    """Plain bisection on a bracket with ``f(lo) < 0 < f(hi)``."""
    assert f(lo) < 0 < f(hi)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def coefficient_root(coeffs):
    """Root of ``sum_m c_m y^(m-2) = 1`` by bracket-doubling and bisection."""
    f = lambda y: sum(c * y ** (m - 2) for m, c in coeffs.items()) - 1.0
    hi = 1.0
    while f(hi) <= 0:
        hi *= 2.0
    return bisect_root(f, 0.0, hi)


def sis_step(x, gamma, beta1, beta2, a, b, h):
    """One step of the discrete SIS model written out per node."""
    n = len(x)
    gamma = np.broadcast_to(np.asarray(gamma, dtype=float), (n,))
    out = np.empty(n)
    for i in range(n):
        pair = 0.0
        for j in range(n):
            pair += a[i][j] * x[j]
        group = 0.0
        if b is not None:
            for j in range(n):
                for l in range(n):
                    group += b[i][j][l] * x[j] * x[l]
        out[i] = ((1 - h * gamma[i]) * x[i]
                  + h * beta1 * (1 - x[i]) * pair
                  + h * beta2 * (1 - x[i]) * group)
    return out


def quadratic_example_step(x):
    """Scalar form of the 2-node quadratic example: both rows equal."""
    x1, x2 = x
    v = 0.1 * x1 + 0.1 * x2 + x1 ** 2 + x1 * x2 + x2 ** 2
    return np.array([v, v])


def matrix_spectral_radius(M):
    return float(max(abs(np.linalg.eigvals(np.asarray(M, dtype=float)))))


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / math.sqrt(float(v @ v))
