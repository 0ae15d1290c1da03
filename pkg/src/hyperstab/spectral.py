"""Z-eigenpairs of nonnegative tensors.

``perron_z_eigenpair`` runs a shifted power iteration from the uniform
positive vector; ``z_eigenpairs_oracle`` is an independent brute-force
scan of the unit circle (n = 2) or sphere (n = 3) used to check it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.sparse.csgraph import connected_components

from .errors import InputError, SolverError, UnsupportedDimensionError
from .tensor_core import Tensor, contract, contract_batch, contract_jacobian

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100_000
MAX_EXHAUSTIVE_DIM = 20


@dataclass(frozen=True, eq=False)
class ZEigenpair:
    lam: float
    x: np.ndarray
    residual: float


def _pair(A: Tensor, x) -> ZEigenpair:
    x = np.asarray(x, dtype=float)
    x = x / np.linalg.norm(x)
    y = contract(A, x)
    lam = float(x @ y)
    x.setflags(write=False)
    return ZEigenpair(lam, x, float(np.linalg.norm(y - lam * x)))


def perron_z_eigenpair(A: Tensor, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> ZEigenpair:
    """Perron Z-eigenpair of a nonnegative tensor.

    Iterates ``x <- (A x^{k-1} + alpha x) / ||.||`` with ``alpha = k max(A)``
    starting from ``1/sqrt(n)``.  The result is deterministic; when several
    Perron pairs exist, the one reached by this iteration is returned.

    Raises
    ------
    InputError
        If ``A`` has a negative entry or is identically zero.
    SolverError
        If the residual is still above ``tol`` after ``max_iter`` steps.
    """
    if not A.is_nonnegative():
        raise InputError("Perron pair requested for a tensor with negative entries")
    if A.is_zero():
        raise InputError("Perron pair of the zero tensor is not defined (every unit vector works)")
    alpha = A.order * float(A.data.max())
    x = np.full(A.dim, 1.0 / np.sqrt(A.dim))
    best = None
    for _ in range(max_iter):
        y = contract(A, x)
        lam = float(x @ y)
        res = float(np.linalg.norm(y - lam * x))
        if best is None or res < best[2]:
            best = (x, lam, res)
        if res < tol:
            break
        z = y + alpha * x
        x = z / np.linalg.norm(z)
    else:
        raise SolverError(
            f"shifted power iteration did not reach residual {tol:g} in {max_iter} steps "
            f"(best {best[2]:.3e})",
            best_x=best[0], best_lambda=best[1], residual=best[2],
        )
    pair = _pair(A, x)
    if pair.residual >= tol:
        # renormalisation can nudge the residual by an ulp or two
        pair = _pair(A, best[0])
    return pair


def reducibility_witness(A: Tensor) -> Optional[tuple]:
    """Return a 1-based index set proving ``A`` reducible, or None if irreducible.

    A set ``I`` is a witness when ``A[i, j2, ..., jk] == 0`` for every tail
    ``i`` in ``I`` and every head index ``j`` outside ``I``.
    """
    n = A.dim
    if n == 1 or _pure_head_graph_strongly_connected(A):
        return None
    if n > MAX_EXHAUSTIVE_DIM:
        raise UnsupportedDimensionError(
            f"exhaustive irreducibility check limited to n <= {MAX_EXHAUSTIVE_DIM}, got n = {n}"
        )
    nonzero = A.data != 0
    everything = set(range(n))
    for size in range(1, n):
        for I in itertools.combinations(range(n), size):
            J = sorted(everything.difference(I))
            block = nonzero[np.ix_(list(I), *([J] * (A.order - 1)))]
            if not block.any():
                return tuple(i + 1 for i in I)
    return None


def is_irreducible(A: Tensor) -> bool:
    return reducibility_witness(A) is None


def _pure_head_graph_strongly_connected(A: Tensor) -> bool:
    # edge i -> j when A[i, j, ..., j] != 0; strong connectivity here rules
    # out every reducibility witness, but its absence proves nothing
    n = A.dim
    idx = np.arange(n)
    adj = np.zeros((n, n), dtype=bool)
    for i in range(n):
        adj[i] = A.data[(i,) + (idx,) * (A.order - 1)] != 0
    ncomp, _ = connected_components(adj.astype(float), directed=True, connection="strong")
    return ncomp == 1


@dataclass(frozen=True, eq=False)
class CommonPerron:
    delta: np.ndarray
    lambdas: list


def common_perron_eigenvector(tensors: Sequence[Tensor], tol: float = 1e-9) -> Optional[CommonPerron]:
    """Shared Perron vector of several nonnegative tensors, if there is one.

    The Perron vector of the first nonzero tensor is tested against all the
    others; ``None`` when any relative residual exceeds ``tol``.  Zero
    tensors accept any vector with eigenvalue 0.
    """
    tensors = list(tensors)
    if not tensors:
        raise InputError("no tensors given")
    n = tensors[0].dim
    for T in tensors:
        if T.dim != n:
            raise InputError("tensors must share one dimension")
        if not T.is_nonnegative():
            raise InputError("common Perron vector requires nonnegative tensors")
    nonzero = [T for T in tensors if not T.is_zero()]
    if not nonzero:
        return CommonPerron(np.full(n, 1.0 / np.sqrt(n)), [0.0] * len(tensors))
    delta = perron_z_eigenpair(nonzero[0]).x
    lambdas = []
    for T in tensors:
        if T.is_zero():
            lambdas.append(0.0)
            continue
        y = contract(T, delta)
        lam = float(delta @ y)
        scale = max(abs(lam), float(np.linalg.norm(y)), np.finfo(float).tiny)
        if np.linalg.norm(y - lam * delta) / scale >= tol:
            return None
        lambdas.append(lam)
    return CommonPerron(delta, lambdas)


# -- brute-force oracle ------------------------------------------------------


@dataclass
class OracleResult:
    """Z-eigenpairs found by the grid scan, sorted by eigenvalue (descending).

    ``sign_convention`` says how the ``x -> -x`` partner of each pair was
    folded away; ``degenerate`` is set when every unit vector is an
    eigenvector (e.g. the zero tensor or the identity matrix).
    """

    pairs: list
    sign_convention: str
    degenerate: bool = False
    notes: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)

    def __getitem__(self, i):
        return self.pairs[i]

    @property
    def largest(self) -> ZEigenpair:
        return self.pairs[0]


def _canonical(lam, x, odd_order):
    x = np.array(x, dtype=float)
    if odd_order and lam < -1e-14:
        return -lam, -x
    if odd_order and lam > 1e-14:
        return lam, x
    s = x.sum()
    if abs(s) < 1e-12:
        s = x[np.flatnonzero(np.abs(x) > 1e-12)[0]]
    return lam, (x if s > 0 else -x)


def _convention(odd_order):
    if odd_order:
        return ("odd order: (lambda, x) and (-lambda, -x) are one pair; reported with lambda >= 0 "
                "(for lambda = 0, with sum(x) > 0)")
    return "even order: (lambda, x) and (lambda, -x) are one pair; reported with sum(x) > 0"


def _dedupe(pairs):
    out = []
    for p in sorted(pairs, key=lambda p: -p.lam):
        if not any(abs(p.lam - q.lam) < 1e-8 and np.allclose(p.x, q.x, atol=1e-6) for q in out):
            out.append(p)
    return out


def z_eigenpairs_oracle(A: Tensor, resolution: Optional[int] = None) -> OracleResult:
    """Enumerate Z-eigenpairs of a 2- or 3-dimensional tensor by scanning.

    n = 2: sign changes of the tangential residual on a uniform angle grid
    are refined with Brent's method.  n = 3: Newton refinement of the
    eigen-equations from a Fibonacci sphere of starting points.
    """
    n = A.dim
    odd = A.order % 2 == 1
    if n == 2:
        pairs, degenerate = _scan_circle(A, resolution or 20000)
    elif n == 3:
        pairs, degenerate = _scan_sphere(A, resolution or 3000)
    else:
        raise UnsupportedDimensionError(f"oracle supports n = 2 or 3, got n = {n}")
    canon = []
    for p in pairs:
        lam, x = _canonical(p.lam, p.x, odd)
        canon.append(_pair(A, x) if not degenerate else ZEigenpair(lam, x, p.residual))
    result = OracleResult(_dedupe(canon), _convention(odd), degenerate)
    if degenerate:
        result.notes.append("every unit vector is a Z-eigenvector; one representative reported")
    return result


def _scan_circle(A, resolution):
    theta = np.linspace(0.0, 2.0 * np.pi, resolution, endpoint=False)
    X = np.column_stack([np.cos(theta), np.sin(theta)])
    Y = contract_batch(A, X)
    g = -X[:, 1] * Y[:, 0] + X[:, 0] * Y[:, 1]
    scale = max(1.0, float(np.abs(Y).max()))
    if np.all(np.abs(g) < 1e-12 * scale):
        return [_pair(A, X[0])], True

    def tangential(t):
        c, s = np.cos(t), np.sin(t)
        y = contract(A, np.array([c, s]))
        return -s * y[0] + c * y[1]

    roots = []
    for i in range(resolution):
        j = (i + 1) % resolution
        t0 = theta[i]
        t1 = theta[j] if j else 2.0 * np.pi
        if g[i] == 0.0:
            roots.append(t0)
        elif g[i] * g[j] < 0.0:
            roots.append(brentq(tangential, t0, t1, xtol=1e-15, rtol=4 * np.finfo(float).eps))
    pairs = [_pair(A, [np.cos(t), np.sin(t)]) for t in roots]
    return [p for p in pairs if p.residual < 1e-9], False


def _fibonacci_sphere(m):
    i = np.arange(m) + 0.5
    phi = np.arccos(1.0 - 2.0 * i / m)
    theta = np.pi * (1.0 + 5.0 ** 0.5) * i
    return np.column_stack([np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)])


def _newton_refine(A, x, iters=60):
    n = A.dim
    lam = float(x @ contract(A, x))
    for _ in range(iters):
        y = contract(A, x)
        F = np.concatenate([y - lam * x, [0.5 * (1.0 - x @ x)]])
        if np.linalg.norm(F) < 1e-14:
            break
        J = np.zeros((n + 1, n + 1))
        J[:n, :n] = contract_jacobian(A, x) - lam * np.eye(n)
        J[:n, n] = -x
        J[n, :n] = -x
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            return None
        x = x + step[:n]
        lam = lam + step[n]
        if not np.all(np.isfinite(x)) or np.linalg.norm(x) > 1e6:
            return None
    return _pair(A, x)


def _scan_sphere(A, resolution):
    X = _fibonacci_sphere(resolution)
    Y = contract_batch(A, X)
    lam = np.einsum("ij,ij->i", X, Y)
    tang = Y - lam[:, None] * X
    scale = max(1.0, float(np.abs(Y).max()))
    if np.all(np.linalg.norm(tang, axis=1) < 1e-12 * scale):
        return [_pair(A, X[0])], True
    pairs = []
    for x in X:
        p = _newton_refine(A, x)
        if p is not None and p.residual < 1e-9:
            pairs.append(p)
    return pairs, False
