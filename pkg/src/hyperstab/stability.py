"""Stability certificates and conservative domains of attraction.

Every certificate is an explicit region around the origin that is proven
to lie in the basin of attraction:

* weighted: ``max_j |x_j| / delta_j < radius`` (``delta`` a positive Perron vector)
* box:      ``max_j |x_j| < radius``

The radius is the unique positive root of ``sum_m c_m y^(m-2) = 1`` where
``c_m`` is a nonnegative coefficient attached to the order-``m`` tensor
(its Perron Z-eigenvalue, or a row absolute sum).
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .errors import ConditionViolated, InputError, NoCommonEigenvectorError, PreconditionError
from .spectral import common_perron_eigenvector, perron_z_eigenpair, reducibility_witness
from .tensor_core import PolySystem, Tensor, abs_tensor, evaluate, row_absolute_sums

MARGINAL_TOL = 1e-10
ROOT_RESIDUAL_TOL = 1e-12


class Theorem(str, enum.Enum):
    T1 = "T1"  # homogeneous system, weighted by a Perron vector
    T2 = "T2"  # common Perron vector across orders
    T3 = "T3"  # per-row absolute sums, box region
    C1 = "C1"  # T3 closed form for orders {2, 3}
    C2 = "C2"  # T3 closed form for orders {2, 3, 4}


@dataclass(frozen=True)
class AttractionCertificate:
    kind: str  # "weighted" or "box"
    radius: float
    theorem: Theorem
    lambdas_used: Mapping[int, float]
    delta: Optional[np.ndarray] = None
    per_row: Optional[tuple] = None
    degenerate: bool = False
    notes: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in ("weighted", "box"):
            raise InputError(f"unknown certificate kind {self.kind!r}")
        if (self.kind == "weighted") != (self.delta is not None):
            raise InputError("weighted certificates carry delta, box certificates do not")
        if not self.radius > 0:
            raise InputError(f"certificate radius must be positive, got {self.radius}")

    @property
    def unbounded(self) -> bool:
        return math.isinf(self.radius)

    def half_widths(self, dim: Optional[int] = None) -> np.ndarray:
        """Per-coordinate bound: the region is the open box ``|x_j| < half_widths[j]``."""
        if self.kind == "weighted":
            return self.radius * np.asarray(self.delta)
        if dim is None:
            if self.per_row is None:
                raise InputError("box certificate without per-row data: pass dim explicitly")
            dim = len(self.per_row)
        return np.full(dim, self.radius)

    def level(self, x) -> float:
        """Value of the region's gauge at ``x``; certified iff ``level(x) < radius``."""
        x = np.abs(np.asarray(x, dtype=float))
        if self.kind == "weighted":
            return float(np.max(x / self.delta))
        return float(np.max(x))

    def contains(self, x) -> bool:
        return self.level(x) < self.radius

    def contains_batch(self, X) -> np.ndarray:
        X = np.abs(np.asarray(X, dtype=float))
        if self.kind == "weighted":
            return np.max(X / self.delta, axis=1) < self.radius
        return np.max(X, axis=1) < self.radius


# -- the scalar root problem -------------------------------------------------


def _validate_coeffs(coeffs):
    out = {}
    for m, c in coeffs.items():
        m = int(m)
        c = float(c)
        if m < 2:
            raise InputError(f"coefficient order must be >= 2, got {m}")
        if not np.isfinite(c) or c < 0:
            raise InputError(f"coefficient for order {m} must be finite and >= 0, got {c}")
        out[m] = c
    return out


def root_function(coeffs: Mapping[int, float], y: float) -> float:
    """``f(y) = sum_m c_m y^(m-2) - 1``."""
    return sum(c * y ** (m - 2) for m, c in coeffs.items()) - 1.0


def positive_root(coeffs: Mapping[int, float]) -> float:
    """Unique ``y > 0`` with ``sum_m c_m y^(m-2) = 1``.

    ``f`` is increasing on ``y > 0`` and ``f(0) = c_2 - 1 < 0``.  Returns
    ``inf`` when every ``c_m`` with ``m >= 3`` vanishes.

    Raises
    ------
    ConditionViolated
        If ``c_2 >= 1``.
    """
    coeffs = _validate_coeffs(coeffs)
    c2 = coeffs.get(2, 0.0)
    if c2 >= 1.0:
        raise ConditionViolated(f"linear coefficient {c2:g} >= 1: origin not certified")
    higher = {m: c for m, c in coeffs.items() if m >= 3 and c > 0}
    if not higher:
        return math.inf

    def f(y):
        return c2 + sum(c * y ** (m - 2) for m, c in higher.items()) - 1.0

    def df(y):
        return sum((m - 2) * c * y ** (m - 3) for m, c in higher.items())

    lo, hi = 0.0, 1.0
    while f(hi) <= 0.0:
        lo, hi = hi, 2.0 * hi
    while f(hi / 64.0) > 0.0 and hi > 1e-300:
        hi /= 64.0
    while hi - lo > 1e-9 * hi:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    y = 0.5 * (lo + hi)
    for _ in range(10):
        fy = f(y)
        if fy == 0.0:
            break
        y_new = y - fy / df(y)
        if not lo <= y_new <= hi:
            break
        if y_new == y:
            break
        y = y_new
    return y


# -- certificates ------------------------------------------------------------


def _require_irreducible(T: Tensor, order: int):
    witness = reducibility_witness(T)
    if witness is not None:
        raise PreconditionError(
            f"|A| of order {order} is reducible: index set {set(witness)} receives nothing from outside",
            witness=witness,
        )


def _require_no_constant(sys: PolySystem):
    if sys.constant is not None and np.any(sys.constant):
        raise PreconditionError("system has a constant term; shift the equilibrium to the origin first")


def theorem1_certificate(A: Tensor) -> AttractionCertificate:
    """Weighted region ``max_j |x_j|/delta_j < lambda^(-1/(k-2))`` for ``x+ = A x^{k-1}``."""
    k = A.order
    if k < 3:
        raise InputError("homogeneous certificate needs order >= 3 (exponent 1/(k-2) undefined for k = 2)")
    absA = abs_tensor(A)
    if absA.is_zero():
        delta = np.full(A.dim, 1.0 / np.sqrt(A.dim))
        return AttractionCertificate("weighted", math.inf, Theorem.T1, {k: 0.0}, delta, degenerate=True,
                                     notes=("zero tensor: every state maps to the origin",))
    _require_irreducible(absA, k)
    pair = perron_z_eigenpair(absA)
    radius = (1.0 / pair.lam) ** (1.0 / (k - 2))
    return AttractionCertificate("weighted", radius, Theorem.T1, {k: pair.lam}, pair.x)


def common_perron_coefficients(sys: PolySystem):
    """``({order: lambda(|A_m|)}, delta)`` for a Perron vector shared by every ``|A_m|``.

    Raises
    ------
    PreconditionError
        A nonzero ``|A_m|`` is reducible, or the system has a constant term.
    NoCommonEigenvectorError
        The Perron vector of the lowest-order tensor fails for another order.
    """
    _require_no_constant(sys)
    abs_tensors = {m: abs_tensor(T) for m, T in sys.tensors.items()}
    for m, T in abs_tensors.items():
        if not T.is_zero():
            _require_irreducible(T, m)
    common = common_perron_eigenvector(list(abs_tensors.values()))
    if common is None:
        raise NoCommonEigenvectorError(
            "the |A_m| share no Perron Z-eigenvector; use theorem3_certificate (row sums) instead"
        )
    return dict(zip(abs_tensors, common.lambdas)), common.delta


def theorem2_certificate(sys: PolySystem) -> AttractionCertificate:
    """Weighted region from a Perron vector shared by all ``|A_m|``."""
    lambdas, delta = common_perron_coefficients(sys)
    return AttractionCertificate("weighted", positive_root(lambdas), Theorem.T2, lambdas, delta)


def row_sum_table(sys: PolySystem) -> dict:
    """``{order: per-row absolute sums}`` for every stored tensor."""
    return {m: row_absolute_sums(T) for m, T in sys.tensors.items()}


def _check_row_conditions(sys: PolySystem, table):
    _require_no_constant(sys)
    for m, T in sys.tensors.items():
        if not T.is_zero():
            _require_irreducible(T, m)
    linear = table.get(2, np.zeros(sys.dim))
    worst = int(np.argmax(linear))
    if linear[worst] >= 1.0:
        raise ConditionViolated(
            f"row {worst + 1} of the linear part has absolute sum {linear[worst]:g} >= 1"
        )


def theorem3_certificate(sys: PolySystem) -> AttractionCertificate:
    """Box region ``max_j |x_j| < min_p y_p`` from per-row absolute sums."""
    table = row_sum_table(sys)
    _check_row_conditions(sys, table)
    per_row = tuple(positive_root({m: sums[p] for m, sums in table.items()}) for p in range(sys.dim))
    return _box(sys, Theorem.T3, per_row, table)


def _box(sys, theorem, per_row, table):
    p = int(np.argmin(per_row))
    used = {m: float(sums[p]) for m, sums in table.items()}
    return AttractionCertificate("box", float(per_row[p]), theorem, used, per_row=tuple(map(float, per_row)))


def _require_orders(sys: PolySystem, allowed):
    extra = set(sys.orders) - set(allowed)
    if extra:
        raise InputError(f"closed form covers tensor orders {sorted(allowed)}, system also has {sorted(extra)}")


def quadratic_certificate(sys: PolySystem) -> AttractionCertificate:
    """Closed form ``min_p (1 - C1_p) / C2_p`` for ``x+ = A_2 x^2 + A_1 x``."""
    _require_orders(sys, {2, 3})
    table = row_sum_table(sys)
    _check_row_conditions(sys, table)
    c1 = table.get(2, np.zeros(sys.dim))
    c2 = table.get(3, np.zeros(sys.dim))
    with np.errstate(divide="ignore"):
        per_row = np.where(c2 > 0, (1.0 - c1) / np.where(c2 > 0, c2, 1.0), np.inf)
    return _box(sys, Theorem.C1, per_row, table)


def cubic_certificate(sys: PolySystem) -> AttractionCertificate:
    """Closed form positive root of ``C3 y^2 + C2 y + C1 - 1 = 0`` per row."""
    _require_orders(sys, {2, 3, 4})
    table = row_sum_table(sys)
    _check_row_conditions(sys, table)
    zero = np.zeros(sys.dim)
    c1, c2, c3 = (table.get(m, zero) for m in (2, 3, 4))
    # rationalised root 2(1-C1)/(C2 + sqrt(C2^2 + 4 C3 (1-C1))): no cancellation, C3 = 0 allowed
    denom = c2 + np.sqrt(c2 ** 2 + 4.0 * c3 * (1.0 - c1))
    with np.errstate(divide="ignore"):
        per_row = np.where(denom > 0, 2.0 * (1.0 - c1) / np.where(denom > 0, denom, 1.0), np.inf)
    return _box(sys, Theorem.C2, per_row, table)


class LocalVerdict(str, enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    MARGINAL = "marginal"


def spectral_radius(M) -> float:
    M = np.asarray(M, dtype=float)
    return float(np.max(np.abs(np.linalg.eigvals(M)))) if M.size else 0.0


def local_stability(sys: PolySystem) -> LocalVerdict:
    """Compare the spectral radius of the Jacobian at the origin (the linear part) with 1."""
    _require_no_constant(sys)
    rho = spectral_radius(sys.linear_part())
    if abs(rho - 1.0) <= MARGINAL_TOL:
        return LocalVerdict.MARGINAL
    return LocalVerdict.STABLE if rho < 1.0 else LocalVerdict.UNSTABLE


# -- constant terms ----------------------------------------------------------


def _expand_around(T: Tensor, a: np.ndarray) -> dict:
    """Split ``T (y + a)^{k-1}`` into homogeneous pieces in ``y``.

    Returns ``{order: array}`` with order 1 meaning the constant vector.
    Each subset of head slots filled by ``a`` is contracted away; the
    remaining slots keep ``y`` in their original order.
    """
    k = T.order
    pieces = {}
    for r in range(k):
        for a_slots in itertools.combinations(range(1, k), k - 1 - r):
            arr = T.data
            for axis in sorted(a_slots, reverse=True):
                arr = np.tensordot(arr, a, axes=([axis], [0]))
            pieces[r + 1] = pieces.get(r + 1, 0.0) + arr
    return pieces


def shift_equilibrium(sys: PolySystem, a, tol: float = 1e-9) -> PolySystem:
    """Rewrite the system in ``y = x - a`` around the fixed point ``a``.

    The returned system has no constant term and satisfies
    ``evaluate(shifted, y) == evaluate(sys, y + a) - a``.
    """
    a = np.asarray(a, dtype=float)
    if a.shape != (sys.dim,):
        raise InputError(f"equilibrium must have length {sys.dim}")
    residual = float(np.max(np.abs(evaluate(sys, a) - a)))
    if not residual < tol:
        raise PreconditionError(f"a is not a fixed point: |f(a) - a|_inf = {residual:.3e}", residual=residual)
    acc = {}
    for T in sys.tensors.values():
        for order, arr in _expand_around(T, a).items():
            if order == 1:
                continue  # constant part cancels against b - a up to the residual above
            acc[order] = acc.get(order, 0.0) + arr
    tensors = {m: Tensor(arr) for m, arr in acc.items()}
    return PolySystem(sys.dim, tensors, None, sys.name)
