"""Dense cubical tensors, multilinear contraction and polynomial systems.

A tensor of order ``k`` and dimension ``n`` is stored as a numpy array of
shape ``(n,) * k``.  Axis 0 is the tail index, axes 1..k-1 are the head
slots.  Contraction ``A x^{k-1}`` fills every head slot with ``x``.

A :class:`PolySystem` is the map ``x -> sum_m A_m x^{m-1} + b`` keyed by
tensor order ``m`` (an order-2 tensor is the linear part).
"""

from __future__ import annotations

import itertools
import string
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Optional

import numpy as np

from .errors import InputError

_HEAD_LETTERS = string.ascii_lowercase[1:25]  # 'a' is the tail, 'z' the batch axis


def _freeze(arr):
    arr = np.array(arr, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Tensor:
    """Immutable cubical tensor of order >= 2."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=float)
        if arr.ndim < 2:
            raise InputError(f"tensor order must be >= 2, got {arr.ndim}")
        if len(set(arr.shape)) != 1:
            raise InputError(f"tensor must be cubical, got shape {arr.shape}")
        if arr.shape[0] < 1:
            raise InputError("tensor dimension must be >= 1")
        if not np.all(np.isfinite(arr)):
            raise InputError("tensor entries must be finite")
        object.__setattr__(self, "data", _freeze(arr))

    @property
    def order(self) -> int:
        return self.data.ndim

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @classmethod
    def zeros(cls, order: int, dim: int) -> "Tensor":
        return cls(np.zeros((dim,) * order))

    @classmethod
    def full(cls, order: int, dim: int, value: float) -> "Tensor":
        return cls(np.full((dim,) * order, float(value)))

    @classmethod
    def from_entries(cls, order: int, dim: int, entries: Mapping, fill: float = 0.0) -> "Tensor":
        """Build from ``{(i1, ..., ik): value}`` with 1-based indices."""
        arr = np.full((dim,) * order, float(fill))
        for idx, value in entries.items():
            idx = tuple(int(i) for i in idx)
            if len(idx) != order or any(i < 1 or i > dim for i in idx):
                raise InputError(f"index {idx} outside [1, {dim}]^{order}")
            arr[tuple(i - 1 for i in idx)] = value
        return cls(arr)

    def is_zero(self) -> bool:
        return not np.any(self.data)

    def is_nonnegative(self) -> bool:
        return bool(np.all(self.data >= 0))

    def __add__(self, other: "Tensor") -> "Tensor":
        if not isinstance(other, Tensor):
            return NotImplemented
        if other.data.shape != self.data.shape:
            raise InputError(f"shape mismatch {self.data.shape} vs {other.data.shape}")
        return Tensor(self.data + other.data)

    def __sub__(self, other: "Tensor") -> "Tensor":
        return self + (-1.0) * other

    def __mul__(self, scalar) -> "Tensor":
        return Tensor(float(scalar) * self.data)

    __rmul__ = __mul__

    def __neg__(self) -> "Tensor":
        return Tensor(-self.data)

    def __repr__(self):
        return f"Tensor(order={self.order}, dim={self.dim})"


@lru_cache(maxsize=None)
def _contract_subscripts(order: int) -> str:
    heads = _HEAD_LETTERS[: order - 1]
    operands = ["a" + heads] + ["z" + h for h in heads]
    return ",".join(operands) + "->za"


def contract_batch(A: Tensor, X) -> np.ndarray:
    """Contract ``A`` against every row of ``X`` (shape ``(N, n)``)."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != A.dim:
        raise InputError(f"expected states of shape (N, {A.dim}), got {X.shape}")
    k = A.order
    return np.einsum(_contract_subscripts(k), A.data, *([X] * (k - 1)), optimize=False)


def contract(A: Tensor, x) -> np.ndarray:
    """Return ``A x^{k-1}``; for an order-2 tensor this is ``A @ x``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (A.dim,):
        raise InputError(f"vector of length {A.dim} expected, got shape {x.shape}")
    return contract_batch(A, x[None, :])[0]


def contract_jacobian(A: Tensor, x) -> np.ndarray:
    """Jacobian of ``x -> A x^{k-1}``: sum over head slots of the partial contraction."""
    x = np.asarray(x, dtype=float)
    k = A.order
    J = np.zeros((A.dim, A.dim))
    for keep in range(1, k):
        T = A.data
        # contract from the last axis down so earlier axis numbers stay valid
        for axis in range(k - 1, 0, -1):
            if axis != keep:
                T = np.tensordot(T, x, axes=([axis], [0]))
        J += T
    return J


def abs_tensor(A: Tensor) -> Tensor:
    return Tensor(np.abs(A.data))


def row_absolute_sums(A: Tensor) -> np.ndarray:
    """Per-tail sums of ``|A_{p, I}|`` over all head multi-indices ``I``."""
    return np.abs(A.data).reshape(A.dim, -1).sum(axis=1)


def row_absolute_sum(A: Tensor, p: int) -> float:
    """``sum_I |A_{p, I}|`` for the 1-based tail index ``p``."""
    if not 1 <= p <= A.dim:
        raise InputError(f"row index {p} outside [1, {A.dim}]")
    return float(np.abs(A.data[p - 1]).sum())


def is_supersymmetric(A: Tensor, tol: float = 1e-12) -> bool:
    for perm in itertools.permutations(range(A.order)):
        if not np.allclose(A.data, np.transpose(A.data, perm), rtol=0.0, atol=tol):
            return False
    return True


@dataclass(frozen=True, eq=False)
class PolySystem:
    """``x+ = sum_m A_m x^{m-1} + b`` with tensors keyed by their order ``m``."""

    dim: int
    tensors: Mapping[int, Tensor]
    constant: Optional[np.ndarray] = None
    name: str = field(default="")

    def __post_init__(self):
        if int(self.dim) < 1:
            raise InputError("system dimension must be >= 1")
        object.__setattr__(self, "dim", int(self.dim))
        if not self.tensors:
            raise InputError("a polynomial system needs at least one tensor")
        tensors = {}
        for m, T in self.tensors.items():
            if not isinstance(T, Tensor):
                T = Tensor(T)
            if T.order != int(m):
                raise InputError(f"tensor stored under order {m} has order {T.order}")
            if T.dim != self.dim:
                raise InputError(f"order-{m} tensor has dim {T.dim}, system dim is {self.dim}")
            tensors[int(m)] = T
        object.__setattr__(self, "tensors", dict(sorted(tensors.items())))
        if self.constant is not None:
            b = np.asarray(self.constant, dtype=float)
            if b.shape != (self.dim,):
                raise InputError(f"constant term must have length {self.dim}, got shape {b.shape}")
            if not np.all(np.isfinite(b)):
                raise InputError("constant term must be finite")
            object.__setattr__(self, "constant", _freeze(b))

    @property
    def orders(self) -> list:
        return list(self.tensors)

    @property
    def max_order(self) -> int:
        return max(self.tensors)

    def tensor(self, order: int) -> Optional[Tensor]:
        return self.tensors.get(order)

    def nonzero_tensors(self) -> dict:
        return {m: T for m, T in self.tensors.items() if not T.is_zero()}

    def linear_part(self) -> np.ndarray:
        T = self.tensors.get(2)
        return np.zeros((self.dim, self.dim)) if T is None else np.array(T.data)

    def with_tensor(self, order: int, T: Optional[Tensor]) -> "PolySystem":
        tensors = dict(self.tensors)
        if T is None:
            tensors.pop(order, None)
        else:
            tensors[order] = T
        return PolySystem(self.dim, tensors, self.constant, self.name)

    def __repr__(self):
        b = "" if self.constant is None else ", constant"
        return f"PolySystem(dim={self.dim}, orders={self.orders}{b})"


def evaluate_batch(sys: PolySystem, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != sys.dim:
        raise InputError(f"expected states of shape (N, {sys.dim}), got {X.shape}")
    out = np.zeros((X.shape[0], sys.dim))
    for T in sys.tensors.values():
        out = out + contract_batch(T, X)
    if sys.constant is not None:
        out = out + sys.constant
    return out


def evaluate(sys: PolySystem, x) -> np.ndarray:
    """One step of the system map."""
    x = np.asarray(x, dtype=float)
    if x.shape != (sys.dim,):
        raise InputError(f"state of length {sys.dim} expected, got shape {x.shape}")
    return evaluate_batch(sys, x[None, :])[0]


def system_from_tensors(tensors: Iterable[Tensor], constant=None, name: str = "") -> PolySystem:
    tensors = list(tensors)
    if not tensors:
        raise InputError("a polynomial system needs at least one tensor")
    by_order = {}
    for T in tensors:
        if T.order in by_order:
            raise InputError(f"duplicate tensor of order {T.order}")
        by_order[T.order] = T
    return PolySystem(tensors[0].dim, by_order, constant, name)
