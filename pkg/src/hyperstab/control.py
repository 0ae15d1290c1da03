"""Z-identity feedback ``g = s * Itilde x^{l-1}`` and its effect on the certified region.

With ``Itilde`` sign-matched to ``A_l``, ``|A_l + s Itilde| = |A_l| + s I_z``
and the Perron eigenvalue of the order-``l`` term moves from ``lambda`` to
``lambda + s``.  A negative gain shrinks that coefficient and enlarges the
weighted region; a positive gain does the opposite.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import reduce

import numpy as np

from .errors import ConditionViolated, InputError, NoCommonEigenvectorError
from .stability import AttractionCertificate, Theorem, common_perron_coefficients, positive_root
from .tensor_core import PolySystem, Tensor, abs_tensor, contract

SHIFT_TOL = 1e-9


def z_identity(l: int, n: int) -> Tensor:
    """Paired-Kronecker Z-identity: entry 1 iff ``i1 = i2, i3 = i4, ...``.

    Satisfies ``I_z x^{l-1} = x (x.x)^{(l-2)/2}``, hence ``= x`` on the unit sphere.
    """
    if l < 2 or l % 2:
        raise InputError(f"Z-identity tensors exist only for even order >= 2, got {l}")
    eye = np.eye(n)
    return Tensor(reduce(np.multiply.outer, [eye] * (l // 2)))


def _check_gain(A_l: Tensor, s: float):
    if s < 0 and not np.max(np.abs(A_l.data)) > abs(s):
        raise InputError(f"negative gain {s:g} needs max|A_l| > |s| (max|A_l| = {np.max(np.abs(A_l.data)):g})")


def sign_matched_identity(A_l: Tensor, l: int, s: float) -> Tensor:
    """``Itilde = sgn(A_l) * I_z`` on the support of ``I_z``; ``sgn(0)`` is taken as +1."""
    if A_l.order != l:
        raise InputError(f"A_l has order {A_l.order}, controller order is {l}")
    _check_gain(A_l, s)
    Iz = z_identity(l, A_l.dim).data
    signs = np.where(A_l.data < 0, -1.0, 1.0)
    return Tensor(np.where(Iz != 0, signs * np.abs(Iz), 0.0))


@dataclass(frozen=True, eq=False)
class ControllerSpec:
    l: int
    s: float
    itilde: Tensor

    def __post_init__(self):
        if self.l < 4 or self.l % 2:
            raise InputError(f"controller order must be even and >= 4, got {self.l}")
        if self.itilde.order != self.l:
            raise InputError("Itilde order does not match l")


def make_controller(sys: PolySystem, l: int, s: float) -> ControllerSpec:
    """Controller sign-matched to the system's order-``l`` tensor (zero if absent)."""
    A_l = sys.tensor(l) or Tensor.zeros(l, sys.dim)
    return ControllerSpec(l, float(s), sign_matched_identity(A_l, l, s))


def closed_loop(sys: PolySystem, ctrl: ControllerSpec) -> PolySystem:
    """System with ``A_l`` replaced by ``A_l + s * Itilde``."""
    if ctrl.itilde.dim != sys.dim:
        raise InputError("controller and system dimensions differ")
    if ctrl.s == 0:
        return sys
    A_l = sys.tensor(ctrl.l) or Tensor.zeros(ctrl.l, sys.dim)
    return sys.with_tensor(ctrl.l, A_l + ctrl.s * ctrl.itilde)


def eigenvalue_shift_certificate(sys: PolySystem, order: int, shift: float) -> AttractionCertificate:
    """Common-Perron-vector certificate with ``lambda(|A_order|)`` replaced by ``lambda + shift``.

    This is the radius computation only; it does not build a controller, so
    it applies to any order (odd orders have no Z-identity and hence no
    realising feedback).
    """
    lambdas, delta = common_perron_coefficients(sys)
    shifted = lambdas.get(order, 0.0) + shift
    if shifted < 0:
        raise ConditionViolated(f"shifted coefficient lambda + s = {shifted:g} < 0 for order {order}")
    lambdas[order] = shifted
    radius = positive_root(lambdas)
    return AttractionCertificate(
        "weighted", radius, Theorem.T2, lambdas, delta,
        notes=(f"order-{order} eigenvalue shifted by {shift:g}",),
    )


def controlled_certificate(sys: PolySystem, ctrl: ControllerSpec) -> AttractionCertificate:
    """Certified region of the closed loop, computed through the eigenvalue shift.

    Raises
    ------
    NoCommonEigenvectorError
        If ``delta`` is not an eigenvector of ``|A_l + s Itilde|`` with
        eigenvalue ``lambda + s``; the gain bound alone does not ensure it
        when ``A_l`` has entries smaller than ``|s|`` on the Z-identity support.
    """
    A_l = sys.tensor(ctrl.l) or Tensor.zeros(ctrl.l, sys.dim)
    _check_gain(A_l, ctrl.s)
    cert = eigenvalue_shift_certificate(sys, ctrl.l, ctrl.s)
    lam = cert.lambdas_used[ctrl.l]
    closed = abs_tensor(closed_loop(sys, ctrl).tensor(ctrl.l))
    gap = float(np.linalg.norm(contract(closed, cert.delta) - lam * cert.delta))
    if gap > SHIFT_TOL * max(1.0, lam):
        raise NoCommonEigenvectorError(
            f"closed-loop order-{ctrl.l} tensor does not have eigenvalue lambda + s = {lam:g} at delta "
            f"(residual {gap:.3e}); the shift does not apply"
        )
    return replace(cert, notes=(f"closed loop: order-{ctrl.l} Z-identity feedback, gain {ctrl.s:g}",))
