"""Simulation of ``x+ = f(x)``, Lyapunov traces, basin sampling and SIS models."""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import InputError
from .stability import AttractionCertificate
from .tensor_core import PolySystem, Tensor, evaluate_batch

EPS_CONV = 1e-8
M_DIV = 1e6
MAX_STEPS = 1000
MAX_GRID_POINTS = 1_000_000


class Verdict(str, enum.Enum):
    CONVERGED = "converged-to-origin"
    DIVERGED = "diverged"
    UNDECIDED = "undecided"


class Label(str, enum.Enum):
    INSIDE_CONVERGED = "inside-converged"
    OUTSIDE_CONVERGED = "outside-converged"
    OUTSIDE_DIVERGED = "outside-diverged"
    UNDECIDED = "undecided"
    # a certified point that failed to converge: a soundness violation
    INSIDE_NOT_CONVERGED = "inside-not-converged"


@dataclass(frozen=True, eq=False)
class SimParams:
    max_steps: int = MAX_STEPS
    eps_conv: float = EPS_CONV
    m_div: float = M_DIV


@dataclass(frozen=True, eq=False)
class Trajectory:
    states: np.ndarray  # shape (steps_run + 1, n)
    verdict: Verdict
    steps_run: int
    final_norm: float


def _inf_norm(X):
    with np.errstate(invalid="ignore"):
        return np.max(np.abs(X), axis=1)


def _classify(norms, params):
    # NaN compares False everywhere, so treat it explicitly as divergence
    diverged = ~np.isfinite(norms) | (norms > params.m_div)
    converged = ~diverged & (norms < params.eps_conv)
    return converged, diverged


def simulate(sys: PolySystem, x0, max_steps: int = MAX_STEPS, eps_conv: float = EPS_CONV,
             m_div: float = M_DIV) -> Trajectory:
    """Iterate the system from ``x0`` until it converges, diverges or runs out of steps.

    Overflow to inf/NaN counts as divergence at the step where it happens.
    """
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (sys.dim,):
        raise InputError(f"initial state of length {sys.dim} expected")
    if not np.all(np.isfinite(x0)):
        raise InputError("initial state must be finite")
    params = SimParams(max_steps, eps_conv, m_div)
    states = [x0]
    x = x0[None, :]
    verdict = Verdict.UNDECIDED
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(max_steps + 1):
            norm = _inf_norm(x)
            conv, div = _classify(norm, params)
            if conv[0]:
                verdict = Verdict.CONVERGED
                break
            if div[0]:
                verdict = Verdict.DIVERGED
                break
            if t == max_steps:
                break
            x = evaluate_batch(sys, x)
            states.append(x[0])
    return Trajectory(np.array(states), verdict, len(states) - 1, float(norm[0]))


def simulate_batch(sys: PolySystem, X0, params: SimParams = SimParams()):
    """Run many initial conditions at once.

    Returns ``(verdicts, steps, final_norms)``; each row follows exactly the
    same arithmetic as :func:`simulate` would, only without keeping states.
    """
    X = np.array(X0, dtype=float)
    N = X.shape[0]
    verdicts = np.empty(N, dtype=object)
    verdicts[:] = Verdict.UNDECIDED  # np.full would coerce the str enum to a plain string
    steps = np.zeros(N, dtype=int)
    final = np.zeros(N)
    active = np.arange(N)
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(params.max_steps + 1):
            norm = _inf_norm(X)
            conv, div = _classify(norm, params)
            done = conv | div
            if t == params.max_steps:
                done[:] = True
            verdicts[active[conv]] = Verdict.CONVERGED
            verdicts[active[div]] = Verdict.DIVERGED
            steps[active[done]] = t
            final[active[done]] = norm[done]
            keep = ~done
            active, X = active[keep], X[keep]
            if not active.size:
                break
            X = evaluate_batch(sys, X)
    return verdicts, steps, final


def lyapunov_trace(traj, delta) -> np.ndarray:
    """``V(t) = max_j |x_j(t)| / delta_j`` along a trajectory (or an array of states)."""
    delta = np.asarray(delta, dtype=float)
    if np.any(delta <= 0):
        raise InputError("delta must be strictly positive")
    states = traj.states if isinstance(traj, Trajectory) else np.atleast_2d(np.asarray(traj, dtype=float))
    return np.max(np.abs(states) / delta, axis=1)


@dataclass(frozen=True, eq=False)
class RegionSample:
    grid: np.ndarray
    labels: list
    certificate: Optional[AttractionCertificate] = None
    steps: Optional[np.ndarray] = None

    def __post_init__(self):
        if len(self.labels) != len(self.grid):
            raise InputError("one label per grid point required")

    def counts(self) -> dict:
        out = {label.value: 0 for label in Label}
        for label in self.labels:
            out[Label(label).value] += 1
        return out

    def violations(self) -> np.ndarray:
        return np.array([lab == Label.INSIDE_NOT_CONVERGED for lab in self.labels])


def _as_bounds(v, n, name):
    v = np.asarray(v, dtype=float)
    if v.ndim == 0:
        v = np.full(n, float(v))
    if v.shape != (n,):
        raise InputError(f"{name} must be a scalar or a vector of length {n}")
    return v


def region_grid(lo, hi, points_per_axis: int, n: int) -> np.ndarray:
    lo = _as_bounds(lo, n, "lo")
    hi = _as_bounds(hi, n, "hi")
    if np.any(lo >= hi):
        raise InputError("need lo < hi on every axis")
    if points_per_axis < 1:
        raise InputError("points_per_axis must be >= 1")
    if points_per_axis ** n > MAX_GRID_POINTS:
        raise InputError(f"grid of {points_per_axis}^{n} points exceeds {MAX_GRID_POINTS}")
    axes = [np.linspace(lo[j], hi[j], points_per_axis) for j in range(n)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([m.ravel() for m in mesh])


def sample_region(sys: PolySystem, lo, hi, points_per_axis: int,
                  params: SimParams = SimParams(),
                  certificate: Optional[AttractionCertificate] = None) -> RegionSample:
    """Label every point of a uniform grid over ``[lo, hi]`` by its fate.

    With a certificate attached, converged points are split into inside and
    outside the certified region; without one, every point counts as outside.
    """
    if sys.dim > 3:
        raise InputError("full grids are limited to n <= 3")
    grid = region_grid(lo, hi, points_per_axis, sys.dim)
    verdicts, steps, _ = simulate_batch(sys, grid, params)
    if certificate is None:
        inside = np.zeros(len(grid), dtype=bool)
    else:
        inside = certificate.contains_batch(grid)
    labels = []
    for ins, v in zip(inside, verdicts):
        if ins:
            labels.append(Label.INSIDE_CONVERGED if v == Verdict.CONVERGED else Label.INSIDE_NOT_CONVERGED)
        elif v == Verdict.CONVERGED:
            labels.append(Label.OUTSIDE_CONVERGED)
        elif v == Verdict.DIVERGED:
            labels.append(Label.OUTSIDE_DIVERGED)
        else:
            labels.append(Label.UNDECIDED)
    return RegionSample(grid, labels, certificate, steps)


@dataclass(frozen=True, eq=False)
class VerificationReport:
    converged: int
    total: int
    worst_final_norm: float
    failures: np.ndarray  # initial conditions that did not converge
    sampled_half_widths: np.ndarray

    @property
    def sound(self) -> bool:
        return self.converged == self.total


def verify_certificate(sys: PolySystem, cert: AttractionCertificate, samples: int = 500, seed: int = 0,
                       params: SimParams = SimParams(), unbounded_extent: float = 1.0) -> VerificationReport:
    """Simulate uniformly drawn points from the open certified region.

    For an unbounded certificate the points come from ``|x_j| < unbounded_extent``.
    """
    if cert.unbounded:
        half = np.full(sys.dim, float(unbounded_extent))
    else:
        half = cert.half_widths(sys.dim)
    rng = np.random.default_rng(seed)
    # uniform on [-1, 1); the -1 endpoint is measure zero but excluded anyway
    U = rng.uniform(-1.0, 1.0, size=(samples, sys.dim))
    U[U == -1.0] = 0.0
    X0 = U * half
    verdicts, _, final = simulate_batch(sys, X0, params)
    ok = np.array([v is Verdict.CONVERGED for v in verdicts], dtype=bool)
    worst = float(np.max(final)) if samples else 0.0
    return VerificationReport(int(ok.sum()), samples, worst, X0[~ok], half)


def inflate(cert: AttractionCertificate, factor: float) -> AttractionCertificate:
    """Copy of ``cert`` with the radius scaled; used for negative soundness checks."""
    return replace(cert, radius=cert.radius * factor)


# -- SIS on a hypergraph -----------------------------------------------------


def build_sis(gamma, beta1: float, beta2: float, a, b, h: float) -> PolySystem:
    """Tensor form of the discrete-time SIS model with pairwise and triadic infection.

    Expanding ``x_i+ = (1 - h g_i) x_i + h b1 (1 - x_i) sum_j a_ij x_j
    + h b2 (1 - x_i) sum_jl b_ijl x_j x_l`` gives an order-2 tensor
    ``diag(1 - h g) + h b1 a``, an order-3 tensor ``h b2 b`` with
    ``-h b1 a_ij`` added at ``(i; i, j)``, and an order-4 tensor holding
    ``-h b2 b_ijl`` at ``(i; i, j, l)``.  Zero higher-order parts are omitted.
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0] if a.ndim == 2 else None
    if n is None or a.shape != (n, n):
        raise InputError("contact matrix a must be square")
    b = np.zeros((n, n, n)) if b is None else np.asarray(b, dtype=float)
    if b.shape != (n, n, n):
        raise InputError(f"group contact tensor b must have shape {(n, n, n)}")
    gamma = np.asarray(gamma, dtype=float)
    if gamma.ndim == 0:
        gamma = np.full(n, float(gamma))
    if gamma.shape != (n,):
        raise InputError(f"gamma must be a scalar or have length {n}")
    if np.any(gamma <= 0):
        raise InputError("healing rates gamma must be positive")
    if beta1 < 0 or beta2 < 0:
        raise InputError("infection rates must be nonnegative")
    if not h > 0:
        raise InputError("step h must be positive")
    if np.any(a < 0) or np.any(b < 0):
        raise InputError("contact weights must be nonnegative")
    if np.any(h * gamma > 1):
        warnings.warn("h*gamma_i > 1: states lose their probabilistic interpretation", stacklevel=2)

    tensors = {2: Tensor(np.diag(1.0 - h * gamma) + h * beta1 * a)}
    idx = np.arange(n)
    quad = h * beta2 * b
    quad[idx, idx, :] -= h * beta1 * a
    if np.any(quad):
        tensors[3] = Tensor(quad)
    cubic = np.zeros((n,) * 4)
    cubic[idx, idx, :, :] = -h * beta2 * b
    if np.any(cubic):
        tensors[4] = Tensor(cubic)
    return PolySystem(n, tensors, name="sis")
