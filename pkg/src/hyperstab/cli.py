"""Command line entry point: ``hyperstab <command> ...``.

Exit codes: 0 success, 1 certificate inapplicable (a stability condition
fails), 2 input error.  Diagnostics go to stderr, results to stdout or
``--out``.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys as _sys

import numpy as np

from . import config as cfg
from .control import closed_loop, controlled_certificate, make_controller
from .dynamics import SimParams, build_sis, lyapunov_trace, sample_region, simulate, verify_certificate
from .errors import ConditionViolated, HyperstabError, InputError, UnsupportedDimensionError
from .spectral import perron_z_eigenpair, reducibility_witness, z_eigenpairs_oracle
from .stability import (
    cubic_certificate,
    local_stability,
    quadratic_certificate,
    shift_equilibrium,
    spectral_radius,
    theorem1_certificate,
    theorem2_certificate,
    theorem3_certificate,
)
from .tensor_core import abs_tensor

log = logging.getLogger("hyperstab")

SEED_ENV = "HYPERSTAB_SEED"


def _vector(text):
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        _sys.stdout.write(text)


def resolve_seed(flag):
    if flag is not None:
        return flag
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise InputError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    return 0


def cert_to_dict(cert) -> dict:
    d = {
        "theorem": cert.theorem.value,
        "kind": cert.kind,
        "radius": None if cert.unbounded else cert.radius,
        "unbounded": cert.unbounded,
        "coefficients": {str(m): v for m, v in cert.lambdas_used.items()},
        "inscribed_box": None if cert.unbounded else inscribed_box(cert),
    }
    if cert.delta is not None:
        d["delta"] = [float(v) for v in cert.delta]
    if cert.per_row is not None:
        d["per_row"] = [None if math.isinf(v) else v for v in cert.per_row]
    if cert.degenerate:
        d["degenerate"] = True
    if cert.notes:
        d["notes"] = list(cert.notes)
    return d


def inscribed_box(cert) -> float:
    """Half-width of the largest cube ``max_j |x_j| < r`` inside the certified region."""
    if cert.kind == "weighted":
        return float(cert.radius * np.min(cert.delta))
    return float(cert.radius)


def certificate_attempts(sys):
    """Try every applicable certificate; returns ``(certificates, {theorem: reason})``."""
    attempts = []
    orders = set(sys.orders)
    if len(orders) == 1 and max(orders) >= 3:
        attempts.append(("T1", lambda: theorem1_certificate(sys.tensor(max(orders)))))
    attempts.append(("T2", lambda: theorem2_certificate(sys)))
    attempts.append(("T3", lambda: theorem3_certificate(sys)))
    if orders <= {2, 3} and 3 in orders:
        attempts.append(("C1", lambda: quadratic_certificate(sys)))
    if orders <= {2, 3, 4} and 4 in orders:
        attempts.append(("C2", lambda: cubic_certificate(sys)))
    certs, failures = [], {}
    for name, attempt in attempts:
        try:
            certs.append(attempt())
        except (ConditionViolated, InputError) as exc:
            failures[name] = str(exc)
    return certs, failures


def _largest(certs):
    if not certs:
        return None
    return max(certs, key=lambda c: math.inf if c.unbounded else inscribed_box(c))


def _load(path, equilibrium=None):
    sys = cfg.load_system(path)
    if equilibrium is not None:
        sys = shift_equilibrium(sys, equilibrium)
    return sys


def cmd_analyze(args):
    sys = _load(args.config, args.equilibrium)
    report = {
        "system": {"name": sys.name, "dim": sys.dim, "orders": sys.orders},
    }
    if args.equilibrium is not None:
        report["shifted_to_equilibrium"] = [float(v) for v in args.equilibrium]
    if sys.constant is not None and np.any(sys.constant):
        report["error"] = "constant term present: pass --equilibrium to shift a fixed point to the origin"
        _emit(cfg.dump_json(report), args.out)
        return 1
    report["local_stability"] = {
        "verdict": local_stability(sys).value,
        "spectral_radius": spectral_radius(sys.linear_part()),
    }
    certs, failures = certificate_attempts(sys)
    seed = resolve_seed(args.seed)
    entries = []
    for cert in certs:
        d = cert_to_dict(cert)
        if args.verify:
            rep = verify_certificate(sys, cert, samples=args.verify, seed=seed)
            d["verification"] = {"converged": rep.converged, "total": rep.total,
                                 "worst_final_norm": rep.worst_final_norm, "seed": seed}
        entries.append(d)
    report["certificates"] = entries
    report["not_applicable"] = failures
    best = _largest(certs)
    report["largest"] = None if best is None else {
        "theorem": best.theorem.value,
        "radius": None if best.unbounded else best.radius,
        "inscribed_box": None if best.unbounded else inscribed_box(best),
    }
    _emit(cfg.dump_json(report), args.out)
    for name, reason in failures.items():
        log.info("%s not applicable: %s", name, reason)
    return 0 if certs else 1


def cmd_eig(args):
    sys = cfg.load_system(args.config)
    T = sys.tensor(args.order)
    if T is None:
        raise InputError(f"system has no tensor of order {args.order} (orders: {sys.orders})")
    used_abs = not T.is_nonnegative()
    A = abs_tensor(T) if used_abs else T
    pair = perron_z_eigenpair(A, tol=args.tol)
    try:
        witness = reducibility_witness(A)
    except UnsupportedDimensionError:
        witness = "unknown"
    report = {
        "order": args.order,
        "used_absolute_value": used_abs,
        "lambda": pair.lam,
        "x": [float(v) for v in pair.x],
        "residual": pair.residual,
        "irreducible": None if witness == "unknown" else witness is None,
    }
    if witness not in (None, "unknown"):
        report["reducibility_witness"] = list(witness)
    if 2 <= A.dim <= 3:
        oracle = z_eigenpairs_oracle(A, args.resolution)
        report["oracle"] = {
            "pairs": [{"lambda": p.lam, "x": [float(v) for v in p.x], "residual": p.residual} for p in oracle],
            "largest_lambda": oracle.largest.lam,
            "agrees_with_perron": bool(abs(oracle.largest.lam - pair.lam) < 1e-6),
            "sign_convention": oracle.sign_convention,
            "degenerate": oracle.degenerate,
        }
    _emit(cfg.dump_json(report), args.out)
    return 0


def _sim_params(args):
    return SimParams(args.steps, args.eps, args.mdiv)


def cmd_simulate(args):
    sys = cfg.load_system(args.config)
    traj = simulate(sys, args.x0, args.steps, args.eps, args.mdiv)
    V = lyapunov_trace(traj, args.delta) if args.delta is not None else None
    _emit(cfg.trajectory_csv(traj, V), args.out)
    print(f"verdict: {traj.verdict.value} after {traj.steps_run} steps, |x|_inf = {traj.final_norm:.3e}",
          file=_sys.stderr)
    return 0


def cmd_sample_region(args):
    sys = cfg.load_system(args.config)
    cert = None
    if not args.no_certificate:
        certs, _ = certificate_attempts(sys)
        cert = _largest(certs)
    lo = args.lo[0] if len(args.lo) == 1 else args.lo
    hi = args.hi[0] if len(args.hi) == 1 else args.hi
    sample = sample_region(sys, lo, hi, args.grid, _sim_params(args), cert)
    _emit(cfg.region_csv(sample), args.out)
    which = "none" if cert is None else f"{cert.theorem.value} radius {cert.radius:.6g}"
    print(f"certificate: {which}; labels: {json.dumps(sample.counts())}", file=_sys.stderr)
    return 0


def cmd_control(args):
    sys = cfg.load_system(args.config)
    ctrl = make_controller(sys, args.order, args.gain)
    cert = controlled_certificate(sys, ctrl)
    try:
        baseline = cert_to_dict(theorem2_certificate(sys))
    except ConditionViolated as exc:
        baseline = {"error": str(exc)}
    controlled = closed_loop(sys, ctrl)
    doc = {
        "controller": {"order": ctrl.l, "gain": ctrl.s},
        "certificate": cert_to_dict(cert),
        "uncontrolled_certificate": baseline,
        "system": cfg.system_to_dict(controlled, metadata={"controlled": True, "order": ctrl.l, "gain": ctrl.s}),
    }
    _emit(cfg.dump_json(doc), args.out)
    return 0


def _load_array(path, shape):
    with open(path) as fh:
        doc = json.load(fh)
    if isinstance(doc, dict):
        n = shape[0]
        T = cfg.system_from_dict({"dim": n, "tensors": [dict(doc, order=len(shape))]})
        return T.tensor(len(shape)).data
    arr = np.array(doc, dtype=float)
    if arr.shape != shape:
        raise InputError(f"{path}: expected shape {shape}, got {arr.shape}")
    return arr


def cmd_sis(args):
    with open(args.a_file) as fh:
        a = np.array(json.load(fh), dtype=float)
    if a.ndim != 2:
        raise InputError(f"{args.a_file}: contact matrix must be 2-D")
    n = a.shape[0]
    b = _load_array(args.b_file, (n, n, n)) if args.b_file else None
    gamma = args.gamma if len(args.gamma) > 1 else float(args.gamma[0])
    sys = build_sis(gamma, args.beta1, args.beta2, a, b, args.h)
    meta = {"model": "sis", "gamma": np.broadcast_to(gamma, (n,)).tolist(), "beta1": args.beta1,
            "beta2": args.beta2, "h": args.h}
    _emit(cfg.dump_json(cfg.system_to_dict(sys, metadata=meta)), args.out)
    return 0


def _add_sim_flags(p):
    p.add_argument("--steps", type=int, default=1000, help="maximum number of steps (default 1000)")
    p.add_argument("--eps", type=float, default=1e-8, help="convergence threshold on |x|_inf")
    p.add_argument("--mdiv", type=float, default=1e6, help="divergence threshold on |x|_inf")


def build_parser():
    parser = argparse.ArgumentParser(prog="hyperstab", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="local stability and every applicable attraction certificate")
    p.add_argument("config")
    p.add_argument("--out")
    p.add_argument("--equilibrium", type=_vector, help="fixed point to shift to the origin first")
    p.add_argument("--verify", type=int, default=0, metavar="N", help="check each certificate on N sampled points")
    p.add_argument("--seed", type=int, help=f"sampling seed (overrides ${SEED_ENV})")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("eig", help="Perron Z-eigenpair of one tensor, with oracle check for n <= 3")
    p.add_argument("config")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--resolution", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eig)

    p = sub.add_parser("simulate", help="trajectory CSV")
    p.add_argument("config")
    p.add_argument("--x0", type=_vector, required=True)
    p.add_argument("--delta", type=_vector, help="weights for the Lyapunov column V")
    _add_sim_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sample-region", help="grid of initial conditions labelled by their fate")
    p.add_argument("config")
    p.add_argument("--lo", type=_vector, required=True)
    p.add_argument("--hi", type=_vector, required=True)
    p.add_argument("--grid", type=int, default=61, help="points per axis")
    p.add_argument("--no-certificate", action="store_true", help="skip the inside/outside split")
    _add_sim_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample_region)

    p = sub.add_parser("control", help="Z-identity feedback: closed-loop config and certificate")
    p.add_argument("config")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--gain", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_control)

    p = sub.add_parser("sis", help="build the SIS-on-hypergraph system config")
    p.add_argument("--gamma", type=_vector, required=True, help="healing rate(s), scalar or per node")
    p.add_argument("--beta1", type=float, required=True)
    p.add_argument("--beta2", type=float, required=True)
    p.add_argument("--a-file", required=True, help="JSON contact matrix")
    p.add_argument("--b-file", help="JSON order-3 group contact tensor (nested list or sparse entries)")
    p.add_argument("--h", type=float, required=True, help="Euler step")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sis)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=_sys.stderr)
    try:
        return args.func(args)
    except ConditionViolated as exc:
        print(f"condition violated: {exc}", file=_sys.stderr)
        return 1
    except (InputError, OSError) as exc:
        print(f"input error: {exc}", file=_sys.stderr)
        return 2
    except HyperstabError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 2


run = main

if __name__ == "__main__":
    _sys.exit(main())
