"""Certified radius against feedback gain for a Z-identity controller.

For each gain the controlled certificate (eigenvalue shift) is compared with
the common-Perron certificate of the explicitly built closed loop, and the
closed loop is simulated from just inside the certified region along the
Perron direction.  Prints a CSV table.
"""

import argparse
from pathlib import Path

import numpy as np

from hyperstab import (
    closed_loop,
    controlled_certificate,
    make_controller,
    simulate,
    theorem2_certificate,
)
from hyperstab.config import fmt, load_system

ROOT = Path(__file__).resolve().parent.parent


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", type=Path, default=ROOT / "configs" / "control_quartic.json")
    ap.add_argument("--order", type=int, default=4)
    ap.add_argument("--gains", default="-1.9,-1,-0.5,0,0.5,1,2")
    ap.add_argument("--margin", type=float, default=0.99, help="start at margin * radius * delta")
    args = ap.parse_args()

    sys = load_system(args.config)
    print("gain,radius,closed_loop_radius,verdict_inside,verdict_outside")
    for s in (float(v) for v in args.gains.split(",")):
        ctrl = make_controller(sys, args.order, s)
        cert = controlled_certificate(sys, ctrl)
        cl = closed_loop(sys, ctrl)
        direct = theorem2_certificate(cl)
        inside = simulate(cl, args.margin * cert.radius * np.asarray(cert.delta)).verdict.value
        outside = simulate(cl, 1.1 * cert.radius * np.asarray(cert.delta)).verdict.value
        print(",".join([fmt(s), fmt(cert.radius), fmt(direct.radius), inside, outside]))


if __name__ == "__main__":
    main()
