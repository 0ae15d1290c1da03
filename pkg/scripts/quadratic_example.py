"""Every certificate for the two-node quadratic example and its signed variant.

Both configs describe the same map, so the row-sum radius changes with the
representation while the dynamics do not.  Each certificate is checked on
sampled points from its own region.
"""

import argparse
from pathlib import Path

from hyperstab import verify_certificate
from hyperstab.cli import certificate_attempts, inscribed_box
from hyperstab.config import load_system

ROOT = Path(__file__).resolve().parent.parent
CONFIGS = ["quadratic_example.json", "quadratic_signed.json"]


def report(path, samples, seed):
    sys = load_system(path)
    print(f"{path.name}: {sys.name}")
    certs, failures = certificate_attempts(sys)
    for cert in certs:
        rep = verify_certificate(sys, cert, samples=samples, seed=seed)
        print(f"  {cert.theorem.value:3s} {cert.kind:8s} radius {cert.radius:.12g}  "
              f"box {inscribed_box(cert):.12g}  converged {rep.converged}/{rep.total}")
    for name, reason in failures.items():
        print(f"  {name:3s} not applicable: {reason}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    for name in CONFIGS:
        report(ROOT / "configs" / name, args.samples, args.seed)


if __name__ == "__main__":
    main()
