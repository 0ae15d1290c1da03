"""Label a grid of initial conditions for the two-node quadratic example.

Writes ``x0_1, x0_2, label`` rows and prints the label counts together with
the certified box.  Plot the CSV with any tool; points labelled
``inside-converged`` should fill the square ``|x_j| < 4/15``.

    python3 scripts/reproduce_region.py --out region.csv
"""

import argparse
import json
import time
from dataclasses import dataclass
from pathlib import Path

from hyperstab import SimParams, sample_region, theorem3_certificate
from hyperstab.config import load_system, region_csv

ROOT = Path(__file__).resolve().parent.parent


@dataclass
class RegionConfig:
    config: Path = ROOT / "configs" / "quadratic_example.json"
    lo: float = -0.3
    hi: float = 0.3
    grid: int = 61
    steps: int = 1000
    eps: float = 1e-8
    mdiv: float = 1e6


def run(cfg: RegionConfig):
    sys = load_system(cfg.config)
    cert = theorem3_certificate(sys)
    start = time.perf_counter()
    sample = sample_region(sys, cfg.lo, cfg.hi, cfg.grid, SimParams(cfg.steps, cfg.eps, cfg.mdiv), cert)
    return cert, sample, time.perf_counter() - start


def main():
    defaults = RegionConfig()
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", type=Path, default=defaults.config)
    ap.add_argument("--grid", type=int, default=defaults.grid)
    ap.add_argument("--extent", type=float, default=defaults.hi, help="grid covers [-extent, extent]^2")
    ap.add_argument("--out", type=Path)
    args = ap.parse_args()

    cfg = RegionConfig(config=args.config, lo=-args.extent, hi=args.extent, grid=args.grid)
    cert, sample, elapsed = run(cfg)
    print(f"certified box: |x_j| < {cert.radius:.12g}")
    print(f"labels: {json.dumps(sample.counts())}")
    print(f"violations: {int(sample.violations().sum())}, {elapsed:.2f}s")
    if args.out:
        args.out.write_text(region_csv(sample))
        print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
