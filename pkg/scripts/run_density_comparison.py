#!/usr/bin/env python3
"""Run the three reference density comparisons (cubic+quintic, cubic-only,
quintic-only at lambda = 0.1): full 3D ground state vs the nonpolynomial and
polynomial 1D models. Each 3D solve takes several minutes at the default
grid. Writes per-model density CSVs and a pairwise-metric report per case."""

import argparse
from pathlib import Path

from cqgpe.cli import run
from cqgpe.config import parse_config_text

CASES = {
    "cubic_quintic": (1.0, 1.0, "gpe3d,np,cq-poly"),
    "cubic_only": (1.0, 0.0, "gpe3d,np,npse-cubic,cq-poly"),
    "quintic_only": (0.0, 1.0, "gpe3d,np,cq-poly"),
}

TEMPLATE = """
scenario = compare
compare.models = {models}
coupling.g3 = {g3}
coupling.g5 = {g5}
coupling.lambda = 0.1
grid.half_width = 20.0
grid.points = 257
grid3d.transverse_half_width = 8.0
grid3d.transverse_points = 65
solver.mu_tol3d = 1e-7
"""


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out/compare", help="output root directory")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--case", choices=sorted(CASES), default=None,
                        help="run a single case instead of all three")
    args = parser.parse_args()

    names = [args.case] if args.case else list(CASES)
    for name in names:
        g3, g5, models = CASES[name]
        config = parse_config_text(
            TEMPLATE.format(g3=g3, g5=g5, models=models),
            out_override=str(Path(args.out) / name),
        )
        print(f"== {name}: g3 = {g3}, g5 = {g5}")
        for path in run(config, threads=args.threads):
            print(path)


if __name__ == "__main__":
    main()
