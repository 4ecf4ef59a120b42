#!/usr/bin/env python3
"""Generate the transverse-width datasets: the validity map of the coupling
plane and the exact-vs-weak-coupling width curves (fixed a5 = 0.1 sweep,
fixed a3 = 0.1 sweep, and the pure-cubic / pure-quintic limits)."""

import argparse
from pathlib import Path

from cqgpe.cli import run
from cqgpe.config import parse_config_text

MAP_CONFIG = """
scenario = width-map
map.a3_min = -2.0
map.a3_max = 2.0
map.a5_min = -2.0
map.a5_max = 2.0
map.resolution = 401
"""

CURVE_SWEEPS = {
    # comparable-couplings curves
    "curves_a3_sweep": ("a5", 0.1, 0.0, 1.0),
    "curves_a5_sweep": ("a3", 0.1, 0.0, 1.0),
    # dominant-cubic and dominant-quintic limits
    "curves_cubic_only": ("a5", 0.0, 0.0, 1.0),
    "curves_quintic_only": ("a3", 0.0, 0.0, 1.0),
}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out/width", help="output root directory")
    parser.add_argument("--resolution", type=int, default=401)
    parser.add_argument("--curve-points", type=int, default=201)
    args = parser.parse_args()
    root = Path(args.out)

    config = parse_config_text(
        MAP_CONFIG.replace("401", str(args.resolution)), out_override=str(root / "map")
    )
    for path in run(config):
        print(path)

    for name, (fixed, fixed_value, lo, hi) in CURVE_SWEEPS.items():
        text = f"""
scenario = width-curves
curves.fixed = {fixed}
curves.fixed_value = {fixed_value}
curves.sweep_min = {lo}
curves.sweep_max = {hi}
curves.points = {args.curve_points}
"""
        for path in run(parse_config_text(text, out_override=str(root / name))):
            print(path)


if __name__ == "__main__":
    main()
