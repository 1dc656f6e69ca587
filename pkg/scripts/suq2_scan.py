"""Real type of the SU_q(2) spin blocks over a grid of q.

    python3 scripts/suq2_scan.py [--max-spin 5/2] [--points 9]
"""

import argparse
from fractions import Fraction

import numpy as np

from qds.dsfamily import suq2_block


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--max-spin", default="5/2")
    p.add_argument("--points", type=int, default=9)
    args = p.parse_args()
    top = Fraction(args.max_spin)
    mags = np.geomspace(0.1, 10, args.points)
    qs = np.concatenate([-mags[::-1], mags])
    print("spin " + " ".join(f"{q:>7.3g}" for q in qs))
    for two_s in range(int(2 * top) + 1):
        spin = Fraction(two_s, 2)
        cells = []
        for q in qs:
            res = suq2_block(spin, float(q))
            worst = max(res.residuals.values())
            cells.append(f"{res.classification.describe():>7s}" if worst < 1e-9 else f"{'?':>7s}")
        print(f"{str(spin):>4s} " + " ".join(cells))


if __name__ == "__main__":
    main()
