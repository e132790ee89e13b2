"""Empirical defect of a few counting patterns as the word length grows."""

import argparse

from hamsurf.quasimorphism import CountingQM
from hamsurf.words import SurfaceGroup

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--genus", type=int, default=2)
    args = ap.parse_args()
    group = SurfaceGroup(args.genus)
    lengths = (5, 10, 20, 40)
    print("pattern".ljust(14) + "".join(f"L={n:<6}" for n in lengths))
    for pat in ("a1", "a1 b1", "a1 B1", "a1 a1 b1", "a1 b1 a1 B1"):
        qm = CountingQM(pat, group)
        row = [qm.defect_estimate(args.samples, n, args.seed) for n in lengths]
        print(pat.ljust(14) + "".join(f"{d:<8g}" for d in row))
