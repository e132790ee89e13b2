"""Run the shipped experiment configurations and write reports under out/."""

import argparse
import sys
from pathlib import Path

from hamsurf.cli import main

ROOT = Path(__file__).resolve().parent.parent
RUNS = [
    ("vanishing", "vanishing"),
    ("vanishing", "vanishing_bump"),
    ("vanishing", "vanishing_contrast"),
    ("unboundedness", "unboundedness"),
    ("continuity", "continuity"),
]

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int)
    ap.add_argument("--seed", type=int)
    args = ap.parse_args()
    worst = 0
    for kind, name in RUNS:
        print(f"== {kind} ({name})")
        argv = ["experiment", kind, "--config", str(ROOT / "configs" / f"{name}.json"),
                "--out", str(ROOT / "out" / name)]
        if args.samples:
            argv += ["--samples", str(args.samples)]
        if args.seed is not None:
            argv += ["--seed", str(args.seed)]
        worst = max(worst, main(argv))
    sys.exit(worst)
