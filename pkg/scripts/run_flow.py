"""Integrate the shipped collar field from a point on its core and print the deck word."""

import sys
from pathlib import Path

from hamsurf.cli import main

ROOT = Path(__file__).resolve().parent.parent

if __name__ == "__main__":
    sys.exit(main(["flow", "--config", str(ROOT / "configs" / "flow.json"),
                   "--out", str(ROOT / "out" / "flow")] + sys.argv[1:]))
