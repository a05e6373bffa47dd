#!/usr/bin/env python3
"""Per-run defect totals for the wave-soldering data.

Board 2 of run 11 is dropped as an outlier and the remaining two boards are
scaled by 3/2, rounding half up. Usage:

    wave_totals.py data/wave_boards.csv > data/wave_y.csv
"""
import csv
import math
import sys
from fractions import Fraction

OUTLIERS = {(11, 2)}


def totals(rows):
    for row in rows:
        run = int(row["run"])
        boards = [int(row[f"board{b}"]) for b in (1, 2, 3)]
        kept = [v for b, v in enumerate(boards, 1) if (run, b) not in OUTLIERS]
        weighted = Fraction(sum(kept) * len(boards), len(kept))
        yield math.floor(weighted + Fraction(1, 2))


def main():
    path = sys.argv[1] if len(sys.argv) > 1 else "data/wave_boards.csv"
    with open(path, newline="") as f:
        for t in totals(csv.DictReader(f)):
            print(t)


if __name__ == "__main__":
    main()
