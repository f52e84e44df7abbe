"""Certified comparison of 9*s1 with 1 for p = 3 under each wild-factor mode,
optionally next to the empirical proportion.

usage: python scripts/disc_verdicts.py [--truncation 1e5] [--empirical-bound 1e24]
"""

import argparse

from abext.asymptotics import WILD_MODES, disc_prob_s1, empirical_disc_prob
from abext.cli import parse_bound


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--qs", default="2,3,5,7,11,13")
    ap.add_argument("--truncation", type=parse_bound, default=10 ** 5)
    ap.add_argument("--empirical-bound", type=parse_bound, default=None)
    args = ap.parse_args()
    p = args.p
    for q in map(int, args.qs.split(",")):
        cells = []
        for mode in WILD_MODES:
            if q == p and mode != "exact":
                continue
            r = disc_prob_s1(p, q, args.truncation, mode)
            cells.append(f"{mode}: [{r.scaled[0]:.4f}, {r.scaled[1]:.4f}] {r.verdict}")
        line = f"q={q:>3}  " + " | ".join(cells)
        if args.empirical_bound:
            e = empirical_disc_prob(p, q, args.empirical_bound)
            line += f" | empirical {p * p * float(e.value):.3f} (n={e.denominator})"
        print(line)


if __name__ == "__main__":
    main()
