"""Leading constants for small groups next to the empirical count ratio.

usage: python scripts/constant_table.py [--truncation 1e6] [--bound 1e6]
"""

import argparse
import math

from abext.asymptotics import leading_constant, pole_order
from abext.cli import parse_bound
from abext.counting import counting_by_name, fairness
from abext.enumeration import EnumerationQuery, fast_count
from abext.groups import FiniteAbelianGroup

GROUPS = [(2,), (3,), (4,), (2, 2), (5,), (8,), (2, 4)]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--truncation", type=parse_bound, default=10 ** 5)
    ap.add_argument("--bound", type=parse_bound, default=10 ** 6)
    ap.add_argument("--counting", default="conductor")
    args = ap.parse_args()
    print(f"{'group':>8} {'w':>2} {'constant lo':>12} {'constant hi':>12} {'N(X)/X^a log^(w-1)':>20}")
    for f in GROUPS:
        G = FiniteAbelianGroup(f)
        C = counting_by_name(G, args.counting)
        if not fairness(C).fair:
            continue
        rep = leading_constant(C, args.truncation)
        w = int(pole_order(C))
        X = args.bound
        n = fast_count(EnumerationQuery(G, C, X)).total
        emp = n / (X ** (1 / C.m) * math.log(X) ** (w - 1))
        print(f"{'x'.join(map(str, f)):>8} {w:>2} {float(rep.lo):12.6f} {float(rep.hi):12.6f} {emp:20.6f}")


if __name__ == "__main__":
    main()
