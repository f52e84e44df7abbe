"""Split-completely proportions among unramified primes, at growing bounds.

usage: python scripts/chebotarev_trend.py --group 9 --primes 2,7,19 --bounds 1e5,1e6,1e7
"""

import argparse

from abext.cli import parse_bounds
from abext.counting import counting_by_name
from abext.groups import parse_group
from abext.stats import chebotarev_report


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--group", default="9")
    ap.add_argument("--counting", default="conductor")
    ap.add_argument("--primes", default="2,7,19")
    ap.add_argument("--bounds", type=parse_bounds, default=[10 ** 5, 10 ** 6])
    args = ap.parse_args()
    G = parse_group(args.group)
    C = counting_by_name(G, args.counting)
    for p in map(int, args.primes.split(",")):
        rep = chebotarev_report(C, args.bounds, p)
        for c in rep["classes"]:
            errs = " ".join(f"{e:.4f}" for e in c["relative_error"])
            print(f"p={p:<3} primes={c['num_primes']:<2} target={c['target']:<6} rel.err {errs}  {c['trend']}")


if __name__ == "__main__":
    main()
