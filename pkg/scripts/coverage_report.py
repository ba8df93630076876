#!/usr/bin/env python3
"""Share of gold edits covered by vocabularies of several sizes, with and
without g-transformations.

Runs on a synthetic corpus unless a parallel corpus is given:

    $ python scripts/coverage_report.py
    $ python scripts/coverage_report.py --source src.txt --target tgt.txt
"""

import argparse
from collections import Counter

from gectag.alignment import coverage, gold_edits, read_parallel
from gectag.synthetic import SyntheticCorpus


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--source")
    ap.add_argument("--target")
    ap.add_argument("-n", type=int, default=3000, help="synthetic pairs when no corpus is given")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--sizes", default="33,50,100,300,1000,5000,10000")
    args = ap.parse_args()

    if args.source and args.target:
        with open(args.source, encoding="utf-8") as s, open(args.target, encoding="utf-8") as t:
            pairs = list(read_parallel(s, t))
    else:
        pairs = [(p.source, p.target) for p in SyntheticCorpus(seed=args.seed, error_rate=0.3).pairs(args.n)]
    sizes = [int(x) for x in args.sizes.split(",")]

    kinds = Counter()
    for src, tgt in pairs:
        for e in gold_edits(src, tgt):
            kinds["g-transformation" if e.tag.is_g else e.tag.core.value] += 1
    total = sum(kinds.values())
    print(f"{len(pairs)} pairs, {total} gold edits")
    for kind, n in kinds.most_common():
        print(f"  {kind:<18}{n:>8}  {100 * n / total:5.1f}%")

    basic = dict(coverage(pairs, sizes, "basic_only"))
    full = dict(coverage(pairs, sizes, "all"))
    print(f"\n{'size':>8}{'basic only':>12}{'all':>8}")
    for size in sizes:
        print(f"{size:>8}{100 * basic[size]:>11.1f}%{100 * full[size]:>7.1f}%")


if __name__ == "__main__":
    main()
