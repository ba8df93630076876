#!/usr/bin/env python3
"""Generate synthetic pairs, correct them with the oracle tagger and report
how many reach their target and after how many passes.

    $ python scripts/round_trip_experiment.py -n 10000 --seed 0
"""

import argparse
import time
from collections import Counter

from gectag.decoder import InferenceTweaks, iterate
from gectag.synthetic import SyntheticCorpus, open_vocabulary
from gectag.taggers import OracleTagger


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("-n", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--error-rate", type=float, default=0.15)
    ap.add_argument("--max-iters", type=int, default=5)
    ap.add_argument("--show-failures", type=int, default=5)
    args = ap.parse_args()

    start = time.perf_counter()
    pairs = SyntheticCorpus(seed=args.seed, error_rate=args.error_rate).pairs(args.n)
    vocab = open_vocabulary([p.target for p in pairs])
    tagger = OracleTagger(vocab)
    for p in pairs:
        tagger.add(p.source, p.target)

    tweaks = InferenceTweaks(max_iterations=args.max_iters)
    passes = Counter()
    failures = []
    for p in pairs:
        out, trace = iterate(p.source, tagger, vocab, tweaks)
        if out == list(p.target):
            # the pass that produced the target; a final zero-correction pass only confirms it
            productive = [r.iteration for r in trace.records if r.corrections]
            passes[productive[-1] if productive else 0] += 1
        else:
            failures.append((p, out))
    elapsed = time.perf_counter() - start

    print(f"pairs: {len(pairs)}  vocabulary: {len(vocab)} tags  time: {elapsed:.1f}s")
    print(f"recovered: {len(pairs) - len(failures)} ({100 * (1 - len(failures) / len(pairs)):.2f}%)")
    print("passes needed:")
    for k in sorted(passes):
        print(f"  {k}: {passes[k]}")
    for p, out in failures[: args.show_failures]:
        print(f"FAILED  {' '.join(p.source)}\n  want  {' '.join(p.target)}\n  got   {' '.join(out)}")


if __name__ == "__main__":
    main()
