#!/usr/bin/env python3
"""Train the unigram tagger on synthetic pairs and sweep the KEEP bias and
the sentence-level error threshold on a held-out split.

    $ python scripts/tweak_sweep.py --train 4000 --test 1000
"""

import argparse
import itertools

from gectag import tags as T
from gectag.alignment import preprocess_pair, tag_counts
from gectag.decoder import InferenceTweaks, iterate
from gectag.evaluation import score
from gectag.synthetic import SyntheticCorpus
from gectag.taggers import UnigramTagger, train_unigram


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--train", type=int, default=4000)
    ap.add_argument("--test", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--biases", default="0,0.1,0.2,0.3,0.5")
    ap.add_argument("--thresholds", default="0,0.4,0.6,0.8")
    ap.add_argument("--max-iters", type=int, default=3)
    args = ap.parse_args()

    pairs = SyntheticCorpus(seed=args.seed).pairs(args.train + args.test)
    train, held = pairs[: args.train], pairs[args.train :]
    tagged = [preprocess_pair(p.source, p.target) for p in train]
    vocab = T.build_vocabulary(tag_counts(tagged), 5000)
    tagger = UnigramTagger(train_unigram(tagged), vocab)
    sources = [p.source for p in held]
    refs = [p.target for p in held]

    copy = score(sources, sources, refs)
    print(f"copy baseline: {copy.report()}")
    print(f"{'bias':>6}{'thresh':>8}{'P':>7}{'R':>7}{'F0.5':>7}")
    for bias, thresh in itertools.product(
        [float(x) for x in args.biases.split(",")], [float(x) for x in args.thresholds.split(",")]
    ):
        tweaks = InferenceTweaks(bias, thresh, args.max_iters)
        hyps = [iterate(s, tagger, vocab, tweaks)[0] for s in sources]
        s = score(sources, hyps, refs)
        print(f"{bias:>6.2f}{thresh:>8.2f}{100 * s.precision:>7.1f}{100 * s.recall:>7.1f}{100 * s.f05:>7.1f}")


if __name__ == "__main__":
    main()
