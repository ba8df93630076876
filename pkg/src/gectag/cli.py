"""Command-line interface: ``gectag <subcommand> ...``.

Exit status is 0 on success, 1 on usage errors and 2 on bad input data.
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import os
import sys
from collections import Counter
from typing import List, Optional, Sequence, TextIO

from . import tags as T
from .alignment import (
    COVERAGE_MODES,
    coverage,
    preprocess_pair,
    read_parallel,
    read_tagged,
    tag_counts,
    write_tagged,
)
from .decoder import InferenceTweaks, apply_tags, ensemble_average, iterate, read_predictions, write_predictions
from .errors import DataError, GecTagError
from .evaluation import score
from .morphology import (
    default_noun_exceptions,
    default_verb_dictionary,
    load_noun_exceptions,
    load_verb_dictionary,
)
from .synthetic import SyntheticCorpus, open_vocabulary
from .taggers import FileTagger, OracleTagger, UnigramModel, UnigramTagger, train_unigram

log = logging.getLogger("gectag")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _open_in(path: str) -> TextIO:
    if path == "-":
        return sys.stdin
    return open(path, encoding="utf-8")


@contextlib.contextmanager
def _reading(path: str):
    """Open a file and prefix data errors with its name."""
    f = _open_in(path)
    try:
        yield f
    except DataError as e:
        raise type(e)(f"{path}: {e}") from None
    finally:
        if f is not sys.stdin:
            f.close()


@contextlib.contextmanager
def _writing(path: Optional[str]):
    if path is None or path == "-":
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        yield f


def _resources(args):
    verbs = default_verb_dictionary()
    nouns = default_noun_exceptions()
    if getattr(args, "verbs", None):
        with _reading(args.verbs) as f:
            verbs = load_verb_dictionary(f)
    if getattr(args, "nouns", None):
        with _reading(args.nouns) as f:
            nouns = load_noun_exceptions(f)
    return verbs, nouns


def _load_vocab(path: str) -> T.TagVocabulary:
    with _reading(path) as f:
        return T.TagVocabulary.from_lines(f)


def _read_pairs(args) -> List:
    if args.pairs:
        with _reading(args.pairs) as f:
            return list(read_parallel(f))
    if not (args.source and args.target):
        raise UsageError("give --pairs or both --source and --target")
    with _reading(args.source) as s, _reading(args.target) as t:
        return list(read_parallel(s, t))


def _read_lines(path: str) -> List[List[str]]:
    with _reading(path) as f:
        return [line.split() for line in f]


def _parse_sizes(text: str) -> List[int]:
    try:
        sizes = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"--sizes must be comma-separated integers, got {text!r}") from None
    if not sizes:
        raise UsageError("--sizes is empty")
    return sizes


# -- subcommands ------------------------------------------------------------------


def cmd_build_vocab(args) -> None:
    counts: Counter = Counter()
    if args.counts:
        with _reading(args.counts) as f:
            counts.update(T.read_counts(f))
    if args.tagged:
        with _reading(args.tagged) as f:
            counts.update(tag_counts(read_tagged(f)))
    if not args.counts and not args.tagged:
        raise UsageError("give --counts and/or --tagged")
    vocab = T.build_vocabulary(counts, args.size)
    with _writing(args.output) as out:
        out.write(vocab.to_text())
    log.info("wrote %d tags (checksum %s)", len(vocab), vocab.checksum[:12])


def cmd_preprocess(args) -> None:
    verbs, nouns = _resources(args)
    vocab = _load_vocab(args.vocab) if args.vocab else None
    pairs = _read_pairs(args)
    tagged = [preprocess_pair(s, t, vocab, verbs, nouns) for s, t in pairs]
    with _writing(args.output) as out:
        write_tagged(tagged, out)
    if args.counts_out:
        with _writing(args.counts_out) as out:
            T.write_counts(tag_counts(tagged), out)
    uncovered = sum(t.uncovered for t in tagged)
    residual = sum(t.residual for t in tagged)
    log.info("%d pairs, %d residual, %d uncovered tags", len(tagged), residual, uncovered)


def cmd_coverage(args) -> None:
    verbs, nouns = _resources(args)
    sizes = _parse_sizes(args.sizes)
    pairs = _read_pairs(args)
    modes = COVERAGE_MODES if args.mode == "both" else (args.mode,)
    table = {mode: dict(coverage(pairs, sizes, mode, verbs, nouns)) for mode in modes}
    with _writing(args.output) as out:
        if args.tsv:
            out.write("size\t" + "\t".join(modes) + "\n")
            for size in sizes:
                out.write(f"{size}\t" + "\t".join(f"{table[m][size]:.6f}" for m in modes) + "\n")
        else:
            out.write(f"{'size':>8}" + "".join(f"{m:>12}" for m in modes) + "\n")
            for size in sizes:
                out.write(f"{size:>8}" + "".join(f"{100 * table[m][size]:>11.1f}%" for m in modes) + "\n")


def cmd_apply(args) -> None:
    verbs, nouns = _resources(args)
    with _reading(args.tagged) as f, _writing(args.output) as out:
        for sent in read_tagged(f):
            tokens, _ = apply_tags(sent.tokens, sent.tags, verbs, nouns)
            out.write(" ".join(tokens) + "\n")


def _make_tagger(args, sources, verbs, nouns):
    choice = args.tagger
    if choice == "oracle":
        if not args.references:
            raise UsageError("--tagger oracle needs --references")
        refs = _read_lines(args.references)
        if len(refs) != len(sources):
            raise DataError(f"{args.references}: {len(refs)} references for {len(sources)} sentences")
        vocab = _load_vocab(args.vocab) if args.vocab else open_vocabulary(refs)
        tagger = OracleTagger(vocab, verbs=verbs, nouns=nouns)
        for s, r in zip(sources, refs):
            tagger.add(s, r)
        return tagger, vocab
    if choice == "unigram":
        if not args.model:
            raise UsageError("--tagger unigram needs --model")
        with _reading(args.model) as f:
            model = UnigramModel.load(f)
        if args.vocab:
            vocab = _load_vocab(args.vocab)
        else:
            counts = Counter()
            for table in model.counts.values():
                counts.update(table)
            vocab = T.build_vocabulary(counts, max(33, len(counts) + 33))
        return UnigramTagger(model, vocab), vocab
    if choice.startswith("file:"):
        paths = [p for p in choice[len("file:") :].split(",") if p]
        if not paths or not args.vocab:
            raise UsageError("--tagger file:PATH[,PATH...] needs at least one path and --vocab")
        vocab = _load_vocab(args.vocab)
        return FileTagger.open(paths, vocab), vocab
    raise UsageError(f"unknown tagger {choice!r}; use oracle, unigram or file:PATH[,PATH...]")


def _iteration_report(traces, sources, references, max_iters, verbs, nouns, tsv: bool) -> str:
    rows = []
    for k in range(1, max_iters + 1):
        if not any(len(tr) >= k for tr in traces):
            break
        outputs, corrections = [], 0
        for tr in traces:
            rec = tr.records[min(k, len(tr)) - 1]
            outputs.append(list(rec.tokens))
            corrections += rec.cumulative
        row = {"iteration": k, "corrections": corrections}
        if references is not None:
            s = score(sources, outputs, references, verbs, nouns)
            row.update(P=s.precision, R=s.recall, F05=s.f05)
        rows.append(row)
    if tsv:
        keys = list(rows[0]) if rows else ["iteration", "corrections"]
        lines = ["\t".join(keys)]
        lines += ["\t".join(f"{r[k]:.6f}" if isinstance(r[k], float) else str(r[k]) for k in keys) for r in rows]
        return "\n".join(lines) + "\n"
    header = f"{'Iteration #':<12}"
    if references is not None:
        header += f"{'P':>7}{'R':>7}{'F0.5':>7}"
    header += f"{'# corr.':>9}"
    lines = [header]
    for r in rows:
        line = f"{'Iteration ' + str(r['iteration']):<12}"
        if references is not None:
            line += f"{100 * r['P']:>7.1f}{100 * r['R']:>7.1f}{100 * r['F05']:>7.1f}"
        line += f"{r['corrections']:>9}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def cmd_correct(args) -> None:
    verbs, nouns = _resources(args)
    sources = _read_lines(args.input)
    tagger, vocab = _make_tagger(args, sources, verbs, nouns)
    max_iters = args.max_iters
    if args.tagger.startswith("file:") and max_iters != 1:
        log.info("prediction files hold one pass per sentence; using --max-iters 1")
        max_iters = 1
    try:
        tweaks = InferenceTweaks(args.bias, args.min_error_prob, max_iters)
    except ValueError as e:
        raise UsageError(str(e)) from None
    traces = []
    with _writing(args.output) as out:
        for tokens in sources:
            corrected, trace = iterate(tokens, tagger, vocab, tweaks, verbs, nouns)
            traces.append(trace)
            out.write(" ".join(corrected) + "\n")
    if args.trace:
        references = _read_lines(args.references) if args.references else None
        report = _iteration_report(traces, sources, references, max_iters, verbs, nouns, args.tsv)
        with _writing(args.trace) as out:
            out.write(report)


def cmd_evaluate(args) -> None:
    verbs, nouns = _resources(args)
    sources = _read_lines(args.source)
    hyps = _read_lines(args.hypothesis)
    refs = _read_lines(args.reference)
    s = score(sources, hyps, refs, verbs, nouns)
    with _writing(args.output) as out:
        if args.tsv:
            out.write("tp\tfp\tfn\tP\tR\tF0.5\n")
            out.write(f"{s.tp}\t{s.fp}\t{s.fn}\t{s.precision:.6f}\t{s.recall:.6f}\t{s.f05:.6f}\n")
        else:
            out.write(s.report() + "\n")


def cmd_ensemble(args) -> None:
    vocab = _load_vocab(args.vocab)
    readers = []
    with contextlib.ExitStack() as stack:
        for path in args.predictions:
            f = stack.enter_context(_reading(path))
            readers.append(read_predictions(f, vocab.checksum, len(vocab)))
        out = stack.enter_context(_writing(args.output))
        count = 0
        while True:
            batch = [next(r, None) for r in readers]
            if all(p is None for p in batch):
                break
            if any(p is None for p in batch):
                raise DataError(f"prediction files differ in length (record {count + 1})")
            write_predictions([ensemble_average(batch)], vocab.checksum, out)
            count += 1
    log.info("averaged %d records from %d files", count, len(args.predictions))


def cmd_train_unigram(args) -> None:
    with _reading(args.tagged) as f:
        model = train_unigram(read_tagged(f))
    with _writing(args.output) as out:
        model.save(out)


def cmd_synth(args) -> None:
    corpus = SyntheticCorpus(seed=args.seed, error_rate=args.error_rate)
    with _writing(args.output) as out:
        for _ in range(args.n):
            p = corpus.pair()
            out.write(" ".join(p.source) + "\t" + " ".join(p.target) + "\n")


# -- parser ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gectag", description="Edit-tag preprocessing, decoding and scoring for GEC.")
    parser.add_argument("--seed", type=int, default=0, help="seed for anything randomized")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def resources(p):
        p.add_argument("--verbs", help="verb dictionary (token0_token1:tag0_tag1 lines)")
        p.add_argument("--nouns", help="noun exceptions (singular<TAB>plural)")

    def corpus(p):
        p.add_argument("--pairs", help="TSV file: source<TAB>target per line")
        p.add_argument("--source", help="source sentences, one per line")
        p.add_argument("--target", help="target sentences, one per line")

    p = sub.add_parser("build-vocab", help="count file or tagged corpus -> vocabulary file")
    p.add_argument("--counts", help="TSV rendered_tag<TAB>frequency")
    p.add_argument("--tagged", help="tagged TSV from 'preprocess'")
    p.add_argument("--size", type=int, default=5000)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_build_vocab)

    p = sub.add_parser("preprocess", help="sentence pairs -> tagged TSV")
    corpus(p)
    resources(p)
    p.add_argument("--vocab")
    p.add_argument("--counts-out", help="also write tag counts here")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("coverage", help="share of gold edits covered per vocabulary size")
    corpus(p)
    resources(p)
    p.add_argument("--sizes", default="100,1000,5000,10000")
    p.add_argument("--mode", choices=(*COVERAGE_MODES, "both"), default="all")
    p.add_argument("--tsv", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_coverage)

    p = sub.add_parser("apply", help="tagged TSV -> corrected text")
    p.add_argument("tagged")
    resources(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("correct", help="iterative correction with a tagger")
    p.add_argument("input", help="source sentences, one per line")
    p.add_argument("--tagger", default="oracle", help="oracle | unigram | file:PATH[,PATH...]")
    p.add_argument("--references", help="target sentences (oracle tagger, trace scores)")
    p.add_argument("--model", help="unigram model TSV")
    p.add_argument("--vocab")
    p.add_argument("--bias", type=float, default=0.0, help="confidence bias added to P(KEEP)")
    p.add_argument("--min-error-prob", type=float, default=0.0)
    p.add_argument("--max-iters", type=int, default=5)
    p.add_argument("--trace", help="write a per-iteration report here ('-' for stdout)")
    p.add_argument("--tsv", action="store_true", help="machine-readable trace")
    resources(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_correct)

    p = sub.add_parser("evaluate", help="edit-level P/R/F0.5")
    p.add_argument("--source", required=True)
    p.add_argument("--hypothesis", required=True)
    p.add_argument("--reference", required=True)
    p.add_argument("--tsv", action="store_true")
    resources(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("ensemble", help="average prediction files")
    p.add_argument("predictions", nargs="+")
    p.add_argument("--vocab", required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("train-unigram", help="tagged TSV -> unigram model TSV")
    p.add_argument("tagged")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_train_unigram)

    p = sub.add_parser("synth", help="synthetic sentence pairs (TSV)")
    p.add_argument("-n", type=int, default=1000)
    p.add_argument("--error-rate", type=float, default=0.15)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        args.func(args)
    except BrokenPipeError:
        # downstream reader went away (e.g. piped into head)
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return 0
    except UsageError as e:
        print(f"gectag {args.command}: error: {e}", file=sys.stderr)
        return 1
    except (DataError, OSError, UnicodeDecodeError) as e:
        print(f"gectag {args.command}: data error: {e}", file=sys.stderr)
        return 2
    except GecTagError as e:
        print(f"gectag {args.command}: error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
