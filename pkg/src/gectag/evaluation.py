"""Edit-level precision, recall and F0.5.

Edits are extracted with the same alignment the preprocessor uses, and a
hypothesis edit counts only if it matches a reference edit exactly (source
range and replacement). There is no error typing and no search over
alternative edit segmentations, so scores are comparable only between runs
of this tool, not with the official M2 scorer or ERRANT.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from .alignment import Joint, Tokens, align, expand_hyphens, rejoin, tokenize
from .errors import LengthMismatch
from .morphology import NounExceptionTable, VerbDictionary


@dataclass(frozen=True, order=True)
class EditSpan:
    start: int
    end: int
    replacement: Tuple[str, ...]

    def __str__(self) -> str:
        return f"[{self.start},{self.end}) -> {' '.join(self.replacement) or '∅'}"


def extract_edits(
    source: Tokens,
    other: Tokens,
    verbs: Optional[VerbDictionary] = None,
    nouns: Optional[NounExceptionTable] = None,
) -> List[EditSpan]:
    """Maximal runs of non-matching alignment steps, widened so no span
    cuts through a hyphenated target token."""
    src = tokenize(source)
    units = expand_hyphens(tokenize(other))
    ops = align(src, units, verbs, nouns)
    runs: List[List[int]] = []  # [src_start, src_end, tgt_start, tgt_end, first_op, last_op]
    for k, op in enumerate(ops):
        if op.kind == "equal":
            continue
        if runs and runs[-1][5] == k - 1:
            run = runs[-1]
            run[1], run[3], run[5] = op.src[1], op.tgt[1], k
        else:
            runs.append([op.src[0], op.src[1], op.tgt[0], op.tgt[1], k, k])

    def cuts_compound(j: int) -> bool:
        return 0 < j < len(units) and (isinstance(units[j], Joint) or isinstance(units[j - 1], Joint))

    widened: List[List[int]] = []
    for run in runs:
        while cuts_compound(run[2]) and run[4] > 0:
            run[4] -= 1
            prev = ops[run[4]]
            run[0], run[2] = prev.src[0], prev.tgt[0]
        while cuts_compound(run[3]) and run[5] < len(ops) - 1:
            run[5] += 1
            nxt = ops[run[5]]
            run[1], run[3] = nxt.src[1], nxt.tgt[1]
        if widened and run[4] <= widened[-1][5] + 1:
            # widening made two runs touch or overlap
            last = widened[-1]
            last[1], last[3], last[5] = max(last[1], run[1]), max(last[3], run[3]), max(last[5], run[5])
        else:
            widened.append(run)
    return [EditSpan(r[0], r[1], tuple(str(t) for t in rejoin(units[r[2] : r[3]]))) for r in widened]


@dataclass(frozen=True)
class EvalScores:
    precision: float
    recall: float
    f05: float
    tp: int
    fp: int
    fn: int

    def report(self) -> str:
        return (
            f"TP={self.tp} FP={self.fp} FN={self.fn}  "
            f"P={100 * self.precision:.1f} R={100 * self.recall:.1f} F0.5={100 * self.f05:.1f}"
        )


def f_beta(precision: float, recall: float, beta: float = 0.5) -> float:
    b2 = beta * beta
    denom = b2 * precision + recall
    if denom == 0:
        return 0.0
    return (1 + b2) * precision * recall / denom


def scores_from_counts(tp: int, fp: int, fn: int) -> EvalScores:
    """Micro-averaged scores. P is 1 with no hypothesis edits, R is 1 with no reference edits."""
    p = tp / (tp + fp) if tp + fp else 1.0
    r = tp / (tp + fn) if tp + fn else 1.0
    return EvalScores(p, r, f_beta(p, r), tp, fp, fn)


def sentence_counts(source: Tokens, hypothesis: Tokens, reference: Tokens, verbs=None, nouns=None) -> Tuple[int, int, int]:
    hyp = set(extract_edits(source, hypothesis, verbs, nouns))
    ref = set(extract_edits(source, reference, verbs, nouns))
    tp = len(hyp & ref)
    return tp, len(hyp) - tp, len(ref) - tp


def score(
    sources: Sequence[Tokens],
    hypotheses: Sequence[Tokens],
    references: Sequence[Tokens],
    verbs: Optional[VerbDictionary] = None,
    nouns: Optional[NounExceptionTable] = None,
) -> EvalScores:
    if not len(sources) == len(hypotheses) == len(references):
        raise LengthMismatch(
            f"{len(sources)} sources, {len(hypotheses)} hypotheses, {len(references)} references"
        )
    tp = fp = fn = 0
    for s, h, r in zip(sources, hypotheses, references):
        a, b, c = sentence_counts(s, h, r, verbs, nouns)
        tp, fp, fn = tp + a, fp + b, fn + c
    return scores_from_counts(tp, fp, fn)
