"""Tag application, inference tweaks, iterative correction and ensembling."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, List, Optional, Protocol, Sequence, TextIO, Tuple

import numpy as np

from . import tags as T
from .errors import (
    ChecksumMismatch,
    LengthMismatch,
    MalformedRecord,
    NotApplicable,
    ShapeMismatch,
    TaggerFailure,
)
from .morphology import (
    HYPHEN,
    NounExceptionTable,
    VerbDictionary,
    apply_g,
    default_noun_exceptions,
    default_verb_dictionary,
)
from .tags import Core, Tag, TagVocabulary

NORMALIZATION_TOL = 1e-6


@dataclass(frozen=True)
class InferenceTweaks:
    confidence_bias: float = 0.0
    min_error_prob: float = 0.0
    max_iterations: int = 5

    def __post_init__(self):
        if not math.isfinite(self.confidence_bias) or self.confidence_bias < 0:
            raise ValueError(f"confidence_bias must be finite and >= 0, got {self.confidence_bias}")
        if not 0.0 <= self.min_error_prob <= 1.0:
            raise ValueError(f"min_error_prob must lie in [0, 1], got {self.min_error_prob}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")


# published (bias, threshold) settings per encoder and ensemble
PUBLISHED_TWEAKS = {
    "bert": InferenceTweaks(0.10, 0.41),
    "roberta": InferenceTweaks(0.20, 0.50),
    "xlnet": InferenceTweaks(0.35, 0.66),
    "roberta+xlnet": InferenceTweaks(0.24, 0.45),
    "bert+roberta+xlnet": InferenceTweaks(0.16, 0.40),
}


@dataclass
class PredictionMatrix:
    """Tagger output for one sentence.

    ``tag_probs`` has one row per token, dense over vocabulary ids.
    """

    tag_probs: np.ndarray
    error_probs: np.ndarray
    sentence_error_prob: float
    tokens: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        self.tag_probs = np.asarray(self.tag_probs, dtype=np.float64)
        self.error_probs = np.asarray(self.error_probs, dtype=np.float64)
        if self.tag_probs.ndim != 2:
            raise ShapeMismatch(f"tag_probs must be 2-D, got shape {self.tag_probs.shape}")
        if self.error_probs.shape != (self.tag_probs.shape[0],):
            raise ShapeMismatch(
                f"{self.tag_probs.shape[0]} rows but {self.error_probs.shape[0]} error probabilities"
            )
        if self.tokens is not None:
            self.tokens = tuple(self.tokens)
            if len(self.tokens) != self.tag_probs.shape[0]:
                raise ShapeMismatch(f"{len(self.tokens)} tokens but {self.tag_probs.shape[0]} rows")
        self.sentence_error_prob = float(self.sentence_error_prob)

    @classmethod
    def from_probs(
        cls,
        tag_probs,
        keep_id: int,
        error_probs=None,
        sentence_error_prob: Optional[float] = None,
        tokens: Optional[Sequence[str]] = None,
    ) -> "PredictionMatrix":
        """Fill in missing detection outputs: per-token error probability
        defaults to 1 - P(KEEP), the sentence value to the per-token maximum."""
        probs = np.asarray(tag_probs, dtype=np.float64)
        if probs.ndim != 2:
            raise ShapeMismatch(f"tag_probs must be 2-D, got shape {probs.shape}")
        if error_probs is None:
            error_probs = np.clip(1.0 - probs[:, keep_id], 0.0, 1.0)
        error_probs = np.asarray(error_probs, dtype=np.float64)
        if sentence_error_prob is None:
            sentence_error_prob = float(error_probs.max()) if error_probs.size else 0.0
        return cls(probs, error_probs, sentence_error_prob, None if tokens is None else tuple(tokens))

    @property
    def n_tokens(self) -> int:
        return self.tag_probs.shape[0]

    @property
    def vocab_size(self) -> int:
        return self.tag_probs.shape[1]

    def validate(self, vocab_size: Optional[int] = None) -> None:
        if vocab_size is not None and self.vocab_size != vocab_size:
            raise ShapeMismatch(f"rows have {self.vocab_size} entries, vocabulary has {vocab_size}")
        if self.n_tokens:
            sums = self.tag_probs.sum(axis=1)
            if np.any(np.abs(sums - 1.0) > NORMALIZATION_TOL):
                raise ShapeMismatch(f"rows not normalized (sums {sums.min()}..{sums.max()})")
            if np.any(self.tag_probs < 0):
                raise ShapeMismatch("negative probabilities")
        for p in (*self.error_probs, self.sentence_error_prob):
            if not 0.0 <= p <= 1.0:
                raise ShapeMismatch(f"error probability {p} outside [0, 1]")


# -- applying tags -----------------------------------------------------------


def _own_output(token, tag, verbs, nouns) -> Tuple[List[str], bool]:
    """Output of a token under a non-MERGE tag, and whether the tag took effect.

    A tag whose output equals the input (CASE_LOWER on a lowercase word,
    REPLACE_x on x) does not count as a correction.
    """
    core = tag.core
    if tag.is_keep:
        return [token], False
    if core is Core.DELETE:
        return [], True
    if core is Core.APPEND:
        return [token, tag.suffix], True
    if core is Core.REPLACE:
        return [tag.suffix], tag.suffix != token
    try:
        out = apply_g(token, tag, None, verbs, nouns)
        return out, out != [token]
    except NotApplicable:
        return [token], False


def apply_tags(
    tokens: Sequence[str],
    tags: Sequence[Tag],
    verbs: Optional[VerbDictionary] = None,
    nouns: Optional[NounExceptionTable] = None,
) -> Tuple[List[str], int]:
    """Apply one tag per token in a single left-to-right pass.

    A MERGE joins the token to the first output of the next surviving token
    (after that token's own tag). A MERGE with nothing to join degrades to
    KEEP. Returns the new tokens and the number of tags that took effect.
    """
    if len(tokens) != len(tags):
        raise LengthMismatch(f"{len(tokens)} tokens but {len(tags)} tags")
    verbs = verbs if verbs is not None else default_verb_dictionary()
    nouns = nouns if nouns is not None else default_noun_exceptions()
    out: List[str] = []
    applied = 0
    pending_sep: Optional[str] = None  # separator owed by an earlier MERGE
    for token, tag in zip(tokens, tags):
        if tag.core is Core.MERGE:
            produced, sep = [token], ("" if tag.suffix == "SPACE" else HYPHEN)
        else:
            produced, took_effect = _own_output(token, tag, verbs, nouns)
            applied += took_effect
            sep = None
        if pending_sep is not None and produced:
            out[-1] = out[-1] + pending_sep + produced[0]
            applied += 1
            produced = produced[1:]
            pending_sep = None
        out.extend(produced)
        if sep is not None:
            pending_sep = sep
    return out, applied


# -- choosing tags -------------------------------------------------------------


def choose_tags(pred: PredictionMatrix, vocab: TagVocabulary, tweaks: InferenceTweaks = InferenceTweaks()) -> List[Tag]:
    """Gate on the sentence error probability, then argmax with the KEEP bias.

    The bias is added to P(KEEP) without renormalizing. Ties go to KEEP, then
    to the lowest id. UNKNOWN and PADDING decode as KEEP.
    """
    n = pred.n_tokens
    if pred.vocab_size != len(vocab):
        raise ShapeMismatch(f"prediction rows have {pred.vocab_size} entries, vocabulary has {len(vocab)}")
    if n == 0 or pred.sentence_error_prob < tweaks.min_error_prob:
        return [T.KEEP] * n
    keep = vocab.keep_id
    scores = pred.tag_probs.copy()
    scores[:, keep] += tweaks.confidence_bias
    best = scores.argmax(axis=1)
    best = np.where(scores[:, keep] >= scores[np.arange(n), best], keep, best)
    chosen = []
    for tag_id in best:
        tag = vocab.tag_of(int(tag_id))
        chosen.append(T.KEEP if tag.is_keep else tag)
    return chosen


# -- iterating ------------------------------------------------------------------


class Tagger(Protocol):
    vocab: TagVocabulary

    def predict(self, tokens: Sequence[str]) -> PredictionMatrix: ...


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    tokens: Tuple[str, ...]
    corrections: int
    cumulative: int


@dataclass
class IterationTrace:
    source: Tuple[str, ...]
    records: List[IterationRecord] = field(default_factory=list)
    converged: bool = False  # stopped on a pass with no corrections

    def __len__(self) -> int:
        return len(self.records)

    @property
    def total_corrections(self) -> int:
        return self.records[-1].cumulative if self.records else 0

    def report(self) -> str:
        lines = [f"{'iteration':>9}  {'# corr.':>7}  sentence", f"{'orig.':>9}  {'-':>7}  {' '.join(self.source)}"]
        for r in self.records:
            lines.append(f"{r.iteration:>9}  {r.cumulative:>7}  {' '.join(r.tokens)}")
        return "\n".join(lines)


def iterate(
    tokens: Sequence[str],
    tagger: Tagger,
    vocab: TagVocabulary,
    tweaks: InferenceTweaks = InferenceTweaks(),
    verbs: Optional[VerbDictionary] = None,
    nouns: Optional[NounExceptionTable] = None,
) -> Tuple[List[str], IterationTrace]:
    """Tag, choose and apply until a pass changes nothing or the cap is hit."""
    tagger_vocab = getattr(tagger, "vocab", None)
    if tagger_vocab is not None and tagger_vocab.checksum != vocab.checksum:
        raise ChecksumMismatch("tagger vocabulary differs from decoding vocabulary")
    current = list(tokens)
    trace = IterationTrace(tuple(tokens))
    cumulative = 0
    for k in range(1, tweaks.max_iterations + 1):
        try:
            pred = tagger.predict(current)
        except Exception as e:
            raise TaggerFailure(k, e) from e
        if pred.n_tokens != len(current):
            raise TaggerFailure(k, ShapeMismatch(f"{pred.n_tokens} rows for {len(current)} tokens"))
        chosen = choose_tags(pred, vocab, tweaks)
        current, applied = apply_tags(current, chosen, verbs, nouns)
        cumulative += applied
        trace.records.append(IterationRecord(k, tuple(current), applied, cumulative))
        if applied == 0:
            trace.converged = True
            break
    return current, trace


# -- ensembling ------------------------------------------------------------------


def _order_free_mean(stack: np.ndarray) -> np.ndarray:
    # offset from the elementwise minimum, summed in sorted order: exact for
    # identical inputs and independent of argument order
    low = stack.min(axis=0)
    return low + np.sort(stack - low, axis=0).sum(axis=0) / stack.shape[0]


def ensemble_average(preds: Sequence[PredictionMatrix]) -> PredictionMatrix:
    """Elementwise mean of tag distributions and error probabilities."""
    if not preds:
        raise ShapeMismatch("nothing to average")
    shape = preds[0].tag_probs.shape
    for p in preds[1:]:
        if p.tag_probs.shape != shape:
            raise ShapeMismatch(f"shape {p.tag_probs.shape} differs from {shape}")
    tokens = preds[0].tokens
    if any(p.tokens is not None and tokens is not None and p.tokens != tokens for p in preds):
        raise ShapeMismatch("predictions are for different sentences")
    return PredictionMatrix(
        _order_free_mean(np.stack([p.tag_probs for p in preds])),
        _order_free_mean(np.stack([p.error_probs for p in preds])),
        float(_order_free_mean(np.array([[p.sentence_error_prob] for p in preds]))[0]),
        tokens,
    )


# -- wire format ------------------------------------------------------------------


def dump_record(pred: PredictionMatrix, checksum: str) -> str:
    record = {
        "tokens": list(pred.tokens) if pred.tokens is not None else None,
        "tag_probs": pred.tag_probs.tolist(),
        "error_probs": pred.error_probs.tolist(),
        "sentence_error_prob": pred.sentence_error_prob,
        "vocab_checksum": checksum,
    }
    return json.dumps(record, ensure_ascii=False)


def write_predictions(preds: Iterable[PredictionMatrix], checksum: str, f: TextIO) -> None:
    for pred in preds:
        f.write(dump_record(pred, checksum) + "\n")


def parse_record(line: str, checksum: Optional[str] = None, vocab_size: Optional[int] = None) -> PredictionMatrix:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as e:
        raise MalformedRecord(f"invalid JSON: {e}") from None
    if not isinstance(record, dict):
        raise MalformedRecord("record is not a JSON object")
    missing = {"tag_probs", "vocab_checksum"} - record.keys()
    if missing:
        raise MalformedRecord(f"missing fields {sorted(missing)}")
    if checksum is not None and record["vocab_checksum"] != checksum:
        raise ChecksumMismatch(f"vocabulary checksum {record['vocab_checksum']} != {checksum}")
    try:
        probs = np.asarray(record["tag_probs"], dtype=np.float64)
        if probs.size == 0:
            probs = probs.reshape(0, vocab_size or 0)
        tokens = record.get("tokens")
        if vocab_size is not None and probs.shape[1] != vocab_size:
            raise ShapeMismatch(f"rows have {probs.shape[1]} entries, vocabulary has {vocab_size}")
        error_probs = record.get("error_probs")
        sent = record.get("sentence_error_prob")
        if error_probs is None:
            raise MalformedRecord("missing error_probs")
        pred = PredictionMatrix(probs, np.asarray(error_probs, dtype=np.float64), sent if sent is not None else max(error_probs, default=0.0), tokens)
        pred.validate(vocab_size)
    except (ValueError, TypeError, IndexError) as e:
        raise MalformedRecord(str(e)) from None
    return pred


def read_predictions(f: TextIO, checksum: Optional[str] = None, vocab_size: Optional[int] = None) -> Iterator[PredictionMatrix]:
    for lineno, line in enumerate(f, 1):
        if not line.strip():
            continue
        try:
            yield parse_record(line, checksum, vocab_size)
        except (MalformedRecord, ChecksumMismatch) as e:
            raise type(e)(f"line {lineno}: {e}") from None
