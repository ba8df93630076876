"""Turn (source, target) sentence pairs into one edit tag per source token.

The pipeline has three steps:

1. ``map_tokens`` aligns source tokens to target tokens with a Levenshtein
   dynamic program in which any substitution reachable by a g-transformation
   costs nothing, and assigns every source token a contiguous target
   subsequence.
2. ``transformations_for_mapping`` lists the tags that rewrite a source
   token into its subsequence.
3. ``collapse`` keeps the first non-KEEP tag per token. Anything left over is
   deferred to the next correction iteration.

Hyphenated target tokens are split into pieces around a :class:`Joint` so
that ``ten years old -> ten-year-old`` can be expressed as per-token MERGE
tags instead of one opaque REPLACE.
"""

from __future__ import annotations

import functools
import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, TextIO, Tuple, Union

from . import tags as T
from .errors import EmptyCorpus, MalformedEntry, MalformedTag
from .morphology import (
    HYPHEN,
    NounExceptionTable,
    VerbDictionary,
    apply_g,
    candidate_g,
    default_noun_exceptions,
    default_verb_dictionary,
)
from .tags import Core, Tag, TagVocabulary

Tokens = Union[str, Sequence[str]]


class Joint(str):
    """The hyphen between two pieces of one hyphenated target token.

    Compares equal to ``"-"`` but is distinguishable from a free-standing
    dash token with ``isinstance``.
    """

    __slots__ = ()

    def __repr__(self) -> str:
        return "JOINT"


JOINT = Joint(HYPHEN)


def tokenize(text: Tokens) -> List[str]:
    if isinstance(text, str):
        return text.split()
    return list(text)


def expand_hyphens(tokens: Sequence[str]) -> List[str]:
    """``["ten-year-old"]`` -> ``["ten", JOINT, "year", JOINT, "old"]``."""
    units: List[str] = []
    for tok in tokens:
        parts = tok.split(HYPHEN)
        if len(parts) > 1 and all(parts):
            for k, part in enumerate(parts):
                if k:
                    units.append(JOINT)
                units.append(part)
        else:
            units.append(tok)
    return units


def rejoin(units: Sequence[str]) -> List[str]:
    """Inverse of :func:`expand_hyphens` on a slice. Dangling joints survive as ``JOINT``."""
    out: List[str] = []
    glue = False
    for u in units:
        if isinstance(u, Joint):
            if glue or not out or isinstance(out[-1], Joint):
                out.append(JOINT)
            else:
                glue = True
            continue
        if glue:
            out[-1] = str(out[-1]) + HYPHEN + u
            glue = False
        else:
            out.append(str(u))
    if glue:
        out.append(JOINT)
    return out


# -- step 1: alignment --------------------------------------------------------


@dataclass(frozen=True)
class AlignOp:
    """One step of the alignment path.

    kind is one of ``equal``, ``g``, ``sub``, ``merge`` (two source tokens,
    one target token), ``del`` or ``ins``. Ranges are half-open; target
    indices refer to hyphen-expanded units.
    """

    kind: str
    src: Tuple[int, int]
    tgt: Tuple[int, int]
    tag: Optional[Tag] = None


@functools.lru_cache(maxsize=1 << 18)
def _g_cached(source, target, verbs, nouns):
    return candidate_g(source, target, verbs, nouns)


_INF = float("inf")


def _single_windows(units: Sequence[str], j: int) -> List[int]:
    """Start positions p such that units[p:j] rejoins to one token."""
    if j == 0 or isinstance(units[j - 1], Joint):
        return []
    starts = [j - 1]
    p = j - 1
    while p >= 2 and isinstance(units[p - 1], Joint) and not isinstance(units[p - 2], Joint):
        p -= 2
        starts.append(p)
    return starts


def align(
    source: Sequence[str],
    units: Sequence[str],
    verbs: Optional[VerbDictionary] = None,
    nouns: Optional[NounExceptionTable] = None,
    use_g: bool = True,
) -> List[AlignOp]:
    """Minimum-cost alignment path between source tokens and target units.

    Costs: match, g-reachable substitution, g-reachable split (1 -> 2) and
    merge (2 -> 1) are free; any other substitution, deletion or insertion
    costs 1. Ties prefer diagonal moves, then merges, deletions, insertions.
    """
    verbs = verbs if verbs is not None else default_verb_dictionary()
    nouns = nouns if nouns is not None else default_noun_exceptions()
    n, m = len(source), len(units)
    cost = [[_INF] * (m + 1) for _ in range(n + 1)]
    back: List[List[Optional[AlignOp]]] = [[None] * (m + 1) for _ in range(n + 1)]
    cost[0][0] = 0
    windows = [_single_windows(units, j) for j in range(m + 1)]
    strings = {}

    def window_text(p, j):
        key = (p, j)
        if key not in strings:
            strings[key] = "".join(units[p:j])
        return strings[key]

    for i in range(n + 1):
        s = source[i - 1] if i else None
        for j in range(m + 1):
            if i == 0 and j == 0:
                continue
            best, op = _INF, None
            if i:
                # one source token -> one target token
                for p in windows[j]:
                    prev = cost[i - 1][p]
                    if prev == _INF:
                        continue
                    w = window_text(p, j)
                    if w == s:
                        c, step = 0, AlignOp("equal", (i - 1, i), (p, j))
                    else:
                        g = _g_cached(s, (w,), verbs, nouns) if use_g else None
                        if g is not None:
                            c, step = 0, AlignOp("g", (i - 1, i), (p, j), g)
                        else:
                            c, step = 1, AlignOp("sub", (i - 1, i), (p, j))
                    if prev + c < best:
                        best, op = prev + c, step
                # one source token -> two target tokens
                if use_g and HYPHEN in s:
                    for p in windows[j]:
                        q = p - 1
                        if q < 0 or isinstance(units[q], Joint) or cost[i - 1][q] == _INF:
                            continue
                        pair = (str(units[q]), window_text(p, j))
                        g = _g_cached(s, pair, verbs, nouns)
                        if g is not None and cost[i - 1][q] < best:
                            best, op = cost[i - 1][q], AlignOp("g", (i - 1, i), (q, j), g)
            if use_g and i >= 2:
                # two source tokens -> one target token
                s0 = source[i - 2]
                for p in windows[j]:
                    prev = cost[i - 2][p]
                    if prev >= best:
                        continue
                    w = window_text(p, j)
                    if w == s0 + s:
                        best, op = prev, AlignOp("merge", (i - 2, i), (p, j), T.Tag(Core.MERGE, "SPACE"))
                    elif w == s0 + HYPHEN + s:
                        best, op = prev, AlignOp("merge", (i - 2, i), (p, j), T.Tag(Core.MERGE, "HYPHEN"))
            if i and cost[i - 1][j] + 1 < best:
                best, op = cost[i - 1][j] + 1, AlignOp("del", (i - 1, i), (j, j))
            if j and cost[i][j - 1] + 1 < best:
                best, op = cost[i][j - 1] + 1, AlignOp("ins", (i, i), (j - 1, j))
            cost[i][j], back[i][j] = best, op

    path: List[AlignOp] = []
    i, j = n, m
    while i or j:
        op = back[i][j]
        path.append(op)
        i, j = op.src[0], op.tgt[0]
    path.reverse()
    return path


@dataclass(frozen=True)
class TokenMapping:
    """Target subsequence assigned to every source token.

    ``spans[i]`` is a half-open range over ``target`` (hyphen-expanded units);
    spans are ordered and their concatenation is exactly ``target``.
    ``absorbed[i]`` marks a token swallowed by a MERGE of the token before it;
    its span is empty but it is not deleted.
    """

    source: Tuple[str, ...]
    target: Tuple[str, ...]
    spans: Tuple[Tuple[int, int], ...]
    absorbed: Tuple[bool, ...]
    ops: Tuple[AlignOp, ...] = field(repr=False, compare=False, default=())

    def subsequence(self, i: int) -> List[str]:
        a, b = self.spans[i]
        return list(self.target[a:b])

    def subsequences(self) -> List[List[str]]:
        return [self.subsequence(i) for i in range(len(self.source))]

    def merge_partner(self, i: int) -> Optional[str]:
        """Source token that token ``i`` merges with, if any."""
        if i + 1 < len(self.source) and self.absorbed[i + 1]:
            return self.source[i + 1]
        return None


def map_tokens(
    src: Tokens,
    tgt: Tokens,
    verbs: Optional[VerbDictionary] = None,
    nouns: Optional[NounExceptionTable] = None,
    use_g: bool = True,
) -> TokenMapping:
    """Step 1: assign each source token its best-fitting target subsequence.

    Inserted target tokens go to the nearest preceding source token that was
    not deleted; insertions before any such token go to the first token.
    """
    source = tokenize(src)
    target = tokenize(tgt)
    units = expand_hyphens(target) if use_g else [str(t) for t in target]
    ops = align(source, units, verbs, nouns, use_g=use_g)
    n = len(source)
    owned: List[List[int]] = [[] for _ in range(n)]
    absorbed = [False] * n
    anchor: Optional[int] = None
    leading: List[int] = []
    for op in ops:
        tgt_range = range(*op.tgt)
        if op.kind == "ins":
            if anchor is None:
                leading.extend(tgt_range)
            else:
                owned[anchor].extend(tgt_range)
        elif op.kind == "del":
            continue
        else:
            anchor = op.src[0]
            owned[anchor].extend(tgt_range)
            if op.kind == "merge":
                absorbed[op.src[0] + 1] = True
    if leading and n:
        owned[0][:0] = leading
    spans = []
    pos = 0
    for idx in owned:
        if idx:
            assert idx[0] == pos and idx[-1] == pos + len(idx) - 1, "non-contiguous span"
            spans.append((pos, pos + len(idx)))
            pos += len(idx)
        else:
            spans.append((pos, pos))
    return TokenMapping(tuple(source), tuple(units), tuple(spans), tuple(absorbed), tuple(ops))


# -- step 2: per-token transformations -----------------------------------------


def transformations_for_mapping(
    src_token: str,
    tgt_subseq: Sequence[str],
    verbs: Optional[VerbDictionary] = None,
    nouns: Optional[NounExceptionTable] = None,
    merge_with: Optional[str] = None,
    use_g: bool = True,
    bare_hyphen_joins: bool = True,
) -> List[Tag]:
    """Step 2: ordered tags rewriting ``src_token`` into ``tgt_subseq``.

    ``merge_with`` is the following source token when the alignment merged
    the two into one target token. With ``bare_hyphen_joins`` a plain "-"
    after the head is read as compound glue, as in ``["year", "-"]``.
    """
    verbs = verbs if verbs is not None else default_verb_dictionary()
    nouns = nouns if nouns is not None else default_noun_exceptions()
    if bare_hyphen_joins:
        tgt_subseq = [u if k == 0 or u != HYPHEN else JOINT for k, u in enumerate(tgt_subseq)]
    parts = rejoin(tgt_subseq)
    if not parts:
        return [T.DELETE]
    out: List[Tag] = []
    head, rest = parts[0], parts[1:]
    merged = None
    if use_g and merge_with is not None and not isinstance(head, Joint):
        merged = candidate_g(src_token, [head], verbs, nouns, next_token=merge_with)
        if merged is not None and merged.core is not Core.MERGE:
            merged = None
    if merged is not None:
        out.append(merged)
    elif isinstance(head, Joint):
        out.append(T.KEEP)
        rest = parts
    elif head == src_token:
        out.append(T.KEEP)
    else:
        g = None
        if use_g and rest and not isinstance(rest[0], Joint):
            g = _g_cached(src_token, (head, rest[0]), verbs, nouns)
            if g is not None:
                rest = rest[1:]
        if g is None and use_g:
            g = _g_cached(src_token, (head,), verbs, nouns)
        out.append(g if g is not None else T.replace(head))
    for r in rest:
        out.append(T.Tag(Core.MERGE, "HYPHEN") if isinstance(r, Joint) else T.append(r))
    return out


def mapping_transformations(
    mapping: TokenMapping,
    verbs: Optional[VerbDictionary] = None,
    nouns: Optional[NounExceptionTable] = None,
    use_g: bool = True,
) -> List[List[Tag]]:
    lists = []
    for i, token in enumerate(mapping.source):
        if mapping.absorbed[i]:
            lists.append([T.KEEP])
            continue
        lists.append(
            transformations_for_mapping(
                token, mapping.subsequence(i), verbs, nouns, mapping.merge_partner(i), use_g,
                bare_hyphen_joins=False,
            )
        )
    return lists


# -- step 3: one tag per token ------------------------------------------------


@dataclass(frozen=True)
class TaggedSentence:
    tokens: Tuple[str, ...]
    tags: Tuple[Tag, ...]
    residual: bool = False
    uncovered: int = 0

    def __post_init__(self):
        if len(self.tokens) != len(self.tags):
            raise ValueError(f"{len(self.tokens)} tokens but {len(self.tags)} tags")


def collapse(tag_lists: Sequence[Sequence[Tag]], tokens: Optional[Sequence[str]] = None) -> TaggedSentence:
    """Step 3: keep the first non-KEEP tag of every list.

    Without ``tokens`` the sentence carries empty placeholder tokens.
    """
    chosen: List[Tag] = []
    residual = False
    for tags in tag_lists:
        edits = [t for t in tags if t != T.KEEP]
        chosen.append(edits[0] if edits else T.KEEP)
        residual = residual or len(edits) > 1
    if tokens is None:
        tokens = [""] * len(chosen)
    return TaggedSentence(tuple(tokens), tuple(chosen), residual)


def preprocess_pair(
    src: Tokens,
    tgt: Tokens,
    vocab: Optional[TagVocabulary] = None,
    verbs: Optional[VerbDictionary] = None,
    nouns: Optional[NounExceptionTable] = None,
) -> TaggedSentence:
    """All three steps. Tags missing from ``vocab`` become KEEP and are counted
    in ``uncovered``."""
    mapping = map_tokens(src, tgt, verbs, nouns)
    tagged = collapse(mapping_transformations(mapping, verbs, nouns), mapping.source)
    if vocab is None:
        return tagged
    kept, uncovered = [], 0
    for tag in tagged.tags:
        if tag in vocab:
            kept.append(tag)
        else:
            kept.append(T.KEEP)
            uncovered += 1
    return TaggedSentence(tagged.tokens, tuple(kept), tagged.residual, uncovered)


# -- coverage -------------------------------------------------------------------


@dataclass(frozen=True)
class GoldEdit:
    """One non-KEEP transformation and the basic tags that could stand in for it."""

    tag: Tag
    basic: Tuple[Tag, ...]


def _basic_equivalent(tag: Tag, token: str, head: Optional[str], next_token: Optional[str], verbs, nouns) -> Tuple[Tag, ...]:
    if not tag.is_g:
        return (tag,)
    if tag.core is Core.MERGE:
        sep = "" if tag.suffix == "SPACE" else HYPHEN
        left = head if head is not None else token
        return (T.replace(left + sep + next_token),) if next_token else (T.KEEP,)
    out = apply_g(token, tag, None, verbs, nouns)
    if tag.core is Core.SPLIT:
        return (T.replace(out[0]), T.append(out[1]))
    return (T.replace(out[0]),)


def gold_edits(
    src: Tokens,
    tgt: Tokens,
    verbs: Optional[VerbDictionary] = None,
    nouns: Optional[NounExceptionTable] = None,
) -> List[GoldEdit]:
    """Every non-KEEP transformation of a pair, before collapsing."""
    verbs = verbs if verbs is not None else default_verb_dictionary()
    nouns = nouns if nouns is not None else default_noun_exceptions()
    mapping = map_tokens(src, tgt, verbs, nouns)
    edits = []
    for i, tag_list in enumerate(mapping_transformations(mapping, verbs, nouns)):
        token = mapping.source[i]
        nxt = mapping.source[i + 1] if i + 1 < len(mapping.source) else None
        parts = rejoin(mapping.subsequence(i))
        head = parts[0] if parts and not isinstance(parts[0], Joint) else None
        for tag in tag_list:
            if tag == T.KEEP:
                continue
            edits.append(GoldEdit(tag, _basic_equivalent(tag, token, head, nxt, verbs, nouns)))
    return edits


COVERAGE_MODES = ("basic_only", "all")


def coverage(
    corpus: Iterable[Tuple[Tokens, Tokens]],
    vocab_sizes: Sequence[int],
    mode: str = "all",
    verbs: Optional[VerbDictionary] = None,
    nouns: Optional[NounExceptionTable] = None,
) -> List[Tuple[int, float]]:
    """Share of gold edits representable by a vocabulary of each size.

    In ``basic_only`` mode g-transformations are unavailable and every
    g-edit needs its basic stand-in tags (REPLACE, plus APPEND for a split)
    to be in the vocabulary, which is built from counts of those stand-ins.
    """
    if mode not in COVERAGE_MODES:
        raise ValueError(f"mode must be one of {COVERAGE_MODES}, got {mode!r}")
    edits: List[GoldEdit] = []
    pairs = 0
    for src, tgt in corpus:
        pairs += 1
        edits.extend(gold_edits(src, tgt, verbs, nouns))
    if not pairs:
        raise EmptyCorpus("coverage needs at least one sentence pair")
    if mode == "all":
        needs = [(e.tag,) for e in edits]
    else:
        needs = [e.basic for e in edits]
    counts = Counter(t for need in needs for t in need)
    rows = []
    for size in vocab_sizes:
        vocab = T.build_vocabulary(counts, size)
        if not needs:
            rows.append((size, 1.0))
            continue
        covered = sum(all(_usable(t, vocab, mode) for t in need) for need in needs)
        rows.append((size, covered / len(needs)))
    return rows


def _usable(tag: Tag, vocab: TagVocabulary, mode: str) -> bool:
    if mode == "basic_only" and tag.is_g:
        return False
    return tag in vocab


def tag_counts(tagged: Iterable[TaggedSentence]) -> Counter:
    return Counter(t for sent in tagged for t in sent.tags)


# -- file formats --------------------------------------------------------------


def read_parallel(source: TextIO, target: Optional[TextIO] = None) -> Iterator[Tuple[List[str], List[str]]]:
    """Sentence pairs from two aligned files, or from one ``source<TAB>target`` file."""
    if target is None:
        for lineno, line in enumerate(source, 1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise MalformedEntry(f"line {lineno}: expected 'source<TAB>target'")
            yield parts[0].split(), parts[1].split()
        return
    for lineno, (s, t) in enumerate(itertools.zip_longest(source, target), 1):
        if s is None or t is None:
            raise MalformedEntry(f"line {lineno}: parallel files differ in length")
        yield s.split(), t.split()


def write_tagged(sentences: Iterable[TaggedSentence], f: TextIO) -> None:
    first = True
    for sent in sentences:
        if not first:
            f.write("\n")
        first = False
        f.write(f"#residual={'true' if sent.residual else 'false'}\n")
        for token, tag in zip(sent.tokens, sent.tags):
            f.write(f"{token}\t{tag.render()}\n")


def read_tagged(f: TextIO) -> Iterator[TaggedSentence]:
    tokens: List[str] = []
    tags: List[Tag] = []
    residual = False
    started = False
    for lineno, line in enumerate(f, 1):
        line = line.rstrip("\r\n")
        if not line:
            if started:
                yield TaggedSentence(tuple(tokens), tuple(tags), residual)
            tokens, tags, residual, started = [], [], False, False
            continue
        started = True
        if line.startswith("#residual="):
            value = line.split("=", 1)[1]
            if value not in ("true", "false"):
                raise MalformedEntry(f"line {lineno}: bad residual flag {value!r}")
            residual = value == "true"
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise MalformedEntry(f"line {lineno}: expected 'token<TAB>tag'")
        try:
            tags.append(T.parse_tag(parts[1]))
        except MalformedTag as e:
            raise type(e)(f"line {lineno}: {e}") from None
        tokens.append(parts[0])
    if started:
        yield TaggedSentence(tuple(tokens), tuple(tags), residual)
