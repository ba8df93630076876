"""Synthetic sentence pairs built from the transformation inventory.

A pair is made by drawing a random sentence, drawing a tag per token
(mostly KEEP) and applying the tags, so every difference between the two
sides is expressible with inventory transformations by construction.
Each word also has a fixed favourite error, and a small share of words are
error-prone: they carry their favourite error most of the time. That gives a
unigram tagger something learnable.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Set, Tuple

from . import tags as T
from .decoder import apply_tags
from .morphology import (
    HYPHEN,
    NounExceptionTable,
    VerbDictionary,
    default_noun_exceptions,
    default_verb_dictionary,
    pluralize,
    singularize,
)
from .tags import Core, Tag, TagVocabulary

VERBS = (
    "go make take see eat drink write give think run walk play like want need push "
    "track enjoy exist happen prevent depend break drive freeze fall draw look help "
    "work study live read speak buy bring begin choose know find"
).split()
NOUNS = (
    "year boy girl school city book box church dish car day idea family country "
    "student teacher house problem question friend child man woman person story "
    "disease citizen lesson game plan letter"
).split()
FUNCTION_WORDS = (
    "the a an to in on at of for with and but is was very this that some many it "
    "he she they we I"
).split()
COMPOUNDS = "long-run well-known in-depth ten-year-old self-esteem e-mail full-time part-time".split()
PROPER = "London Monday English Internet iPhone".split()
PUNCTUATION = list(".,!?")


@dataclass(frozen=True)
class SyntheticPair:
    source: Tuple[str, ...]
    target: Tuple[str, ...]
    tags: Tuple[Tag, ...]  # the tags that produced the target


class SyntheticCorpus:
    """Deterministic generator of (source, target) pairs for a given seed."""

    def __init__(
        self,
        seed: int = 0,
        error_rate: float = 0.15,
        favourite_rate: float = 0.5,
        prone_share: float = 0.1,
        prone_error_rate: float = 0.8,
        min_len: int = 3,
        max_len: int = 12,
        verbs: Optional[VerbDictionary] = None,
        nouns: Optional[NounExceptionTable] = None,
    ):
        self.rng = random.Random(seed)
        self.error_rate = error_rate
        self.favourite_rate = favourite_rate
        self.prone_error_rate = prone_error_rate
        self.min_len, self.max_len = min_len, max_len
        self.verbs = verbs if verbs is not None else default_verb_dictionary()
        self.nouns = nouns if nouns is not None else default_noun_exceptions()
        self.words = self._lexicon()
        self._favourites = {}
        self.prone: Set[str] = set()
        fav_rng = random.Random(seed + 1)
        for w in self.words:
            options = [t for t in self.applicable(w, None) if t.core is not Core.MERGE]
            self._favourites[w] = fav_rng.choice(options)
            if fav_rng.random() < prone_share:
                self.prone.add(w)

    def _lexicon(self) -> List[str]:
        words: Set[str] = set(FUNCTION_WORDS) | set(COMPOUNDS) | set(PROPER) | set(PUNCTUATION)
        for v in VERBS:
            words.add(v)
            words.update(self.verbs.by_token.get(v, {}).values())
        for n in NOUNS:
            words.add(n)
            words.add(pluralize(n, self.nouns))
        return sorted(words)

    def applicable(self, token: str, next_token: Optional[str]) -> List[Tag]:
        """Tags that change ``token`` when applied."""
        out = [T.DELETE]
        out.append(T.append(self.rng.choice(self.words)))
        other = self.rng.choice(self.words)
        if other != token:
            out.append(T.replace(other))
        for suffix, result in (
            ("CAPITAL", token[:1].upper() + token[1:]),
            ("CAPITAL_1", token[:1] + token[1:2].upper() + token[2:]),
            ("LOWER", token.lower()),
            ("UPPER", token.upper()),
        ):
            if result != token:
                out.append(Tag(Core.CASE, suffix))
        if next_token is not None:
            out.extend([Tag(Core.MERGE, "SPACE"), Tag(Core.MERGE, "HYPHEN")])
        left, sep, right = token.partition(HYPHEN)
        if sep and left and right:
            out.append(Tag(Core.SPLIT, "HYPHEN"))
        singular = singularize(token, self.nouns)
        if singular and singular != token:
            out.append(Tag(Core.NOUN_NUMBER, "SINGULAR"))
        if pluralize(token, self.nouns) != token:
            out.append(Tag(Core.NOUN_NUMBER, "PLURAL"))
        for pair in sorted(self.verbs.by_token.get(token, {})):
            out.append(Tag(Core.VERB_FORM, pair))
        return out

    def sentence(self) -> List[str]:
        n = self.rng.randint(self.min_len, self.max_len)
        return [self.rng.choice(self.words) for _ in range(n)]

    def perturb(self, tokens: Sequence[str]) -> Tuple[Tag, ...]:
        tags = []
        for i, tok in enumerate(tokens):
            if tok in self.prone:
                prone_hit = self.rng.random() < self.prone_error_rate
                tags.append(self._favourites[tok] if prone_hit else T.KEEP)
            elif self.rng.random() >= self.error_rate:
                tags.append(T.KEEP)
            elif self.rng.random() < self.favourite_rate:
                tags.append(self._favourites[tok])
            else:
                nxt = tokens[i + 1] if i + 1 < len(tokens) else None
                tags.append(self.rng.choice(self.applicable(tok, nxt)))
        return tuple(tags)

    def pair(self) -> SyntheticPair:
        source = self.sentence()
        tags = self.perturb(source)
        target, _ = apply_tags(source, tags, self.verbs, self.nouns)
        return SyntheticPair(tuple(source), tuple(target), tags)

    def pairs(self, n: int) -> List[SyntheticPair]:
        return [self.pair() for _ in range(n)]

    def __iter__(self) -> Iterator[SyntheticPair]:
        while True:
            yield self.pair()


def open_vocabulary(targets: Sequence[Sequence[str]]) -> TagVocabulary:
    """A vocabulary holding every APPEND/REPLACE tag the preprocessor could
    emit for these targets: one per hyphen-delimited run inside each token."""
    suffixes: Set[str] = set()
    for target in targets:
        for token in target:
            parts = token.split(HYPHEN)
            pieces = parts if len(parts) > 1 and all(parts) else [token]
            for a in range(len(pieces)):
                for b in range(a + 1, len(pieces) + 1):
                    suffixes.add(HYPHEN.join(pieces[a:b]))
    counts = {}
    for s in suffixes:
        counts[T.append(s)] = 1
        counts[T.replace(s)] = 1
    return T.build_vocabulary(counts, len(counts) + 33)
