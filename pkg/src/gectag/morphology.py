"""Single-token execution of g-transformations.

Casing, merge/split, noun number and verb form. The verb form tables come
from a conjugation dictionary of one-way transitions ``go_goes:VB_VBZ``.
"""

from __future__ import annotations

import functools
import gzip
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import MalformedEntry, NotApplicable
from .tags import Core, Tag, VERB_FORM_PAIRS, g_transformation_inventory

HYPHEN = "-"


# eq=False keeps identity hashing, so instances can key caches
@dataclass(frozen=True, eq=False)
class VerbDictionary:
    """``(verb_token, "X_Y") -> inflected token`` transitions."""

    transitions: Mapping[Tuple[str, str], str] = field(default_factory=dict)
    # token -> {pair: target}, for fast reverse lookups
    by_token: Mapping[str, Mapping[str, str]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        by_token: Dict[str, Dict[str, str]] = {}
        for (token, pair), target in self.transitions.items():
            by_token.setdefault(token, {})[pair] = target
        object.__setattr__(self, "by_token", by_token)

    def __len__(self) -> int:
        return len(self.transitions)

    def __repr__(self) -> str:
        return f"VerbDictionary(<{len(self.transitions)} transitions>)"

    def lookup(self, token: str, pair: str) -> Optional[str]:
        return self.transitions.get((token, pair))

    def entries(self) -> Iterable[Tuple[str, str, str]]:
        for (token, pair), target in self.transitions.items():
            yield token, pair, target


def load_verb_dictionary(source: Iterable[str]) -> VerbDictionary:
    """Read ``token0_token1:tag0_tag1`` lines. Duplicate keys keep the first entry."""
    transitions: Dict[Tuple[str, str], str] = {}
    for lineno, line in enumerate(source, 1):
        line = line.strip()
        if not line:
            continue
        words, sep, forms = line.partition(":")
        w = words.split("_")
        f = forms.split("_")
        if not sep or len(w) != 2 or len(f) != 2 or not all(w) or not all(f):
            raise MalformedEntry(f"line {lineno}: expected token0_token1:tag0_tag1, got {line!r}")
        pair = f"{f[0]}_{f[1]}"
        if pair not in VERB_FORM_PAIRS:
            raise MalformedEntry(f"line {lineno}: unknown verb form pair {pair!r}")
        transitions.setdefault((w[0], pair), w[1])
    return VerbDictionary(transitions)


@functools.lru_cache(maxsize=None)
def default_verb_dictionary() -> VerbDictionary:
    """The bundled English dictionary (XTAG en-verbs, converted)."""
    data = resources.files("gectag") / "data" / "verb-form-vocab.txt.gz"
    with data.open("rb") as raw, gzip.open(raw, "rt", encoding="utf-8") as f:
        return load_verb_dictionary(f)


DEFAULT_NOUN_EXCEPTIONS: Tuple[Tuple[str, str], ...] = (
    ("man", "men"), ("woman", "women"), ("child", "children"), ("person", "people"),
    ("foot", "feet"), ("tooth", "teeth"), ("goose", "geese"), ("mouse", "mice"),
    ("louse", "lice"), ("ox", "oxen"), ("criterion", "criteria"),
    ("phenomenon", "phenomena"), ("analysis", "analyses"), ("crisis", "crises"),
    ("thesis", "theses"), ("hypothesis", "hypotheses"), ("basis", "bases"),
    ("datum", "data"), ("medium", "media"), ("cactus", "cacti"),
    ("fungus", "fungi"), ("stimulus", "stimuli"), ("knife", "knives"),
    ("wife", "wives"), ("life", "lives"), ("leaf", "leaves"), ("wolf", "wolves"),
    ("half", "halves"), ("shelf", "shelves"), ("thief", "thieves"),
    ("potato", "potatoes"), ("tomato", "tomatoes"), ("hero", "heroes"),
)


@dataclass(frozen=True, eq=False)
class NounExceptionTable:
    """Irregular singular/plural pairs consulted before the suffix rules."""

    to_plural: Mapping[str, str]
    to_singular: Mapping[str, str] = field(init=False, compare=False)

    def __post_init__(self):
        inverse = {p: s for s, p in self.to_plural.items()}
        if len(inverse) != len(self.to_plural):
            raise MalformedEntry("noun exception table is not one-to-one")
        same = [s for s, p in self.to_plural.items() if s == p]
        if same:
            raise MalformedEntry(f"identical singular and plural: {same}")
        object.__setattr__(self, "to_singular", inverse)

    def __repr__(self) -> str:
        return f"NounExceptionTable(<{len(self.to_plural)} pairs>)"

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[str, str]]) -> "NounExceptionTable":
        table: Dict[str, str] = {}
        for singular, plural in pairs:
            if singular in table and table[singular] != plural:
                raise MalformedEntry(f"conflicting plurals for {singular!r}")
            table[singular] = plural
        return cls(table)

    @classmethod
    def default(cls) -> "NounExceptionTable":
        return default_noun_exceptions()


@functools.lru_cache(maxsize=None)
def default_noun_exceptions() -> NounExceptionTable:
    return NounExceptionTable.from_pairs(DEFAULT_NOUN_EXCEPTIONS)


def load_noun_exceptions(source: Iterable[str]) -> NounExceptionTable:
    """Read ``singular<TAB>plural`` lines."""
    pairs = []
    for lineno, line in enumerate(source, 1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not all(p.strip() for p in parts):
            raise MalformedEntry(f"line {lineno}: expected 'singular<TAB>plural', got {line!r}")
        pairs.append((parts[0].strip(), parts[1].strip()))
    return NounExceptionTable.from_pairs(pairs)


_SIBILANT_ENDINGS = ("s", "x", "z", "ch", "sh")
_VOWELS = "aeiou"


def pluralize(token: str, nouns: NounExceptionTable) -> str:
    if token in nouns.to_plural:
        return nouns.to_plural[token]
    lower = token.lower()
    if len(lower) > 1 and lower.endswith("y") and lower[-2] not in _VOWELS:
        return token[:-1] + "ies"
    if lower.endswith(_SIBILANT_ENDINGS):
        return token + "es"
    return token + "s"


def singularize(token: str, nouns: NounExceptionTable) -> Optional[str]:
    """Singular form, or None when the token does not look plural."""
    if token in nouns.to_singular:
        return nouns.to_singular[token]
    lower = token.lower()
    if len(lower) > 3 and lower.endswith("ies"):
        return token[:-3] + "y"
    if lower.endswith(tuple(e + "es" for e in ("ss", "x", "z", "ch", "sh"))):
        return token[:-2]
    if len(lower) > 1 and lower.endswith("s") and not lower.endswith("ss"):
        return token[:-1]
    return None


def _capital(token: str, pos: int) -> str:
    if len(token) <= pos:
        raise NotApplicable(f"no character at position {pos} in {token!r}")
    return token[:pos] + token[pos].upper() + token[pos + 1 :]


def apply_g(
    token: str,
    tag: Tag,
    next_token: Optional[str] = None,
    verbs: Optional[VerbDictionary] = None,
    nouns: Optional[NounExceptionTable] = None,
) -> List[str]:
    """Execute one g-transformation on ``token``.

    MERGE tags consume ``next_token`` and return the single joined token.

    Raises:
        NotApplicable: the operation has no defined result for this input.
    """
    core, suffix = tag.core, tag.suffix
    if core is Core.CASE:
        if suffix == "CAPITAL":
            return [_capital(token, 0)]
        if suffix == "CAPITAL_1":
            return [_capital(token, 1)]
        if suffix == "LOWER":
            return [token.lower()]
        return [token.upper()]
    if core is Core.MERGE:
        if next_token is None:
            raise NotApplicable("MERGE needs a following token")
        sep = "" if suffix == "SPACE" else HYPHEN
        return [token + sep + next_token]
    if core is Core.SPLIT:
        left, sep, right = token.partition(HYPHEN)
        if not sep or not left or not right:
            raise NotApplicable(f"cannot split {token!r} on a hyphen")
        return [left, right]
    if core is Core.NOUN_NUMBER:
        nouns = nouns if nouns is not None else default_noun_exceptions()
        if suffix == "PLURAL":
            return [pluralize(token, nouns)]
        singular = singularize(token, nouns)
        if singular is None or not singular:
            raise NotApplicable(f"{token!r} has no singular form")
        return [singular]
    if core is Core.VERB_FORM:
        verbs = verbs if verbs is not None else default_verb_dictionary()
        target = verbs.lookup(token, suffix)
        if target is None:
            raise NotApplicable(f"no {suffix} transition for {token!r}")
        return [target]
    raise NotApplicable(f"{tag} is not a g-transformation")


_CASE_TAGS = [t for t in g_transformation_inventory() if t.core is Core.CASE]
_MERGE_TAGS = [t for t in g_transformation_inventory() if t.core is Core.MERGE]
_SPLIT_TAG = Tag(Core.SPLIT, "HYPHEN")
_NOUN_TAGS = [t for t in g_transformation_inventory() if t.core is Core.NOUN_NUMBER]
_VERB_TAGS = [t for t in g_transformation_inventory() if t.core is Core.VERB_FORM]


def candidate_g(
    source_token: str,
    target_tokens: Sequence[str],
    verbs: Optional[VerbDictionary] = None,
    nouns: Optional[NounExceptionTable] = None,
    next_token: Optional[str] = None,
) -> Optional[Tag]:
    """First g-transformation turning ``source_token`` into ``target_tokens``.

    Search order is the inventory order except that VERB_FORM is tried before
    NOUN_NUMBER: a dictionary hit is stronger evidence than a suffix rule.
    Identity pairs return None (that is KEEP).
    """
    if len(target_tokens) == 2:
        left, sep, right = source_token.partition(HYPHEN)
        if sep and left and right and [left, right] == list(target_tokens):
            return _SPLIT_TAG
        return None
    if len(target_tokens) != 1:
        return None
    target = target_tokens[0]
    if target == source_token:
        return None
    for tag in _CASE_TAGS:
        try:
            if apply_g(source_token, tag) == [target]:
                return tag
        except NotApplicable:
            pass
    if next_token is not None:
        if source_token + next_token == target:
            return _MERGE_TAGS[0]
        if source_token + HYPHEN + next_token == target:
            return _MERGE_TAGS[1]
    verbs = verbs if verbs is not None else default_verb_dictionary()
    forms = verbs.by_token.get(source_token)
    if forms:
        for tag in _VERB_TAGS:
            if forms.get(tag.suffix) == target:
                return tag
    nouns = nouns if nouns is not None else default_noun_exceptions()
    if singularize(source_token, nouns) == target:
        return _NOUN_TAGS[0]
    if pluralize(source_token, nouns) == target:
        return _NOUN_TAGS[1]
    return None
