"""Edit tags and closed tag vocabularies.

A tag is a core operation plus an optional suffix, rendered as ``$CORE`` or
``$CORE_SUFFIX`` (``$KEEP``, ``$APPEND_for``, ``$VERB_FORM_VB_VBZ``).
"""

from __future__ import annotations

import enum
import functools
import hashlib
import itertools
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

from .errors import MalformedTag, MalformedEntry, SizeTooSmall, UnknownGTransformation


class Core(str, enum.Enum):
    KEEP = "KEEP"
    DELETE = "DELETE"
    APPEND = "APPEND"
    REPLACE = "REPLACE"
    CASE = "CASE"
    MERGE = "MERGE"
    SPLIT = "SPLIT"
    NOUN_NUMBER = "NOUN_NUMBER"
    VERB_FORM = "VERB_FORM"
    # reserved slots of a closed vocabulary
    UNKNOWN = "UNKNOWN"
    PADDING = "PADDING"


BARE_CORES = frozenset({Core.KEEP, Core.DELETE, Core.UNKNOWN, Core.PADDING})
TOKEN_CORES = frozenset({Core.APPEND, Core.REPLACE})
G_CORES = frozenset({Core.CASE, Core.MERGE, Core.SPLIT, Core.NOUN_NUMBER, Core.VERB_FORM})

VERB_FORMS = ("VB", "VBZ", "VBN", "VBD", "VBG")
VERB_FORM_PAIRS: Tuple[str, ...] = tuple(
    f"{a}_{b}" for a, b in itertools.permutations(VERB_FORMS, 2)
)

G_SUFFIXES: Dict[Core, Tuple[str, ...]] = {
    Core.CASE: ("CAPITAL", "CAPITAL_1", "LOWER", "UPPER"),
    Core.MERGE: ("SPACE", "HYPHEN"),
    Core.SPLIT: ("HYPHEN",),
    Core.NOUN_NUMBER: ("SINGULAR", "PLURAL"),
    Core.VERB_FORM: VERB_FORM_PAIRS,
}

# longest names first so NOUN_NUMBER is not read as NOUN + suffix
_CORES_BY_LENGTH = sorted(Core, key=lambda c: -len(c.value))


@dataclass(frozen=True, order=False)
class Tag:
    core: Core
    suffix: Optional[str] = None

    def __post_init__(self):
        if not isinstance(self.core, Core):
            object.__setattr__(self, "core", Core(self.core))
        if self.core in BARE_CORES:
            if self.suffix is not None:
                raise MalformedTag(f"${self.core.value} takes no suffix")
        elif self.core in TOKEN_CORES:
            if not self.suffix or any(ch.isspace() for ch in self.suffix):
                raise MalformedTag(f"${self.core.value} needs a single-token suffix, got {self.suffix!r}")
        elif self.suffix not in G_SUFFIXES[self.core]:
            raise UnknownGTransformation(f"${self.core.value}_{self.suffix}")

    @property
    def is_g(self) -> bool:
        return self.core in G_CORES

    @property
    def is_keep(self) -> bool:
        """True for tags that leave the token untouched when applied."""
        return self.core in (Core.KEEP, Core.UNKNOWN, Core.PADDING)

    def render(self) -> str:
        if self.suffix is None:
            return "$" + self.core.value
        return f"${self.core.value}_{self.suffix}"

    __str__ = render

    def __repr__(self) -> str:
        return f"Tag({self.render()!r})"


KEEP = Tag(Core.KEEP)
DELETE = Tag(Core.DELETE)
UNKNOWN = Tag(Core.UNKNOWN)
PADDING = Tag(Core.PADDING)
RESERVED: Tuple[Tag, ...] = (KEEP, DELETE, UNKNOWN, PADDING)


def append(token: str) -> Tag:
    return Tag(Core.APPEND, token)


def replace(token: str) -> Tag:
    return Tag(Core.REPLACE, token)


def parse_tag(text: str) -> Tag:
    """Parse a rendered tag string such as ``$APPEND_for``.

    Raises:
        MalformedTag: the string is not ``$CORE`` or ``$CORE_SUFFIX`` with a known core.
        UnknownGTransformation: the core is a g-transformation but the suffix
            is outside its fixed inventory.
    """
    if not text or not text.startswith("$") or len(text) < 2:
        raise MalformedTag(f"not a tag: {text!r}")
    body = text[1:]
    for core in _CORES_BY_LENGTH:
        name = core.value
        if body == name:
            if core in BARE_CORES:
                return Tag(core)
            raise MalformedTag(f"${name} requires a suffix")
        if body.startswith(name + "_"):
            suffix = body[len(name) + 1 :]
            if core in BARE_CORES:
                raise MalformedTag(f"${name} takes no suffix: {text!r}")
            if not suffix:
                raise MalformedTag(f"empty suffix: {text!r}")
            return Tag(core, suffix)
    raise MalformedTag(f"unknown core in {text!r}")


def render_tag(tag: Tag) -> str:
    return tag.render()


def g_transformation_inventory() -> List[Tag]:
    """The 29 transformations that carry no token, in fixed inventory order."""
    return list(_G_INVENTORY)


_G_INVENTORY: Tuple[Tag, ...] = tuple(
    Tag(core, suffix) for core, suffixes in G_SUFFIXES.items() for suffix in suffixes
)


@dataclass(frozen=True)
class TagVocabulary:
    """Closed, densely indexed tag set. Ids are line numbers of the vocabulary file."""

    tags: Tuple[Tag, ...]
    index: Mapping[Tag, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        index = {tag: i for i, tag in enumerate(self.tags)}
        if len(index) != len(self.tags):
            raise MalformedTag("duplicate tags in vocabulary")
        missing = [t for t in RESERVED + _G_INVENTORY if t not in index]
        if missing:
            raise MalformedTag(f"vocabulary lacks required tags: {[str(t) for t in missing]}")
        object.__setattr__(self, "index", index)

    @property
    def size(self) -> int:
        return len(self.tags)

    def __len__(self) -> int:
        return len(self.tags)

    def __contains__(self, tag: object) -> bool:
        return tag in self.index

    def __iter__(self) -> Iterator[Tag]:
        return iter(self.tags)

    def id_of(self, tag: Tag) -> int:
        return self.index[tag]

    def get(self, tag: Tag, default: Optional[int] = None) -> Optional[int]:
        return self.index.get(tag, default)

    def tag_of(self, tag_id: int) -> Tag:
        return self.tags[tag_id]

    @property
    def keep_id(self) -> int:
        return self.index[KEEP]

    def lines(self) -> List[str]:
        return [t.render() for t in self.tags]

    def to_text(self) -> str:
        return "".join(line + "\n" for line in self.lines())

    @functools.cached_property
    def checksum(self) -> str:
        """sha256 of the vocabulary file contents."""
        return hashlib.sha256(self.to_text().encode("utf-8")).hexdigest()

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(self.to_text())

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "TagVocabulary":
        tags = []
        for lineno, line in enumerate(lines, 1):
            line = line.rstrip("\r\n")
            try:
                tags.append(parse_tag(line))
            except MalformedTag as e:
                raise type(e)(f"line {lineno}: {e}") from None
        return cls(tuple(tags))

    @classmethod
    def load(cls, path) -> "TagVocabulary":
        with open(path, encoding="utf-8") as f:
            return cls.from_lines(f)


def build_vocabulary(tag_counts: Mapping[Tag, int], size: int = 5000) -> TagVocabulary:
    """Reserved tags, then all g-transformations, then the most frequent
    APPEND/REPLACE tags (ties broken by rendered string) up to ``size``."""
    floor = len(RESERVED) + len(_G_INVENTORY)
    if size < floor:
        raise SizeTooSmall(f"vocabulary size must be >= {floor}, got {size}")
    ranked = sorted(
        (t for t, n in tag_counts.items() if n > 0 and t.core in TOKEN_CORES),
        key=lambda t: (-tag_counts[t], t.render()),
    )
    return TagVocabulary(RESERVED + _G_INVENTORY + tuple(ranked[: size - floor]))


def read_counts(lines: Iterable[str]) -> Dict[Tag, int]:
    """Parse a ``rendered_tag<TAB>frequency`` count file. Repeated tags are summed."""
    counts: Dict[Tag, int] = {}
    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\r\n")
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise MalformedEntry(f"line {lineno}: expected 'tag<TAB>count', got {line!r}")
        try:
            tag, n = parse_tag(parts[0]), int(parts[1])
        except ValueError:
            raise MalformedEntry(f"line {lineno}: bad count {parts[1]!r}") from None
        except MalformedTag as e:
            raise type(e)(f"line {lineno}: {e}") from None
        counts[tag] = counts.get(tag, 0) + n
    return counts


def write_counts(counts: Mapping[Tag, int], f) -> None:
    for tag in sorted(counts, key=lambda t: (-counts[t], t.render())):
        f.write(f"{tag.render()}\t{counts[tag]}\n")
