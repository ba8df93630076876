"""Taggers that produce :class:`PredictionMatrix` objects for the decoder.

* :class:`OracleTagger` derives gold tags from reference targets.
* :class:`UnigramTagger` predicts per-token tag frequencies seen in training.
* :class:`FileTagger` replays predictions written by an external model.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, TextIO, Tuple

import numpy as np

from . import tags as T
from .alignment import TaggedSentence, preprocess_pair, tokenize
from .decoder import PredictionMatrix, apply_tags, ensemble_average, read_predictions
from .errors import EmptyCorpus, ExhaustedStream, MalformedEntry, MalformedRecord, MissingReference
from .morphology import NounExceptionTable, VerbDictionary, default_noun_exceptions, default_verb_dictionary
from .tags import Tag, TagVocabulary


def one_hot_prediction(tags: Sequence[Tag], vocab: TagVocabulary, tokens: Optional[Sequence[str]] = None) -> PredictionMatrix:
    probs = np.zeros((len(tags), len(vocab)))
    keep = vocab.keep_id
    for row, tag in enumerate(tags):
        probs[row, vocab.get(tag, keep)] = 1.0
    errors = np.array([0.0 if t.is_keep else 1.0 for t in tags])
    return PredictionMatrix(probs, errors, float(errors.max()) if len(tags) else 0.0, tokens)


class OracleTagger:
    """Emits the gold collapsed tags for sentences with a known target.

    Every prediction also registers the sentence its tags would produce, so
    the intermediate sentences of an iterative run keep their reference.
    """

    def __init__(
        self,
        vocab: TagVocabulary,
        references: Optional[Mapping[str, str]] = None,
        verbs: Optional[VerbDictionary] = None,
        nouns: Optional[NounExceptionTable] = None,
    ):
        self.vocab = vocab
        self.verbs = verbs if verbs is not None else default_verb_dictionary()
        self.nouns = nouns if nouns is not None else default_noun_exceptions()
        self.references: Dict[Tuple[str, ...], Tuple[str, ...]] = {}
        for src, tgt in (references or {}).items():
            self.add(src, tgt)

    def add(self, source, target) -> None:
        self.references[tuple(tokenize(source))] = tuple(tokenize(target))

    def target_for(self, tokens: Sequence[str]) -> Tuple[str, ...]:
        key = tuple(tokens)
        if key not in self.references:
            raise MissingReference(f"no reference for {' '.join(key)!r}")
        return self.references[key]

    def gold(self, tokens: Sequence[str]) -> TaggedSentence:
        return preprocess_pair(list(tokens), list(self.target_for(tokens)), self.vocab, self.verbs, self.nouns)

    def predict(self, tokens: Sequence[str]) -> PredictionMatrix:
        target = self.target_for(tokens)
        tagged = self.gold(tokens)
        successor, _ = apply_tags(list(tokens), tagged.tags, self.verbs, self.nouns)
        self.references.setdefault(tuple(successor), target)
        return one_hot_prediction(tagged.tags, self.vocab, tokens)


def oracle_tagger(reference_targets: Mapping[str, str], vocab: TagVocabulary, verbs=None, nouns=None) -> OracleTagger:
    return OracleTagger(vocab, reference_targets, verbs, nouns)


@dataclass
class UnigramModel:
    """Tag frequencies observed for each source token."""

    counts: Dict[str, Counter] = field(default_factory=dict)

    def save(self, f: TextIO) -> None:
        for token in sorted(self.counts):
            table = self.counts[token]
            for tag in sorted(table, key=lambda t: (-table[t], t.render())):
                f.write(f"{token}\t{tag.render()}\t{table[tag]}\n")

    @classmethod
    def load(cls, f: TextIO) -> "UnigramModel":
        counts: Dict[str, Counter] = defaultdict(Counter)
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\r\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise MalformedEntry(f"line {lineno}: expected 'token<TAB>tag<TAB>count'")
            try:
                n = int(parts[2])
            except ValueError:
                raise MalformedEntry(f"line {lineno}: bad count {parts[2]!r}") from None
            if n <= 0:
                raise MalformedEntry(f"line {lineno}: counts must be positive")
            counts[parts[0]][T.parse_tag(parts[1])] += n
        return cls(dict(counts))


def train_unigram(corpus: Iterable[TaggedSentence]) -> UnigramModel:
    counts: Dict[str, Counter] = defaultdict(Counter)
    seen = 0
    for sent in corpus:
        seen += 1
        for token, tag in zip(sent.tokens, sent.tags):
            counts[token][tag] += 1
    if not seen:
        raise EmptyCorpus("cannot train on an empty corpus")
    return UnigramModel(dict(counts))


def predict_unigram(model: UnigramModel, tokens: Sequence[str], vocab: TagVocabulary) -> PredictionMatrix:
    """Normalized tag frequencies per token, with one extra count on KEEP.
    Unseen tokens get a one-hot KEEP row."""
    keep = vocab.keep_id
    probs = np.zeros((len(tokens), len(vocab)))
    for row, token in enumerate(tokens):
        table = model.counts.get(token)
        if not table:
            probs[row, keep] = 1.0
            continue
        probs[row, keep] += 1.0
        for tag, n in table.items():
            tag_id = vocab.get(tag)
            if tag_id is not None:
                probs[row, tag_id] += n
        probs[row] /= probs[row].sum()
    return PredictionMatrix.from_probs(probs, keep, tokens=tokens)


class UnigramTagger:
    def __init__(self, model: UnigramModel, vocab: TagVocabulary):
        self.model = model
        self.vocab = vocab

    def predict(self, tokens: Sequence[str]) -> PredictionMatrix:
        return predict_unigram(self.model, tokens, self.vocab)


class FileTagger:
    """Replays prediction files in corpus order, averaging several files.

    Each file holds one record per sentence; the stream advances on every
    call, so a file supports exactly one correction pass per sentence.
    """

    def __init__(self, streams: Sequence[TextIO], vocab: TagVocabulary):
        if not streams:
            raise ValueError("FileTagger needs at least one prediction stream")
        self.vocab = vocab
        self._readers: List[Iterator[PredictionMatrix]] = [
            read_predictions(s, vocab.checksum, len(vocab)) for s in streams
        ]

    @classmethod
    def open(cls, paths: Sequence[str], vocab: TagVocabulary) -> "FileTagger":
        return cls([open(p, encoding="utf-8") for p in paths], vocab)

    def next_matrix(self) -> PredictionMatrix:
        preds = []
        for k, reader in enumerate(self._readers):
            try:
                preds.append(next(reader))
            except StopIteration:
                raise ExhaustedStream(f"prediction stream {k} ran out of records") from None
        return preds[0] if len(preds) == 1 else ensemble_average(preds)

    def predict(self, tokens: Sequence[str]) -> PredictionMatrix:
        pred = self.next_matrix()
        if pred.tokens is not None and list(pred.tokens) != list(tokens):
            raise MalformedRecord(f"record is for {' '.join(pred.tokens)!r}, not {' '.join(tokens)!r}")
        if pred.n_tokens != len(tokens):
            raise MalformedRecord(f"record has {pred.n_tokens} rows for {len(tokens)} tokens")
        return pred


def file_tagger(paths, vocab: TagVocabulary) -> FileTagger:
    if isinstance(paths, str):
        paths = [paths]
    return FileTagger.open(list(paths), vocab)
