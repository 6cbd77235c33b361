"""Span-encoding schemes, tag parsing, transition legality and masks."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

DEFAULT_ILLEGAL_SCORE = -1e4


class TagError(ValueError):
    """A label that does not parse under the requested scheme."""


class MaskError(ValueError):
    """A vocabulary whose legality graph has a dead end."""


class Scheme(str, enum.Enum):
    IOB1 = "IOB1"
    BIO = "BIO"
    IOBES = "IOBES"

    @classmethod
    def parse(cls, value) -> "Scheme":
        if isinstance(value, cls):
            return value
        key = str(value).upper()
        if key in ("IOB2", "BIO"):
            return cls.BIO
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown scheme {value!r}; expected one of IOB1, BIO, IOBES") from None

    @property
    def prefixes(self) -> frozenset:
        if self is Scheme.IOBES:
            return frozenset("OBIES")
        return frozenset("OBI")


GO = "GO"
EOS = "EOS"


@dataclass(frozen=True)
class Tag:
    prefix: str
    entity_type: Optional[str] = None

    def __post_init__(self):
        if self.prefix in ("O", GO, EOS):
            if self.entity_type is not None:
                raise TagError(f"prefix {self.prefix} cannot carry a type")
        elif self.prefix in ("B", "I", "E", "S"):
            if not self.entity_type:
                raise TagError(f"prefix {self.prefix} needs a non-empty type")
        else:
            raise TagError(f"unknown prefix {self.prefix!r}")

    def __str__(self):
        if self.entity_type is None:
            return self.prefix
        return f"{self.prefix}-{self.entity_type}"


GO_TAG = Tag(GO)
EOS_TAG = Tag(EOS)
OUTSIDE = Tag("O")


def parse_tag(label: str, scheme) -> Tag:
    """Split ``PREFIX-TYPE`` on the first hyphen.

    >>> parse_tag("B-WORK_OF_ART", Scheme.IOBES)
    Tag(prefix='B', entity_type='WORK_OF_ART')
    """
    scheme = Scheme.parse(scheme)
    if not label:
        raise TagError("empty label")
    if label == "O":
        return OUTSIDE
    prefix, sep, etype = label.partition("-")
    if not sep or not etype:
        raise TagError(f"malformed label {label!r}: expected PREFIX-TYPE or 'O'")
    if prefix not in scheme.prefixes or prefix == "O":
        raise TagError(f"label {label!r}: prefix {prefix!r} is not valid under {scheme.value}")
    return Tag(prefix, etype)


def is_legal_transition(scheme, prev: Tag, tag: Tag) -> bool:
    """Whether ``prev`` may be immediately followed by ``tag``.

    ``prev`` may be GO (sentence start) and ``tag`` may be EOS (sentence end).
    """
    scheme = Scheme.parse(scheme)
    if tag.prefix == GO or prev.prefix == EOS:
        return False
    if prev.prefix == GO and tag.prefix == EOS:
        # empty sentences do not exist
        return False

    if scheme is Scheme.IOBES:
        if prev.prefix in ("B", "I"):
            return tag.prefix in ("I", "E") and tag.entity_type == prev.entity_type
        # prev is O, E, S or GO
        return tag.prefix in ("O", "B", "S", EOS)

    if scheme is Scheme.BIO:
        if tag.prefix == "I":
            return prev.prefix in ("B", "I") and prev.entity_type == tag.entity_type
        return True

    # IOB1
    if tag.prefix == "B":
        return prev.prefix in ("B", "I") and prev.entity_type == tag.entity_type
    return True


@dataclass(frozen=True)
class TagVocabulary:
    """Real labels at indices ``0..T-1``; GO at ``T`` and EOS at ``T+1``."""

    labels: tuple
    scheme: Scheme
    tags: tuple = field(init=False, repr=False, compare=False)
    _index: dict = field(init=False, repr=False, compare=False)

    def __init__(self, labels: Iterable[str], scheme="IOBES"):
        labels = tuple(labels)
        scheme = Scheme.parse(scheme)
        if len(set(labels)) != len(labels):
            dupes = sorted({lab for lab in labels if labels.count(lab) > 1})
            raise ValueError(f"duplicate labels in vocabulary: {dupes}")
        if not labels:
            raise ValueError("vocabulary must contain at least one label")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "scheme", scheme)
        object.__setattr__(self, "tags", tuple(parse_tag(lab, scheme) for lab in labels))
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(labels)})

    @classmethod
    def from_types(cls, entity_types: Sequence[str], scheme="IOBES") -> "TagVocabulary":
        """``O`` followed by every prefix of every type, type-major."""
        scheme = Scheme.parse(scheme)
        prefixes = "BIES" if scheme is Scheme.IOBES else "BI"
        labels = ["O"] + [f"{p}-{t}" for t in entity_types for p in prefixes]
        return cls(labels, scheme)

    def __len__(self):
        return len(self.labels)

    def __contains__(self, label):
        return label in self._index

    @property
    def go_index(self) -> int:
        return len(self.labels)

    @property
    def eos_index(self) -> int:
        return len(self.labels) + 1

    def index_of(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"label {label!r} not in vocabulary") from None

    def encode(self, labels: Sequence[str]) -> np.ndarray:
        return np.array([self.index_of(lab) for lab in labels], dtype=np.int64)

    def decode(self, indices) -> list:
        return [self.labels[int(i)] for i in indices]

    def entity_types(self) -> list:
        seen = dict.fromkeys(t.entity_type for t in self.tags if t.entity_type)
        return list(seen)


@dataclass(frozen=True, eq=False)
class TransitionMask:
    """Boolean ``allowed[from, to]`` over ``T + 2`` tag indices."""

    allowed: np.ndarray
    vocab: TagVocabulary

    @property
    def scheme(self) -> Scheme:
        return self.vocab.scheme

    @property
    def num_tags(self) -> int:
        return len(self.vocab)

    def __eq__(self, other):
        return (
            isinstance(other, TransitionMask)
            and self.vocab == other.vocab
            and np.array_equal(self.allowed, other.allowed)
        )

    def __hash__(self):
        return hash((self.vocab, self.allowed.tobytes()))


def build_transition_mask(scheme, vocab: TagVocabulary) -> TransitionMask:
    scheme = Scheme.parse(scheme)
    if vocab.scheme is not scheme:
        vocab = TagVocabulary(vocab.labels, scheme)
    tags = list(vocab.tags) + [GO_TAG, EOS_TAG]
    size = len(tags)
    allowed = np.zeros((size, size), dtype=bool)
    for i, prev in enumerate(tags):
        for j, tag in enumerate(tags):
            allowed[i, j] = is_legal_transition(scheme, prev, tag)
    _check_dead_ends(allowed, vocab)
    allowed.setflags(write=False)
    return TransitionMask(allowed, vocab)


def _check_dead_ends(allowed, vocab):
    t = len(vocab)
    inner = allowed[:t, :t]
    if not allowed[vocab.go_index, :t].any():
        raise MaskError("no tag may start a sentence")
    stuck = [vocab.labels[i] for i in range(t) if not inner[i].any()]
    if stuck:
        raise MaskError(f"labels with no legal successor: {stuck}")
    # every tag reachable from GO must be able to reach EOS
    reach = allowed[vocab.go_index, :t].copy()
    while True:
        grown = reach | inner[reach].any(axis=0)
        if (grown == reach).all():
            break
        reach = grown
    finish = allowed[:t, vocab.eos_index].copy()
    while True:
        grown = finish | inner[:, finish].any(axis=1)
        if (grown == finish).all():
            break
        finish = grown
    trapped = [vocab.labels[i] for i in np.flatnonzero(reach & ~finish)]
    if trapped:
        raise MaskError(f"labels that can never reach the sentence end: {trapped}")


def mask_to_scores(mask, illegal_score: float = DEFAULT_ILLEGAL_SCORE) -> np.ndarray:
    """0.0 where allowed, ``illegal_score`` elsewhere."""
    if not (illegal_score < 0) or np.isnan(illegal_score) or illegal_score == np.inf:
        raise ValueError("illegal_score must be negative (finite or -inf)")
    allowed = mask.allowed if isinstance(mask, TransitionMask) else np.asarray(mask, dtype=bool)
    return np.where(allowed, 0.0, float(illegal_score))
