"""CoNLL reading/writing, span extraction and encoding, scheme conversion
and sequence validation."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable, List, NamedTuple, Optional, Sequence, TextIO

from .schemes import (
    EOS_TAG,
    GO_TAG,
    Scheme,
    TagError,
    TagVocabulary,
    is_legal_transition,
    parse_tag,
)

DOCSTART = "-DOCSTART-"


class ConllFormatError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class Span(NamedTuple):
    entity_type: str
    start: int
    end: int


class Violation(NamedTuple):
    position: int
    prev: str
    label: str


@dataclass(frozen=True)
class Sentence:
    tokens: tuple
    labels: tuple

    def __post_init__(self):
        if not self.tokens:
            raise ValueError("sentence must be non-empty")
        if len(self.tokens) != len(self.labels):
            raise ValueError("tokens and labels differ in length")

    def __len__(self):
        return len(self.tokens)


@dataclass(frozen=True)
class Corpus:
    sentences: tuple
    scheme: Scheme
    vocab: Optional[TagVocabulary] = field(default=None, compare=False)
    documents: int = field(default=0, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))
        object.__setattr__(self, "scheme", Scheme.parse(self.scheme))
        if self.vocab is None:
            object.__setattr__(self, "vocab", _observed_vocab(self.sentences, self.scheme))

    def __len__(self):
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    @property
    def num_tokens(self) -> int:
        return sum(len(s) for s in self.sentences)

    def with_labels(self, label_seqs, scheme=None) -> "Corpus":
        scheme = self.scheme if scheme is None else scheme
        sents = [Sentence(s.tokens, tuple(labs)) for s, labs in zip(self.sentences, label_seqs)]
        return Corpus(sents, scheme, documents=self.documents)


def _observed_vocab(sentences, scheme):
    seen = {}
    for sent in sentences:
        for lab in sent.labels:
            seen.setdefault(lab, None)
    if not seen:
        return None
    labels = sorted(seen, key=lambda lab: (lab != "O", lab.partition("-")[2], lab))
    return TagVocabulary(labels, scheme)


def read_conll(stream, token_column: int = 0, label_column: int = -1, scheme="IOBES") -> Corpus:
    """Parse whitespace-separated columns; blank lines end sentences.

    ``-DOCSTART-`` lines are counted as document markers and dropped.
    """
    scheme = Scheme.parse(scheme)
    if isinstance(stream, (str, bytes)):
        raise TypeError("read_conll expects a text stream; use read_conll_file for paths")
    sentences: List[Sentence] = []
    tokens: list = []
    labels: list = []
    docs = 0

    def flush():
        if tokens:
            sentences.append(Sentence(tuple(tokens), tuple(labels)))
            tokens.clear()
            labels.clear()

    for lineno, raw in enumerate(stream, start=1):
        line = raw.rstrip("\r\n")
        cols = line.split()
        if not cols:
            flush()
            continue
        if cols[0] == DOCSTART:
            flush()
            docs += 1
            continue
        try:
            token = cols[token_column]
            label = cols[label_column]
        except IndexError:
            raise ConllFormatError(
                f"expected columns {token_column} and {label_column}, found {len(cols)}", lineno
            ) from None
        try:
            parse_tag(label, scheme)
        except TagError as exc:
            raise ConllFormatError(f"bad label {label!r}: {exc}", lineno) from None
        tokens.append(token)
        labels.append(label)
    flush()
    return Corpus(sentences, scheme, documents=docs)


def read_conll_file(path, token_column=0, label_column=-1, scheme="IOBES") -> Corpus:
    with open(path, encoding="utf-8", newline="") as fh:
        return read_conll(fh, token_column, label_column, scheme)


def write_conll(corpus: Corpus, stream: TextIO) -> None:
    """Two columns (token, label), one blank line between sentences."""
    for i, sent in enumerate(corpus.sentences):
        if i:
            stream.write("\n")
        for tok, lab in zip(sent.tokens, sent.labels):
            stream.write(f"{tok} {lab}\n")


def dumps_conll(corpus: Corpus) -> str:
    buf = io.StringIO()
    write_conll(corpus, buf)
    return buf.getvalue()


def extract_spans(labels: Sequence[str], scheme) -> List[Span]:
    """Spans encoded by ``labels``.

    Illegal sequences are repaired the way conlleval reads them: an I-/E-
    tag continues the open span only when the previous tag is B- or I- of
    the same type; otherwise it opens a new span.  E- and S- close their
    span immediately, and an open span closes at the sentence end.
    """
    scheme = Scheme.parse(scheme)
    spans = []
    open_type = None
    open_start = 0
    for i, lab in enumerate(labels):
        tag = parse_tag(lab, scheme)
        continues = (
            open_type is not None
            and tag.prefix in ("I", "E")
            and tag.entity_type == open_type
        )
        if not continues:
            if open_type is not None:
                spans.append(Span(open_type, open_start, i))
                open_type = None
            if tag.prefix != "O":
                open_type, open_start = tag.entity_type, i
        if tag.prefix in ("E", "S"):
            spans.append(Span(open_type, open_start, i + 1))
            open_type = None
    if open_type is not None:
        spans.append(Span(open_type, open_start, len(labels)))
    return spans


def encode_spans(spans: Iterable[Span], length: int, scheme) -> List[str]:
    scheme = Scheme.parse(scheme)
    labels = ["O"] * length
    prev_end, prev_type = -1, None
    for etype, start, end in sorted(spans, key=lambda s: s[1]):
        if not etype:
            raise ValueError("span needs a non-empty entity type")
        if not 0 <= start < end <= length:
            raise ValueError(f"span ({etype}, {start}, {end}) outside [0, {length})")
        if start < prev_end:
            raise ValueError(f"overlapping spans at token {start}")
        if scheme is Scheme.IOBES:
            if end - start == 1:
                labels[start] = f"S-{etype}"
            else:
                labels[start] = f"B-{etype}"
                labels[start + 1 : end - 1] = [f"I-{etype}"] * (end - start - 2)
                labels[end - 1] = f"E-{etype}"
        elif scheme is Scheme.BIO:
            labels[start] = f"B-{etype}"
            labels[start + 1 : end] = [f"I-{etype}"] * (end - start - 1)
        else:
            first = "B" if (prev_end == start and prev_type == etype) else "I"
            labels[start] = f"{first}-{etype}"
            labels[start + 1 : end] = [f"I-{etype}"] * (end - start - 1)
        prev_end, prev_type = end, etype
    return labels


def convert_scheme(labels: Sequence[str], source, target) -> List[str]:
    return encode_spans(extract_spans(labels, source), len(labels), target)


def convert_corpus(corpus: Corpus, target) -> Corpus:
    target = Scheme.parse(target)
    return corpus.with_labels(
        (convert_scheme(s.labels, corpus.scheme, target) for s in corpus.sentences), target
    )


def validate_sequence(labels: Sequence[str], scheme) -> List[Violation]:
    """Illegal transitions, GO and EOS boundaries included.

    ``position`` is the index of the second tag of the pair; an illegal
    ending is reported at ``len(labels)`` with label ``EOS``.
    """
    scheme = Scheme.parse(scheme)
    tags = [parse_tag(lab, scheme) for lab in labels]
    out = []
    prev, prev_label = GO_TAG, "GO"
    for i, (tag, lab) in enumerate(zip(tags, labels)):
        if not is_legal_transition(scheme, prev, tag):
            out.append(Violation(i, prev_label, lab))
        prev, prev_label = tag, lab
    if tags and not is_legal_transition(scheme, prev, EOS_TAG):
        out.append(Violation(len(tags), prev_label, "EOS"))
    return out
