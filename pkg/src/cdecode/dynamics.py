"""Corpus diagnostics that predict where constrained decoding helps:
label ambiguity, strict domination by the previous tag, and how often
entities start or end on an unambiguous token."""

from __future__ import annotations

import warnings
from collections import defaultdict
from dataclasses import asdict, dataclass

from .corpus import Corpus, convert_corpus, extract_spans
from .schemes import GO_TAG, Scheme, is_legal_transition, parse_tag


@dataclass(frozen=True)
class TagDynamicsReport:
    tag_types: int
    ambiguity_pct: float
    strictly_dominated_pct: float
    easy_first_pct: float
    easy_last_pct: float
    scheme: str = "IOBES"
    casefold: bool = False
    ambiguity_by: str = "occurrence"
    tokens: int = 0
    entities: int = 0

    def as_dict(self):
        return asdict(self)


def _form(token, casefold):
    return token.casefold() if casefold else token


def _in_scheme(corpus, scheme):
    scheme = Scheme.parse(scheme if scheme is not None else corpus.scheme)
    if scheme is not corpus.scheme:
        corpus = convert_corpus(corpus, scheme)
    return corpus, scheme


def token_label_sets(corpus: Corpus, casefold: bool = False) -> dict:
    """Surface form -> set of labels it carries anywhere in the corpus."""
    out = defaultdict(set)
    for sent in corpus.sentences:
        for tok, lab in zip(sent.tokens, sent.labels):
            out[_form(tok, casefold)].add(lab)
    return dict(out)


def ambiguity(corpus: Corpus, casefold: bool = False, by: str = "occurrence") -> float:
    """Percent of token occurrences (or distinct forms, ``by="form"``) whose
    form has more than one label."""
    if by not in ("occurrence", "form"):
        raise ValueError("by must be 'occurrence' or 'form'")
    sets = token_label_sets(corpus, casefold)
    if not sets:
        raise ValueError("ambiguity of an empty corpus is undefined")
    if by == "form":
        return 100.0 * sum(len(s) > 1 for s in sets.values()) / len(sets)
    total = amb = 0
    for sent in corpus.sentences:
        for tok in sent.tokens:
            total += 1
            amb += len(sets[_form(tok, casefold)]) > 1
    return 100.0 * amb / total


def strictly_dominated(corpus: Corpus, scheme=None, casefold: bool = False) -> float:
    """Percent of ambiguous occurrences left with exactly one legal label
    once the previous gold tag is known."""
    corpus, scheme = _in_scheme(corpus, scheme)
    sets = token_label_sets(corpus, casefold)
    parsed = {}
    for labs in sets.values():
        for lab in labs:
            if lab not in parsed:
                parsed[lab] = parse_tag(lab, scheme)
    ambiguous = dominated = 0
    for sent in corpus.sentences:
        prev = GO_TAG
        for tok, lab in zip(sent.tokens, sent.labels):
            options = sets[_form(tok, casefold)]
            if len(options) > 1:
                ambiguous += 1
                legal = sum(is_legal_transition(scheme, prev, parsed[o]) for o in options)
                dominated += legal == 1
            prev = parsed[lab]
    if not ambiguous:
        warnings.warn("corpus has no ambiguous tokens; strictly dominated is reported as 0")
        return 0.0
    return 100.0 * dominated / ambiguous


def easy_boundaries(corpus: Corpus, scheme=None, casefold: bool = False):
    """``(easy_first_pct, easy_last_pct)`` over entity occurrences."""
    corpus, scheme = _in_scheme(corpus, scheme)
    sets = token_label_sets(corpus, casefold)
    entities = first = last = 0
    for sent in corpus.sentences:
        for span in extract_spans(sent.labels, scheme):
            entities += 1
            first += len(sets[_form(sent.tokens[span.start], casefold)]) == 1
            last += len(sets[_form(sent.tokens[span.end - 1], casefold)]) == 1
    if not entities:
        raise ValueError("corpus contains no entities")
    return 100.0 * first / entities, 100.0 * last / entities


def analyze(corpus: Corpus, scheme=None, casefold: bool = False, ambiguity_by: str = "occurrence"):
    corpus, scheme = _in_scheme(corpus, scheme)
    types = set()
    entities = 0
    for sent in corpus.sentences:
        spans = extract_spans(sent.labels, scheme)
        entities += len(spans)
        types.update(s.entity_type for s in spans)
    easy_first, easy_last = easy_boundaries(corpus, scheme, casefold)
    return TagDynamicsReport(
        tag_types=len(types),
        ambiguity_pct=ambiguity(corpus, casefold, ambiguity_by),
        strictly_dominated_pct=strictly_dominated(corpus, scheme, casefold),
        easy_first_pct=easy_first,
        easy_last_pct=easy_last,
        scheme=scheme.value,
        casefold=casefold,
        ambiguity_by=ambiguity_by,
        tokens=corpus.num_tokens,
        entities=entities,
    )
