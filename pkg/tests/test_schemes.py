import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cdecode.corpus import Span, encode_spans
from cdecode.schemes import (
    EOS_TAG,
    GO_TAG,
    MaskError,
    Scheme,
    Tag,
    TagError,
    TagVocabulary,
    build_transition_mask,
    is_legal_transition,
    mask_to_scores,
    parse_tag,
)

IOBES = Scheme.IOBES
BIO = Scheme.BIO
IOB1 = Scheme.IOB1


def test_parse_outside():
    assert parse_tag("O", IOBES) == Tag("O")


def test_parse_typed():
    assert parse_tag("I-LOC", IOBES) == Tag("I", "LOC")


def test_parse_splits_on_first_hyphen():
    assert parse_tag("B-WORK_OF_ART", IOBES).entity_type == "WORK_OF_ART"
    assert parse_tag("S-creative-work", IOBES) == Tag("S", "creative-work")


@pytest.mark.parametrize(
    "label,scheme",
    [("E-ORG", BIO), ("S-ORG", IOB1), ("B-", IOBES), ("X-ORG", IOBES), ("", IOBES), ("LOC", BIO), ("O-LOC", IOBES)],
)
def test_parse_rejects(label, scheme):
    with pytest.raises(TagError):
        parse_tag(label, scheme)


def test_parse_error_names_label():
    with pytest.raises(TagError, match="E-ORG"):
        parse_tag("E-ORG", BIO)


def test_scheme_aliases():
    assert Scheme.parse("iob2") is BIO
    assert Scheme.parse("iobes") is IOBES
    with pytest.raises(ValueError):
        Scheme.parse("BILOU")


def T(label):
    return parse_tag(label, IOBES)


@pytest.mark.parametrize(
    "prev,cur,expected",
    [
        ("O", "E-ORG", False),
        ("I-ORG", "I-LOC", False),
        ("O", "O", True),
        ("B-LOC", "I-LOC", True),
        ("B-LOC", "E-LOC", True),
        ("B-LOC", "O", False),
        ("E-LOC", "B-ORG", True),
        ("S-LOC", "S-LOC", True),
        ("S-LOC", "I-LOC", False),
        ("I-PER", "E-PER", True),
    ],
)
def test_iobes_rules(prev, cur, expected):
    assert is_legal_transition(IOBES, T(prev), T(cur)) is expected


def test_iobes_boundaries():
    assert is_legal_transition(IOBES, GO_TAG, T("B-X"))
    assert is_legal_transition(IOBES, GO_TAG, T("S-X"))
    assert not is_legal_transition(IOBES, GO_TAG, T("I-X"))
    assert not is_legal_transition(IOBES, GO_TAG, T("E-X"))
    assert is_legal_transition(IOBES, T("E-X"), EOS_TAG)
    assert not is_legal_transition(IOBES, T("B-X"), EOS_TAG)
    assert not is_legal_transition(IOBES, T("I-X"), EOS_TAG)
    assert not is_legal_transition(IOBES, GO_TAG, EOS_TAG)


def test_bio_rules():
    b = lambda s: parse_tag(s, BIO)  # noqa: E731
    assert not is_legal_transition(BIO, b("O"), b("I-X"))
    assert not is_legal_transition(BIO, GO_TAG, b("I-X"))
    assert not is_legal_transition(BIO, b("B-Y"), b("I-X"))
    assert is_legal_transition(BIO, b("I-X"), b("I-X"))
    assert is_legal_transition(BIO, b("I-X"), b("B-X"))
    assert is_legal_transition(BIO, b("B-X"), EOS_TAG)


def test_iob1_rules():
    b = lambda s: parse_tag(s, IOB1)  # noqa: E731
    assert is_legal_transition(IOB1, GO_TAG, b("I-X"))
    assert not is_legal_transition(IOB1, GO_TAG, b("B-X"))
    assert is_legal_transition(IOB1, b("I-X"), b("B-X"))
    assert not is_legal_transition(IOB1, b("I-Y"), b("B-X"))
    assert not is_legal_transition(IOB1, b("O"), b("B-X"))
    assert is_legal_transition(IOB1, b("I-Y"), b("I-X"))


def test_vocabulary_indices():
    v = TagVocabulary(["O", "B-X", "I-X"], BIO)
    assert (v.go_index, v.eos_index) == (3, 4)
    assert v.index_of("I-X") == 2
    assert v.decode(v.encode(["I-X", "O"])) == ["I-X", "O"]
    with pytest.raises(ValueError):
        TagVocabulary(["O", "O"], BIO)
    with pytest.raises(TagError):
        TagVocabulary(["O", "E-X"], BIO)


def test_single_tag_mask():
    mask = build_transition_mask(IOBES, TagVocabulary(["O"], IOBES))
    assert {tuple(x) for x in np.argwhere(mask.allowed)} == {(1, 0), (0, 0), (0, 2)}


def test_full_iobes_mask_count_matches_enumeration():
    labels = ["O", "B-X", "I-X", "E-X", "S-X"]
    mask = build_transition_mask(IOBES, TagVocabulary(labels, IOBES))
    enumerated = sum(is_legal_transition(IOBES, T(a), T(b)) for a, b in itertools.product(labels, labels))
    # O, E, S each reach {O, B, S}; B and I each reach {I, E}
    assert enumerated == 13
    assert mask.allowed[:5, :5].sum() == 13


def test_bio_mask():
    v = TagVocabulary(["O", "B-X", "I-X"], BIO)
    mask = build_transition_mask(BIO, v)
    assert not mask.allowed[v.index_of("O"), v.index_of("I-X")]
    assert mask.allowed[v.index_of("B-X"), v.index_of("I-X")]


@pytest.mark.parametrize("scheme", list(Scheme))
def test_mask_invariants(scheme):
    v = TagVocabulary.from_types(["PER", "LOC", "ORG", "MISC"], scheme)
    a = build_transition_mask(scheme, v).allowed
    t = len(v)
    assert not a[:, v.go_index].any()
    assert not a[v.eos_index, :].any()
    assert a[:t, :t].any(axis=1).all()
    assert a[v.go_index, :t].any()


def test_dead_end_rejected():
    with pytest.raises(MaskError):
        build_transition_mask(IOBES, TagVocabulary(["O", "B-X"], IOBES))
    with pytest.raises(MaskError):
        build_transition_mask(IOBES, TagVocabulary(["I-X", "E-X"], IOBES))


def test_mask_to_scores():
    one = build_transition_mask(IOBES, TagVocabulary(["O"], IOBES))
    s = mask_to_scores(one.allowed[:1, :1], -1e4)
    assert s.tolist() == [[0.0]]
    v = TagVocabulary(["O", "B-X", "I-X", "E-X", "S-X"], IOBES)
    mask = build_transition_mask(IOBES, v)
    s = mask_to_scores(mask, -1e4)
    assert s[v.index_of("O"), v.index_of("E-X")] == -1e4
    inf = mask_to_scores(mask, -np.inf)
    assert (inf[mask.allowed] == 0).all() and (inf[~mask.allowed] == -np.inf).all()
    for bad in (0.0, 1.0, np.nan, np.inf):
        with pytest.raises(ValueError):
            mask_to_scores(mask, bad)


def test_mask_deterministic():
    v = TagVocabulary.from_types(["A", "B"], IOBES)
    assert build_transition_mask(IOBES, v) == build_transition_mask(IOBES, v)


@given(st.sampled_from(list(Scheme)), st.permutations(["A", "B", "C"]))
def test_type_renaming_permutes_mask(scheme, renamed):
    src = TagVocabulary.from_types(["A", "B", "C"], scheme)
    rename = dict(zip("ABC", renamed))
    dst_labels = [lab if lab == "O" else f"{lab[0]}-{rename[lab[2:]]}" for lab in src.labels]
    dst = TagVocabulary(dst_labels, scheme)
    assert np.array_equal(build_transition_mask(scheme, src).allowed, build_transition_mask(scheme, dst).allowed)


span_sets = st.integers(1, 12).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(st.tuples(st.sampled_from("XYZ"), st.integers(0, n - 1), st.integers(1, 3)), max_size=5),
    )
)


def _non_overlapping(n, raw):
    spans, taken = [], set()
    for typ, start, width in raw:
        end = min(n, start + width)
        if taken.isdisjoint(range(start, end)):
            taken.update(range(start, end))
            spans.append(Span(typ, start, end))
    return sorted(spans, key=lambda s: s.start)


@given(span_sets, st.sampled_from(list(Scheme)))
def test_gold_sequences_are_legal(case, scheme):
    n, raw = case
    labels = encode_spans(_non_overlapping(n, raw), n, scheme)
    tags = [GO_TAG] + [parse_tag(lab, scheme) for lab in labels] + [EOS_TAG]
    assert all(is_legal_transition(scheme, a, b) for a, b in zip(tags, tags[1:]))
