import pytest
from hypothesis import given
from hypothesis import strategies as st

from cases import PUBLISHED_TRIPLES
from conftest import WORKED_SOURCE, WORKED_TARGET
from gectag.errors import LengthMismatch
from gectag.evaluation import EditSpan, extract_edits, f_beta, score, scores_from_counts


def test_identical_sentences_have_no_edits(verbs, nouns):
    assert extract_edits(WORKED_SOURCE, WORKED_SOURCE, verbs, nouns) == []


def test_worked_example_spans(verbs, nouns):
    assert extract_edits(WORKED_SOURCE, WORKED_TARGET, verbs, nouns) == [
        EditSpan(1, 4, ("ten-year-old",)),
        EditSpan(5, 6, ("goes", "to")),
        EditSpan(7, 7, (".",)),
    ]


def test_pure_insertion_at_end(verbs, nouns):
    assert extract_edits(["a", "b"], ["a", "b", "c"], verbs, nouns) == [EditSpan(2, 2, ("c",))]


def test_deletion_span(verbs, nouns):
    assert extract_edits(["a", "x", "b"], ["a", "b"], verbs, nouns) == [EditSpan(1, 2, ())]


def test_f_beta_published_examples():
    # the combiner applied to two published rows, read at one decimal
    assert round(100 * f_beta(0.737, 0.411), 1) == 63.6
    assert abs(100 * f_beta(0.775, 0.402) - 65.3) < 0.1


def test_f_beta_conventions():
    assert f_beta(0.0, 0.0) == 0.0
    s = scores_from_counts(0, 0, 0)
    assert (s.precision, s.recall, s.f05) == (1.0, 1.0, 1.0)
    s = scores_from_counts(0, 0, 5)
    assert (s.precision, s.recall, s.f05) == (1.0, 0.0, 0.0)


def test_score_perfect_and_copy(verbs, nouns):
    sources = [WORKED_SOURCE, ["ok"]]
    refs = [WORKED_TARGET, ["ok"]]
    perfect = score(sources, refs, refs, verbs, nouns)
    assert (perfect.precision, perfect.recall, perfect.f05) == (1.0, 1.0, 1.0)
    copy = score(sources, sources, refs, verbs, nouns)
    assert (copy.tp, copy.fp, copy.fn) == (0, 0, 3)
    assert copy.f05 == 0.0


def test_score_partial(verbs, nouns):
    hyp = "A ten-year-old boy go school .".split()
    s = score([WORKED_SOURCE], [hyp], [WORKED_TARGET], verbs, nouns)
    assert (s.tp, s.fp, s.fn) == (2, 0, 1)
    assert s.report() == "TP=2 FP=0 FN=1  P=100.0 R=66.7 F0.5=90.9"


def test_length_mismatch(verbs, nouns):
    with pytest.raises(LengthMismatch):
        score([["a"]], [], [["a"]], verbs, nouns)


unit = st.floats(0.0, 1.0)


@given(unit)
def test_f_of_equal_p_r(x):
    assert f_beta(x, x) == pytest.approx(x, abs=1e-12)


@given(unit, unit, unit)
def test_f_monotone(p, r, d):
    assert f_beta(min(1.0, p + d), r) >= f_beta(p, r) - 1e-12
    assert f_beta(p, min(1.0, r + d)) >= f_beta(p, r) - 1e-12


words = st.sampled_from("a the cat cats go goes in to into long-run long run . ,".split())


@given(st.lists(words, max_size=8))
def test_no_edits_against_self(verbs, nouns, s):
    assert extract_edits(s, s, verbs, nouns) == []


@given(st.lists(words, max_size=6), st.lists(words, max_size=6))
def test_spans_sorted_disjoint_in_bounds(verbs, nouns, s, t):
    spans = extract_edits(s, t, verbs, nouns)
    for e in spans:
        assert 0 <= e.start <= e.end <= len(s)
    for a, b in zip(spans, spans[1:]):
        assert a.end <= b.start


@given(st.lists(st.tuples(st.lists(words, min_size=1, max_size=5), st.lists(words, max_size=5),
                          st.lists(words, max_size=5)), min_size=1, max_size=5), st.randoms())
def test_score_order_free(verbs, nouns, triples, rng):
    shuffled = list(triples)
    rng.shuffle(shuffled)
    a = score(*zip(*triples), verbs, nouns)
    b = score(*zip(*shuffled), verbs, nouns)
    assert a == b


def test_published_triples_consistent_with_rounding():
    # P and R are published at one decimal, so the true values lie within
    # 0.05 of them; F is monotone in both, bounding what F can be
    for p, r, f in PUBLISHED_TRIPLES:
        low = 100 * f_beta((p - 0.05) / 100, (r - 0.05) / 100)
        high = 100 * f_beta((p + 0.05) / 100, (r + 0.05) / 100)
        assert low - 0.05 <= f <= high + 0.05, (p, r, f, low, high)
