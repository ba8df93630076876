import io

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gectag import tags as T
from gectag.errors import MalformedTag, SizeTooSmall, UnknownGTransformation
from gectag.tags import Core, Tag, TagVocabulary, build_vocabulary, g_transformation_inventory, parse_tag


def test_parse_bare_and_suffixed():
    assert parse_tag("$KEEP") == Tag(Core.KEEP)
    assert parse_tag("$VERB_FORM_VB_VBZ") == Tag(Core.VERB_FORM, "VB_VBZ")
    assert parse_tag("$APPEND_for") == Tag(Core.APPEND, "for")
    assert parse_tag("$NOUN_NUMBER_SINGULAR") == Tag(Core.NOUN_NUMBER, "SINGULAR")
    assert parse_tag("$CASE_CAPITAL_1") == Tag(Core.CASE, "CAPITAL_1")


def test_suffix_is_case_sensitive():
    assert parse_tag("$REPLACE_The") != parse_tag("$REPLACE_the")


def test_suffix_may_contain_underscores_and_dollars():
    assert parse_tag("$APPEND_a_b").suffix == "a_b"
    assert parse_tag("$REPLACE_$").suffix == "$"


@pytest.mark.parametrize("text", ["", "KEEP", "$", "$FOO", "$KEEP_x", "$APPEND", "$APPEND_", "$DELETE_it"])
def test_malformed(text):
    with pytest.raises(MalformedTag):
        parse_tag(text)


@pytest.mark.parametrize("text", ["$VERB_FORM_VB_VB", "$CASE_TITLE", "$MERGE_DASH", "$SPLIT_SPACE"])
def test_unknown_g_suffix(text):
    with pytest.raises(UnknownGTransformation):
        parse_tag(text)


def test_inventory_shape():
    inv = g_transformation_inventory()
    assert len(inv) == 29 == len(set(inv))
    assert Tag(Core.MERGE, "SPACE") in inv
    assert sum(t.core is Core.VERB_FORM for t in inv) == 20
    # fixed order: case, merge, split, noun number, verb form
    assert [t.render() for t in inv[:9]] == [
        "$CASE_CAPITAL", "$CASE_CAPITAL_1", "$CASE_LOWER", "$CASE_UPPER",
        "$MERGE_SPACE", "$MERGE_HYPHEN", "$SPLIT_HYPHEN",
        "$NOUN_NUMBER_SINGULAR", "$NOUN_NUMBER_PLURAL",
    ]
    assert inv[9].render() == "$VERB_FORM_VB_VBZ"
    assert inv[13].render() == "$VERB_FORM_VBZ_VB"
    assert inv[28].render() == "$VERB_FORM_VBG_VBD"


def test_build_vocabulary_examples():
    counts = {T.append(f"w{i}"): 1 + i % 7 for i in range(5000)}
    counts.update({T.replace(f"w{i}"): 1 + i % 5 for i in range(5000)})
    vocab = build_vocabulary(counts, 5000)
    assert len(vocab) == 5000
    assert all(t in vocab for t in g_transformation_inventory())

    assert list(build_vocabulary({}, 33)) == list(T.RESERVED) + g_transformation_inventory()

    v = build_vocabulary({T.append("to"): 5, T.replace("a"): 3}, 34)
    assert T.append("to") in v and T.replace("a") not in v


def test_ties_broken_by_rendered_string():
    v = build_vocabulary({T.replace("b"): 2, T.append("z"): 2, T.replace("a"): 2}, 35)
    assert [t.render() for t in v.tags[33:]] == ["$APPEND_z", "$REPLACE_a"]


def test_size_too_small():
    with pytest.raises(SizeTooSmall):
        build_vocabulary({}, 32)


def test_g_counts_do_not_take_basic_slots():
    v = build_vocabulary({T.Tag(Core.CASE, "LOWER"): 100, T.KEEP: 1000, T.append("x"): 1}, 34)
    assert T.append("x") in v


def test_vocab_file_round_trip(tmp_path):
    v = build_vocabulary({T.append("to"): 5, T.replace("The"): 3}, 100)
    path = tmp_path / "vocab.txt"
    v.save(path)
    loaded = TagVocabulary.load(path)
    assert loaded.tags == v.tags
    assert loaded.checksum == v.checksum
    assert path.read_text(encoding="utf-8").splitlines()[v.id_of(T.append("to"))] == "$APPEND_to"


def test_vocab_requires_reserved_and_g_tags():
    with pytest.raises(MalformedTag):
        TagVocabulary((T.KEEP, T.DELETE))
    with pytest.raises(MalformedTag):
        TagVocabulary.from_lines(["$KEEP", "$KEEP"])


def test_vocab_file_error_has_line_number():
    with pytest.raises(MalformedTag, match="line 2"):
        TagVocabulary.from_lines(["$KEEP", "$BOGUS"])


def test_counts_round_trip():
    counts = {T.append("to"): 5, T.replace("a"): 3, T.KEEP: 9}
    buf = io.StringIO()
    T.write_counts(counts, buf)
    assert T.read_counts(io.StringIO(buf.getvalue())) == counts


# -- properties ---------------------------------------------------------------------

token_text = st.text(
    alphabet=st.characters(blacklist_categories=("Cs", "Zs", "Cc", "Zl", "Zp")), min_size=1, max_size=8
)
basic_tags = st.builds(lambda core, s: Tag(core, s), st.sampled_from([Core.APPEND, Core.REPLACE]), token_text)
any_tags = st.one_of(basic_tags, st.sampled_from(list(T.RESERVED) + g_transformation_inventory()))


@given(any_tags)
def test_parse_render_round_trip(tag):
    assert parse_tag(tag.render()) == tag


@given(st.dictionaries(basic_tags, st.integers(1, 50), max_size=40), st.integers(33, 80), st.integers(0, 20))
@settings(max_examples=60)
def test_vocab_deterministic_and_monotone(counts, size, extra):
    a = build_vocabulary(counts, size)
    b = build_vocabulary(dict(reversed(list(counts.items()))), size)
    assert a.tags == b.tags
    assert len(a) == min(size, 33 + len(counts))
    bigger = build_vocabulary(counts, size + extra)
    assert set(a.tags) <= set(bigger.tags)
    assert all(a.id_of(t) == bigger.id_of(t) for t in a)
    assert all(a.tag_of(a.id_of(t)) == t for t in a)
