import math

import pytest
from hypothesis import given, settings, strategies as st

from nbestgec.align import Edit
from nbestgec.annotate import BuiltinAnnotator, TokenAnnotations, annotate
from nbestgec.corpus import AnnotatedSentence, GoldEdit, NBestEntry, NBestList, tokens
from nbestgec.features import (
    EPS,
    GROUPS,
    TEMPLATE_GROUP,
    FeatureExtractor,
    FeatureVector,
    LabeledExample,
    build_dictionary,
    extract_features,
    label_edits,
    parse_dictionary,
    parse_examples,
    serialize_dictionary,
    serialize_examples,
    vectorize,
)

from conftest import GOLDEN, WAITS_SENTENCE

WAITS_SAT = Edit(2, 3, ("waits",), ("sat",), 1)


def waits_nbest():
    hyp = tokens("the cat sat on the dog and eats a mouse .")
    return NBestList(0, WAITS_SENTENCE, (NBestEntry(1, hyp, {"tm": 0.0}, 0.0),))


def features(edit, source=WAITS_SENTENCE, nbest=None, lm=None, groups=None):
    return extract_features(edit, source, nbest, annotate(BuiltinAnnotator(), source), lm, groups)


def test_waits_sat_golden(toy_lm):
    v = features(WAITS_SAT, nbest=waits_nbest(), lm=toy_lm)
    cats, nums = [], {}
    for line in (GOLDEN / "waits_sat_features.txt").read_text().splitlines():
        kind, *rest = line.split("\t")
        if kind == "c":
            cats.append(rest[0])
        else:
            nums[rest[0]] = float(rest[1])
    assert list(v.categorical) == cats
    assert v.numerical.keys() == nums.keys()
    for k, x in nums.items():
        assert math.isclose(v.numerical[k], x, abs_tol=1e-9), k


def test_lm_group_only(toy_lm):
    v = features(WAITS_SAT, lm=toy_lm, groups=["lm"])
    assert v.categorical == () and len(v.numerical) == 10


def test_lm_differences_are_consistent(toy_lm):
    v = features(WAITS_SAT, lm=toy_lm, groups=["lm"]).numerical
    assert v["lm_diff_phrase"] == v["lm_hyp_phrase"] - v["lm_src_phrase"]
    assert v["lm_diff_sent"] == v["lm_hyp"] - v["lm_src"]


def test_insertion_uses_sentinel():
    v = features(Edit(3, 3, (), ("very",), 1), groups=["lexical_pos"])
    assert "src_phrase=<eps>" in v.categorical
    assert f"pos_src={EPS}" in v.categorical


def test_boundaries_use_null():
    v = features(Edit(0, 1, ("the",), ("a",), 1), groups=["context"])
    assert "before_src=NULL+the" in v.categorical
    v = features(Edit(10, 11, (".",), ("!",), 1), groups=["context"])
    assert "after_hyp=!+NULL" in v.categorical


@pytest.mark.parametrize("drop", GROUPS)
def test_disabling_a_group_removes_only_its_features(drop, toy_lm):
    full = features(WAITS_SAT, lm=toy_lm)
    part = features(WAITS_SAT, lm=toy_lm, groups=[g for g in GROUPS if g != drop])
    assert part == full.restrict(g for g in GROUPS if g != drop)
    names = [c.partition("=")[0] for c in full.categorical] + list(full.numerical)
    assert any(TEMPLATE_GROUP[n] == drop for n in names)


def test_annotation_arity_mismatch():
    with pytest.raises(ValueError):
        extract_features(WAITS_SAT, WAITS_SENTENCE, None, TokenAnnotations(("NN",)), None, ["smt"])


def test_lm_group_needs_model():
    with pytest.raises(ValueError):
        features(WAITS_SAT, groups=["lm"])


def test_unknown_group():
    with pytest.raises(ValueError):
        features(WAITS_SAT, groups=["syntax"])
    with pytest.raises(ValueError):
        features(WAITS_SAT, groups=[])


ROW2_SRC = tokens("He carries a gun into his pocket and walk into the bar .")


def row2_gold():
    return AnnotatedSentence.build(
        ROW2_SRC, {0: [GoldEdit(4, 5, ("in",), "Prep", 0), GoldEdit(8, 9, ("walks",), "SVA", 0)]}
    )


def test_label_edits_valid_and_invalid():
    hyp = tokens("He carries a gun in his pocket and walking into the bar .")
    nb = NBestList(0, ROW2_SRC, (NBestEntry(1, hyp, {"tm": 0.0}, 0.0),))
    examples = label_edits(nb, row2_gold(), FeatureExtractor(None, groups=["smt"]))
    assert [(ex.edit.replacement, ex.valid) for ex in examples] == [(("in",), True), (("walking",), False)]


def test_label_without_gold():
    nb = NBestList(0, ("a", "b"), (NBestEntry(1, ("a", "c"), {"tm": 0.0}, 0.0),))
    (ex,) = label_edits(nb, AnnotatedSentence.build(("a", "b"), {0: []}), FeatureExtractor(None, groups=["smt"]))
    assert not ex.valid


def test_label_pools_annotators():
    gold = AnnotatedSentence.build(("a", "b"), {0: [], 1: [GoldEdit(1, 2, ("c",), "X", 1)]})
    nb = NBestList(0, ("a", "b"), (NBestEntry(1, ("a", "c"), {"tm": 0.0}, 0.0),))
    (ex,) = label_edits(nb, gold, FeatureExtractor(None, groups=["smt"]))
    assert ex.valid


def test_shared_edit_takes_best_rank():
    src = tokens("a b c d")
    entries = (
        NBestEntry(1, tokens("a x c d"), {"tm": 0.0}, 0.0),
        NBestEntry(2, tokens("a b c y"), {"tm": 0.0}, 0.0),
        NBestEntry(3, tokens("a x c y"), {"tm": 0.0}, 0.0),
    )
    nb = NBestList(0, src, entries)
    examples = label_edits(nb, AnnotatedSentence.build(src, {0: []}), FeatureExtractor(None, groups=["smt"]))
    assert len(examples) == 2
    assert {ex.edit.replacement: ex.vector.numerical["rank"] for ex in examples} == {("x",): 1.0, ("y",): 2.0}


def test_label_rejects_source_mismatch():
    nb = NBestList(0, ("a",), (NBestEntry(1, ("a",), {"tm": 0.0}, 0.0),))
    with pytest.raises(ValueError):
        label_edits(nb, AnnotatedSentence.build(("b",), {0: []}), FeatureExtractor(None, groups=["smt"]))


def test_dictionary_ids_and_std():
    d = build_dictionary([FeatureVector(("a=1", "b=2", "c=3"), {"x": 4.0})])
    assert d.index == {"a=1": 0, "b=2": 1, "c=3": 2}
    assert d.stds == [1.0] and d.means == [4.0]
    assert list(vectorize(FeatureVector((), {"x": 4.0}), d).indices) == []


def test_dictionary_min_count():
    vs = [FeatureVector(("a=1", "b=2")), FeatureVector(("a=1",))]
    d = build_dictionary(vs, min_count=2)
    assert d.index == {"a=1": 0}
    x = vectorize(FeatureVector(("b=2", "a=1", "zzz=0")), d)
    assert list(x.indices) == [0] and list(x.values) == [1.0]


def test_vectorize_standardises():
    d = build_dictionary([FeatureVector(("a=1",), {"x": 1.0}), FeatureVector((), {"x": 3.0})])
    x = vectorize(FeatureVector((), {"x": 5.0}), d)
    assert list(x.indices) == [1] and list(x.values) == [3.0]


def test_empty_dictionary_input():
    with pytest.raises(ValueError):
        build_dictionary([])


vectors = st.builds(
    FeatureVector,
    st.lists(st.sampled_from(["src_phrase=a", "src_phrase=b;c", "hyp_phrase=\\x", "npL=NULL+a+b"]), unique=True).map(tuple),
    st.dictionaries(st.sampled_from(["rank", "lm_src", "lm_hyp"]), st.floats(-50, 50)),
)


@settings(max_examples=100, deadline=None)
@given(st.lists(vectors, min_size=1, max_size=6), vectors)
def test_vectorize_is_total_and_finite(train, probe):
    d = build_dictionary(train)
    x = vectorize(probe, d)
    assert all(0 <= i < d.dim for i in x.indices)
    assert all(math.isfinite(v) for v in x.values)


@settings(max_examples=50, deadline=None)
@given(st.lists(vectors, min_size=1, max_size=6))
def test_dictionary_round_trip(train):
    d = build_dictionary(train)
    assert parse_dictionary(serialize_dictionary(d)) == d


@settings(max_examples=50, deadline=None)
@given(st.lists(vectors, max_size=4), st.booleans())
def test_example_file_round_trip(vs, valid):
    exs = [LabeledExample(v, valid, i, Edit(1, 2, ("b",), ("c", "d"), 2)) for i, v in enumerate(vs)]
    assert parse_examples(serialize_examples(exs)) == exs
