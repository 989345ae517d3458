import pickle

import pytest

from nbestgec.annotate import (
    BuiltinAnnotator,
    FileAnnotator,
    TokenAnnotations,
    annotate,
    chunk_heads,
    nearest_head_left,
    nearest_head_right,
    parse_annotation_file,
    serialize_annotations,
    tag,
)
from nbestgec.corpus import tokens

from conftest import WAITS_SENTENCE


def test_waits_sentence_heads():
    ann = annotate(BuiltinAnnotator(), WAITS_SENTENCE)
    assert {1, 5, 9} <= set(ann.np_heads)
    assert {2, 7} <= set(ann.vp_heads)
    assert ann.pos[2] == "VBZ"


def test_empty_and_single_verb():
    assert annotate(BuiltinAnnotator(), ()) == TokenAnnotations(())
    ann = annotate(BuiltinAnnotator(), ("run",))
    assert ann.pos == ("VB",) and ann.vp_heads == (0,) and ann.np_heads == ()


def test_nearest_heads():
    assert nearest_head_left((1, 5), 2) == 1
    assert nearest_head_left((), 4) is None
    assert nearest_head_left((2, 7), 2) is None
    assert nearest_head_right((1, 5), 3) == 5
    assert nearest_head_right((1, 5), 6) is None


@pytest.mark.parametrize(
    "sentence, expected",
    [
        ("the cat sat on the dog .", ("DT", "NN", "VBD", "IN", "DT", "NN", ".")),
        ("people with albinism is prone to sunburn .", ("NNS", "IN", "NN", "VBZ", "JJ", "TO", "NN", ".")),
        ("he has opened the windows", ("PRP", "VBZ", "VBN", "DT", "NNS")),
        ("they can eat apples", ("PRP", "MD", "VB", "NNS")),
        ("the dogs run", ("DT", "NNS", "VBP")),
    ],
)
def test_tagger_on_common_patterns(sentence, expected):
    assert tag(tokens(sentence)) == expected


def test_unknown_words_use_suffix_rules():
    pos = tag(tokens("the zorblings quickly florped"))
    assert pos[1] == "VBG" or pos[1].startswith("NN")
    assert pos[2] == "RB" and pos[3] == "VBD"


def test_chunker_rules():
    np_heads, vp_heads = chunk_heads(("DT", "JJ", "NN", "NN", "MD", "VB", "PRP"))
    assert np_heads == (3, 6) and vp_heads == (5,)


def test_file_provider_round_trip():
    ann = annotate(BuiltinAnnotator(), WAITS_SENTENCE)
    text = serialize_annotations([(WAITS_SENTENCE, ann)])
    table = parse_annotation_file(text)
    provider = FileAnnotator(table)
    assert annotate(provider, WAITS_SENTENCE) == ann
    with pytest.raises(KeyError):
        annotate(provider, ("unseen",))


def test_annotation_file_errors():
    with pytest.raises(ValueError):
        parse_annotation_file("a b\nDT\nNP: VP:\n")
    with pytest.raises(ValueError):
        parse_annotation_file("a b\nDT NN\n")
    with pytest.raises(ValueError):
        parse_annotation_file("a\nNN\nNP:x VP:\n")


def test_head_bounds_checked():
    with pytest.raises(ValueError):
        TokenAnnotations(("NN",), (3,), ())


def test_arity_checked():
    class Broken:
        def annotate(self, sentence):
            return TokenAnnotations(("NN",))

    with pytest.raises(ValueError):
        annotate(Broken(), ("a", "b"))


def test_builtin_provider_pickles():
    assert isinstance(pickle.loads(pickle.dumps(BuiltinAnnotator())), BuiltinAnnotator)
