import io
import json

import pytest
from hypothesis import given, strategies as st

from helpers import text
from xlsent.corpus import (BINARY, FOUR_CLASS, THREE_CLASS, LabeledSentence, TargetedInstance,
                           dump_corpus, get_schema, group_by_sentence, load_corpus, map_labels,
                           split_at_target, to_sentence_level)
from xlsent.errors import ArgumentError, FormatError


def jsonl(*records):
    return io.StringIO("".join(json.dumps(r) + "\n" for r in records))


def test_load_targeted_record():
    (inst,) = load_corpus(jsonl({"tokens": ["good", "food"], "label": "positive", "target": [1, 2]}), BINARY)
    assert (inst.target_start, inst.target_end, inst.label) == (1, 2, 1)


def test_unknown_label():
    with pytest.raises(FormatError, match="line 1"):
        load_corpus(jsonl({"tokens": ["x"], "label": "excellent"}), BINARY)


def test_empty_and_out_of_bounds_spans():
    with pytest.raises(FormatError):
        load_corpus(jsonl({"tokens": ["a", "b", "c"], "label": "positive", "target": [2, 2]}), BINARY)
    with pytest.raises(FormatError, match="line 2"):
        load_corpus(jsonl({"tokens": ["a"], "label": "positive"},
                          {"tokens": ["a"], "label": "positive", "target": [0, 2]}), BINARY)


def test_overlapping_spans_in_one_sentence_rejected():
    recs = [{"tokens": ["a", "b", "c"], "label": "positive", "target": [0, 2], "sid": "s"},
            {"tokens": ["a", "b", "c"], "label": "negative", "target": [1, 3], "sid": "s"}]
    with pytest.raises(FormatError, match="overlap"):
        load_corpus(jsonl(*recs), BINARY)


def test_invalid_json_line():
    with pytest.raises(FormatError, match="line 1"):
        load_corpus(io.StringIO("{nope\n"), BINARY)


def test_order_preserved_and_roundtrip():
    recs = [{"tokens": [f"w{i}"], "label": "negative" if i % 2 else "positive"} for i in range(6)]
    data = load_corpus(jsonl(*recs), BINARY)
    assert [i.tokens[0] for i in data] == [f"w{i}" for i in range(6)]
    assert load_corpus(io.StringIO(text(dump_corpus, data, BINARY)), BINARY) == data


def test_drop_mixed_polarity():
    recs = [{"tokens": ["a", "b"], "label": "positive", "target": [0, 1], "sid": "1"},
            {"tokens": ["a", "b"], "label": "negative", "target": [1, 2], "sid": "1"},
            {"tokens": ["c", "d"], "label": "positive", "target": [0, 1], "sid": "2"}]
    data = load_corpus(jsonl(*recs), BINARY, drop_mixed=True)
    assert [i.sid for i in data] == ["2"]


def test_map_labels_binary():
    corpus = [TargetedInstance(("x",), FOUR_CLASS.index(n)) for n in FOUR_CLASS.names]
    out, schema = map_labels(corpus, FOUR_CLASS, "binary")
    assert schema == BINARY
    assert [schema.names[i.label] for i in out] == ["negative", "negative", "positive", "positive"]


def test_map_labels_drops_neutral():
    corpus = [TargetedInstance(("x",), i) for i in (0, 1, 2, 1)]
    out, _ = map_labels(corpus, THREE_CLASS, "binary")
    assert len(out) == 2
    same, schema = map_labels(corpus, THREE_CLASS, "multiclass")
    assert same == corpus and schema == THREE_CLASS


def test_map_labels_needs_multiclass_source():
    with pytest.raises(ArgumentError):
        map_labels([], BINARY, "binary")


@given(st.lists(st.integers(0, 3), max_size=30))
def test_map_labels_counts(labels):
    corpus = [TargetedInstance(("x",), y) for y in labels]
    schema = get_schema("strong_negative,neutral,positive,strong_positive")
    out, _ = map_labels(corpus, schema, "binary")
    assert len(out) == len(labels) - labels.count(1)
    assert len(map_labels(corpus, schema, "multiclass")[0]) == len(labels)


def test_split_at_target_cases():
    inst = TargetedInstance(("a", "b", "T", "c"), 0, 2, 3)
    assert split_at_target(inst) == (("a", "b"), ("T",), ("c",))
    assert split_at_target(TargetedInstance(("t", "x"), 0, 0, 1)) == ((), ("t",), ("x",))
    assert split_at_target(TargetedInstance(("a", "b"), 0, 0, 2)) == ((), ("a", "b"), ())
    with pytest.raises(ArgumentError):
        split_at_target(TargetedInstance(("a",), 0))


@given(st.lists(st.sampled_from("abcde"), min_size=1, max_size=12), st.data())
def test_split_at_target_reconstructs(tokens, data):
    start = data.draw(st.integers(0, len(tokens) - 1))
    end = data.draw(st.integers(start + 1, len(tokens)))
    left, target, right = split_at_target(TargetedInstance(tuple(tokens), 0, start, end))
    assert left + target + right == tuple(tokens)
    assert len(target) == end - start


def test_to_sentence_level_majority_and_ties():
    corpus = [TargetedInstance(("a", "b", "c"), 1, 0, 1, "s"),
              TargetedInstance(("a", "b", "c"), 1, 1, 2, "s"),
              TargetedInstance(("a", "b", "c"), 0, 2, 3, "s"),
              TargetedInstance(("d", "e"), 1, 0, 1, "t"),
              TargetedInstance(("d", "e"), 0, 1, 2, "t")]
    assert to_sentence_level(corpus) == [LabeledSentence(("a", "b", "c"), 1), LabeledSentence(("d", "e"), 0)]
    assert group_by_sentence(corpus) == {"s": [0, 1, 2], "t": [3, 4]}


def test_schema_from_names():
    schema = get_schema("bad,ok,great")
    assert schema.arity == 3 and schema.index("great") == 2
