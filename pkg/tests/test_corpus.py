import io
import json

import pytest
from hypothesis import given, strategies as st

from visotext.corpus import (
    Comment,
    Corpus,
    CorpusError,
    DatasetSplit,
    load_corpus,
    parse_corpus,
    save_corpus,
    spans_from_tags,
)


def test_round_trip_file(tmp_path):
    corpus = Corpus(
        (
            Comment("1", "e cảmơn anh😎😎", label="positive", source="facebook"),
            Comment("2", "đồ ngu vãi", spans=((1, 3),)),
        ),
        name="t",
    )
    path = tmp_path / "c.jsonl"
    save_corpus(corpus, path)
    assert load_corpus(path).comments == corpus.comments
    # Non-ASCII is written as-is.
    assert "cảmơn" in path.read_text(encoding="utf-8")


def test_duplicate_ids_rejected():
    with pytest.raises(CorpusError):
        Corpus((Comment("a", "x"), Comment("a", "y")))


def test_unknown_field_rejected():
    with pytest.raises(CorpusError, match="unknown"):
        Comment.from_record({"id": "a", "text": "x", "stars": 5})


@pytest.mark.parametrize("spans", [((0, 0),), ((1, 4),), ((0, 2), (1, 3)), ((-1, 1),)])
def test_bad_spans(spans):
    with pytest.raises(CorpusError):
        Comment("a", "one two three", spans=spans)


def test_lenient_parse_counts_malformed():
    lines = '{"id":"a","text":"x"}\nnot json\n{"id":"b"}\n{"id":"c","text":"y"}\n'
    corpus = parse_corpus(io.StringIO(lines), strict=False)
    assert corpus.ids() == ["a", "c"]
    assert corpus.malformed == 2
    with pytest.raises(CorpusError, match="2"):
        parse_corpus(io.StringIO(lines))


def test_splits_disjoint():
    a = Corpus((Comment("1", "x"),))
    with pytest.raises(CorpusError):
        DatasetSplit(a, a)
    DatasetSplit(a, Corpus((Comment("2", "y"),)))


def test_tags_and_back():
    c = Comment("a", "mày ngu vl ạ", spans=((1, 3),))
    assert c.tags() == ["O", "B-T", "I-T", "O"]
    assert spans_from_tags(c.tags()) == c.spans
    assert spans_from_tags(["I-T", "O", "B-T", "B-T"]) == ((0, 1), (2, 3), (3, 4))


texts = st.text(alphabet=st.sampled_from(list("abcđêơ😂 \t")), max_size=30)


@given(st.lists(st.tuples(texts, st.sampled_from([None, "pos", "neg"])), max_size=8))
def test_jsonl_round_trip(items):
    corpus = Corpus(tuple(Comment(f"id{i}", t, label=lab) for i, (t, lab) in enumerate(items)))
    buf = "".join(json.dumps(c.to_record(), ensure_ascii=False) + "\n" for c in corpus)
    assert parse_corpus(io.StringIO(buf)) == corpus


def test_bundled_toy_corpora_regenerate(social, news):
    from visotext.toy_corpus import generate_news, generate_social

    assert social.comments == generate_social().comments
    assert news.comments == generate_news().comments
