"""Carrying B-T/I-T/O span labels through emoji expansion or deletion."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

from .corpus import Comment, spans_from_tags
from .normalize import EmojiLexicon

TAGS = ("B-T", "I-T", "O")

LexiconLike = Union[EmojiLexicon, Mapping[str, str]]


class SpanError(ValueError):
    pass


@dataclass(frozen=True)
class SpanLabeledSeq:
    words: tuple[str, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "words", tuple(self.words))
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.words) != len(self.labels):
            raise SpanError(f"{len(self.words)} words but {len(self.labels)} labels")
        bad = [t for t in self.labels if t not in TAGS]
        if bad:
            raise SpanError(f"unknown tag {bad[0]!r}")

    def __len__(self) -> int:
        return len(self.words)

    @property
    def bio_valid(self) -> bool:
        """True when every I-T directly follows a B-T or I-T."""
        prev = "O"
        for t in self.labels:
            if t == "I-T" and prev == "O":
                return False
            prev = t
        return True

    @classmethod
    def from_comment(cls, comment: Comment) -> "SpanLabeledSeq":
        return cls(tuple(comment.words), tuple(comment.tags()))

    def spans(self) -> tuple[tuple[int, int], ...]:
        return spans_from_tags(self.labels)


@dataclass(frozen=True)
class RemapOptions:
    # True drops lexicon emoji, False replaces each with its description words.
    delete: bool = False


def _entries(lex: LexiconLike) -> Mapping[str, str]:
    entries = lex.entries if isinstance(lex, EmojiLexicon) else lex
    for key, value in entries.items():
        if not value.strip():
            raise SpanError(f"lexicon entry for {key!r} is empty")
    return entries


def _check_input(seq: SpanLabeledSeq) -> None:
    if not seq.bio_valid:
        raise SpanError("input labels violate the B-T/I-T ordering")


def remap_spans(seq: SpanLabeledSeq, lex: LexiconLike, opts: RemapOptions = RemapOptions()) -> SpanLabeledSeq:
    """Replace (or drop) lexicon emoji and carry each word's tag to the words that replace it.

    Only exact lexicon keys are touched; other emoji are ordinary words. The
    first expansion word of a B-T emoji keeps B-T and the rest get I-T; an O or
    I-T emoji passes its tag to every expansion word.
    """
    _check_input(seq)
    entries = _entries(lex)
    expansions: dict[str, list[str]] = {}
    words: list[str] = []
    labels: list[str] = []
    for word, tag in zip(seq.words, seq.labels):
        if word not in entries:
            words.append(word)
            labels.append(tag)
            continue
        if opts.delete:
            continue
        parts = expansions.get(word)
        if parts is None:
            parts = expansions[word] = entries[word].split(" ")
        words.extend(parts)
        if tag == "B-T":
            labels.append("B-T")
            labels.extend(["I-T"] * (len(parts) - 1))
        else:
            labels.extend([tag] * len(parts))
    return SpanLabeledSeq(tuple(words), tuple(labels))


def remap_spans_oracle(seq: SpanLabeledSeq, lex: LexiconLike, opts: RemapOptions = RemapOptions()) -> SpanLabeledSeq:
    """Step-by-step reference version of :func:`remap_spans`, kept naive on purpose."""
    _check_input(seq)
    emoji_to_word = _entries(lex)
    comment = list(seq.words)
    label = list(seq.labels)
    delete = opts.delete
    assert len(comment) == len(label)
    new_comment: list[str] = []
    new_label: list[str] = []
    for i in range(len(comment)):
        check = 0
        if comment[i] in emoji_to_word.keys():
            if delete:
                continue
            for j in range(len(emoji_to_word[comment[i]].split(" "))):
                if label[i] == "B-T":
                    if check == 0:
                        check = check + 1
                        new_label.append(label[i])
                    else:
                        new_label.append("I-T")
                else:
                    new_label.append(label[i])
                new_comment.append(emoji_to_word[comment[i]].split(" ")[j])
        else:
            new_comment.append(comment[i])
            new_label.append(label[i])
        assert len(new_comment) == len(new_label)
    return SpanLabeledSeq(tuple(new_comment), tuple(new_label))


def remap_comment(comment: Comment, lex: LexiconLike, opts: RemapOptions = RemapOptions()) -> Comment:
    """Apply :func:`remap_spans` to a span-annotated comment, rebuilding its text and spans."""
    if comment.spans is None:
        raise SpanError(f"comment {comment.id!r} has no span annotation")
    out = remap_spans(SpanLabeledSeq.from_comment(comment), lex, opts)
    return Comment(comment.id, " ".join(out.words), label=comment.label, spans=out.spans(), source=comment.source)
