"""Comment records, corpora and JSON Lines I/O."""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator, Optional, Union

PathLike = Union[str, os.PathLike]

SPAN_TAGS = ("B-T", "I-T", "O")


class CorpusError(ValueError):
    """Raised for schema violations in corpus files (bad JSON, duplicate ids, bad spans)."""


@dataclass(frozen=True)
class Comment:
    id: str
    text: str
    label: Optional[str] = None
    # Word-index spans [start, end) over text.split().
    spans: Optional[tuple[tuple[int, int], ...]] = None
    source: Optional[str] = None

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise CorpusError("comment id must be a non-empty string")
        if not isinstance(self.text, str):
            raise CorpusError(f"comment {self.id!r}: text must be a string")
        if self.spans is not None:
            spans = tuple((int(s), int(e)) for s, e in self.spans)
            n_words = len(self.text.split())
            last_end = 0
            for s, e in spans:
                if not (0 <= s < e <= n_words) or s < last_end:
                    raise CorpusError(
                        f"comment {self.id!r}: span [{s}, {e}) invalid for {n_words} words"
                    )
                last_end = e
            object.__setattr__(self, "spans", spans)

    @property
    def words(self) -> list[str]:
        return self.text.split()

    def to_record(self) -> dict:
        rec: dict = {"id": self.id, "text": self.text}
        if self.label is not None:
            rec["label"] = self.label
        if self.spans is not None:
            rec["spans"] = [list(s) for s in self.spans]
        if self.source is not None:
            rec["source"] = self.source
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> "Comment":
        if not isinstance(rec, dict):
            raise CorpusError("record must be a JSON object")
        unknown = set(rec) - {"id", "text", "label", "spans", "source"}
        if unknown:
            raise CorpusError(f"unknown fields {sorted(unknown)}")
        if "id" not in rec or "text" not in rec:
            raise CorpusError("record needs 'id' and 'text'")
        spans = rec.get("spans")
        if spans is not None:
            if not isinstance(spans, list) or any(
                not isinstance(s, list) or len(s) != 2 or not all(isinstance(v, int) for v in s)
                for s in spans
            ):
                raise CorpusError("'spans' must be a list of [start, end] integer pairs")
            spans = tuple(tuple(s) for s in spans)
        return cls(
            id=rec["id"],
            text=rec["text"],
            label=rec.get("label"),
            spans=spans,
            source=rec.get("source"),
        )

    def tags(self) -> list[str]:
        """B-T/I-T/O tag per whitespace word, derived from ``spans``."""
        labels = ["O"] * len(self.words)
        for s, e in self.spans or ():
            labels[s] = "B-T"
            for i in range(s + 1, e):
                labels[i] = "I-T"
        return labels


def spans_from_tags(tags: Iterable[str]) -> tuple[tuple[int, int], ...]:
    """Inverse of :meth:`Comment.tags`. A stray I-T after O opens a new span."""
    spans = []
    start = None
    for i, tag in enumerate(tags):
        if tag == "B-T" or (tag == "I-T" and start is None):
            if start is not None:
                spans.append((start, i))
            start = i
        elif tag == "O":
            if start is not None:
                spans.append((start, i))
            start = None
        elif tag != "I-T":
            raise CorpusError(f"unknown span tag {tag!r}")
    if start is not None:
        spans.append((start, i + 1))
    return tuple(spans)


@dataclass(frozen=True)
class Corpus:
    comments: tuple[Comment, ...] = ()
    name: str = ""
    malformed: int = field(default=0, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "comments", tuple(self.comments))
        seen = set()
        for c in self.comments:
            if c.id in seen:
                raise CorpusError(f"duplicate id {c.id!r}")
            seen.add(c.id)

    def __len__(self):
        return len(self.comments)

    def __iter__(self) -> Iterator[Comment]:
        return iter(self.comments)

    def __getitem__(self, i):
        return self.comments[i]

    def ids(self) -> list[str]:
        return [c.id for c in self.comments]

    def replace(self, comments: Iterable[Comment]) -> "Corpus":
        return Corpus(tuple(comments), name=self.name)


@dataclass(frozen=True)
class DatasetSplit:
    train: Corpus
    test: Corpus
    dev: Optional[Corpus] = None

    def __post_init__(self):
        parts = [self.train, self.test] + ([self.dev] if self.dev is not None else [])
        seen: set[str] = set()
        for part in parts:
            overlap = seen.intersection(part.ids())
            if overlap:
                raise CorpusError(f"splits share ids: {sorted(overlap)[:5]}")
            seen.update(part.ids())


def read_jsonl(stream: IO[str], source_name: str = "<stream>") -> Iterator[tuple[int, dict]]:
    """Yield ``(line_number, record)``; blank lines are skipped."""
    for lineno, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"{source_name}:{lineno}: malformed JSON ({exc.msg})") from None
        yield lineno, rec


def parse_corpus(
    stream: IO[str], name: str = "", source_name: str = "<stream>", strict: bool = True
) -> Corpus:
    comments = []
    seen = set()
    malformed = 0
    for lineno, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            comment = Comment.from_record(json.loads(line))
        except json.JSONDecodeError as exc:
            if strict:
                raise CorpusError(f"{source_name}:{lineno}: malformed JSON ({exc.msg})") from None
            malformed += 1
            continue
        except CorpusError as exc:
            if strict:
                raise CorpusError(f"{source_name}:{lineno}: {exc}") from None
            malformed += 1
            continue
        if comment.id in seen:
            raise CorpusError(f"{source_name}:{lineno}: duplicate id {comment.id!r}")
        seen.add(comment.id)
        comments.append(comment)
    return Corpus(tuple(comments), name=name, malformed=malformed)


def load_corpus(
    path: PathLike, format: str = "jsonl", name: Optional[str] = None, strict: bool = True
) -> Corpus:
    """Load a JSON Lines corpus, preserving line order.

    With ``strict`` (the default) the first malformed line raises a
    :class:`CorpusError` naming its line number.  Otherwise malformed lines are
    skipped and counted in ``Corpus.malformed``.  Duplicate ids always raise.
    """
    if format != "jsonl":
        raise ValueError(f"unsupported corpus format {format!r}")
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_corpus(
            fh,
            name=name if name is not None else path.stem,
            source_name=str(path),
            strict=strict,
        )


def dump_jsonl(records: Iterable[dict]) -> str:
    return "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records)


def atomic_write_text(path: PathLike, text: str) -> None:
    """Write via a sibling temp file and rename, so readers never see a partial file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_corpus(corpus: Corpus, path: PathLike) -> None:
    atomic_write_text(path, dump_jsonl(c.to_record() for c in corpus))
