"""Comment cleaning rules plus the emoji and teencode text transforms."""

from __future__ import annotations

import re
import unicodedata
from collections import Counter
from dataclasses import asdict, dataclass
from importlib import resources
from typing import Mapping, Optional

from .corpus import Comment, Corpus, PathLike
from .emojis import EMOJI_RE, contains_emoji, is_emoji, is_emoji_char

_LINK_RE = re.compile(
    r"(?:https?://|www\.)\S+"
    r"|(?<![@\w.])[\w-]+(?:\.[\w-]+)*\.(?:com|vn|net|org|info|io|me|ly|co|gl|tk|xyz)(?:/\S*)?(?!\w)",
    re.IGNORECASE,
)
_HANDLE_RE = re.compile(r"(?<!\S)@\S+")
_REPEAT_RE = re.compile(r"([^\W\d_])\1{2,}")
_EDGE_PUNCT_RE = re.compile(r"^(\W*?)(.*?)(\W*)$", re.DOTALL)


def _read_tsv(text: str, what: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"{what} line {lineno}: expected two tab-separated columns")
        key, value = parts[0].strip(), parts[1].strip()
        if key in entries:
            raise ValueError(f"{what} line {lineno}: duplicate key {key!r}")
        entries[key] = value
    return entries


def _read_resource(name: str) -> str:
    return resources.files("visotext").joinpath(f"data/{name}").read_text("utf-8")


@dataclass(frozen=True)
class TeencodeLexicon:
    entries: Mapping[str, str]

    def __post_init__(self):
        clean = {}
        for key, value in self.entries.items():
            key = unicodedata.normalize("NFC", key)
            value = " ".join(unicodedata.normalize("NFC", value).split())
            if not key or key != key.lower() or any(ch.isspace() for ch in key):
                raise ValueError(f"teencode key {key!r} must be a single lowercase token")
            if not value:
                raise ValueError(f"teencode key {key!r} has an empty value")
            if value.lower() == key:
                raise ValueError(f"teencode key {key!r} maps to itself")
            clean[key] = value
        object.__setattr__(self, "entries", clean)

    @classmethod
    def load(cls, path: PathLike) -> "TeencodeLexicon":
        with open(path, encoding="utf-8") as fh:
            return cls(_read_tsv(fh.read(), str(path)))

    @classmethod
    def default(cls) -> "TeencodeLexicon":
        return cls(_read_tsv(_read_resource("teencode.tsv"), "teencode.tsv"))


@dataclass(frozen=True)
class EmojiLexicon:
    entries: Mapping[str, str]

    def __post_init__(self):
        clean = {}
        for key, value in self.entries.items():
            if not is_emoji(key):
                raise ValueError(f"emoji lexicon key {key!r} is not a single emoji")
            value = " ".join(value.split())
            if not value:
                raise ValueError(f"emoji lexicon key {key!r} has an empty value")
            if contains_emoji(value):
                raise ValueError(f"emoji lexicon value for {key!r} contains an emoji")
            clean[key] = value
        object.__setattr__(self, "entries", clean)

    @classmethod
    def load(cls, path: PathLike) -> "EmojiLexicon":
        with open(path, encoding="utf-8") as fh:
            return cls(_read_tsv(fh.read(), str(path)))

    @classmethod
    def default(cls) -> "EmojiLexicon":
        return cls(_read_tsv(_read_resource("emoji_lexicon.tsv"), "emoji_lexicon.tsv"))

    def lookup(self, emoji: str) -> Optional[str]:
        hit = self.entries.get(emoji)
        if hit is None:
            # Tolerate presentation selectors that differ between key and text.
            bare = emoji.replace("\ufe0f", "")
            hit = self.entries.get(bare) or self.entries.get(bare + "\ufe0f")
        return hit


@dataclass(frozen=True)
class CleaningConfig:
    drop_link_comments: bool = True
    drop_handle_only_comments: bool = True
    strip_handles: bool = False
    spam_repeat_threshold: int = 5
    keep_emojis: bool = True
    drop_noncanonical: bool = True
    # Minimum share of letter-or-emoji characters among non-space characters.
    min_letter_ratio: float = 0.3

    def __post_init__(self):
        if self.spam_repeat_threshold < 2:
            raise ValueError("spam_repeat_threshold must be >= 2")
        if not 0.0 <= self.min_letter_ratio <= 1.0:
            raise ValueError("min_letter_ratio must be in [0, 1]")


@dataclass
class CleaningStats:
    input: int = 0
    kept: int = 0
    links: int = 0
    handle_only: int = 0
    spam: int = 0
    noncanonical: int = 0

    @property
    def dropped(self) -> int:
        return self.links + self.handle_only + self.spam + self.noncanonical

    def to_dict(self) -> dict:
        return asdict(self)


def has_link(text: str) -> bool:
    return _LINK_RE.search(text) is not None


def is_handle_only(text: str) -> bool:
    tokens = text.split()
    return bool(tokens) and all(t.startswith("@") for t in tokens)


def letter_ratio(text: str) -> float:
    chars = [ch for ch in text if not ch.isspace()]
    if not chars:
        return 0.0
    good = sum(1 for ch in chars if unicodedata.category(ch)[0] in "LM" or is_emoji_char(ch))
    return good / len(chars)


def strip_user_handles(text: str) -> str:
    """Drop every whitespace token that starts with '@'."""
    if "@" not in text:
        return text
    out = _HANDLE_RE.sub("", text)
    out = re.sub(r"[ \t]{2,}", " ", out)
    return re.sub(r"[ \t]*\n[ \t]*", "\n", out).strip()


def clean_corpus(corpus: Corpus, cfg: CleaningConfig = CleaningConfig()) -> tuple[Corpus, CleaningStats]:
    stats = CleaningStats(input=len(corpus))
    # Spam needs one corpus-wide pass before any filtering.
    counts = Counter(c.text.strip() for c in corpus)
    kept = []
    for comment in corpus:
        text = comment.text
        if cfg.drop_link_comments and has_link(text):
            stats.links += 1
            continue
        if cfg.drop_handle_only_comments and is_handle_only(text):
            stats.handle_only += 1
            continue
        if counts[text.strip()] >= cfg.spam_repeat_threshold:
            stats.spam += 1
            continue
        new_text = text
        if cfg.strip_handles:
            new_text = strip_user_handles(new_text)
        if not cfg.keep_emojis:
            new_text = remove_emojis(new_text)
        if cfg.drop_noncanonical and letter_ratio(new_text) < cfg.min_letter_ratio:
            stats.noncanonical += 1
            continue
        if new_text != text:
            if comment.spans is not None and len(new_text.split()) != len(text.split()):
                # Word indices would silently shift; span data must go through remap-spans.
                raise ValueError(
                    f"comment {comment.id!r}: cleaning changed the word count of a span-annotated comment"
                )
            comment = Comment(comment.id, new_text, comment.label, comment.spans, comment.source)
        kept.append(comment)
    stats.kept = len(kept)
    return corpus.replace(kept), stats


def emojis_to_text(text: str, lex: EmojiLexicon) -> str:
    """Replace each lexicon-covered emoji with its words, space-separated from neighbours."""
    out: list[str] = []
    need_space = False
    pos = 0

    def emit_plain(chunk: str):
        nonlocal need_space
        if not chunk:
            return
        if need_space and not chunk[0].isspace():
            out.append(" ")
        out.append(chunk)
        need_space = False

    for m in EMOJI_RE.finditer(text):
        emit_plain(text[pos : m.start()])
        pos = m.end()
        words = lex.lookup(m.group())
        if words is None:
            emit_plain(m.group())
            continue
        if out and not out[-1][-1].isspace():
            out.append(" ")
        out.append(words)
        need_space = True
    emit_plain(text[pos:])
    return "".join(out)


def remove_emojis(text: str) -> str:
    """Delete every emoji cluster, then collapse whitespace."""
    return " ".join(EMOJI_RE.sub(" ", text).split())


def collapse_repeats(text: str) -> str:
    """Collapse runs of three or more identical letters to a single letter."""
    return _REPEAT_RE.sub(r"\1", text)


def _match_case(replacement: str, original: str) -> str:
    if original[:1].isupper():
        return replacement[:1].upper() + replacement[1:]
    return replacement


def normalize_teencode(text: str, lex: TeencodeLexicon) -> str:
    """Standardize teencode: collapse letter runs, then map tokens through ``lex``.

    Lookup is case-insensitive on the token with leading/trailing punctuation
    peeled off, so ``"ko,"`` becomes ``"không,"``.  Whitespace is preserved.
    """
    text = collapse_repeats(text)
    parts = re.split(r"(\s+)", text)
    entries = lex.entries
    for i in range(0, len(parts), 2):
        token = parts[i]
        if not token:
            continue
        hit = entries.get(unicodedata.normalize("NFC", token).lower())
        if hit is not None:
            parts[i] = _match_case(hit, token)
            continue
        lead, core, trail = _EDGE_PUNCT_RE.match(token).groups()
        if core and (lead or trail):
            hit = entries.get(unicodedata.normalize("NFC", core).lower())
            if hit is not None:
                parts[i] = lead + _match_case(hit, core) + trail
    return "".join(parts)
