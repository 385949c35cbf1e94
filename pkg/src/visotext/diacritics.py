"""Vietnamese diacritic classification and (partial) stripping."""

from __future__ import annotations

import hashlib
import re
import unicodedata
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

# Combining marks, by role.
TONE_MARKS = {
    "\u0300": "grave",  # huyền
    "\u0301": "acute",  # sắc
    "\u0309": "hook",  # hỏi
    "\u0303": "tilde",  # ngã
    "\u0323": "dot_below",  # nặng
}
LETTER_MARKS = {
    "\u0306": "breve",  # ă
    "\u0302": "circumflex",  # â ê ô
    "\u031b": "horn",  # ơ ư
}
_STRIPPABLE = frozenset(TONE_MARKS) | frozenset(LETTER_MARKS)
_BASES = frozenset("aeiouyAEIOUY")
_STROKE = {"đ": "d", "Đ": "D"}

VALID_PERCENTAGES = (25, 50, 75, 100)

# A base character followed by any combining marks.
_CLUSTER_RE = re.compile(".[\u0300-\u036f\u1ab0-\u1aff\u1dc0-\u1dff\u20d0-\u20ff\ufe20-\ufe2f]*", re.DOTALL)


class DiacriticKind(Enum):
    LETTER_MARK = "letter_mark"
    TONE_MARK = "tone_mark"


@dataclass(frozen=True)
class DiacriticClass:
    base: str
    letter_mark: str | None
    tone_mark: str | None

    @property
    def kinds(self) -> set[DiacriticKind]:
        out = set()
        if self.letter_mark:
            out.add(DiacriticKind.LETTER_MARK)
        if self.tone_mark:
            out.add(DiacriticKind.TONE_MARK)
        return out


def classify_letter(ch: str) -> DiacriticClass | None:
    """Split a (precomposed or decomposed) Vietnamese letter into base, letter mark and tone.

    Returns None when ``ch`` is not a Vietnamese letter (plain or marked).
    """
    if ch in _STROKE:
        return DiacriticClass(_STROKE[ch], "stroke", None)
    nfd = unicodedata.normalize("NFD", ch)
    base, marks = nfd[0], nfd[1:]
    if base in "dD" and not marks:
        return DiacriticClass(base, None, None)
    if not base.isascii() or not base.isalpha():
        return None
    letter = [m for m in marks if m in LETTER_MARKS]
    tone = [m for m in marks if m in TONE_MARKS]
    if len(letter) + len(tone) != len(marks) or len(letter) > 1 or len(tone) > 1:
        return None
    if marks and base not in _BASES:
        return None
    return DiacriticClass(
        base,
        LETTER_MARKS[letter[0]] if letter else None,
        TONE_MARKS[tone[0]] if tone else None,
    )


def _strip_cluster(cluster: str) -> str:
    if cluster in _STROKE:
        return _STROKE[cluster]
    nfd = unicodedata.normalize("NFD", cluster)
    base, marks = nfd[0], nfd[1:]
    if base in _STROKE:
        return _STROKE[base] if all(m in _STRIPPABLE for m in marks) else cluster
    if base not in _BASES or not marks:
        return cluster
    if all(m in _STRIPPABLE for m in marks):
        return base
    return cluster


def strip_all_diacritics(text: str) -> str:
    """Map every Vietnamese letter to its unmarked base (đ -> d); other text is untouched.

    Clusters whose marks are not all Vietnamese (e.g. "ü") are left as they are.
    """
    if text.isascii():
        return text
    return "".join(_strip_cluster(c) for c in _CLUSTER_RE.findall(text))


def has_diacritics(word: str) -> bool:
    return strip_all_diacritics(word) != word


@dataclass
class StripPlan:
    percentage: int
    seed: int
    selected_word_indices: list[int] = field(default_factory=list)
    # Number of diacritic-bearing words the selection was drawn from.
    candidates: int = 0

    def to_dict(self) -> dict:
        return {
            "percentage": self.percentage,
            "seed": self.seed,
            "candidates": self.candidates,
            "selected_word_indices": list(self.selected_word_indices),
        }


def n_to_strip(percentage: int, k: int) -> int:
    """ceil(percentage * k / 100) in exact integer arithmetic."""
    return -(-percentage * k // 100)


def comment_seed(seed: int, comment_id: str) -> int:
    """Per-comment seed: ``seed`` xor a stable 64-bit hash of the id."""
    digest = hashlib.blake2b(comment_id.encode("utf-8"), digest_size=8).digest()
    return (seed ^ int.from_bytes(digest, "little")) & 0xFFFFFFFFFFFFFFFF


def strip_partial(text: str, percentage: int, seed: int) -> tuple[str, StripPlan]:
    """Fully strip a seeded uniform sample of ceil(p/100 * k) of the k diacritic-bearing words.

    Words are whitespace-delimited; separators are kept verbatim.
    """
    if percentage not in VALID_PERCENTAGES:
        raise ValueError(f"percentage must be one of {VALID_PERCENTAGES}, got {percentage!r}")
    parts = re.split(r"(\s+)", text)
    word_slots = [i for i in range(0, len(parts), 2) if parts[i]]
    marked = [w for w, slot in enumerate(word_slots) if has_diacritics(parts[slot])]
    n = n_to_strip(percentage, len(marked))
    plan = StripPlan(percentage, seed, candidates=len(marked))
    if n == 0:
        return text, plan
    if n == len(marked):
        chosen = marked
    else:
        rng = np.random.default_rng(seed & 0xFFFFFFFFFFFFFFFF)
        picks = rng.choice(len(marked), size=n, replace=False)
        chosen = sorted(marked[int(i)] for i in picks)
    for w in chosen:
        slot = word_slots[w]
        parts[slot] = strip_all_diacritics(parts[slot])
    plan.selected_word_indices = list(chosen)
    return "".join(parts), plan
