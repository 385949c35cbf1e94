"""Emoji recognition backed by a pinned Unicode range table (``data/emoji_ranges.txt``).

An emoji *cluster* is one of:

* keycap: ``[0-9#*] FE0F? 20E3``
* flag: a pair of regional indicators (a lone indicator also counts)
* pictograph: ``P VS? MOD? TAG* (ZWJ P VS? MOD?)*`` where P is Extended_Pictographic
* a stray skin-tone modifier
"""

from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources

ZWJ = "\u200d"
VARIATION_SELECTORS = "\ufe0e\ufe0f"


def _load_ranges() -> dict[str, list[tuple[int, int]]]:
    table: dict[str, list[tuple[int, int]]] = {}
    text = resources.files("visotext").joinpath("data/emoji_ranges.txt").read_text("utf-8")
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        span, prop = (part.strip() for part in line.split(";"))
        lo, hi = span.split("..")
        table.setdefault(prop, []).append((int(lo, 16), int(hi, 16)))
    return table


def _char_class(ranges: list[tuple[int, int]]) -> str:
    parts = []
    for lo, hi in ranges:
        parts.append(re.escape(chr(lo)) if lo == hi else f"{re.escape(chr(lo))}-{re.escape(chr(hi))}")
    return "[" + "".join(parts) + "]"


_RANGES = _load_ranges()
_PICTO = _char_class(_RANGES["Extended_Pictographic"])
_MOD = _char_class(_RANGES["Emoji_Modifier"])
_RI = _char_class(_RANGES["Regional_Indicator"])
_VS = "[\ufe0e\ufe0f]"
_TAG = "[\U000e0020-\U000e007f]"
_ELEMENT = f"{_PICTO}{_VS}?{_MOD}?"

EMOJI_RE = re.compile(
    "|".join(
        [
            r"[0-9#*]\ufe0f?\u20e3",
            f"{_RI}{_RI}?",
            f"{_ELEMENT}{_TAG}*(?:{ZWJ}{_ELEMENT})*",
            _MOD,
        ]
    )
)


def is_emoji(s: str) -> bool:
    """True iff ``s`` is exactly one emoji cluster."""
    return bool(s) and EMOJI_RE.fullmatch(s) is not None


def is_emoji_char(ch: str) -> bool:
    """True for a single codepoint that can start or extend an emoji cluster."""
    return _is_emoji_codepoint(ord(ch))


@lru_cache(maxsize=4096)
def _is_emoji_codepoint(cp: int) -> bool:
    if cp in (0x200D, 0xFE0E, 0xFE0F, 0x20E3) or 0xE0020 <= cp <= 0xE007F:
        return True
    for ranges in _RANGES.values():
        for lo, hi in ranges:
            if lo <= cp <= hi:
                return True
    return False


def find_emojis(text: str) -> list[str]:
    return EMOJI_RE.findall(text)


def contains_emoji(text: str) -> bool:
    return EMOJI_RE.search(text) is not None


def split_units(text: str) -> list[str]:
    """Split text into codepoints, keeping each emoji cluster as one unit."""
    units: list[str] = []
    pos = 0
    for m in EMOJI_RE.finditer(text):
        units.extend(text[pos : m.start()])
        units.append(m.group())
        pos = m.end()
    units.extend(text[pos:])
    return units
