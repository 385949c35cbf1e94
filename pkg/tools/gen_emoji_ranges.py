"""Regenerate src/visotext/data/emoji_ranges.txt from the `regex` module's Unicode tables.

Only needed when bumping the pinned Unicode version; the package reads the
generated file and never imports `regex` at runtime.
"""

import sys
from pathlib import Path

import regex

PROPS = ["Extended_Pictographic", "Emoji_Modifier", "Regional_Indicator"]
OUT = Path(__file__).resolve().parents[1] / "src" / "visotext" / "data" / "emoji_ranges.txt"


def ranges(prop):
    pat = regex.compile(r"\p{%s}" % prop)
    start = prev = None
    for cp in range(0x110000):
        if pat.match(chr(cp)):
            if start is None:
                start = cp
            elif cp != prev + 1:
                yield start, prev
                start = cp
            prev = cp
    if start is not None:
        yield start, prev


def main():
    lines = [
        "# Emoji codepoint ranges; generated by tools/gen_emoji_ranges.py",
        f"# source: regex {regex.__version__} Unicode property tables",
        "# format: START..END ; PROPERTY",
    ]
    for prop in PROPS:
        for lo, hi in ranges(prop):
            # ASCII/Latin-1 symbols like (c) and (r) are kept; digits/#/* never appear here.
            lines.append(f"{lo:04X}..{hi:04X} ; {prop}")
    OUT.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {OUT} ({len(lines) - 3} ranges)", file=sys.stderr)


if __name__ == "__main__":
    main()
