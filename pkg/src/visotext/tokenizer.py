"""Unigram language-model subword tokenizer: vocabulary, Viterbi encoding, decoding.

Text is NFC-normalized and whitespace-collapsed before segmentation.  Spaces
become the marker ``▁`` (U+2581), which starts every word-initial piece; with
``add_dummy_prefix`` the first word gets a marker too.  Emoji clusters are
atomic units, so a piece never splits one.

Training lives in :mod:`visotext.trainer`.
"""

from __future__ import annotations

import math
import statistics
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .corpus import Corpus, PathLike, atomic_write_text
from .emojis import split_units

MARKER = "\u2581"  # ▁
BOS, PAD, EOS, UNK, MASK = "<s>", "<pad>", "</s>", "<unk>", "<mask>"
SPECIALS = (BOS, PAD, EOS, UNK)
BOS_ID, PAD_ID, EOS_ID, UNK_ID = range(4)
N_SPECIALS = len(SPECIALS) + 1  # plus <mask>, which takes the last id
# Penalty below the worst piece for emitting <unk>.
UNK_PENALTY = 10.0


class VocabError(ValueError):
    pass


def normalize_text(text: str) -> str:
    """NFC, literal markers turned into spaces, whitespace runs collapsed, ends trimmed."""
    text = unicodedata.normalize("NFC", text).replace(MARKER, " ")
    return " ".join(text.split())


def text_units(normalized: str, add_dummy_prefix: bool = True) -> list[str]:
    """Units of the marker-encoded string: codepoints, with emoji clusters kept whole."""
    internal = normalized.replace(" ", MARKER)
    if add_dummy_prefix and normalized:
        internal = MARKER + internal
    return split_units(internal)


@dataclass
class Encoding:
    ids: list[int]
    pieces: list[str]
    # (start, end) codepoint offsets into the normalized text.
    offsets: list[tuple[int, int]]
    normalized: str = ""
    score: float = 0.0

    def __post_init__(self):
        if not (len(self.ids) == len(self.pieces) == len(self.offsets)):
            raise ValueError("ids, pieces and offsets must have equal length")

    def display_pieces(self, marker: bool = True) -> list[str]:
        if marker:
            return list(self.pieces)
        out = []
        for p in self.pieces:
            if p in SPECIALS or p == MASK:
                out.append(p)
            else:
                stripped = p.replace(MARKER, "")
                if stripped:
                    out.append(stripped)
        return out

    def to_record(self, comment_id: Optional[str] = None, marker: bool = True) -> dict:
        rec = {} if comment_id is None else {"id": comment_id}
        rec["ids"] = list(self.ids)
        rec["pieces"] = self.display_pieces(marker)
        rec["offsets"] = [list(o) for o in self.offsets]
        return rec


@dataclass
class UnigramVocab:
    """Pieces with natural-log probabilities plus the fixed special-token table.

    Ids: ``<s>``=0, ``<pad>``=1, ``</s>``=2, ``<unk>``=3, then the pieces in
    ``pieces`` order, then ``<mask>`` as the last id.  ``vocab_size`` counts
    all five specials.
    """

    pieces: dict[str, float]
    character_coverage: float = 1.0
    add_dummy_prefix: bool = True
    split_emoji: bool = True
    vocab_size: int = field(init=False)

    def __post_init__(self):
        for p, lp in self.pieces.items():
            if not p or p in SPECIALS or p == MASK:
                raise VocabError(f"invalid piece {p!r}")
            if not lp <= 0.0 or math.isnan(lp):
                raise VocabError(f"piece {p!r} has log probability {lp} > 0")
            if "\t" in p or "\n" in p:
                raise VocabError(f"piece {p!r} contains a tab or newline")
        self.vocab_size = len(self.pieces) + N_SPECIALS
        self.id_to_piece: list[str] = list(SPECIALS) + list(self.pieces) + [MASK]
        self.piece_to_id = {p: i for i, p in enumerate(self.id_to_piece)}
        self.mask_id = self.vocab_size - 1
        self.max_piece_units = max((len(split_units(p)) for p in self.pieces), default=1)
        self.unk_score = (min(self.pieces.values()) if self.pieces else 0.0) - UNK_PENALTY

    # ids -------------------------------------------------------------------
    @property
    def special_ids(self) -> frozenset[int]:
        return frozenset({BOS_ID, PAD_ID, EOS_ID, UNK_ID, self.mask_id})

    @property
    def normal_ids(self) -> range:
        return range(len(SPECIALS), self.vocab_size - 1)

    def __len__(self):
        return self.vocab_size

    def __contains__(self, piece: str) -> bool:
        return piece in self.pieces

    def probability_mass(self) -> float:
        return math.fsum(math.exp(lp) for lp in self.pieces.values())

    # segmentation ------------------------------------------------------------
    def segment_units(self, units: Sequence[str]) -> tuple[list[tuple[int, int, str]], float]:
        """Viterbi best path over the piece lattice of ``units``.

        Returns ``[(start_unit, end_unit, piece_or_<unk>)...]`` and the path
        score.  A unit that is not itself a piece may be covered by ``<unk>``
        at ``unk_score``.  Ties: at each end position the candidate with the
        longest final piece wins, applied right to left along the path.
        """
        n = len(units)
        pieces = self.pieces
        neg_inf = -math.inf
        best = [neg_inf] * (n + 1)
        best[0] = 0.0
        back: list[tuple[int, str]] = [(0, "")] * (n + 1)
        max_len = self.max_piece_units
        unk_score = self.unk_score
        for end in range(1, n + 1):
            top = neg_inf
            arg = (end - 1, UNK)
            for length in range(min(max_len, end), 0, -1):
                start = end - length
                head = best[start]
                if head == neg_inf:
                    continue
                piece = "".join(units[start:end])
                lp = pieces.get(piece)
                if lp is None:
                    if length != 1:
                        continue
                    lp, piece = unk_score, UNK
                score = head + lp
                if score > top:
                    top = score
                    arg = (start, piece)
            best[end] = top
            back[end] = arg
        path = []
        end = n
        while end > 0:
            start, piece = back[end]
            path.append((start, end, piece))
            end = start
        path.reverse()
        return path, best[n]

    def encode(self, text: str) -> Encoding:
        normalized = normalize_text(text)
        units = text_units(normalized, self.add_dummy_prefix)
        path, score = self.segment_units(units)
        # Codepoint position of each unit boundary in the normalized text.
        shift = 1 if (self.add_dummy_prefix and normalized) else 0
        bounds = [0]
        for u in units:
            bounds.append(bounds[-1] + len(u))
        ids = [BOS_ID]
        pieces = [BOS]
        offsets = [(0, 0)]
        for start, end, piece in path:
            ids.append(self.piece_to_id[piece])
            pieces.append(piece)
            offsets.append((max(bounds[start] - shift, 0), bounds[end] - shift))
        ids.append(EOS_ID)
        pieces.append(EOS)
        offsets.append((len(normalized), len(normalized)))
        return Encoding(ids, pieces, offsets, normalized=normalized, score=score)

    def decode(self, ids: Iterable[int]) -> str:
        out = []
        for i in ids:
            if not 0 <= i < self.vocab_size:
                raise VocabError(f"id {i} out of range for vocab of size {self.vocab_size}")
            if i in (BOS_ID, PAD_ID, EOS_ID):
                continue
            out.append(self.id_to_piece[i])
        text = "".join(out).replace(MARKER, " ")
        if self.add_dummy_prefix and text.startswith(" "):
            text = text[1:]
        return text

    # persistence ---------------------------------------------------------------
    def to_tsv(self) -> str:
        lines = [
            f"#vocab_size\t{self.vocab_size}",
            "#specials\t" + "\t".join(f"{p}={i}" for i, p in enumerate(SPECIALS)) + f"\t{MASK}={self.mask_id}",
            "#note\tvocab_size includes the special tokens",
            f"#character_coverage\t{self.character_coverage!r}",
            f"#add_dummy_prefix\t{str(self.add_dummy_prefix).lower()}",
            f"#split_emoji\t{str(self.split_emoji).lower()}",
        ]
        for p in SPECIALS:
            lines.append(f"{p}\t0.0")
        for p, lp in self.pieces.items():
            lines.append(f"{p}\t{lp!r}")
        lines.append(f"{MASK}\t0.0")
        return "\n".join(lines) + "\n"

    def save(self, path: PathLike) -> None:
        atomic_write_text(path, self.to_tsv())

    @classmethod
    def from_tsv(cls, text: str) -> "UnigramVocab":
        header: dict[str, str] = {}
        rows: list[tuple[str, float]] = []
        for lineno, line in enumerate(text.split("\n"), start=1):
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].partition("\t")
                header[key] = value
                continue
            piece, sep, value = line.rpartition("\t")
            if not sep:
                raise VocabError(f"vocab line {lineno}: expected piece<TAB>logprob")
            try:
                rows.append((piece, float(value)))
            except ValueError:
                raise VocabError(f"vocab line {lineno}: bad log probability {value!r}") from None
        names = [p for p, _ in rows]
        if names[: len(SPECIALS)] != list(SPECIALS) or names[-1:] != [MASK]:
            raise VocabError("vocab rows must start with <s> <pad> </s> <unk> and end with <mask>")
        vocab = cls(
            dict(rows[len(SPECIALS) : -1]),
            character_coverage=float(header.get("character_coverage", "1.0")),
            add_dummy_prefix=header.get("add_dummy_prefix", "true") == "true",
            split_emoji=header.get("split_emoji", "true") == "true",
        )
        if "vocab_size" in header and int(header["vocab_size"]) != vocab.vocab_size:
            raise VocabError(
                f"header says vocab_size {header['vocab_size']} but file has {vocab.vocab_size} rows"
            )
        return vocab

    @classmethod
    def load(cls, path: PathLike) -> "UnigramVocab":
        with open(path, encoding="utf-8", newline="") as fh:
            return cls.from_tsv(fh.read())


def char_vocab(texts: Iterable[str], add_dummy_prefix: bool = True) -> UnigramVocab:
    """Single-unit vocabulary with unigram frequencies; the worst case for segmentation length."""
    counts: Counter = Counter()
    for t in texts:
        counts.update(text_units(normalize_text(t), add_dummy_prefix))
    total = sum(counts.values())
    ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return UnigramVocab(
        {u: math.log(c / total) for u, c in ordered}, add_dummy_prefix=add_dummy_prefix
    )


@dataclass
class DatasetTokenStats:
    name: str
    n_comments: int
    total_tokens: int
    median: float
    histogram: dict[int, int]

    @property
    def mean_exact(self) -> Fraction:
        return Fraction(self.total_tokens, self.n_comments) if self.n_comments else Fraction(0)

    @property
    def mean(self) -> float:
        return float(round(self.mean_exact, 2))

    @property
    def mean_with_specials(self) -> float:
        # <s> and </s> are counted here, so this is >= 2 for any nonempty corpus.
        return float(round(self.mean_exact + 2, 2)) if self.n_comments else 0.0

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "n_comments": self.n_comments,
            "total_tokens": self.total_tokens,
            "mean": self.mean,
            "mean_with_specials": self.mean_with_specials,
            "median": self.median,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
        }


@dataclass
class TokenLengthReport:
    datasets: list[DatasetTokenStats]

    def __getitem__(self, name: str) -> DatasetTokenStats:
        for d in self.datasets:
            if d.name == name:
                return d
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"datasets": [d.to_dict() for d in self.datasets]}


def token_length_stats(
    vocab: UnigramVocab, split_corpora: Sequence[tuple[str, Corpus]]
) -> TokenLengthReport:
    """Tokens per comment for each named corpus, excluding ``<s>``/``</s>``."""
    if not split_corpora:
        raise ValueError("token_length_stats needs at least one corpus")
    out = []
    for name, corpus in split_corpora:
        lengths = [len(vocab.encode(c.text).ids) - 2 for c in corpus]
        out.append(
            DatasetTokenStats(
                name=name,
                n_comments=len(lengths),
                total_tokens=sum(lengths),
                median=float(statistics.median(lengths)) if lengths else 0.0,
                histogram=dict(Counter(lengths)),
            )
        )
    return TokenLengthReport(out)
