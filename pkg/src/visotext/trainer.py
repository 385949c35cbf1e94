"""Unigram LM vocabulary training: seed pool, EM re-estimation, likelihood-based pruning.

The corpus is reduced to a table of unique pre-tokenized words with counts
(pieces never cross a word boundary), so every E-step and pruning pass is a
loop over that table in a fixed order.  Results are therefore bit-identical
for a given corpus and config.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .corpus import Corpus
from .emojis import is_emoji
from .tokenizer import MARKER, N_SPECIALS, UnigramVocab, normalize_text, text_units

log = logging.getLogger(__name__)

# Floor for expected counts that underflow to zero, keeping log probabilities finite.
_MIN_COUNT = 1e-300


@dataclass(frozen=True)
class TrainerConfig:
    target_vocab_size: int = 15002
    seed_vocab_multiplier: int = 10
    em_iterations_per_round: int = 2
    prune_fraction: float = 0.25
    max_piece_length: int = 16
    character_coverage: float = 0.9995
    add_dummy_prefix: bool = True
    # Emoji clusters become standalone pieces instead of merging into runs.
    split_emoji: bool = True

    def __post_init__(self):
        for name in ("target_vocab_size", "seed_vocab_multiplier", "em_iterations_per_round", "max_piece_length"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0.0 < self.prune_fraction < 1.0:
            raise ValueError("prune_fraction must be in (0, 1)")
        if not 0.0 < self.character_coverage <= 1.0:
            raise ValueError("character_coverage must be in (0, 1]")


@dataclass
class TrainingLog:
    # Corpus log-likelihood at each E-step, one list per round.
    rounds: list[list[float]] = field(default_factory=list)
    sizes: list[int] = field(default_factory=list)
    required_chars: int = 0
    seed_pieces: int = 0


def _logsumexp(values: list[float]) -> float:
    if len(values) == 1:
        return values[0]
    m = max(values)
    if m == -math.inf:
        return m
    return m + math.log(math.fsum(math.exp(v - m) for v in values))


class _Lattice:
    """All piece occurrences inside one word, indexed by start and end."""

    __slots__ = ("n", "freq", "by_end", "by_start")

    def __init__(self, units: tuple[str, ...], freq: int, piece_ids: dict[str, int], max_len: int):
        n = len(units)
        self.n = n
        self.freq = freq
        self.by_end: list[list[tuple[int, int]]] = [[] for _ in range(n + 1)]
        self.by_start: list[list[tuple[int, int]]] = [[] for _ in range(n + 1)]
        for start in range(n):
            for end in range(start + 1, min(n, start + max_len) + 1):
                pid = piece_ids.get("".join(units[start:end]))
                if pid is not None:
                    self.by_end[end].append((start, pid))
                    self.by_start[start].append((end, pid))

    def forward_backward(self, logp: list[float], counts: list[float]) -> float:
        """Add expected piece counts (times word frequency) into ``counts``; return freq * log Z."""
        n = self.n
        neg_inf = -math.inf
        alpha = [neg_inf] * (n + 1)
        alpha[0] = 0.0
        for end in range(1, n + 1):
            terms = [alpha[s] + logp[pid] for s, pid in self.by_end[end] if alpha[s] != neg_inf]
            if terms:
                alpha[end] = _logsumexp(terms)
        beta = [neg_inf] * (n + 1)
        beta[n] = 0.0
        for start in range(n - 1, -1, -1):
            terms = [beta[e] + logp[pid] for e, pid in self.by_start[start] if beta[e] != neg_inf]
            if terms:
                beta[start] = _logsumexp(terms)
        z = alpha[n]
        if z == neg_inf:
            raise RuntimeError("word has no segmentation under the current pieces")
        freq = self.freq
        for end in range(1, n + 1):
            b = beta[end]
            if b == neg_inf:
                continue
            for s, pid in self.by_end[end]:
                a = alpha[s]
                if a != neg_inf:
                    counts[pid] += freq * math.exp(a + logp[pid] + b - z)
        return freq * z

    def viterbi(self, logp: list[float]) -> list[int]:
        n = self.n
        neg_inf = -math.inf
        best = [neg_inf] * (n + 1)
        best[0] = 0.0
        back = [(0, -1)] * (n + 1)
        for end in range(1, n + 1):
            for s, pid in self.by_end[end]:
                score = best[s] + logp[pid]
                if score > best[end]:
                    best[end] = score
                    back[end] = (s, pid)
        out = []
        end = n
        while end > 0:
            s, pid = back[end]
            out.append(pid)
            end = s
        return out


class UnigramTrainer:
    def __init__(self, cfg: TrainerConfig = TrainerConfig()):
        self.cfg = cfg
        self.log = TrainingLog()

    # -- corpus preparation ---------------------------------------------------
    def word_counts(self, texts: Iterable[str]) -> Counter:
        """Pre-tokenized words (as unit tuples) with their corpus frequency."""
        words: Counter = Counter()
        for text in texts:
            units = text_units(normalize_text(text), self.cfg.add_dummy_prefix)
            current: list[str] = []
            for u in units:
                if u == MARKER and current:
                    words[tuple(current)] += 1
                    current = []
                if self.cfg.split_emoji and is_emoji(u):
                    if current:
                        words[tuple(current)] += 1
                    words[(u,)] += 1
                    current = []
                    continue
                current.append(u)
            if current:
                words[tuple(current)] += 1
        return words

    def required_units(self, words: Counter) -> list[str]:
        """Units kept by character coverage (emoji always kept), most frequent first."""
        chars: Counter = Counter()
        for w, f in words.items():
            for u in w:
                chars[u] += f
        total = sum(chars.values())
        ordered = sorted(chars.items(), key=lambda kv: (-kv[1], kv[0]))
        kept = []
        running = 0
        for u, c in ordered:
            if running < self.cfg.character_coverage * total or is_emoji(u):
                kept.append(u)
                running += c
        return kept

    @staticmethod
    def _split_rare(words: Counter, required: set[str]) -> Counter:
        out: Counter = Counter()
        for w, f in words.items():
            if all(u in required for u in w):
                out[w] += f
                continue
            current: list[str] = []
            for u in w:
                if u in required:
                    current.append(u)
                elif current:
                    out[tuple(current)] += f
                    current = []
            if current:
                out[tuple(current)] += f
        return out

    def seed_pieces(self, words: Counter, limit: int) -> list[tuple[str, int]]:
        """Most promising multi-unit substrings by frequency x length."""
        subs: Counter = Counter()
        max_len = self.cfg.max_piece_length
        for w, f in words.items():
            n = len(w)
            for i in range(n):
                acc = w[i]
                for j in range(i + 1, min(n, i + max_len)):
                    if w[j] == MARKER:
                        break
                    acc += w[j]
                    subs[acc] += f
        # Score by occurrences x unit length; pieces rarely span emoji so len() is close enough.
        ranked = sorted(subs.items(), key=lambda kv: (-kv[1] * len(kv[0]), kv[0]))
        return ranked[:limit]

    # -- training ---------------------------------------------------------------
    def fit(self, texts: Iterable[str]) -> UnigramVocab:
        cfg = self.cfg
        words = self.word_counts(texts)
        if not words:
            raise ValueError("cannot train a tokenizer on an empty corpus")
        required = self.required_units(words)
        target = cfg.target_vocab_size - N_SPECIALS
        if target < len(required):
            raise ValueError(
                f"target_vocab_size {cfg.target_vocab_size} is smaller than the "
                f"{len(required)} required characters plus {N_SPECIALS} specials"
            )
        required_set = set(required)
        words = self._split_rare(words, required_set)
        word_list = sorted(words.items(), key=lambda kv: (-kv[1], kv[0]))

        seed_limit = max(cfg.seed_vocab_multiplier * target - len(required), 0)
        seeds = [(p, f) for p, f in self.seed_pieces(words, seed_limit) if p not in required_set]
        if len(required) + len(seeds) < target:
            raise ValueError(
                f"corpus yields only {len(required) + len(seeds)} candidate pieces, "
                f"fewer than the {target} non-special pieces requested"
            )
        char_freq: Counter = Counter()
        for w, f in words.items():
            for u in w:
                char_freq[u] += f
        pieces = [u for u in required] + [p for p, _ in seeds]
        freqs = [char_freq[u] for u in required] + [f for _, f in seeds]
        total = math.fsum(freqs)
        logp = [math.log(f / total) for f in freqs]
        self.log.required_chars = len(required)
        self.log.seed_pieces = len(seeds)
        n_required = len(required)
        log.info("seed pool: %d required units + %d substrings", n_required, len(seeds))

        while True:
            lattices = self._build_lattices(word_list, pieces)
            history = []
            for _ in range(cfg.em_iterations_per_round):
                counts = [0.0] * len(pieces)
                ll = 0.0
                for lat in lattices:
                    ll += lat.forward_backward(logp, counts)
                history.append(ll)
                total = math.fsum(counts)
                logp = [math.log(max(c, _MIN_COUNT) / total) for c in counts]
            self.log.rounds.append(history)
            self.log.sizes.append(len(pieces))
            log.info("round %d: %d pieces, loglik %.6f", len(self.log.rounds), len(pieces), history[-1])
            if len(pieces) <= target:
                break
            keep = self._prune(lattices, pieces, logp, n_required, target)
            pieces = [pieces[i] for i in keep]
            logp = [logp[i] for i in keep]
            # Renormalize over the survivors before the next round.
            z = _logsumexp(logp)
            logp = [lp - z for lp in logp]

        order = sorted(range(len(pieces)), key=lambda i: (-logp[i], pieces[i]))
        return UnigramVocab(
            {pieces[i]: min(logp[i], 0.0) for i in order},
            character_coverage=cfg.character_coverage,
            add_dummy_prefix=cfg.add_dummy_prefix,
            split_emoji=cfg.split_emoji,
        )

    def _build_lattices(self, word_list, pieces) -> list[_Lattice]:
        ids = {p: i for i, p in enumerate(pieces)}
        return [_Lattice(w, f, ids, self.cfg.max_piece_length) for w, f in word_list]

    def _prune(self, lattices, pieces, logp, n_required, target) -> list[int]:
        """Indices of the pieces that survive one pruning step (required units always do)."""
        cfg = self.cfg
        n = len(pieces)
        vfreq = [0.0] * n
        # Total frequency of the words whose best path uses each piece.
        word_mass = [0.0] * n
        vsum = 0.0
        for lat in lattices:
            vsum += lat.freq
            path = lat.viterbi(logp)
            for pid in path:
                vfreq[pid] += lat.freq
            for pid in set(path):
                word_mass[pid] += lat.freq
        fsum = math.fsum(vfreq)
        ids = {p: i for i, p in enumerate(pieces)}

        scored = []
        unused = []
        for i in range(n_required, n):
            if vfreq[i] == 0.0:
                unused.append(i)
                continue
            alt = self._alternatives(pieces[i], i, ids, logp)
            logprob_sp = math.log(vfreq[i]) - math.log(fsum)
            logsum_alt = math.log(fsum + vfreq[i] * (len(alt) - 1))
            logprob_alt = math.fsum(math.log(vfreq[j] + vfreq[i]) - logsum_alt for j in alt)
            loss = (word_mass[i] / vsum) * (logprob_sp - logprob_alt)
            scored.append((loss, i))

        new_size = max(target, int(n * (1.0 - cfg.prune_fraction)))
        budget = new_size - n_required
        scored.sort(key=lambda t: (-t[0], pieces[t[1]]))
        survivors = [i for _, i in scored[:budget]]
        if len(survivors) < budget:
            unused.sort(key=lambda i: (-logp[i], pieces[i]))
            survivors += unused[: budget - len(survivors)]
        return list(range(n_required)) + sorted(survivors)

    def _alternatives(self, piece: str, pid: int, ids: dict[str, int], logp: list[float]) -> list[int]:
        """Best segmentation of ``piece`` when ``piece`` itself is unavailable."""
        units = tuple(text_units(piece, add_dummy_prefix=False))
        lat = _Lattice(units, 1, ids, self.cfg.max_piece_length)
        lat.by_end = [[(s, j) for s, j in edges if j != pid] for edges in lat.by_end]
        return lat.viterbi(logp)


def train(corpus: Corpus | Sequence[str], cfg: TrainerConfig = TrainerConfig()) -> UnigramVocab:
    """Train a unigram vocabulary of exactly ``cfg.target_vocab_size`` entries (specials included)."""
    texts = [c.text for c in corpus] if isinstance(corpus, Corpus) else list(corpus)
    if not texts:
        raise ValueError("cannot train a tokenizer on an empty corpus")
    return UnigramTrainer(cfg).fit(texts)
