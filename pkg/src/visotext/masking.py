"""Dynamic masked-language-model corruption plans and masking-rate sweeps."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .corpus import Corpus
from .tokenizer import EOS_ID, Encoding, UnigramVocab

IGNORE_INDEX = -100


@dataclass(frozen=True)
class MaskConfig:
    rate: float = 0.30
    replace_mask_frac: float = 0.8
    replace_random_frac: float = 0.1
    keep_frac: float = 0.1
    seed: int = 0
    max_seq_len: int = 128

    def __post_init__(self):
        if not 0.0 <= self.rate <= 1.0:
            raise ValueError(f"masking rate must be in [0, 1], got {self.rate}")
        fracs = (self.replace_mask_frac, self.replace_random_frac, self.keep_frac)
        if any(f < 0 for f in fracs) or abs(sum(fracs) - 1.0) > 1e-12:
            raise ValueError("replace_mask_frac + replace_random_frac + keep_frac must equal 1")
        if self.max_seq_len < 2:
            raise ValueError("max_seq_len must leave room for <s> and </s>")


@dataclass
class MaskPlan:
    input_ids: list[int]
    # Original id at masked positions, IGNORE_INDEX elsewhere.
    target_ids: list[int]
    masked_positions: list[int]
    comment_id: str = ""
    epoch: int = 0

    def to_record(self) -> dict:
        return {
            "id": self.comment_id,
            "epoch": self.epoch,
            "input_ids": self.input_ids,
            "target_ids": self.target_ids,
            "masked_positions": self.masked_positions,
        }

    def restore(self) -> list[int]:
        ids = list(self.input_ids)
        for p in self.masked_positions:
            ids[p] = self.target_ids[p]
        return ids


def _id_hash(comment_id: str) -> int:
    return int.from_bytes(hashlib.blake2b(comment_id.encode("utf-8"), digest_size=8).digest(), "little")


def plan_rng(seed: int, comment_id: str, epoch_nonce: int) -> np.random.Generator:
    """Generator keyed by (seed, comment id, epoch), independent of processing order."""
    entropy = [seed & 0xFFFFFFFFFFFFFFFF, _id_hash(comment_id), epoch_nonce & 0xFFFFFFFFFFFFFFFF]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def truncate(ids: Sequence[int], max_seq_len: int) -> list[int]:
    """Hard-truncate, keeping a final </s>."""
    ids = list(ids)
    if len(ids) <= max_seq_len:
        return ids
    return ids[: max_seq_len - 1] + [EOS_ID]


def plan_masks(
    enc: Encoding | Sequence[int],
    vocab: UnigramVocab,
    cfg: MaskConfig = MaskConfig(),
    epoch_nonce: int = 0,
    comment_id: str = "",
) -> MaskPlan:
    ids = truncate(enc.ids if isinstance(enc, Encoding) else enc, cfg.max_seq_len)
    specials = vocab.special_ids
    maskable = np.array([i for i, t in enumerate(ids) if t not in specials], dtype=np.int64)
    rng = plan_rng(cfg.seed, comment_id, epoch_nonce)
    # Draw both uniform streams up front so the plan depends only on the seed and length.
    selector = rng.random(len(maskable))
    action = rng.random(len(maskable))
    chosen = selector < cfg.rate
    positions = maskable[chosen]
    action = action[chosen]
    normal = vocab.normal_ids
    replacements = rng.integers(normal.start, normal.stop, size=len(positions)) if len(normal) else None

    input_ids = list(ids)
    target_ids = [IGNORE_INDEX] * len(ids)
    cut_mask = cfg.replace_mask_frac
    cut_random = cfg.replace_mask_frac + cfg.replace_random_frac
    for k, pos in enumerate(positions.tolist()):
        target_ids[pos] = ids[pos]
        a = action[k]
        if a < cut_mask:
            input_ids[pos] = vocab.mask_id
        elif a < cut_random and replacements is not None:
            input_ids[pos] = int(replacements[k])
    return MaskPlan(input_ids, target_ids, positions.tolist(), comment_id=comment_id, epoch=epoch_nonce)


def corruption_kinds(plan: MaskPlan, original: Sequence[int], vocab: UnigramVocab) -> dict[str, int]:
    """Count how masked positions were corrupted. A random draw equal to the original counts as kept."""
    out = {"mask": 0, "random": 0, "keep": 0}
    for p in plan.masked_positions:
        if plan.input_ids[p] == vocab.mask_id:
            out["mask"] += 1
        elif plan.input_ids[p] != original[p]:
            out["random"] += 1
        else:
            out["keep"] += 1
    return out


@dataclass
class RateStats:
    rate: float
    epochs: int
    maskable: int = 0
    masked: int = 0
    # coverage_histogram[k] = number of maskable positions masked in exactly k epochs.
    coverage_histogram: list[int] = field(default_factory=list)
    plans: list[MaskPlan] = field(default_factory=list)

    @property
    def realized_fraction(self) -> float:
        return self.masked / self.maskable if self.maskable else 0.0

    def to_dict(self) -> dict:
        return {
            "rate": self.rate,
            "epochs": self.epochs,
            "maskable": self.maskable,
            "masked": self.masked,
            "realized_fraction": self.realized_fraction,
            "coverage_histogram": self.coverage_histogram,
        }


def sweep_rates(
    corpus: Corpus | Iterable[tuple[str, Encoding]],
    vocab: UnigramVocab,
    rates: Sequence[float],
    cfg: MaskConfig = MaskConfig(),
    epochs: int = 1,
    keep_plans: bool = False,
) -> list[RateStats]:
    """Masking statistics for each rate over ``epochs`` dynamic re-draws of every comment."""
    if not rates:
        raise ValueError("rates must be nonempty")
    for r in rates:
        if not 0.0 <= r <= 1.0:
            raise ValueError(f"invalid masking rate {r}")
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    if isinstance(corpus, Corpus):
        encoded = [(c.id, vocab.encode(c.text)) for c in corpus]
    else:
        encoded = list(corpus)
    rows = []
    for rate in rates:
        rcfg = MaskConfig(rate, cfg.replace_mask_frac, cfg.replace_random_frac, cfg.keep_frac, cfg.seed, cfg.max_seq_len)
        stats = RateStats(rate=rate, epochs=epochs)
        hist = np.zeros(epochs + 1, dtype=np.int64)
        for cid, enc in encoded:
            ids = truncate(enc.ids, rcfg.max_seq_len)
            hits = np.zeros(len(ids), dtype=np.int64)
            n_maskable = sum(1 for t in ids if t not in vocab.special_ids)
            for epoch in range(epochs):
                plan = plan_masks(enc, vocab, rcfg, epoch_nonce=epoch, comment_id=cid)
                hits[plan.masked_positions] += 1
                stats.maskable += n_maskable
                stats.masked += len(plan.masked_positions)
                if keep_plans:
                    stats.plans.append(plan)
            maskable_hits = [hits[i] for i, t in enumerate(ids) if t not in vocab.special_ids]
            hist += np.bincount(np.asarray(maskable_hits, dtype=np.int64), minlength=epochs + 1)
        stats.coverage_histogram = hist.tolist()
        rows.append(stats)
    return rows
