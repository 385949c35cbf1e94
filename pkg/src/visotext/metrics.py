"""Classification and span metrics, and a paired t-test."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Hashable, Optional, Sequence

from .spans import SpanLabeledSeq


class MetricError(ValueError):
    pass


@dataclass
class ConfusionCounts:
    classes: list
    tp: dict = field(default_factory=dict)
    fp: dict = field(default_factory=dict)
    fn: dict = field(default_factory=dict)
    support: dict = field(default_factory=dict)
    total: int = 0

    @classmethod
    def from_labels(cls, gold: Sequence[Hashable], pred: Sequence[Hashable]) -> "ConfusionCounts":
        classes = sorted(set(gold) | set(pred), key=repr)
        cc = cls(classes, *({c: 0 for c in classes} for _ in range(4)), total=len(gold))
        for g, p in zip(gold, pred):
            cc.support[g] += 1
            if g == p:
                cc.tp[g] += 1
            else:
                cc.fp[p] += 1
                cc.fn[g] += 1
        return cc

    @property
    def correct(self) -> int:
        return sum(self.tp.values())

    def f1(self, c) -> float:
        # 2PR/(P+R) simplifies to 2TP/(2TP+FP+FN); zero when both P and R are undefined or zero.
        denom = 2 * self.tp[c] + self.fp[c] + self.fn[c]
        return 2 * self.tp[c] / denom if denom else 0.0


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    weighted_f1: float
    macro_f1: float
    per_class_f1: dict
    n: int

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "weighted_f1": self.weighted_f1,
            "macro_f1": self.macro_f1,
            "per_class_f1": {str(k): v for k, v in self.per_class_f1.items()},
            "n": self.n,
        }


def classification_report(gold: Sequence[Hashable], pred: Sequence[Hashable]) -> EvalReport:
    """Accuracy plus macro and support-weighted F1 over the classes present in ``gold``."""
    if len(gold) != len(pred):
        raise MetricError(f"{len(gold)} gold labels but {len(pred)} predictions")
    if not gold:
        raise MetricError("cannot evaluate an empty prediction set")
    cc = ConfusionCounts.from_labels(gold, pred)
    gold_classes = [c for c in cc.classes if cc.support[c]]
    per_class = {c: cc.f1(c) for c in gold_classes}
    n = len(gold)
    macro = math.fsum(per_class.values()) / len(per_class)
    weighted = math.fsum(cc.support[c] * per_class[c] for c in gold_classes) / n
    return EvalReport(cc.correct / n, weighted, macro, per_class, n)


def span_report(gold: Sequence[SpanLabeledSeq], pred: Sequence[SpanLabeledSeq]) -> EvalReport:
    """Tag-level metrics over all comments' B-T/I-T/O sequences laid end to end."""
    if len(gold) != len(pred):
        raise MetricError(f"{len(gold)} gold comments but {len(pred)} predicted")
    flat_gold: list[str] = []
    flat_pred: list[str] = []
    for i, (g, p) in enumerate(zip(gold, pred)):
        if len(g.labels) != len(p.labels):
            raise MetricError(f"comment {i}: {len(g.labels)} gold tags but {len(p.labels)} predicted")
        flat_gold.extend(g.labels)
        flat_pred.extend(p.labels)
    return classification_report(flat_gold, flat_pred)


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta, modified Lentz method."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 10000):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = tiny if abs(d) < tiny else d
        c = 1.0 + aa / c
        c = tiny if abs(c) < tiny else c
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = tiny if abs(d) < tiny else d
        c = 1.0 + aa / c
        c = tiny if abs(c) < tiny else c
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def betainc_regularized(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and 0 <= x <= 1."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    log_front = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log1p(-x)
    front = math.exp(log_front)
    # The fraction converges fast only on one side of the mean; use symmetry on the other.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_two_sided_p(t: float, df: float) -> float:
    """P(|T| >= |t|) for Student's t with ``df`` degrees of freedom."""
    if df <= 0:
        raise ValueError("degrees of freedom must be positive")
    if math.isinf(t):
        return 0.0
    return betainc_regularized(df / 2.0, 0.5, df / (df + t * t))


@dataclass(frozen=True)
class PairedTestResult:
    t_statistic: float
    degrees_of_freedom: int
    p_value: float
    significant_at: Optional[float] = None
    mean_difference: float = 0.0

    @property
    def significant(self) -> Optional[bool]:
        return None if self.significant_at is None else self.p_value < self.significant_at

    def to_dict(self) -> dict:
        return {
            "t_statistic": self.t_statistic,
            "degrees_of_freedom": self.degrees_of_freedom,
            "p_value": self.p_value,
            "mean_difference": self.mean_difference,
            "significant_at": self.significant_at,
            "significant": self.significant,
        }


def paired_t_test(
    scores_a: Sequence[float], scores_b: Sequence[float], alpha: Optional[float] = None
) -> PairedTestResult:
    if len(scores_a) != len(scores_b):
        raise MetricError(f"{len(scores_a)} scores against {len(scores_b)}")
    n = len(scores_a)
    if n < 2:
        raise MetricError("a paired t-test needs at least two pairs")
    d = [float(a) - float(b) for a, b in zip(scores_a, scores_b)]
    mean = math.fsum(d) / n
    var = math.fsum((x - mean) ** 2 for x in d) / (n - 1)
    # Relative cutoff so float noise in constant differences counts as zero variance.
    scale = max(1.0, max(abs(x) for x in d))
    if var <= (1e-12 * scale) ** 2:
        raise MetricError("differences have zero variance; the t statistic is undefined")
    t = mean / math.sqrt(var / n)
    return PairedTestResult(t, n - 1, t_two_sided_p(t, n - 1), alpha, mean)
