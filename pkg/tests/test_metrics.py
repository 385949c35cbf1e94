import math
import random

import pytest
from hypothesis import given, strategies as st

from visotext.metrics import (
    MetricError,
    betainc_regularized,
    classification_report,
    paired_t_test,
    span_report,
    t_two_sided_p,
)
from visotext.spans import SpanLabeledSeq


def brute_force(gold, pred):
    """Confusion matrix by explicit counting, F1 from precision and recall."""
    classes = sorted(set(gold))
    f1 = {}
    for c in classes:
        tp = sum(1 for g, p in zip(gold, pred) if g == c and p == c)
        npred = sum(1 for p in pred if p == c)
        ngold = sum(1 for g in gold if g == c)
        prec = tp / npred if npred else 0.0
        rec = tp / ngold if ngold else 0.0
        f1[c] = 2 * prec * rec / (prec + rec) if prec + rec else 0.0
    acc = sum(g == p for g, p in zip(gold, pred)) / len(gold)
    macro = sum(f1.values()) / len(f1)
    weighted = sum(f1[c] * gold.count(c) for c in classes) / len(gold)
    return acc, weighted, macro, f1


def test_worked_example():
    r = classification_report(list("AABB"), list("ABBB"))
    assert r.accuracy == 0.75
    assert r.per_class_f1["A"] == pytest.approx(2 / 3, abs=1e-15)
    assert r.per_class_f1["B"] == pytest.approx(0.8, abs=1e-15)
    assert r.macro_f1 == pytest.approx(0.7333, abs=5e-5)
    assert r.weighted_f1 == pytest.approx(0.7333, abs=5e-5)


def test_perfect_and_total_miss():
    r = classification_report(list("ABCABC"), list("ABCABC"))
    assert r.accuracy == r.macro_f1 == r.weighted_f1 == 1.0
    r = classification_report(list("AAA"), list("BBB"))
    assert r.accuracy == 0.0 and r.macro_f1 == 0.0


def test_input_errors():
    with pytest.raises(MetricError):
        classification_report(["A"], [])
    with pytest.raises(MetricError):
        classification_report([], [])


def test_brute_force_agreement():
    rng = random.Random(3)
    for _ in range(1000):
        k = rng.randint(2, 6)
        n = rng.randint(1, 60)
        gold = [rng.randrange(k) for _ in range(n)]
        pred = [rng.randrange(k) for _ in range(n)]
        r = classification_report(gold, pred)
        acc, weighted, macro, f1 = brute_force(gold, pred)
        assert abs(r.accuracy - acc) <= 1e-12
        assert abs(r.weighted_f1 - weighted) <= 1e-12
        assert abs(r.macro_f1 - macro) <= 1e-12
        for c in f1:
            assert abs(r.per_class_f1[c] - f1[c]) <= 1e-12


def test_sklearn_agreement():
    skm = pytest.importorskip("sklearn.metrics")
    rng = random.Random(4)
    for _ in range(200):
        gold = [rng.choice("ABC") for _ in range(40)]
        pred = [rng.choice("ABCD") for _ in range(40)]
        r = classification_report(gold, pred)
        labels = sorted(set(gold))
        assert r.macro_f1 == pytest.approx(skm.f1_score(gold, pred, labels=labels, average="macro", zero_division=0), abs=1e-12)
        assert r.weighted_f1 == pytest.approx(skm.f1_score(gold, pred, labels=labels, average="weighted", zero_division=0), abs=1e-12)
        assert r.accuracy == pytest.approx(skm.accuracy_score(gold, pred), abs=1e-12)


@given(st.lists(st.tuples(st.sampled_from("ABCD"), st.sampled_from("ABCD")), min_size=1, max_size=40), st.randoms())
def test_bounds_and_permutation(pairs, rnd):
    gold, pred = map(list, zip(*pairs))
    r = classification_report(gold, pred)
    lo, hi = min(r.per_class_f1.values()), max(r.per_class_f1.values())
    assert lo - 1e-12 <= r.weighted_f1 <= hi + 1e-12
    assert lo - 1e-12 <= r.macro_f1 <= hi + 1e-12
    for v in (r.accuracy, r.weighted_f1, r.macro_f1):
        assert 0.0 <= v <= 1.0
    shuffled = pairs[:]
    rnd.shuffle(shuffled)
    g2, p2 = map(list, zip(*shuffled))
    r2 = classification_report(g2, p2)
    assert r2.accuracy == pytest.approx(r.accuracy, abs=1e-12)
    assert r2.macro_f1 == pytest.approx(r.macro_f1, abs=1e-12)
    assert r2.weighted_f1 == pytest.approx(r.weighted_f1, abs=1e-12)


def S(*labels):
    return SpanLabeledSeq(tuple("w" * (i + 1) for i in range(len(labels))), labels)


def test_span_report():
    assert span_report([S("O", "B-T")], [S("O", "O")]).accuracy == 0.5
    same = [S("O", "B-T", "I-T"), S("B-T")]
    assert span_report(same, same).macro_f1 == 1.0
    gold = [S("O", "B-T", "I-T"), S("B-T", "O")]
    pred = [S("O", "B-T", "O"), S("O", "O")]
    flat = classification_report(["O", "B-T", "I-T", "B-T", "O"], ["O", "B-T", "O", "O", "O"])
    assert span_report(gold, pred) == flat
    with pytest.raises(MetricError):
        span_report(gold, pred[:1])
    with pytest.raises(MetricError):
        span_report([S("O")], [S("O", "O")])


def test_t_test_example():
    r = paired_t_test([1, 1, 1, 1, -1], [0, 0, 0, 0, 0])
    assert r.t_statistic == pytest.approx(1.5, abs=1e-12)
    assert r.degrees_of_freedom == 4
    assert r.p_value == pytest.approx(0.2080, abs=5e-5)


def t_pdf(x, df):
    return math.exp(math.lgamma((df + 1) / 2) - math.lgamma(df / 2)) / math.sqrt(df * math.pi) * (1 + x * x / df) ** (-(df + 1) / 2)


@pytest.mark.parametrize("t,df", [(1.5, 4), (0.3, 1), (2.0, 2), (3.7, 9), (1.1, 30), (8.0, 5)])
def test_p_value_against_quadrature(t, df):
    integrate = pytest.importorskip("scipy.integrate")
    tail, _ = integrate.quad(t_pdf, abs(t), math.inf, args=(df,), epsabs=1e-14, epsrel=1e-13)
    assert abs(t_two_sided_p(t, df) - 2 * tail) < 1e-10


def test_betainc_against_scipy():
    special = pytest.importorskip("scipy.special")
    rng = random.Random(8)
    for _ in range(500):
        a, b, x = rng.uniform(0.1, 40), rng.uniform(0.1, 40), rng.random()
        assert abs(betainc_regularized(a, b, x) - special.betainc(a, b, x)) < 1e-10


def test_t_test_degenerate():
    with pytest.raises(MetricError):
        paired_t_test([1, 2, 3], [1, 2, 3])
    with pytest.raises(MetricError):
        paired_t_test([1.1, 2.1, 3.1, 4.1, 5.1], [0.1, 1.1, 2.1, 3.1, 4.1])
    with pytest.raises(MetricError):
        paired_t_test([1], [2])
    with pytest.raises(MetricError):
        paired_t_test([1, 2], [1])


@given(st.lists(st.tuples(st.floats(-10, 10), st.floats(-10, 10)), min_size=2, max_size=30))
def test_t_test_antisymmetry(pairs):
    a, b = map(list, zip(*pairs))
    try:
        r = paired_t_test(a, b)
    except MetricError:
        return
    s = paired_t_test(b, a)
    assert s.t_statistic == pytest.approx(-r.t_statistic, rel=1e-12, abs=1e-12)
    assert s.p_value == pytest.approx(r.p_value, rel=1e-9, abs=1e-15)
    assert 0.0 <= r.p_value <= 1.0


def test_significance_flag():
    r = paired_t_test([0.9, 0.8, 0.85, 0.95, 0.9, 0.88], [0.5, 0.45, 0.6, 0.5, 0.55, 0.52], alpha=0.01)
    assert r.significant is True
