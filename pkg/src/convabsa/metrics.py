"""Scoring engine: element / pair / sextuple / flip metrics.

Predictions are compared to gold annotations as sets, via an optimal
injective assignment, so counts are order-independent.  Explicit
elements use exact (normalized string) match, implicit elements use a
pluggable semantic judge (default: normalized equality, so everything
runs offline), and explicit rationales use proportional token overlap.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Callable, Iterable, Mapping, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .dialogue import (
    AnnotatedDialogue,
    Element,
    FlipRecord,
    Manner,
    Sentiment,
    Sextuple,
    TriggerType,
    context_text,
)
from .textnorm import norm_tokens, normalize_term

if TYPE_CHECKING:
    from .corpus import Corpus

__all__ = [
    "ELEMENT_CATEGORIES",
    "PAIR_KINDS",
    "PRF",
    "ElementScore",
    "FlipScoreReport",
    "ScoreReport",
    "ScoringError",
    "SemanticJudge",
    "cohen_kappa",
    "default_judge",
    "element_f1",
    "element_scores",
    "flip_scores",
    "match_tuples",
    "memoize_judge",
    "normalize_term",
    "pair_f1",
    "proportional_overlap",
    "render_flip_table",
    "render_score_table",
    "score_corpus",
    "sentiment_macro_f1",
    "sextuple_f1",
]

ELEMENT_CATEGORIES = ("holder", "target", "aspect", "opinion", "rationale")
PAIR_KINDS = ("TA", "HO", "SR", "OS")
_PAIR_MEMBERS = {
    "TA": ("target", "aspect"),
    "HO": ("holder", "opinion"),
    "SR": ("sentiment", "rationale"),
    "OS": ("opinion", "sentiment"),
}

# (dialogue context, predicted term, gold term) -> semantically identical?
SemanticJudge = Callable[[str, str, str], bool]

_TOTAL_EPS = 1e-9


class ScoringError(RuntimeError):
    """A semantic judge failed while scoring a specific pair."""


@dataclass(frozen=True)
class PRF:
    precision: float = 0.0
    recall: float = 0.0
    f1: float = 0.0

    @staticmethod
    def from_counts(matched_p: float, n_pred: float, matched_r: float, n_gold: float) -> "PRF":
        p = matched_p / n_pred if n_pred else 0.0
        r = matched_r / n_gold if n_gold else 0.0
        return PRF(p, r, _f1(p, r))

    def to_dict(self) -> dict[str, float]:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1}


def _f1(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


def proportional_overlap(pred: str, gold: str) -> tuple[float, float]:
    """Proportional precision/recall scores for one term pair.

    The overlap is the longest common contiguous token run between the
    normalized token sequences; each side's score is overlap over its
    own length.  Zero-length inputs yield (0, 0).
    """
    pred_tokens = norm_tokens(pred)
    gold_tokens = norm_tokens(gold)
    if not pred_tokens or not gold_tokens:
        return 0.0, 0.0
    run = _longest_common_run(pred_tokens, gold_tokens)
    return run / len(pred_tokens), run / len(gold_tokens)


def _longest_common_run(a: Sequence[str], b: Sequence[str]) -> int:
    best = 0
    prev = [0] * (len(b) + 1)
    for i in range(1, len(a) + 1):
        cur = [0] * (len(b) + 1)
        for j in range(1, len(b) + 1):
            if a[i - 1] == b[j - 1]:
                cur[j] = prev[j - 1] + 1
                if cur[j] > best:
                    best = cur[j]
        prev = cur
    return best


def _overlap_score(pred: str, gold: str) -> float:
    pp, pr = proportional_overlap(pred, gold)
    return _f1(pp, pr)


def _assignment_total(matrix: np.ndarray) -> float:
    if matrix.size == 0:
        return 0.0
    rows, cols = linear_sum_assignment(matrix, maximize=True)
    return float(matrix[rows, cols].sum())


def match_tuples(
    preds: Sequence, golds: Sequence, score: Callable[[Any, Any], float]
) -> tuple[list[tuple[int, int]], float]:
    """Optimal injective pred-to-gold assignment under a pairwise score.

    Returns the matched (pred index, gold index) pairs and the maximal
    total score.  Among equal-total assignments the lowest (gold index,
    pred index) pairs win; zero-score pairs are left unmatched.
    """
    if not preds or not golds:
        return [], 0.0
    matrix = np.array([[float(score(p, g)) for g in golds] for p in preds], dtype=float)
    total = _assignment_total(matrix)
    pairs: list[tuple[int, int]] = []
    free_preds = list(range(len(preds)))
    free_golds = list(range(len(golds)))
    fixed = 0.0
    for g in list(free_golds):
        for p in free_preds:
            if matrix[p, g] <= 0.0:
                continue
            rest_p = [i for i in free_preds if i != p]
            rest_g = [j for j in free_golds if j != g]
            candidate = fixed + matrix[p, g] + _assignment_total(matrix[np.ix_(rest_p, rest_g)])
            if candidate >= total - _TOTAL_EPS:
                pairs.append((p, g))
                fixed += matrix[p, g]
                free_preds = rest_p
                free_golds = rest_g
                break
    return pairs, total


@dataclass
class _Counts:
    """Raw numerators and denominators for one matched subset."""

    matched_p: float = 0.0
    matched_r: float = 0.0
    n_pred: int = 0
    n_gold: int = 0

    def prf(self) -> PRF:
        return PRF.from_counts(self.matched_p, self.n_pred, self.matched_r, self.n_gold)

    def vacuous(self) -> bool:
        return self.n_pred == 0 and self.n_gold == 0

    def absorb(self, other: "_Counts") -> None:
        self.matched_p += other.matched_p
        self.matched_r += other.matched_r
        self.n_pred += other.n_pred
        self.n_gold += other.n_gold


@dataclass(frozen=True)
class ElementScore:
    """Per-category scores: explicit subset, implicit subset, and blends.

    ``combined`` averages the two subset scores (the headline number);
    ``pooled`` merges the raw counts instead, exposed for comparison.
    """

    exact: PRF
    relevant: PRF
    combined: PRF
    pooled: PRF

    def to_dict(self) -> dict[str, Any]:
        return {
            "exact": self.exact.to_dict(),
            "relevant": self.relevant.to_dict(),
            "combined": self.combined.to_dict(),
            "pooled": self.pooled.to_dict(),
        }


@dataclass(frozen=True)
class ScoreReport:
    elements: Mapping[str, ElementScore]
    sentiment_macro_f1: float
    pairs: Mapping[str, PRF]
    sextuple_micro: PRF
    sextuple_identification: PRF

    def element_f1(self, category: str) -> float:
        return self.elements[category].combined.f1

    def to_dict(self) -> dict[str, Any]:
        return {
            "elements": {c: s.to_dict() for c, s in self.elements.items()},
            "sentiment_macro_f1": self.sentiment_macro_f1,
            "pairs": {k: v.to_dict() for k, v in self.pairs.items()},
            "sextuple_micro": self.sextuple_micro.to_dict(),
            "sextuple_identification": self.sextuple_identification.to_dict(),
        }


@dataclass(frozen=True)
class FlipScoreReport:
    flip: PRF
    trigger_macro_f1: float
    per_trigger_f1: Mapping[TriggerType, float]
    flip_trig: PRF

    def to_dict(self) -> dict[str, Any]:
        return {
            "flip": self.flip.to_dict(),
            "trigger_macro_f1": self.trigger_macro_f1,
            "per_trigger_f1": {t.value: f for t, f in self.per_trigger_f1.items()},
            "flip_trig": self.flip_trig.to_dict(),
        }


def default_judge(context: str, pred: str, gold: str) -> bool:
    """Offline semantic judge: normalized string equality."""
    return normalize_term(pred) == normalize_term(gold)


def memoize_judge(judge: SemanticJudge) -> SemanticJudge:
    """Cache judge verdicts per (context, pred, gold) triple."""
    cache: dict[tuple[str, str, str], bool] = {}

    def wrapped(context: str, pred: str, gold: str) -> bool:
        key = (context, pred, gold)
        if key not in cache:
            cache[key] = judge(context, pred, gold)
        return cache[key]

    return wrapped


def _judge_call(judge: SemanticJudge, context: str, pred: str, gold: str) -> bool:
    try:
        return bool(judge(context, pred, gold))
    except ScoringError:
        raise
    except Exception as e:
        raise ScoringError(f"semantic judge failed on pair ({pred!r}, {gold!r}): {e}") from e


def _exact_counts(preds: Sequence[str], golds: Sequence[str]) -> _Counts:
    def score(p: str, g: str) -> float:
        return 1.0 if normalize_term(p) == normalize_term(g) else 0.0

    _, total = match_tuples(preds, golds, score)
    return _Counts(total, total, len(preds), len(golds))


def _binary_counts(
    preds: Sequence[str], golds: Sequence[str], judge: SemanticJudge, context: str
) -> _Counts:
    def score(p: str, g: str) -> float:
        return 1.0 if _judge_call(judge, context, p, g) else 0.0

    _, total = match_tuples(preds, golds, score)
    return _Counts(total, total, len(preds), len(golds))


def _proportional_counts(preds: Sequence[str], golds: Sequence[str]) -> _Counts:
    pairs, _ = match_tuples(preds, golds, _overlap_score)
    matched_p = math.fsum(proportional_overlap(preds[p], golds[g])[0] for p, g in pairs)
    matched_r = math.fsum(proportional_overlap(preds[p], golds[g])[1] for p, g in pairs)
    return _Counts(matched_p, matched_r, len(preds), len(golds))


def _element_subset_counts(
    preds: Sequence[Element],
    golds: Sequence[Element],
    category: str,
    judge: SemanticJudge,
    context: str,
) -> tuple[_Counts, _Counts]:
    pred_exp = [e.value for e in preds if e.manner is Manner.EXPLICIT]
    gold_exp = [e.value for e in golds if e.manner is Manner.EXPLICIT]
    pred_imp = [e.value for e in preds if e.manner is Manner.IMPLICIT]
    gold_imp = [e.value for e in golds if e.manner is Manner.IMPLICIT]
    if category == "rationale":
        exact = _proportional_counts(pred_exp, gold_exp)
    else:
        exact = _exact_counts(pred_exp, gold_exp)
    relevant = _binary_counts(pred_imp, gold_imp, judge, context)
    return exact, relevant


def _combine_element(exact: _Counts, relevant: _Counts) -> ElementScore:
    pooled = _Counts()
    pooled.absorb(exact)
    pooled.absorb(relevant)
    exact_prf = exact.prf()
    relevant_prf = relevant.prf()
    if exact.vacuous() and relevant.vacuous():
        combined = PRF()
    elif exact.vacuous():
        combined = relevant_prf
    elif relevant.vacuous():
        combined = exact_prf
    else:
        combined = PRF(
            (exact_prf.precision + relevant_prf.precision) / 2,
            (exact_prf.recall + relevant_prf.recall) / 2,
            (exact_prf.f1 + relevant_prf.f1) / 2,
        )
    return ElementScore(exact_prf, relevant_prf, combined, pooled.prf())


def element_scores(
    preds: Sequence[Element],
    golds: Sequence[Element],
    category: str,
    judge: SemanticJudge | None = None,
    context: str = "",
) -> ElementScore:
    if category not in ELEMENT_CATEGORIES:
        raise ValueError(f"unknown element category: {category!r}")
    judge = judge or default_judge
    exact, relevant = _element_subset_counts(preds, golds, category, judge, context)
    return _combine_element(exact, relevant)


def element_f1(
    preds: Sequence[Element],
    golds: Sequence[Element],
    category: str,
    judge: SemanticJudge | None = None,
    context: str = "",
) -> PRF:
    """Category score: mean of the explicit-subset and implicit-subset PRF.

    When one subset is empty on both sides the category score equals
    the other subset's score.
    """
    return element_scores(preds, golds, category, judge, context).combined


def _macro_label_f1(
    pairs: Iterable[tuple[Any, Any]],
    unmatched_pred: Mapping[Any, int],
    unmatched_gold: Mapping[Any, int],
    classes: Sequence[Any],
) -> tuple[float, dict[Any, float]]:
    """Macro F1 over fixed classes from aligned label pairs.

    Unmatched predictions are false positives of their class, unmatched
    golds false negatives.  Classes with no data on either side are
    reported as 0 and excluded from the macro average; with no data at
    all the macro is 0 by convention.
    """
    pred_counts: Counter = Counter()
    gold_counts: Counter = Counter()
    correct: Counter = Counter()
    for pred_label, gold_label in pairs:
        pred_counts[pred_label] += 1
        gold_counts[gold_label] += 1
        if pred_label == gold_label:
            correct[pred_label] += 1
    for label, count in unmatched_pred.items():
        pred_counts[label] += count
    for label, count in unmatched_gold.items():
        gold_counts[label] += count
    per_class: dict[Any, float] = {}
    present: list[float] = []
    for cls in classes:
        n_pred, n_gold = pred_counts[cls], gold_counts[cls]
        p = correct[cls] / n_pred if n_pred else 0.0
        r = correct[cls] / n_gold if n_gold else 0.0
        per_class[cls] = _f1(p, r)
        if n_pred or n_gold:
            present.append(per_class[cls])
    macro = sum(present) / len(present) if present else 0.0
    return macro, per_class


def sentiment_macro_f1(
    pairs: Iterable[tuple[Sentiment, Sentiment]],
    unmatched_pred: Mapping[Sentiment, int] | None = None,
    unmatched_gold: Mapping[Sentiment, int] | None = None,
) -> float:
    macro, _ = _macro_label_f1(
        pairs, unmatched_pred or {}, unmatched_gold or {}, list(Sentiment)
    )
    return macro


def _element_correct(
    pred_el: Element, gold_el: Element, category: str, judge: SemanticJudge, context: str
) -> bool:
    if pred_el.manner is not gold_el.manner:
        return False
    if pred_el.manner is Manner.IMPLICIT:
        return _judge_call(judge, context, pred_el.value, gold_el.value)
    if category == "rationale":
        # Explicit rationale counts as correct above 0.5 proportional score.
        return _overlap_score(pred_el.value, gold_el.value) > 0.5
    return normalize_term(pred_el.value) == normalize_term(gold_el.value)


def _member_correct(
    pred: Sextuple, gold: Sextuple, member: str, judge: SemanticJudge, context: str
) -> bool:
    if member == "sentiment":
        return pred.sentiment is gold.sentiment
    return _element_correct(
        getattr(pred, member), getattr(gold, member), member, judge, context
    )


def _sextuple_correct(
    pred: Sextuple,
    gold: Sextuple,
    judge: SemanticJudge,
    context: str,
    with_sentiment: bool,
) -> bool:
    members = list(ELEMENT_CATEGORIES) + (["sentiment"] if with_sentiment else [])
    return all(_member_correct(pred, gold, m, judge, context) for m in members)


def pair_f1(
    preds: Sequence[Sextuple],
    golds: Sequence[Sextuple],
    kind: str,
    judge: SemanticJudge | None = None,
    context: str = "",
) -> PRF:
    """Score one projected pair kind (TA, HO, SR, OS).

    A projected pair is correct iff both members are correct under
    their element rules.
    """
    if kind not in _PAIR_MEMBERS:
        raise ValueError(f"unknown pair kind: {kind!r}")
    judge = judge or default_judge
    members = _PAIR_MEMBERS[kind]

    def score(p: Sextuple, g: Sextuple) -> float:
        return 1.0 if all(_member_correct(p, g, m, judge, context) for m in members) else 0.0

    _, total = match_tuples(preds, golds, score)
    return PRF.from_counts(total, len(preds), total, len(golds))


def sextuple_f1(
    preds: Sequence[Sextuple],
    golds: Sequence[Sextuple],
    judge: SemanticJudge | None = None,
    context: str = "",
    mode: str = "micro",
) -> PRF:
    """Whole-sextuple score; ``identification`` ignores the sentiment field."""
    if mode not in ("micro", "identification"):
        raise ValueError(f"unknown sextuple scoring mode: {mode!r}")
    judge = judge or default_judge
    with_sentiment = mode == "micro"

    def score(p: Sextuple, g: Sextuple) -> float:
        return 1.0 if _sextuple_correct(p, g, judge, context, with_sentiment) else 0.0

    _, total = match_tuples(preds, golds, score)
    return PRF.from_counts(total, len(preds), total, len(golds))


def _flip_quintuple(f: FlipRecord) -> tuple:
    return (
        normalize_term(f.holder),
        normalize_term(f.target),
        normalize_term(f.aspect),
        f.initial,
        f.flipped,
    )


def flip_scores(preds: Sequence[FlipRecord], golds: Sequence[FlipRecord]) -> FlipScoreReport:
    """Flip / trigger / flip-trigger scores for one record pair."""
    acc = _FlipAccumulator()
    acc.add(preds, golds)
    return acc.report()


def cohen_kappa(labels_a: Sequence, labels_b: Sequence) -> float:
    """Cohen's kappa agreement between two equally long label lists."""
    if len(labels_a) != len(labels_b):
        raise ValueError(
            f"label lists must have equal length; got {len(labels_a)} and {len(labels_b)}"
        )
    if not labels_a:
        raise ValueError("label lists must be non-empty")
    n = len(labels_a)
    observed = sum(1 for a, b in zip(labels_a, labels_b) if a == b) / n
    counts_a = Counter(labels_a)
    counts_b = Counter(labels_b)
    expected = sum(counts_a[c] * counts_b.get(c, 0) for c in counts_a) / (n * n)
    if expected == 1.0:
        return 1.0
    return (observed - expected) / (1.0 - expected)


class _FlipAccumulator:
    def __init__(self) -> None:
        self.flip = _Counts()
        self.flip_trig = _Counts()
        self.trigger_pairs: list[tuple[TriggerType, TriggerType]] = []
        self.unmatched_pred: Counter = Counter()
        self.unmatched_gold: Counter = Counter()

    def add(self, preds: Sequence[FlipRecord], golds: Sequence[FlipRecord]) -> None:
        def quint_score(p: FlipRecord, g: FlipRecord) -> float:
            return 1.0 if _flip_quintuple(p) == _flip_quintuple(g) else 0.0

        pairs, total = match_tuples(preds, golds, quint_score)
        self.flip.absorb(_Counts(total, total, len(preds), len(golds)))
        matched_preds = {p for p, _ in pairs}
        matched_golds = {g for _, g in pairs}
        for p, g in pairs:
            self.trigger_pairs.append((preds[p].trigger, golds[g].trigger))
        for i, pred in enumerate(preds):
            if i not in matched_preds:
                self.unmatched_pred[pred.trigger] += 1
        for j, gold in enumerate(golds):
            if j not in matched_golds:
                self.unmatched_gold[gold.trigger] += 1

        def full_score(p: FlipRecord, g: FlipRecord) -> float:
            return 1.0 if quint_score(p, g) and p.trigger is g.trigger else 0.0

        _, full_total = match_tuples(preds, golds, full_score)
        self.flip_trig.absorb(_Counts(full_total, full_total, len(preds), len(golds)))

    def report(self) -> FlipScoreReport:
        macro, per_class = _macro_label_f1(
            self.trigger_pairs, self.unmatched_pred, self.unmatched_gold, list(TriggerType)
        )
        return FlipScoreReport(self.flip.prf(), macro, per_class, self.flip_trig.prf())


class _ScoreAccumulator:
    """Pools per-dialogue counts before computing ratios (micro aggregation)."""

    def __init__(self, judge: SemanticJudge) -> None:
        self.judge = judge
        self.element: dict[str, tuple[_Counts, _Counts]] = {
            c: (_Counts(), _Counts()) for c in ELEMENT_CATEGORIES
        }
        self.pairs: dict[str, _Counts] = {k: _Counts() for k in PAIR_KINDS}
        self.micro = _Counts()
        self.identification = _Counts()
        self.sentiment_pairs: list[tuple[Sentiment, Sentiment]] = []
        self.sent_unmatched_pred: Counter = Counter()
        self.sent_unmatched_gold: Counter = Counter()
        self.flips = _FlipAccumulator()

    def add_dialogue(
        self,
        pred_sextuples: Sequence[Sextuple],
        gold_sextuples: Sequence[Sextuple],
        pred_flips: Sequence[FlipRecord],
        gold_flips: Sequence[FlipRecord],
        context: str,
    ) -> None:
        for category in ELEMENT_CATEGORIES:
            preds = [getattr(s, category) for s in pred_sextuples]
            golds = [getattr(s, category) for s in gold_sextuples]
            exact, relevant = _element_subset_counts(preds, golds, category, self.judge, context)
            self.element[category][0].absorb(exact)
            self.element[category][1].absorb(relevant)
        for kind in PAIR_KINDS:
            members = _PAIR_MEMBERS[kind]

            def pair_score(p: Sextuple, g: Sextuple) -> float:
                return (
                    1.0
                    if all(_member_correct(p, g, m, self.judge, context) for m in members)
                    else 0.0
                )

            _, total = match_tuples(pred_sextuples, gold_sextuples, pair_score)
            self.pairs[kind].absorb(_Counts(total, total, len(pred_sextuples), len(gold_sextuples)))

        def micro_score(p: Sextuple, g: Sextuple) -> float:
            return 1.0 if _sextuple_correct(p, g, self.judge, context, True) else 0.0

        def iden_score(p: Sextuple, g: Sextuple) -> float:
            return 1.0 if _sextuple_correct(p, g, self.judge, context, False) else 0.0

        _, micro_total = match_tuples(pred_sextuples, gold_sextuples, micro_score)
        self.micro.absorb(
            _Counts(micro_total, micro_total, len(pred_sextuples), len(gold_sextuples))
        )
        iden_pairs, iden_total = match_tuples(pred_sextuples, gold_sextuples, iden_score)
        self.identification.absorb(
            _Counts(iden_total, iden_total, len(pred_sextuples), len(gold_sextuples))
        )
        # Sentiment labels align along the identification matching.
        matched_preds = {p for p, _ in iden_pairs}
        matched_golds = {g for _, g in iden_pairs}
        for p, g in iden_pairs:
            self.sentiment_pairs.append((pred_sextuples[p].sentiment, gold_sextuples[g].sentiment))
        for i, s in enumerate(pred_sextuples):
            if i not in matched_preds:
                self.sent_unmatched_pred[s.sentiment] += 1
        for j, s in enumerate(gold_sextuples):
            if j not in matched_golds:
                self.sent_unmatched_gold[s.sentiment] += 1
        self.flips.add(pred_flips, gold_flips)

    def reports(self) -> tuple[ScoreReport, FlipScoreReport]:
        elements = {
            category: _combine_element(exact, relevant)
            for category, (exact, relevant) in self.element.items()
        }
        macro = sentiment_macro_f1(
            self.sentiment_pairs, self.sent_unmatched_pred, self.sent_unmatched_gold
        )
        report = ScoreReport(
            elements,
            macro,
            {k: c.prf() for k, c in self.pairs.items()},
            self.micro.prf(),
            self.identification.prf(),
        )
        return report, self.flips.report()


def score_corpus(
    pred: "Corpus", gold: "Corpus", judge: SemanticJudge | None = None
) -> tuple[ScoreReport, FlipScoreReport]:
    """Score a prediction corpus against gold, pairing dialogues by doc_id.

    Gold dialogues missing from the predictions contribute gold counts
    only; a predicted doc_id absent from gold is an error.
    """
    gold_by_id = {ad.dialogue.doc_id: ad for ad in gold.dialogues}
    pred_by_id: dict[str, AnnotatedDialogue] = {}
    for ad in pred.dialogues:
        if ad.dialogue.doc_id not in gold_by_id:
            raise ValueError(f"prediction doc_id {ad.dialogue.doc_id!r} absent from gold corpus")
        pred_by_id[ad.dialogue.doc_id] = ad
    acc = _ScoreAccumulator(memoize_judge(judge or default_judge))
    for gold_ad in gold.dialogues:
        pred_ad = pred_by_id.get(gold_ad.dialogue.doc_id)
        context = context_text(gold_ad.dialogue)
        acc.add_dialogue(
            pred_ad.sextuples if pred_ad else (),
            gold_ad.sextuples,
            pred_ad.flips if pred_ad else (),
            gold_ad.flips,
            context,
        )
    return acc.reports()


def render_score_table(report: ScoreReport) -> str:
    """Fixed-width table with element / pair / sextuple columns."""
    lines = []
    cats = [("H", "holder"), ("T", "target"), ("A", "aspect"), ("O", "opinion"), ("R", "rationale")]
    lines.append("Element-wise F1")
    lines.append("  " + "  ".join(f"{h:>7}" for h, _ in cats))
    lines.append("  " + "  ".join(f"{report.elements[c].combined.f1:7.4f}" for _, c in cats))
    lines.append(f"Sentiment macro F1: {report.sentiment_macro_f1:.4f}")
    lines.append("Pair-wise F1")
    heads = [("T-A", "TA"), ("H-O", "HO"), ("S-R", "SR"), ("O-S", "OS")]
    lines.append("  " + "  ".join(f"{h:>7}" for h, _ in heads))
    lines.append("  " + "  ".join(f"{report.pairs[k].f1:7.4f}" for _, k in heads))
    lines.append("Sextuple")
    lines.append(f"  {'Micro':>7}  {'Iden.':>7}")
    lines.append(f"  {report.sextuple_micro.f1:7.4f}  {report.sextuple_identification.f1:7.4f}")
    return "\n".join(lines)


def render_flip_table(report: FlipScoreReport) -> str:
    lines = []
    lines.append("Flip analysis")
    lines.append(f"  {'Flip':>7}  {'Trig':>7}  {'Flip-Trig':>9}")
    lines.append(
        f"  {report.flip.f1:7.4f}  {report.trigger_macro_f1:7.4f}  {report.flip_trig.f1:9.4f}"
    )
    lines.append("Per-trigger F1")
    for trigger in TriggerType:
        lines.append(f"  {trigger.label}: {report.per_trigger_f1[trigger]:.4f}")
    return "\n".join(lines)
