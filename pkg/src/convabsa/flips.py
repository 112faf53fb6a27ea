"""Deterministic derivation of sentiment flips from annotated sextuples.

Sextuples sharing a normalized holder-target-aspect key form a group;
within a group, ordering follows each sextuple's anchor utterance, and
every consecutive sentiment change yields one flip record.
"""

from __future__ import annotations

from collections import Counter
from typing import NamedTuple

from .dialogue import AnnotatedDialogue, Manner, Sentiment, Sextuple, ValidationReport
from .textnorm import normalize_term


class DerivedFlip(NamedTuple):
    holder: str
    target: str
    aspect: str
    initial: Sentiment
    flipped: Sentiment


def _anchor(sextuple: Sextuple, position: int) -> int:
    """Ordering key: the opinion span's utterance when explicit, else the
    smallest explicit-span utterance, else the annotation-list position."""
    opinion = sextuple.opinion
    if opinion.manner is Manner.EXPLICIT and opinion.span is not None:
        return opinion.span.utterance_index
    spans = [
        el.span.utterance_index
        for _, el in sextuple.elements()
        if el.manner is Manner.EXPLICIT and el.span is not None
    ]
    if spans:
        return min(spans)
    return position


def _groups(ad: AnnotatedDialogue) -> dict[tuple, list[tuple[int, int, Sextuple]]]:
    groups: dict[tuple, list[tuple[int, int, Sextuple]]] = {}
    for position, sx in enumerate(ad.sextuples):
        key = (
            normalize_term(sx.holder.value),
            normalize_term(sx.target.value),
            normalize_term(sx.aspect.value),
        )
        groups.setdefault(key, []).append((_anchor(sx, position), position, sx))
    for members in groups.values():
        members.sort(key=lambda item: (item[0], item[1]))
    return groups


def derive_flips(ad: AnnotatedDialogue) -> list[DerivedFlip]:
    """Flips implied by the sextuple annotations, in group-anchor order.

    Each consecutive pair with differing sentiment inside a group emits
    one record; equal consecutive sentiments emit nothing, so a group
    of k sextuples yields at most k-1 flips.
    """
    flips: list[DerivedFlip] = []
    ordered_groups = sorted(
        _groups(ad).values(), key=lambda members: (members[0][0], members[0][1])
    )
    for members in ordered_groups:
        first = members[0][2]
        for (_, _, prev), (_, _, cur) in zip(members, members[1:]):
            if prev.sentiment is not cur.sentiment:
                flips.append(
                    DerivedFlip(
                        first.holder.value,
                        first.target.value,
                        first.aspect.value,
                        prev.sentiment,
                        cur.sentiment,
                    )
                )
    return flips


def _quintuple(holder: str, target: str, aspect: str, initial: Sentiment, flipped: Sentiment):
    return (
        normalize_term(holder),
        normalize_term(target),
        normalize_term(aspect),
        initial,
        flipped,
    )


def check_flip_consistency(ad: AnnotatedDialogue) -> ValidationReport:
    """Audit annotated flips against the derivable ones, ignoring triggers.

    Reports flips that should exist but are not annotated, annotated
    flips that cannot be derived, and groups whose ordering rests on
    annotation order alone (no explicit spans anywhere).
    """
    report = ValidationReport()
    derived = Counter(_quintuple(*f) for f in derive_flips(ad))
    annotated = Counter(
        _quintuple(f.holder, f.target, f.aspect, f.initial, f.flipped) for f in ad.flips
    )
    for quint, count in sorted((derived - annotated).items()):
        report.add(
            "flip-missing-annotation",
            f"derived flip {quint} not annotated" + (f" (x{count})" if count > 1 else ""),
        )
    for quint, count in sorted((annotated - derived).items()):
        report.add(
            "flip-spurious-annotation",
            f"annotated flip {quint} is not derivable from the sextuples"
            + (f" (x{count})" if count > 1 else ""),
        )
    for key, members in sorted(_groups(ad).items()):
        if len(members) < 2:
            continue
        if all(
            el.span is None or el.manner is not Manner.EXPLICIT
            for _, _, sx in members
            for _, el in sx.elements()
        ):
            report.add(
                "flip-order-fragile",
                f"group {key} has no explicit spans; flip order follows annotation order",
                severity="warning",
            )
    return report
