from __future__ import annotations

import random

from convabsa.dialogue import (
    AnnotatedDialogue,
    Dialogue,
    Element,
    FlipRecord,
    Manner,
    Sentiment,
    Sextuple,
    Span,
    TriggerType,
    Utterance,
)
from convabsa.flips import DerivedFlip, check_flip_consistency, derive_flips

import support


def _dialogue(n=6):
    utts = tuple(
        Utterance(i, 0, "Ava", "alpha beta gamma delta", -1 if i == 0 else i - 1)
        for i in range(n)
    )
    return Dialogue("d", "en", utts)


def _sx(holder, target, aspect, sentiment, opinion_utt=None, opinion="beta"):
    if opinion_utt is None:
        opinion_el = Element(opinion, Manner.IMPLICIT)
    else:
        opinion_el = Element("beta", Manner.EXPLICIT, Span(opinion_utt, 1, 2))
    return Sextuple(
        Element(holder, Manner.IMPLICIT),
        Element(target, Manner.IMPLICIT),
        Element(aspect, Manner.IMPLICIT),
        opinion_el,
        sentiment,
        Element("some cause", Manner.IMPLICIT),
    )


class TestDeriveFlips:
    def test_camera_record(self, camera_ad):
        assert derive_flips(camera_ad) == [
            DerivedFlip(
                "Ava", "digital camera", "battery life", Sentiment.NEGATIVE, Sentiment.NEUTRAL
            )
        ]

    def test_neutral_to_positive(self):
        ad = AnnotatedDialogue(
            _dialogue(),
            (
                _sx("Chris", "phone", "design", Sentiment.NEUTRAL, opinion_utt=1),
                _sx("Chris", "phone", "design", Sentiment.POSITIVE, opinion_utt=4),
            ),
        )
        assert derive_flips(ad) == [
            DerivedFlip("Chris", "phone", "design", Sentiment.NEUTRAL, Sentiment.POSITIVE)
        ]

    def test_no_change_no_flip(self):
        ad = AnnotatedDialogue(
            _dialogue(),
            (
                _sx("Ava", "phone", "design", Sentiment.NEGATIVE, opinion_utt=0),
                _sx("Ava", "phone", "design", Sentiment.NEGATIVE, opinion_utt=2),
            ),
        )
        assert derive_flips(ad) == []

    def test_grouping_is_normalized(self):
        ad = AnnotatedDialogue(
            _dialogue(),
            (
                _sx("Ava", "Digital Camera", "design", Sentiment.NEGATIVE, opinion_utt=0),
                _sx("ava", "digital camera", "design", Sentiment.POSITIVE, opinion_utt=3),
            ),
        )
        flips = derive_flips(ad)
        assert len(flips) == 1
        # The earliest sextuple's surface text names the record.
        assert flips[0].target == "Digital Camera"

    def test_return_to_original_emits_two(self):
        ad = AnnotatedDialogue(
            _dialogue(),
            (
                _sx("Ava", "phone", "design", Sentiment.NEGATIVE, opinion_utt=0),
                _sx("Ava", "phone", "design", Sentiment.POSITIVE, opinion_utt=2),
                _sx("Ava", "phone", "design", Sentiment.NEGATIVE, opinion_utt=4),
            ),
        )
        flips = derive_flips(ad)
        assert [(f.initial, f.flipped) for f in flips] == [
            (Sentiment.NEGATIVE, Sentiment.POSITIVE),
            (Sentiment.POSITIVE, Sentiment.NEGATIVE),
        ]

    def test_anchor_order_not_list_order(self):
        # Listed in reverse anchor order; derivation follows the anchors.
        ad = AnnotatedDialogue(
            _dialogue(),
            (
                _sx("Ava", "phone", "design", Sentiment.POSITIVE, opinion_utt=4),
                _sx("Ava", "phone", "design", Sentiment.NEGATIVE, opinion_utt=1),
            ),
        )
        assert derive_flips(ad) == [
            DerivedFlip("Ava", "phone", "design", Sentiment.NEGATIVE, Sentiment.POSITIVE)
        ]

    def test_permutation_invariance_with_distinct_anchors(self):
        rng = random.Random(13)
        base = [
            _sx("Ava", "phone", "design", rng.choice(list(Sentiment)), opinion_utt=i)
            for i in range(5)
        ]
        reference = derive_flips(AnnotatedDialogue(_dialogue(), tuple(base)))
        for _ in range(10):
            shuffled = base[:]
            rng.shuffle(shuffled)
            assert derive_flips(AnnotatedDialogue(_dialogue(), tuple(shuffled))) == reference

    def test_at_most_k_minus_one(self):
        rng = random.Random(3)
        for _ in range(30):
            k = rng.randint(1, 6)
            members = tuple(
                _sx("Ava", "phone", "design", rng.choice(list(Sentiment)), opinion_utt=min(i, 5))
                for i in range(k)
            )
            flips = derive_flips(AnnotatedDialogue(_dialogue(), members))
            assert len(flips) <= k - 1
            assert all(f.initial is not f.flipped for f in flips)

    def test_fallback_to_annotation_order(self):
        ad = AnnotatedDialogue(
            _dialogue(),
            (
                _sx("Ava", "phone", "design", Sentiment.NEGATIVE),
                _sx("Ava", "phone", "design", Sentiment.POSITIVE),
            ),
        )
        assert derive_flips(ad) == [
            DerivedFlip("Ava", "phone", "design", Sentiment.NEGATIVE, Sentiment.POSITIVE)
        ]


class TestConsistency:
    def test_camera_record_consistent(self, camera_ad):
        assert check_flip_consistency(camera_ad).findings == []

    def test_spurious_annotation(self):
        ad = AnnotatedDialogue(
            _dialogue(),
            (_sx("Ava", "phone", "design", Sentiment.NEGATIVE, opinion_utt=0),),
            (
                FlipRecord(
                    "Ava", "phone", "design", Sentiment.NEGATIVE, Sentiment.POSITIVE,
                    TriggerType.LOGICAL_ARGUMENTATION,
                ),
            ),
        )
        report = check_flip_consistency(ad)
        assert [f.rule for f in report.errors] == ["flip-spurious-annotation"]

    def test_missing_annotation(self):
        ad = AnnotatedDialogue(
            _dialogue(),
            (
                _sx("Ava", "phone", "design", Sentiment.NEGATIVE, opinion_utt=0),
                _sx("Ava", "phone", "design", Sentiment.POSITIVE, opinion_utt=2),
            ),
        )
        report = check_flip_consistency(ad)
        assert [f.rule for f in report.errors] == ["flip-missing-annotation"]

    def test_trigger_ignored(self):
        ad = AnnotatedDialogue(
            _dialogue(),
            (
                _sx("Ava", "phone", "design", Sentiment.NEGATIVE, opinion_utt=0),
                _sx("Ava", "phone", "design", Sentiment.POSITIVE, opinion_utt=2),
            ),
            (
                FlipRecord(
                    "ava", "Phone", "design", Sentiment.NEGATIVE, Sentiment.POSITIVE,
                    TriggerType.PERSONAL_EXPERIENCE,
                ),
            ),
        )
        assert check_flip_consistency(ad).errors == []

    def test_order_fragile_warning(self):
        ad = AnnotatedDialogue(
            _dialogue(),
            (
                _sx("Ava", "phone", "design", Sentiment.NEGATIVE),
                _sx("Ava", "phone", "design", Sentiment.POSITIVE),
            ),
            (
                FlipRecord(
                    "Ava", "phone", "design", Sentiment.NEGATIVE, Sentiment.POSITIVE,
                    TriggerType.PARTICIPANT_FEEDBACK,
                ),
            ),
        )
        report = check_flip_consistency(ad)
        assert report.ok
        assert "flip-order-fragile" in {f.rule for f in report.warnings}

    def test_generated_corpora_consistent_by_construction(self):
        for seed in range(8):
            corpus = support.make_random_corpus(seed, n_dialogues=3)
            for ad in corpus.dialogues:
                assert check_flip_consistency(ad).errors == []
