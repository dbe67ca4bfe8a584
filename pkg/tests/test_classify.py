from __future__ import annotations

import random

import pytest

from saad.classify import (
    Category,
    TaxonomyType,
    TypeTally,
    UnmappedPattern,
    category_of,
    classify,
    tally,
)
from saad.detect import Detection

GOLD_COUNTS = {
    TaxonomyType.AGING_MAINTENANCE: 122,
    TaxonomyType.LEGACY_BACKWARDS_COMPAT: 1459,
    TaxonomyType.UPDATES_UPGRADES: 121,
    TaxonomyType.CURRENT_DEPRECATION: 540 + 46147,
    TaxonomyType.FUTURE_DEPRECATION: 25,
    TaxonomyType.NON_MAINTENANCE: 182,
    TaxonomyType.CURRENT_OBSOLESCENCE: 128,
    TaxonomyType.FUTURE_OBSOLESCENCE: 362,
}

SILVER_COUNTS = {
    TaxonomyType.AGING_MAINTENANCE: 1873,
    TaxonomyType.LEGACY_BACKWARDS_COMPAT: 13296,
    TaxonomyType.UPDATES_UPGRADES: 315,
    TaxonomyType.CURRENT_DEPRECATION: 14379 + 46147,
    TaxonomyType.FUTURE_DEPRECATION: 67,
    TaxonomyType.NON_MAINTENANCE: 4843,
    TaxonomyType.CURRENT_OBSOLESCENCE: 922,
    TaxonomyType.FUTURE_OBSOLESCENCE: 782,
}


def test_category_partition_is_total():
    active = {t for t in TaxonomyType if category_of(t) is Category.ACTIVE}
    assert active == {
        TaxonomyType.AGING_MAINTENANCE,
        TaxonomyType.LEGACY_BACKWARDS_COMPAT,
        TaxonomyType.UPDATES_UPGRADES,
    }
    for t in TaxonomyType:
        assert category_of(t) in (Category.ACTIVE, Category.DORMANT)


def test_classify_overlap_comment(seed_lexicon):
    det = Detection(
        "c1",
        matched_patterns=["this is useless", "provide backwards compatibility"],
    )
    assert classify(det, seed_lexicon) == [
        TaxonomyType.NON_MAINTENANCE,
        TaxonomyType.LEGACY_BACKWARDS_COMPAT,
    ]


def test_classify_tag_only(seed_lexicon):
    det = Detection("c1", existing_aging_feature=True)
    assert classify(det, seed_lexicon) == [TaxonomyType.CURRENT_DEPRECATION]


def test_classify_not_used(seed_lexicon):
    det = Detection("c1", matched_patterns=["not used"])
    assert classify(det, seed_lexicon) == [TaxonomyType.NON_MAINTENANCE]


def test_classify_deduplicates(seed_lexicon):
    det = Detection(
        "c1",
        matched_patterns=["for legacy", "is legacy"],  # same type twice
        existing_aging_feature=True,
    )
    types = classify(det, seed_lexicon)
    assert types == [
        TaxonomyType.LEGACY_BACKWARDS_COMPAT,
        TaxonomyType.CURRENT_DEPRECATION,
    ]


def test_classify_unmapped_pattern(seed_lexicon):
    det = Detection("c1", matched_patterns=["never heard of it"])
    with pytest.raises(UnmappedPattern):
        classify(det, seed_lexicon)


# ---------------------------------------------------------------------------
# Tally
# ---------------------------------------------------------------------------

def test_tally_multi_label_arithmetic():
    detections = [
        Detection("a", taxonomy_types=[TaxonomyType.NON_MAINTENANCE]),
        Detection(
            "b",
            taxonomy_types=[
                TaxonomyType.NON_MAINTENANCE,
                TaxonomyType.LEGACY_BACKWARDS_COMPAT,
            ],
        ),
    ]
    t = tally(detections)
    assert t.total_instances == 3
    assert t.category_pct(Category.DORMANT) == 66.67
    assert t.category_pct(Category.ACTIVE) == 33.33


def test_tally_empty():
    t = tally([])
    assert t.total_instances == 0
    assert t.category_pct(Category.ACTIVE) == 0.0
    assert all(c == 0 for c in t.counts.values())


def test_tally_gold_rollup():
    t = TypeTally.from_counts(GOLD_COUNTS, current_deprecation_from_tag=46147)
    assert t.total_instances == 49086
    assert t.category_pct(Category.DORMANT) == pytest.approx(96.53, abs=0.01)
    assert t.category_pct(Category.ACTIVE) == pytest.approx(3.47, abs=0.01)
    pattern_pct, tag_pct = t.split_deprecation_pct()
    assert tag_pct == pytest.approx(94.01, abs=0.01)
    assert pattern_pct == pytest.approx(1.10, abs=0.01)
    assert t.type_pct(TaxonomyType.LEGACY_BACKWARDS_COMPAT) == pytest.approx(2.97, abs=0.01)
    assert t.type_pct(TaxonomyType.FUTURE_DEPRECATION) == pytest.approx(0.05, abs=0.01)
    assert t.type_pct(TaxonomyType.NON_MAINTENANCE) == pytest.approx(0.37, abs=0.01)
    assert t.type_pct(TaxonomyType.CURRENT_OBSOLESCENCE) == pytest.approx(0.26, abs=0.01)
    assert t.type_pct(TaxonomyType.FUTURE_OBSOLESCENCE) == pytest.approx(0.74, abs=0.01)


def test_tally_silver_rollup():
    t = TypeTally.from_counts(SILVER_COUNTS, current_deprecation_from_tag=46147)
    assert t.category_pct(Category.DORMANT) == pytest.approx(81.26, abs=0.01)
    assert t.category_pct(Category.ACTIVE) == pytest.approx(18.74, abs=0.01)
    pattern_pct, tag_pct = t.split_deprecation_pct()
    assert tag_pct == pytest.approx(55.85, abs=0.01)
    assert pattern_pct == pytest.approx(17.40, abs=0.01)


def test_tally_category_totals_sum_member_types():
    t = TypeTally.from_counts(GOLD_COUNTS, current_deprecation_from_tag=46147)
    assert t.category_total(Category.ACTIVE) == 122 + 1459 + 121
    assert (
        t.category_total(Category.ACTIVE) + t.category_total(Category.DORMANT)
        == t.total_instances
    )
    assert t.category_pct(Category.ACTIVE) + t.category_pct(Category.DORMANT) == pytest.approx(
        100.0, abs=0.01
    )


def test_tally_linearity():
    rng = random.Random(5)
    types = list(TaxonomyType)

    def random_detections(n, prefix):
        return [
            Detection(
                f"{prefix}{i}",
                taxonomy_types=rng.sample(types, rng.randint(1, 3)),
                existing_aging_feature=rng.random() < 0.3,
            )
            for i in range(n)
        ]

    a = random_detections(17, "a")
    b = random_detections(23, "b")
    combined = tally(a + b)
    merged = tally(a).merged(tally(b))
    assert combined.counts == merged.counts
    assert combined.current_deprecation_from_tag == merged.current_deprecation_from_tag


def test_tally_counts_tag_channel_separately():
    detections = [
        Detection(
            "a",
            matched_patterns=["are deprecated"],
            taxonomy_types=[TaxonomyType.CURRENT_DEPRECATION],
        ),
        Detection(
            "b",
            existing_aging_feature=True,
            taxonomy_types=[TaxonomyType.CURRENT_DEPRECATION],
        ),
    ]
    t = tally(detections)
    assert t.counts[TaxonomyType.CURRENT_DEPRECATION] == 2
    assert t.current_deprecation_from_tag == 1
    assert t.current_deprecation_from_patterns == 1
