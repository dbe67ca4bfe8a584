"""Aging taxonomy: the eight debt types, their Active/Dormant categories,
per-detection classification, and multi-label tallying."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Iterable, Mapping

from .stats import round_half_away

if TYPE_CHECKING:
    from .detect import Detection
    from .lexicon import Lexicon


class Category(Enum):
    ACTIVE = "Active"
    DORMANT = "Dormant"


class TaxonomyType(Enum):
    AGING_MAINTENANCE = "aging_maintenance"
    LEGACY_BACKWARDS_COMPAT = "legacy_backwards_compat"
    UPDATES_UPGRADES = "updates_upgrades"
    CURRENT_DEPRECATION = "current_deprecation"
    FUTURE_DEPRECATION = "future_deprecation"
    NON_MAINTENANCE = "non_maintenance"
    CURRENT_OBSOLESCENCE = "current_obsolescence"
    FUTURE_OBSOLESCENCE = "future_obsolescence"


_ACTIVE_TYPES = frozenset(
    {
        TaxonomyType.AGING_MAINTENANCE,
        TaxonomyType.LEGACY_BACKWARDS_COMPAT,
        TaxonomyType.UPDATES_UPGRADES,
    }
)


def category_of(taxonomy_type: TaxonomyType) -> Category:
    return Category.ACTIVE if taxonomy_type in _ACTIVE_TYPES else Category.DORMANT


class UnmappedPattern(ValueError):
    """A matched pattern carries no taxonomy type (lexicon validation gap)."""


def classify(detection: "Detection", lexicon: "Lexicon") -> list[TaxonomyType]:
    """Deduplicated union of taxonomy types over the detection's matched
    active patterns, plus CurrentDeprecation for the @deprecated channel.
    Never empty for a genuine detection."""
    by_raw = {p.raw: p for p in lexicon.patterns}
    types: list[TaxonomyType] = []
    for raw in detection.matched_patterns:
        pattern = by_raw.get(raw)
        if pattern is None or pattern.taxonomy_type is None:
            raise UnmappedPattern(raw)
        if pattern.taxonomy_type not in types:
            types.append(pattern.taxonomy_type)
    if detection.existing_aging_feature and TaxonomyType.CURRENT_DEPRECATION not in types:
        types.append(TaxonomyType.CURRENT_DEPRECATION)
    return types


@dataclass
class TypeTally:
    """Per-type instance counts with Active/Dormant rollups.

    A multi-labeled detection contributes one instance per matched type;
    percentages are computed over the total instance count. The
    CurrentDeprecation count is split into the @deprecated-tag channel and
    the pattern channel so both rows of the published breakdown can be
    reported.
    """

    counts: dict[TaxonomyType, int] = field(
        default_factory=lambda: {t: 0 for t in TaxonomyType}
    )
    current_deprecation_from_tag: int = 0

    @property
    def current_deprecation_from_patterns(self) -> int:
        return self.counts[TaxonomyType.CURRENT_DEPRECATION] - self.current_deprecation_from_tag

    @property
    def total_instances(self) -> int:
        return sum(self.counts.values())

    def category_total(self, category: Category) -> int:
        return sum(c for t, c in self.counts.items() if category_of(t) is category)

    def type_pct(self, taxonomy_type: TaxonomyType) -> float:
        total = self.total_instances
        if total == 0:
            return 0.0
        return round_half_away(100.0 * self.counts[taxonomy_type] / total, 2)

    def split_deprecation_pct(self) -> tuple[float, float]:
        """(from-patterns, from-tag) percentages of total instances."""
        total = self.total_instances
        if total == 0:
            return 0.0, 0.0
        return (
            round_half_away(100.0 * self.current_deprecation_from_patterns / total, 2),
            round_half_away(100.0 * self.current_deprecation_from_tag / total, 2),
        )

    def category_pct(self, category: Category) -> float:
        total = self.total_instances
        if total == 0:
            return 0.0
        return round_half_away(100.0 * self.category_total(category) / total, 2)

    @classmethod
    def from_counts(
        cls,
        counts: Mapping[TaxonomyType, int],
        current_deprecation_from_tag: int = 0,
    ) -> "TypeTally":
        full = {t: int(counts.get(t, 0)) for t in TaxonomyType}
        return cls(counts=full, current_deprecation_from_tag=current_deprecation_from_tag)

    def merged(self, other: "TypeTally") -> "TypeTally":
        merged_counts = {t: self.counts[t] + other.counts[t] for t in TaxonomyType}
        return TypeTally(
            counts=merged_counts,
            current_deprecation_from_tag=self.current_deprecation_from_tag
            + other.current_deprecation_from_tag,
        )


def tally(detections: Iterable["Detection"]) -> TypeTally:
    """Count type instances across detections (one per matched type)."""
    result = TypeTally()
    for det in detections:
        for t in det.taxonomy_types:
            result.counts[t] += 1
            if t is TaxonomyType.CURRENT_DEPRECATION and det.existing_aging_feature:
                result.current_deprecation_from_tag += 1
    return result
