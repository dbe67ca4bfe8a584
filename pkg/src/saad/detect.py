"""Feature-stage and pattern-stage matching over a comment corpus.

The feature stage pre-filters natural-language comments by aging vocabulary;
the pattern stage flags debt comments. The @deprecated tag channel applies
to every comment (including doc comments that fail the NL heuristic,
because tag lines rarely read as prose).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .classify import TaxonomyType, classify
from .extract import CommentRecord
from .lexicon import Lexicon

_DEPRECATED_TAG = re.compile(r"(?<![\w@])@deprecated(?![\w@])", re.IGNORECASE)


@dataclass
class Detection:
    comment_id: str
    matched_features: list[str] = field(default_factory=list)
    matched_patterns: list[str] = field(default_factory=list)
    existing_aging_feature: bool = False
    taxonomy_types: list[TaxonomyType] = field(default_factory=list)

    @property
    def is_saad(self) -> bool:
        return bool(self.matched_patterns) or self.existing_aging_feature


def detect_existing_aging(record: CommentRecord) -> bool:
    """True iff the comment text contains the literal @deprecated token."""
    return bool(_DEPRECATED_TAG.search(record.text))


def annotate_features(
    corpus: Iterable[CommentRecord], lexicon: Lexicon
) -> list[tuple[str, list[str]]]:
    """(comment_id, matched feature terms) for every natural-language
    comment matching at least one aging feature. Non-NL records are skipped."""
    results = []
    for record in corpus:
        if not record.is_natural_language:
            continue
        matched = lexicon.match_features(record.text)
        if matched:
            results.append((record.id, [f.term for f in matched]))
    return results


def detect_saad(
    corpus: Iterable[CommentRecord],
    lexicon: Lexicon,
    assign_types: bool = True,
) -> list[Detection]:
    """One Detection per comment where an active pattern fires or the
    @deprecated tag is present. Every firing pattern is kept (multi-label)."""
    detections: list[Detection] = []
    for record in corpus:
        existing = detect_existing_aging(record)
        if record.is_natural_language:
            patterns = [p.raw for p in lexicon.match_patterns(record.text)]
            features = [f.term for f in lexicon.match_features(record.text)]
        else:
            patterns = []
            features = []
        if not patterns and not existing:
            continue
        detection = Detection(
            comment_id=record.id,
            matched_features=features,
            matched_patterns=patterns,
            existing_aging_feature=existing,
        )
        if assign_types:
            detection.taxonomy_types = classify(detection, lexicon)
        detections.append(detection)
    return detections


# ---------------------------------------------------------------------------
# Detections file I/O (JSON-Lines)
# ---------------------------------------------------------------------------

def detection_to_json(detection: Detection) -> dict:
    return {
        "comment_id": detection.comment_id,
        "features": detection.matched_features,
        "patterns": detection.matched_patterns,
        "existing_aging": detection.existing_aging_feature,
        "types": [t.value for t in detection.taxonomy_types],
    }


def detection_from_json(obj: dict) -> Detection:
    return Detection(
        comment_id=obj["comment_id"],
        matched_features=list(obj.get("features", [])),
        matched_patterns=list(obj.get("patterns", [])),
        existing_aging_feature=bool(obj.get("existing_aging", False)),
        taxonomy_types=[TaxonomyType(t) for t in obj.get("types", [])],
    )


def write_detections(detections: Iterable[Detection], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for det in detections:
            fh.write(json.dumps(detection_to_json(det), ensure_ascii=False) + "\n")


def read_detections(path: str | Path) -> Iterator[Detection]:
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield detection_from_json(json.loads(line))
