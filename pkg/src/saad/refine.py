"""The iterative pattern-refinement loop: stratified sampling of detections,
per-pattern false-positive rates, the strictly-greater-than-25% exclusion
rule, and the consistent-F1 stopping rule. Also owns the append-only
annotation store (JSON-Lines, last write wins per comment+annotator)."""

from __future__ import annotations

import json
import os
import random
import threading
from contextlib import contextmanager
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .classify import TaxonomyType
from .detect import Detection, detect_saad
from .extract import CommentRecord
from .lexicon import InvalidPattern, Lexicon, compile_pattern
from .stats import f1_from, sample_size


class AnnotationVerdict(Enum):
    SAAD = "SAAD"
    NON_SAAD = "NON_SAAD"


class StrataKey(Enum):
    PATTERN = "pattern"
    FEATURE_FREQUENCY_QUARTILE = "feature_frequency_quartile"


class InsufficientPopulation(ValueError):
    pass


class NoAnnotatedMatches(ValueError):
    pass


class IncompleteAnnotations(ValueError):
    def __init__(self, missing: Sequence[str]):
        super().__init__(f"{len(missing)} sampled comments lack annotations")
        self.missing = list(missing)


def rfc3339_now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass(frozen=True)
class AnnotationRecord:
    comment_id: str
    annotator_id: str
    verdict: AnnotationVerdict
    type_override: TaxonomyType | None = None
    note: str = ""
    proposed_pattern: str | None = None
    timestamp: str = ""

    def __post_init__(self) -> None:
        if self.proposed_pattern is not None:
            compile_pattern(self.proposed_pattern)  # raises InvalidPattern

    def same_verdict(self, other: "AnnotationRecord") -> bool:
        """Payload equality, ignoring the submission timestamp."""
        return (
            self.comment_id == other.comment_id
            and self.annotator_id == other.annotator_id
            and self.verdict == other.verdict
            and self.type_override == other.type_override
            and self.note == other.note
            and self.proposed_pattern == other.proposed_pattern
        )


def annotation_to_json(record: AnnotationRecord) -> dict:
    return {
        "comment_id": record.comment_id,
        "annotator": record.annotator_id,
        "verdict": record.verdict.value,
        "type": record.type_override.value if record.type_override else None,
        "note": record.note,
        "proposed_pattern": record.proposed_pattern,
        "ts": record.timestamp,
    }


def annotation_from_json(obj: dict) -> AnnotationRecord:
    return AnnotationRecord(
        comment_id=obj["comment_id"],
        annotator_id=obj["annotator"],
        verdict=AnnotationVerdict(obj["verdict"]),
        type_override=TaxonomyType(obj["type"]) if obj.get("type") else None,
        note=obj.get("note") or "",
        proposed_pattern=obj.get("proposed_pattern"),
        timestamp=obj.get("ts") or "",
    )


class AnnotationStore:
    """Append-only JSON-Lines log of verdicts. Writes are serialized;
    re-submitting an identical verdict is a no-op."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def load_all(self) -> list[AnnotationRecord]:
        if not self.path.exists():
            return []
        records = []
        with open(self.path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    records.append(annotation_from_json(json.loads(line)))
        return records

    def latest(self) -> dict[tuple[str, str], AnnotationRecord]:
        """Last write wins per (comment_id, annotator_id)."""
        current: dict[tuple[str, str], AnnotationRecord] = {}
        for rec in self.load_all():
            current[(rec.comment_id, rec.annotator_id)] = rec
        return current

    @property
    def revision(self) -> int:
        return len(self.load_all())

    def append(self, record: AnnotationRecord) -> int:
        """Persist a verdict and return the store revision. Identical
        re-submissions return the current revision without appending."""
        with self._lock:
            existing = self.latest().get((record.comment_id, record.annotator_id))
            if existing is not None and existing.same_verdict(record):
                return self.revision
            if not record.timestamp:
                record = AnnotationRecord(
                    comment_id=record.comment_id,
                    annotator_id=record.annotator_id,
                    verdict=record.verdict,
                    type_override=record.type_override,
                    note=record.note,
                    proposed_pattern=record.proposed_pattern,
                    timestamp=rfc3339_now(),
                )
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(annotation_to_json(record), ensure_ascii=False) + "\n")
            return self.revision


def resolve_verdicts(
    annotations: Iterable[AnnotationRecord],
) -> dict[str, AnnotationRecord]:
    """One record per comment: the latest submission wins across annotators
    (ties broken by annotator id so resolution is deterministic)."""
    resolved: dict[str, AnnotationRecord] = {}
    for rec in annotations:
        cur = resolved.get(rec.comment_id)
        if cur is None or (rec.timestamp, rec.annotator_id) >= (cur.timestamp, cur.annotator_id):
            resolved[rec.comment_id] = rec
    return resolved


# ---------------------------------------------------------------------------
# Stratified sampling
# ---------------------------------------------------------------------------

def _stratum_of(
    detection: Detection,
    key: StrataKey,
    feature_quartile: Mapping[str, int],
) -> str:
    if key is StrataKey.PATTERN:
        if detection.matched_patterns:
            return detection.matched_patterns[0]
        return "@deprecated"
    if detection.matched_features:
        return f"Q{feature_quartile[detection.matched_features[0]]}"
    return "none"


def _feature_quartiles(detections: Sequence[Detection]) -> dict[str, int]:
    """Quartile band 1..4 per feature by its match frequency across the
    detection set (band cutoffs are the quartiles of the frequency values)."""
    freq: dict[str, int] = {}
    for det in detections:
        for term in det.matched_features:
            freq[term] = freq.get(term, 0) + 1
    if not freq:
        return {}
    values = sorted(freq.values())

    def quantile(q: float) -> float:
        idx = q * (len(values) - 1)
        lo = int(idx)
        hi = min(lo + 1, len(values) - 1)
        return values[lo] + (values[hi] - values[lo]) * (idx - lo)

    q1, q2, q3 = quantile(0.25), quantile(0.5), quantile(0.75)
    bands = {}
    for term, count in freq.items():
        if count <= q1:
            bands[term] = 1
        elif count <= q2:
            bands[term] = 2
        elif count <= q3:
            bands[term] = 3
        else:
            bands[term] = 4
    return bands


def allocate_largest_remainder(sizes: Mapping[str, int], n: int) -> dict[str, int]:
    """Proportional integer allocation of n across strata by the
    largest-remainder method, capped at each stratum's size."""
    total = sum(sizes.values())
    if n > total:
        raise InsufficientPopulation(f"requested {n} from population {total}")
    if total == 0:
        return {}
    quotas = {s: n * size / total for s, size in sizes.items()}
    alloc = {s: int(q) for s, q in quotas.items()}
    remaining = n - sum(alloc.values())
    by_remainder = sorted(
        sizes, key=lambda s: (-(quotas[s] - alloc[s]), s)
    )
    idx = 0
    while remaining > 0:
        s = by_remainder[idx % len(by_remainder)]
        if alloc[s] < sizes[s]:
            alloc[s] += 1
            remaining -= 1
        idx += 1
    return alloc


def sample_stratified(
    detections: Sequence[Detection],
    strata_key: StrataKey,
    n: int,
    rng_seed: int,
) -> list[str]:
    """Non-repeating stratified sample of n detection comment ids with
    per-stratum allocation proportional to stratum size. Deterministic for
    a fixed seed."""
    if n > len(detections):
        raise InsufficientPopulation(
            f"requested {n} from {len(detections)} detections"
        )
    quartiles = (
        _feature_quartiles(detections)
        if strata_key is StrataKey.FEATURE_FREQUENCY_QUARTILE
        else {}
    )
    strata: dict[str, list[str]] = {}
    for det in detections:
        stratum = _stratum_of(det, strata_key, quartiles)
        strata.setdefault(stratum, []).append(det.comment_id)
    alloc = allocate_largest_remainder({s: len(ids) for s, ids in strata.items()}, n)
    rng = random.Random(rng_seed)
    sampled: list[str] = []
    for stratum in sorted(strata):
        take = alloc.get(stratum, 0)
        if take:
            sampled.extend(rng.sample(sorted(strata[stratum]), take))
    return sampled


# ---------------------------------------------------------------------------
# False-positive rates and the iteration driver
# ---------------------------------------------------------------------------

def fp_rate(
    pattern_raw: str,
    annotations: Iterable[AnnotationRecord],
    detections: Sequence[Detection],
) -> float:
    """NON_SAAD fraction among annotated detections matching the pattern."""
    verdicts = resolve_verdicts(annotations)
    matching = [
        d for d in detections
        if pattern_raw in d.matched_patterns and d.comment_id in verdicts
    ]
    if not matching:
        raise NoAnnotatedMatches(pattern_raw)
    non_saad = sum(
        1
        for d in matching
        if verdicts[d.comment_id].verdict is AnnotationVerdict.NON_SAAD
    )
    return non_saad / len(matching)


@dataclass(frozen=True)
class RefineConfig:
    fp_threshold: float = 0.25
    f1_target: float = 0.95
    consistency: int = 2
    sample_z: float = 1.96
    sample_p: float = 0.5
    sample_E: float = 0.05
    rng_seed: int = 20240901


@dataclass
class RefinementIteration:
    iteration_no: int
    active_pattern_count: int
    total_saad_detected: int
    sample_ids: list[str]
    precision: float
    recall: float
    f1: float
    excluded_patterns: list[str]
    stopped: bool
    proposed_pattern_fraction: float = 0.0

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, obj: dict) -> "RefinementIteration":
        return cls(**obj)


def plan_sample(
    corpus: Sequence[CommentRecord],
    lexicon: Lexicon,
    config: RefineConfig,
    iteration_no: int,
    strata_key: StrataKey = StrataKey.PATTERN,
) -> list[str]:
    """The comment ids run_iteration will expect annotations for. The same
    deterministic sample run_iteration recomputes."""
    detections = detect_saad(corpus, lexicon)
    if not detections:
        raise InsufficientPopulation("no detections to sample")
    n = min(
        sample_size(config.sample_z, config.sample_p, config.sample_E),
        len(detections),
    )
    return sample_stratified(
        detections, strata_key, n, rng_seed=config.rng_seed + iteration_no
    )


def run_iteration(
    corpus: Sequence[CommentRecord],
    lexicon: Lexicon,
    annotations: Iterable[AnnotationRecord],
    config: RefineConfig = RefineConfig(),
    history: Sequence[RefinementIteration] = (),
    strata_key: StrataKey = StrataKey.PATTERN,
) -> tuple[RefinementIteration, Lexicon]:
    """One detect -> sample -> score -> exclude pass.

    Precision is computed on the annotated sample with recall fixed at 1.0
    (the sample is drawn from detections only). Patterns whose sample FP
    rate is strictly above the threshold are excluded into a new lexicon
    version, unless this iteration completes the consistency run, in which
    case the loop stops with the lexicon unchanged.
    """
    iteration_no = len(history) + 1
    detections = detect_saad(corpus, lexicon)
    if not detections:
        raise InsufficientPopulation("no detections to sample")
    n = min(
        sample_size(config.sample_z, config.sample_p, config.sample_E),
        len(detections),
    )
    sample_ids = sample_stratified(
        detections, strata_key, n, rng_seed=config.rng_seed + iteration_no
    )

    verdicts = resolve_verdicts(annotations)
    missing = [cid for cid in sample_ids if cid not in verdicts]
    if missing:
        raise IncompleteAnnotations(missing)

    sampled_verdicts = [verdicts[cid] for cid in sample_ids]
    saad_count = sum(
        1 for v in sampled_verdicts if v.verdict is AnnotationVerdict.SAAD
    )
    precision = saad_count / len(sample_ids)
    recall = 1.0
    f1 = f1_from(precision, recall) if precision > 0 else 0.0
    proposed_fraction = sum(
        1 for v in sampled_verdicts if v.proposed_pattern
    ) / len(sample_ids)

    f1_run = [h.f1 for h in history][-(config.consistency - 1):] if config.consistency > 1 else []
    stopped = (
        len(f1_run) == config.consistency - 1
        and all(v >= config.f1_target for v in f1_run)
        and f1 >= config.f1_target
    )

    excluded: list[str] = []
    if not stopped:
        sample_set = set(sample_ids)
        sampled_detections = [d for d in detections if d.comment_id in sample_set]
        sampled_annotations = list(sampled_verdicts)
        for pattern in lexicon.active_patterns:
            try:
                rate = fp_rate(pattern.raw, sampled_annotations, sampled_detections)
            except NoAnnotatedMatches:
                continue
            if rate > config.fp_threshold:
                excluded.append(pattern.raw)

    new_lexicon = (
        lexicon.with_exclusions(excluded, iteration_no) if excluded else lexicon
    )
    iteration = RefinementIteration(
        iteration_no=iteration_no,
        active_pattern_count=len(lexicon.active_patterns),
        total_saad_detected=len(detections),
        sample_ids=list(sample_ids),
        precision=precision,
        recall=recall,
        f1=f1,
        excluded_patterns=excluded,
        stopped=stopped,
        proposed_pattern_fraction=proposed_fraction,
    )
    return iteration, new_lexicon


# ---------------------------------------------------------------------------
# Iteration history persistence and the advisory run lock
# ---------------------------------------------------------------------------

def write_history(history: Sequence[RefinementIteration], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for it in history:
            fh.write(json.dumps(it.to_json(), ensure_ascii=False) + "\n")


def read_history(path: str | Path) -> list[RefinementIteration]:
    path = Path(path)
    if not path.exists():
        return []
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(RefinementIteration.from_json(json.loads(line)))
    return out


@contextmanager
def iteration_lock(path: str | Path):
    """Advisory exclusive lock for run_iteration (O_EXCL lock file)."""
    lock_path = Path(str(path) + ".lock")
    try:
        fd = os.open(lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise RuntimeError(f"another refinement run holds {lock_path}")
    try:
        os.close(fd)
        yield
    finally:
        try:
            os.unlink(lock_path)
        except FileNotFoundError:
            pass
