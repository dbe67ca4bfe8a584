"""Quantitative machinery: sample sizing, F1, Cohen's kappa, the Wilcoxon
signed-rank test with rank-biserial effect size, and prevalence reports."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence


class DomainError(ValueError):
    """An argument fell outside the documented domain."""


class LengthMismatch(ValueError):
    """Paired label lists differ in length (or are empty)."""


class AllZeroDifferences(ValueError):
    """Every paired difference is zero; the signed-rank test is undefined."""


class UnknownProject(KeyError):
    """A detection references a project absent from the corpus summary."""


def round_half_away(x: float, ndigits: int = 0) -> float:
    """Round half away from zero (21.515 -> 21.52), unlike builtin round()."""
    factor = 10.0 ** ndigits
    scaled = x * factor
    if scaled >= 0:
        return math.floor(scaled + 0.5) / factor
    return math.ceil(scaled - 0.5) / factor


# ---------------------------------------------------------------------------
# Sample size (the n = z^2 p (1-p) / E^2 plan)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SamplePlan:
    z: float
    p: float
    E: float

    @property
    def n(self) -> int:
        return sample_size(self.z, self.p, self.E)


def sample_size(z: float, p: float, E: float) -> int:
    """Required sample size at z-quantile `z`, proportion `p`, margin `E`."""
    if z <= 0:
        raise DomainError(f"z must be positive, got {z}")
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must be in [0, 1], got {p}")
    if not 0.0 < E <= 1.0:
        raise DomainError(f"E must be in (0, 1], got {E}")
    return math.ceil(z * z * p * (1.0 - p) / (E * E))


# ---------------------------------------------------------------------------
# Precision / recall / F1
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int = 0

    @property
    def precision(self) -> float:
        if self.tp + self.fp == 0:
            raise DomainError("precision undefined: tp + fp == 0")
        return self.tp / (self.tp + self.fp)

    @property
    def recall(self) -> float:
        if self.tp + self.fn == 0:
            raise DomainError("recall undefined: tp + fn == 0")
        return self.tp / (self.tp + self.fn)

    @property
    def f1(self) -> float:
        return f1_from(self.precision, self.recall)


def f1_from(precision: float, recall: float) -> float:
    """Harmonic mean of precision and recall."""
    if not (0.0 <= precision <= 1.0 and 0.0 <= recall <= 1.0):
        raise DomainError("precision and recall must be in [0, 1]")
    if precision == 0.0 and recall == 0.0:
        raise DomainError("F1 undefined for precision == recall == 0")
    return 2.0 * precision * recall / (precision + recall)


# ---------------------------------------------------------------------------
# Cohen's kappa
# ---------------------------------------------------------------------------

def cohens_kappa(labels_a: Sequence[object], labels_b: Sequence[object]) -> float:
    """Inter-rater agreement kappa = (p_o - p_e) / (1 - p_e) for two raters."""
    if len(labels_a) != len(labels_b):
        raise LengthMismatch(
            f"label lists differ in length: {len(labels_a)} vs {len(labels_b)}"
        )
    n = len(labels_a)
    if n == 0:
        raise LengthMismatch("label lists are empty")
    p_o = sum(a == b for a, b in zip(labels_a, labels_b)) / n
    count_a = Counter(labels_a)
    count_b = Counter(labels_b)
    p_e = sum(count_a[lab] * count_b.get(lab, 0) for lab in count_a) / (n * n)
    if p_e == 1.0:
        # Both raters constant on the same label; agreement is perfect.
        return 1.0
    return (p_o - p_e) / (1.0 - p_e)


# ---------------------------------------------------------------------------
# Wilcoxon signed-rank test
# ---------------------------------------------------------------------------

class Magnitude(Enum):
    NEGLIGIBLE = "Negligible"
    SMALL = "Small"
    MEDIUM = "Medium"
    LARGE = "Large"


def magnitude_of(r: float) -> Magnitude:
    """Rank-biserial magnitude bands at |r| = 0.1 / 0.3 / 0.5."""
    a = abs(r)
    if a < 0.1:
        return Magnitude.NEGLIGIBLE
    if a < 0.3:
        return Magnitude.SMALL
    if a < 0.5:
        return Magnitude.MEDIUM
    return Magnitude.LARGE


@dataclass(frozen=True)
class WilcoxonResult:
    n_nonzero: int
    w_statistic: float
    z_score: float
    p_value: float
    r: float
    magnitude: Magnitude


def _norm_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def _average_ranks(values: Sequence[float]) -> list[float]:
    """Ranks 1..n of `values`, ties receiving the group-average rank."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def _exact_two_sided_p(ranks: Sequence[float], w: float) -> float:
    """Two-sided p for the smaller rank sum `w` by enumerating all sign
    assignments of the observed ranks (dynamic programming; exact under
    ties because tie-averaged ranks are half-integers)."""
    doubled = [int(round(2.0 * r)) for r in ranks]
    total_sum = sum(doubled)
    counts: dict[int, int] = {0: 1}
    for dr in doubled:
        nxt: dict[int, int] = {}
        for s, c in counts.items():
            nxt[s] = nxt.get(s, 0) + c
            nxt[s + dr] = nxt.get(s + dr, 0) + c
        counts = nxt
    w2 = int(round(2.0 * w))
    n_assignments = 2 ** len(ranks)
    lo = sum(c for s, c in counts.items() if s <= w2)
    hi = sum(c for s, c in counts.items() if s >= total_sum - w2)
    return min(1.0, (lo + hi) / n_assignments)


def wilcoxon_signed_rank(
    pairs: Iterable[tuple[float, float]],
    method: str = "auto",
    exact_cutoff: int = 25,
) -> WilcoxonResult:
    """Two-sided Wilcoxon signed-rank test on paired observations.

    Differences are taken first-minus-second, so r < 0 when the first
    coordinate is typically the smaller. Zero differences are dropped before
    ranking; tied |differences| receive averaged ranks and the normal
    approximation uses the tie-corrected variance with a 0.5 continuity
    correction. `method` is "auto" (exact for N <= exact_cutoff), "exact",
    or "approx". The reported W is the smaller of the two rank sums.
    """
    if method not in ("auto", "exact", "approx"):
        raise DomainError(f"unknown method {method!r}")
    diffs = [x - y for x, y in pairs if x != y]
    if not diffs:
        raise AllZeroDifferences("no non-zero paired differences")
    n = len(diffs)
    abs_diffs = [abs(d) for d in diffs]
    ranks = _average_ranks(abs_diffs)
    t_plus = sum(r for r, d in zip(ranks, diffs) if d > 0)
    t_minus = sum(r for r, d in zip(ranks, diffs) if d < 0)
    w = min(t_plus, t_minus)

    mu = n * (n + 1) / 4.0
    tie_counts = Counter(abs_diffs)
    tie_term = sum(t ** 3 - t for t in tie_counts.values()) / 48.0
    sigma2 = n * (n + 1) * (2 * n + 1) / 24.0 - tie_term
    sigma = math.sqrt(sigma2) if sigma2 > 0 else 0.0

    dev = t_plus - mu
    if sigma == 0.0 or dev == 0.0:
        z = 0.0
    else:
        z = (dev - 0.5 * math.copysign(1.0, dev)) / sigma

    use_exact = method == "exact" or (method == "auto" and n <= exact_cutoff)
    if use_exact:
        p = _exact_two_sided_p(ranks, w)
    else:
        p = min(1.0, 2.0 * _norm_cdf(-abs(z)))

    r = z / math.sqrt(n)
    return WilcoxonResult(
        n_nonzero=n,
        w_statistic=w,
        z_score=z,
        p_value=p,
        r=r,
        magnitude=magnitude_of(r),
    )


# ---------------------------------------------------------------------------
# Prevalence
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CorpusSummary:
    """Per-project natural-language comment counts plus a comment->project
    index, the bookkeeping prevalence needs about a corpus."""

    nl_comments_per_project: Mapping[str, int]
    comment_project: Mapping[str, str]

    @classmethod
    def from_records(cls, records: Iterable[object]) -> "CorpusSummary":
        per_project: dict[str, int] = {}
        comment_project: dict[str, str] = {}
        for rec in records:
            project = rec.location.project_id if hasattr(rec, "location") else rec.project_id
            comment_project[rec.id] = project
            per_project.setdefault(project, 0)
            if getattr(rec, "is_natural_language", True):
                per_project[project] += 1
        return cls(per_project, comment_project)

    @property
    def total_projects(self) -> int:
        return len(self.nl_comments_per_project)

    @property
    def total_nl_comments(self) -> int:
        return sum(self.nl_comments_per_project.values())


@dataclass
class ProjectBreakdown:
    active_instances: int = 0
    dormant_instances: int = 0

    @property
    def active_pct(self) -> float:
        total = self.active_instances + self.dormant_instances
        return 100.0 * self.active_instances / total if total else 0.0

    @property
    def dormant_pct(self) -> float:
        total = self.active_instances + self.dormant_instances
        return 100.0 * self.dormant_instances / total if total else 0.0


@dataclass(frozen=True)
class PrevalenceReport:
    total_projects: int
    afflicted_projects: int
    total_nl_comments: int
    saad_comments: int
    per_project: Mapping[str, ProjectBreakdown] = field(default_factory=dict)

    @property
    def pct_projects(self) -> float:
        if self.total_projects == 0:
            return 0.0
        return round_half_away(100.0 * self.afflicted_projects / self.total_projects, 2)

    @property
    def pct_comments(self) -> float:
        if self.total_nl_comments == 0:
            return 0.0
        return round_half_away(100.0 * self.saad_comments / self.total_nl_comments, 1)


def prevalence(detections: Sequence[object], corpus_summary: CorpusSummary) -> PrevalenceReport:
    """Project- and comment-level prevalence with a per-project breakdown of
    Active vs Dormant type instances (multi-label: one count per type)."""
    from .classify import Category, category_of

    afflicted: set[str] = set()
    per_project: dict[str, ProjectBreakdown] = {}
    for det in detections:
        try:
            project = corpus_summary.comment_project[det.comment_id]
        except KeyError:
            raise UnknownProject(det.comment_id)
        if project not in corpus_summary.nl_comments_per_project:
            raise UnknownProject(project)
        afflicted.add(project)
        breakdown = per_project.setdefault(project, ProjectBreakdown())
        for t in det.taxonomy_types:
            if category_of(t) is Category.ACTIVE:
                breakdown.active_instances += 1
            else:
                breakdown.dormant_instances += 1
    return PrevalenceReport(
        total_projects=corpus_summary.total_projects,
        afflicted_projects=len(afflicted),
        total_nl_comments=corpus_summary.total_nl_comments,
        saad_comments=len(detections),
        per_project=per_project,
    )
