"""Report rendering: prevalence, type/category tallies and the Active-vs-
Dormant hypothesis test, as markdown sections and a CSV tally. Output is
byte-stable for fixed inputs."""

from __future__ import annotations

from typing import Sequence

from .classify import Category, TaxonomyType, TypeTally, category_of, tally
from .detect import Detection
from .stats import (
    AllZeroDifferences,
    CorpusSummary,
    PrevalenceReport,
    WilcoxonResult,
    prevalence,
    wilcoxon_signed_rank,
)

_TYPE_LABELS = {
    TaxonomyType.AGING_MAINTENANCE: "Aging Maintenance",
    TaxonomyType.LEGACY_BACKWARDS_COMPAT: "Legacy & Backwards Compatibility",
    TaxonomyType.UPDATES_UPGRADES: "Updates & Upgrades",
    TaxonomyType.CURRENT_DEPRECATION: "Current Deprecation",
    TaxonomyType.FUTURE_DEPRECATION: "Future Deprecation",
    TaxonomyType.NON_MAINTENANCE: "Non-Maintenance",
    TaxonomyType.CURRENT_OBSOLESCENCE: "Current Obsolescence",
    TaxonomyType.FUTURE_OBSOLESCENCE: "Future Obsolescence",
}

_TYPE_ORDER = [
    TaxonomyType.AGING_MAINTENANCE,
    TaxonomyType.LEGACY_BACKWARDS_COMPAT,
    TaxonomyType.UPDATES_UPGRADES,
    TaxonomyType.CURRENT_DEPRECATION,
    TaxonomyType.FUTURE_DEPRECATION,
    TaxonomyType.NON_MAINTENANCE,
    TaxonomyType.CURRENT_OBSOLESCENCE,
    TaxonomyType.FUTURE_OBSOLESCENCE,
]


def format_p_value(p: float) -> str:
    return "<0.001" if p < 0.001 else f"{p:.4f}"


def wilcoxon_pairs(report: PrevalenceReport) -> list[tuple[float, float]]:
    """Per-project (Active %, Dormant %) pairs in project-id order."""
    return [
        (bd.active_pct, bd.dormant_pct)
        for _, bd in sorted(report.per_project.items())
    ]


def render_tally_csv(t: TypeTally) -> str:
    lines = ["type,count,pct,category"]
    for taxonomy_type in _TYPE_ORDER:
        lines.append(
            f"{taxonomy_type.value},{t.counts[taxonomy_type]},"
            f"{t.type_pct(taxonomy_type):.2f},{category_of(taxonomy_type).value}"
        )
    return "\n".join(lines) + "\n"


def _prevalence_section(report: PrevalenceReport) -> list[str]:
    lines = [
        "## Prevalence",
        "",
        "| Scope | Total | With SAAD | % Afflicted |",
        "| --- | ---: | ---: | ---: |",
        f"| Projects | {report.total_projects} | {report.afflicted_projects} "
        f"| {report.pct_projects:.2f} |",
        f"| NL comments | {report.total_nl_comments} | {report.saad_comments} "
        f"| {report.pct_comments:.1f} |",
        "",
    ]
    return lines


def _tally_section(t: TypeTally) -> list[str]:
    lines = [
        "## Types & Categories",
        "",
        "| Category | Type | Instances | Type % | Category % |",
        "| --- | --- | ---: | ---: | ---: |",
    ]
    pattern_pct, tag_pct = t.split_deprecation_pct()
    for taxonomy_type in _TYPE_ORDER:
        category = category_of(taxonomy_type)
        if taxonomy_type is TaxonomyType.CURRENT_DEPRECATION:
            lines.append(
                f"| {category.value} | Current Deprecation (from patterns) "
                f"| {t.current_deprecation_from_patterns} | {pattern_pct:.2f} "
                f"| {t.category_pct(category):.2f} |"
            )
            lines.append(
                f"| {category.value} | Current Deprecation (from @deprecated) "
                f"| {t.current_deprecation_from_tag} | {tag_pct:.2f} "
                f"| {t.category_pct(category):.2f} |"
            )
            continue
        lines.append(
            f"| {category.value} | {_TYPE_LABELS[taxonomy_type]} "
            f"| {t.counts[taxonomy_type]} | {t.type_pct(taxonomy_type):.2f} "
            f"| {t.category_pct(category):.2f} |"
        )
    lines.append("")
    lines.append(f"Total type instances: {t.total_instances}")
    lines.append("")
    return lines


def _hypothesis_section(report: PrevalenceReport) -> list[str]:
    lines = ["## Active vs Dormant (Wilcoxon signed-rank)", ""]
    pairs = wilcoxon_pairs(report)
    try:
        result = wilcoxon_signed_rank(pairs)
    except AllZeroDifferences:
        result = None
    if not pairs or result is None:
        lines.append("insufficient data")
        lines.append("")
        return lines
    w = result.w_statistic
    w_text = str(int(w)) if float(w).is_integer() else f"{w:.1f}"
    lines.append("| N | W | p-value | r | Magnitude |")
    lines.append("| ---: | ---: | ---: | ---: | --- |")
    lines.append(
        f"| {result.n_nonzero} | {w_text} | {format_p_value(result.p_value)} "
        f"| {result.r:.3f} | {result.magnitude.value} |"
    )
    lines.append("")
    return lines


def render_report(
    detections: Sequence[Detection],
    summary: CorpusSummary,
) -> str:
    """The full markdown report (prevalence, tally, hypothesis test)."""
    prevalence_report = prevalence(detections, summary)
    t = tally(detections)
    lines = ["# SAAD Report", ""]
    lines += _prevalence_section(prevalence_report)
    lines += _tally_section(t)
    lines += _hypothesis_section(prevalence_report)
    per_project = sorted(prevalence_report.per_project.items())
    if per_project:
        lines += [
            "## Per-project breakdown",
            "",
            "| Project | Active instances | Dormant instances | Active % | Dormant % |",
            "| --- | ---: | ---: | ---: | ---: |",
        ]
        for project, bd in per_project:
            lines.append(
                f"| {project} | {bd.active_instances} | {bd.dormant_instances} "
                f"| {bd.active_pct:.2f} | {bd.dormant_pct:.2f} |"
            )
        lines.append("")
    return "\n".join(lines)


def render_iteration_table(history: Sequence) -> str:
    """Human-readable iteration history for `refine status`."""
    if not history:
        return "no iterations recorded\n"
    lines = [
        f"{'it':>3} {'patterns':>9} {'detected':>9} {'sampled':>8} "
        f"{'precision':>9} {'recall':>6} {'f1':>6} {'excluded':>9} {'stopped':>8}",
    ]
    for it in history:
        lines.append(
            f"{it.iteration_no:>3} {it.active_pattern_count:>9} "
            f"{it.total_saad_detected:>9} {len(it.sample_ids):>8} "
            f"{it.precision:>9.3f} {it.recall:>6.2f} {it.f1:>6.3f} "
            f"{len(it.excluded_patterns):>9} {str(it.stopped):>8}"
        )
    return "\n".join(lines) + "\n"
