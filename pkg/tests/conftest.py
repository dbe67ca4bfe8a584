from __future__ import annotations

import itertools
from pathlib import Path

import pytest


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion at the end of the run."""
    lines = []
    for status, label in (("passed", "PASS"), ("failed", "FAIL"), ("error", "FAIL")):
        for rep in terminalreporter.stats.get(status, []):
            if "test_acceptance.py" in rep.nodeid and getattr(rep, "when", "call") == "call":
                name = rep.nodeid.split("::")[-1]
                lines.append((name, label))
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, label in sorted(lines):
            terminalreporter.write_line(f"[{label}] {name}")

from saad.extract import CommentRecord, SourceLocation, CommentKind, comment_id, extract_comments
from saad.lexicon import Lexicon, load_seed_lexicon

MINI_CORPUS_ROOT = Path(__file__).parent.parent / "src" / "saad" / "data" / "mini_corpus" / "demo-app"


@pytest.fixture(scope="session")
def seed_lexicon() -> Lexicon:
    return load_seed_lexicon()


@pytest.fixture(scope="session")
def mini_corpus_records() -> list[CommentRecord]:
    records: list[CommentRecord] = []
    for path in sorted(MINI_CORPUS_ROOT.rglob("*.java")):
        recs, warnings = extract_comments(
            path.read_text(encoding="utf-8"),
            path.relative_to(MINI_CORPUS_ROOT).as_posix(),
            "demo-app",
        )
        assert not warnings
        records.extend(recs)
    return records


def make_record(
    text: str,
    project: str = "proj",
    file_path: str = "src/A.java",
    start_line: int = 1,
    kind: CommentKind = CommentKind.LINE,
    is_nl: bool = True,
) -> CommentRecord:
    return CommentRecord(
        id=comment_id(project, file_path, start_line, text),
        location=SourceLocation(project, file_path, start_line, start_line),
        kind=kind,
        text=text,
        is_natural_language=is_nl,
    )


def brute_force_wilcoxon_p(diffs: list[float]) -> float:
    """Independent exact two-sided p: full 2^N sign enumeration.

    Ranks are derived by counting (not sorting) so this path shares no code
    with the implementation under test.
    """
    n = len(diffs)
    abs_d = [abs(d) for d in diffs]
    ranks = []
    for value in abs_d:
        smaller = sum(1 for other in abs_d if other < value)
        equal = sum(1 for other in abs_d if other == value)
        ranks.append(smaller + (equal + 1) / 2.0)
    t_plus_obs = sum(r for r, d in zip(ranks, diffs) if d > 0)
    t_minus_obs = sum(r for r, d in zip(ranks, diffs) if d < 0)
    w = min(t_plus_obs, t_minus_obs)
    total = sum(ranks)
    eps = 1e-9
    hits = 0
    for signs in itertools.product((False, True), repeat=n):
        t_plus = sum(r for r, positive in zip(ranks, signs) if positive)
        if t_plus <= w + eps or t_plus >= total - w - eps:
            hits += 1
    return min(1.0, hits / 2.0 ** n)
