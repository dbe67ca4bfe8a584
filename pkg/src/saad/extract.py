"""Comment extraction: a generic C-family lexer that yields normalized
comment records with surrounding code context, plus the natural-language
heuristic used to gate downstream matching.

The lexer understands `//` runs, `/* */` blocks and `/** */` doc blocks,
and skips comment markers inside string, char and backtick literals. It is
not a parser: context is the raw neighbouring lines, nothing more.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator


class CommentKind(Enum):
    LINE = "Line"
    BLOCK = "Block"
    DOC = "Doc"


@dataclass(frozen=True)
class SourceLocation:
    project_id: str
    file_path: str
    start_line: int
    end_line: int

    def __post_init__(self) -> None:
        if self.start_line < 1:
            raise ValueError(f"start_line must be >= 1, got {self.start_line}")
        if self.end_line < self.start_line:
            raise ValueError("end_line must be >= start_line")
        normalized = self.file_path.replace("\\", "/")
        if normalized.startswith("/") or ".." in normalized.split("/"):
            raise ValueError(f"file_path must be relative without ..: {self.file_path}")


@dataclass
class CommentRecord:
    id: str
    location: SourceLocation
    kind: CommentKind
    text: str
    context_before: list[str] = field(default_factory=list)
    context_after: list[str] = field(default_factory=list)
    is_natural_language: bool = True


def comment_id(project_id: str, file_path: str, start_line: int, text: str) -> str:
    digest = hashlib.sha256(
        "\x00".join([project_id, file_path, str(start_line), text]).encode("utf-8")
    )
    return digest.hexdigest()[:16]


# ---------------------------------------------------------------------------
# Lexing
# ---------------------------------------------------------------------------

def _raw_comment_spans(source: str) -> tuple[list[tuple[int, int, CommentKind]], list[str]]:
    """Scan `source` and return (start, end, kind) spans of every comment,
    ignoring markers inside ", ' and ` literals. An unterminated block
    comment yields a span up to end-of-file plus a warning."""
    spans: list[tuple[int, int, CommentKind]] = []
    warnings: list[str] = []
    i = 0
    n = len(source)
    while i < n:
        ch = source[i]
        if ch == "/" and i + 1 < n:
            nxt = source[i + 1]
            if nxt == "/":
                end = source.find("\n", i)
                end = n if end == -1 else end
                spans.append((i, end, CommentKind.LINE))
                i = end
                continue
            if nxt == "*":
                close = source.find("*/", i + 2)
                is_doc = source.startswith("/**", i) and not source.startswith("/**/", i)
                kind = CommentKind.DOC if is_doc else CommentKind.BLOCK
                if close == -1:
                    warnings.append(
                        f"unterminated block comment starting at offset {i}"
                    )
                    spans.append((i, n, kind))
                    break
                spans.append((i, close + 2, kind))
                i = close + 2
                continue
        if ch == '"' or ch == "'":
            quote = ch
            i += 1
            while i < n and source[i] != quote and source[i] != "\n":
                if source[i] == "\\":
                    i += 1
                i += 1
            i += 1
            continue
        if ch == "`":
            close = source.find("`", i + 1)
            i = n if close == -1 else close + 1
            continue
        i += 1
    return spans, warnings


def _merge_line_runs(
    source: str, spans: list[tuple[int, int, CommentKind]]
) -> list[tuple[int, int, CommentKind]]:
    """Merge consecutive `//` spans separated only by whitespace."""
    merged: list[tuple[int, int, CommentKind]] = []
    for start, end, kind in spans:
        if (
            merged
            and kind is CommentKind.LINE
            and merged[-1][2] is CommentKind.LINE
            and source[merged[-1][1]:start].strip() == ""
        ):
            merged[-1] = (merged[-1][0], end, CommentKind.LINE)
        else:
            merged.append((start, end, kind))
    return merged


_WS_RUN = re.compile(r"\s+")


def normalize_comment_text(raw: str, kind: CommentKind) -> str:
    """Strip comment markers and leading continuation `*`, then collapse
    whitespace runs to single spaces. Case is preserved."""
    if kind is CommentKind.LINE:
        parts = []
        for line in raw.splitlines():
            stripped = line.lstrip()
            if stripped.startswith("//"):
                stripped = stripped[2:]
            parts.append(stripped)
        text = " ".join(parts)
    else:
        body = raw
        if body.startswith("/**"):
            body = body[3:]
        elif body.startswith("/*"):
            body = body[2:]
        if body.endswith("*/"):
            body = body[:-2]
        parts = []
        for line in body.splitlines():
            stripped = line.lstrip()
            stripped = stripped.lstrip("*")
            parts.append(stripped)
        text = " ".join(parts)
    return _WS_RUN.sub(" ", text).strip()


def extract_comments(
    source_text: str,
    file_path: str,
    project_id: str,
    k_context: int = 5,
) -> tuple[list[CommentRecord], list[str]]:
    """Extract every comment of `source_text` as a normalized record.

    Consecutive `//` lines separated only by whitespace become a single
    Line record. Records whose text is empty after normalization are
    dropped. Returns (records ordered by start line, warnings).
    """
    if k_context < 0:
        raise ValueError("k_context must be >= 0")
    spans, warnings = _raw_comment_spans(source_text)
    spans = _merge_line_runs(source_text, spans)
    lines = source_text.splitlines()
    records: list[CommentRecord] = []
    for start, end, kind in spans:
        raw = source_text[start:end]
        text = normalize_comment_text(raw, kind)
        if not text:
            continue
        start_line = source_text.count("\n", 0, start) + 1
        last = max(start, end - 1)
        end_line = source_text.count("\n", 0, last) + 1
        location = SourceLocation(project_id, file_path, start_line, end_line)
        before = lines[max(0, start_line - 1 - k_context): start_line - 1]
        after = lines[end_line: end_line + k_context]
        record = CommentRecord(
            id=comment_id(project_id, file_path, start_line, text),
            location=location,
            kind=kind,
            text=text,
            context_before=list(before),
            context_after=list(after),
        )
        record.is_natural_language = is_natural_language(record)
        records.append(record)
    return records, warnings


# ---------------------------------------------------------------------------
# Natural-language heuristic
# ---------------------------------------------------------------------------

_CODE_SYMBOLS = set("{};()=<>[]+-*/&|")
_ASSIGNMENT = re.compile(r"^[A-Za-z_$][\w.$\[\]()<>]*\s*[-+*/|&]?=(?!=)\s*\S")


def is_natural_language(
    record_or_text: CommentRecord | str,
    symbol_ratio_threshold: float = 0.40,
) -> bool:
    """Deterministic stand-in for an NL classifier: flags commented-out code
    by symbol density, call/statement endings, and assignment shape."""
    text = record_or_text if isinstance(record_or_text, str) else record_or_text.text
    text = text.strip()
    if not text:
        return False
    non_ws = [c for c in text if not c.isspace()]
    symbol_fraction = sum(c in _CODE_SYMBOLS for c in non_ws) / len(non_ws)
    if symbol_fraction >= symbol_ratio_threshold:
        return False
    if text[-1] in ";{)" and "(" in text:
        return False
    body = text[:-1].rstrip() if text.endswith(";") else text
    if _ASSIGNMENT.match(body):
        return False
    if text.endswith(";") and " " not in body:
        return False
    return True


# ---------------------------------------------------------------------------
# Corpus file I/O (JSON-Lines, one record per line)
# ---------------------------------------------------------------------------

def record_to_json(record: CommentRecord) -> dict:
    return {
        "id": record.id,
        "project_id": record.location.project_id,
        "file_path": record.location.file_path,
        "start_line": record.location.start_line,
        "end_line": record.location.end_line,
        "kind": record.kind.value,
        "text": record.text,
        "context_before": record.context_before,
        "context_after": record.context_after,
        "is_nl": record.is_natural_language,
    }


def record_from_json(obj: dict) -> CommentRecord:
    return CommentRecord(
        id=obj["id"],
        location=SourceLocation(
            project_id=obj["project_id"],
            file_path=obj["file_path"],
            start_line=obj["start_line"],
            end_line=obj["end_line"],
        ),
        kind=CommentKind(obj["kind"]),
        text=obj["text"],
        context_before=list(obj.get("context_before", [])),
        context_after=list(obj.get("context_after", [])),
        is_natural_language=bool(obj.get("is_nl", True)),
    )


def write_corpus(records: Iterable[CommentRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record_to_json(record), ensure_ascii=False) + "\n")


def read_corpus(path: str | Path) -> Iterator[CommentRecord]:
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield record_from_json(json.loads(line))
