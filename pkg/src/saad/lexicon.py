"""Aging-feature and debt-pattern lexicon: loading, validation, compilation
and matching.

Features are vocabulary terms matched with word-boundary semantics; patterns
are short regex-style rules matched as case-insensitive substrings of the
normalized comment text (`^`/`$` anchor to the whole text, `?` makes the
previous element optional, `(a|b)` and `[..]*` keep their usual meaning).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable

from .classify import TaxonomyType


class Directness(Enum):
    DIRECT = "direct"
    INDIRECT = "indirect"


class PatternStatus(Enum):
    ACTIVE = "active"
    EXCLUDED = "excluded"


class PatternSource(Enum):
    PAPER = "paper"
    USER = "user"


class MatchKind(Enum):
    FEATURES = "features"
    PATTERNS = "patterns"


class ParseError(ValueError):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class DuplicateTerm(ValueError):
    def __init__(self, term: str):
        super().__init__(f"duplicate term: {term!r}")
        self.term = term


class UnknownTaxonomyType(ValueError):
    def __init__(self, value: str):
        super().__init__(f"unknown taxonomy type: {value!r}")
        self.value = value


class InvalidPattern(ValueError):
    def __init__(self, raw: str, position: int, reason: str = ""):
        detail = f" ({reason})" if reason else ""
        super().__init__(f"invalid pattern {raw!r} at position {position}{detail}")
        self.raw = raw
        self.position = position


# ---------------------------------------------------------------------------
# Pattern grammar
# ---------------------------------------------------------------------------

_ESCAPABLE_LETTERS = set("swdSWDbB")


def _validate_pattern(raw: str) -> None:
    """Structural validation of the pattern notation before handing the
    string to the regex engine. Raises InvalidPattern on the first defect."""
    if not raw:
        raise InvalidPattern(raw, 0, "empty pattern")
    i = 0
    n = len(raw)
    depth = 0
    prev_quantifiable = False
    while i < n:
        ch = raw[i]
        if ch == "\\":
            if i + 1 >= n:
                raise InvalidPattern(raw, i, "dangling backslash")
            nxt = raw[i + 1]
            if nxt.isalnum() and nxt not in _ESCAPABLE_LETTERS:
                raise InvalidPattern(raw, i, f"unsupported escape \\{nxt}")
            prev_quantifiable = True
            i += 2
            continue
        if ch == "[":
            j = i + 1
            while j < n and raw[j] != "]":
                j += 2 if raw[j] == "\\" else 1
            if j >= n:
                raise InvalidPattern(raw, i, "unterminated character class")
            if j == i + 1:
                raise InvalidPattern(raw, i, "empty character class")
            prev_quantifiable = True
            i = j + 1
            continue
        if ch == "]":
            raise InvalidPattern(raw, i, "unmatched ]")
        if ch == "(":
            depth += 1
            prev_quantifiable = False
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise InvalidPattern(raw, i, "unmatched )")
            prev_quantifiable = True
        elif ch in "?*+":
            if not prev_quantifiable:
                raise InvalidPattern(raw, i, f"{ch} has nothing to repeat")
            prev_quantifiable = False
        elif ch == "^":
            if i != 0:
                raise InvalidPattern(raw, i, "^ allowed only at the start")
            prev_quantifiable = False
        elif ch == "$":
            if i != n - 1:
                raise InvalidPattern(raw, i, "$ allowed only at the end")
            prev_quantifiable = False
        elif ch == "|":
            if depth == 0:
                raise InvalidPattern(raw, i, "| allowed only inside a group")
            prev_quantifiable = False
        else:
            prev_quantifiable = True
        i += 1
    if depth != 0:
        raise InvalidPattern(raw, n - 1, "unbalanced parentheses")


def compile_pattern(raw: str) -> re.Pattern:
    """Compile one pattern string into a case-insensitive matcher that is
    searched anywhere in the normalized text unless anchored."""
    _validate_pattern(raw)
    try:
        return re.compile(raw, re.IGNORECASE)
    except re.error as exc:  # anything the structural pass did not catch
        raise InvalidPattern(raw, exc.pos or 0, str(exc)) from exc


def compile_feature(term: str) -> re.Pattern:
    """Word-boundary matcher for a vocabulary term (spaces match literally
    because comment text is whitespace-normalized upstream)."""
    return re.compile(r"\b" + re.escape(term) + r"\b", re.IGNORECASE)


# ---------------------------------------------------------------------------
# Lexicon model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AgingFeature:
    term: str
    directness: Directness


@dataclass(frozen=True)
class SaadPattern:
    raw: str
    taxonomy_type: TaxonomyType | None
    status: PatternStatus = PatternStatus.ACTIVE
    excluded_in_iteration: int | None = None
    source: PatternSource = PatternSource.PAPER

    @property
    def is_active(self) -> bool:
        return self.status is PatternStatus.ACTIVE


@dataclass
class Lexicon:
    features: list[AgingFeature]
    patterns: list[SaadPattern]
    version: str = "1"
    _feature_matchers: list[re.Pattern] = field(default_factory=list, repr=False)
    _pattern_matchers: dict[str, re.Pattern] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for f in self.features:
            if f.term in seen:
                raise DuplicateTerm(f.term)
            seen.add(f.term)
        seen_raw: set[str] = set()
        for p in self.patterns:
            if p.raw in seen_raw:
                raise DuplicateTerm(p.raw)
            seen_raw.add(p.raw)
        self._feature_matchers = [compile_feature(f.term) for f in self.features]
        self._pattern_matchers = {p.raw: compile_pattern(p.raw) for p in self.patterns}

    @property
    def active_patterns(self) -> list[SaadPattern]:
        return [p for p in self.patterns if p.is_active]

    def matcher_for(self, raw: str) -> re.Pattern:
        return self._pattern_matchers[raw]

    def match_features(self, text: str) -> list[AgingFeature]:
        return [
            f
            for f, rx in zip(self.features, self._feature_matchers)
            if rx.search(text)
        ]

    def match_patterns(self, text: str) -> list[SaadPattern]:
        return [
            p
            for p in self.patterns
            if p.is_active and self._pattern_matchers[p.raw].search(text)
        ]

    def pattern_spans(self, text: str) -> list[tuple[str, int, int]]:
        """(raw, start, end) of the first match of every firing active
        pattern, for highlight rendering."""
        spans = []
        for p in self.patterns:
            if not p.is_active:
                continue
            m = self._pattern_matchers[p.raw].search(text)
            if m:
                spans.append((p.raw, m.start(), m.end()))
        return spans

    def with_exclusions(self, raws: Iterable[str], iteration_no: int) -> "Lexicon":
        """New lexicon version with the given patterns marked Excluded."""
        to_exclude = set(raws)
        patterns = [
            replace(p, status=PatternStatus.EXCLUDED, excluded_in_iteration=iteration_no)
            if p.raw in to_exclude and p.is_active
            else p
            for p in self.patterns
        ]
        return Lexicon(
            features=list(self.features),
            patterns=patterns,
            version=_bump_version(self.version),
        )


def _bump_version(version: str) -> str:
    try:
        return str(int(version) + 1)
    except ValueError:
        return version + "+1"


def match_any(lexicon: Lexicon, text: str, which: MatchKind) -> list:
    """Every active lexicon entry whose matcher fires on `text`, in lexicon
    order. Excluded patterns are never returned."""
    if which is MatchKind.FEATURES:
        return lexicon.match_features(text)
    return lexicon.match_patterns(text)


# ---------------------------------------------------------------------------
# Lexicon file I/O (tab-separated; `#` starts a comment line)
# ---------------------------------------------------------------------------

def load_lexicon(path: str | Path, default_source: PatternSource = PatternSource.PAPER) -> Lexicon:
    features: list[AgingFeature] = []
    patterns: list[SaadPattern] = []
    version = "1"
    seen_terms: set[str] = set()
    seen_raws: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if line.lstrip().startswith("#"):
                m = re.match(r"#\s*version:\s*(\S+)", line.strip())
                if m:
                    version = m.group(1)
                continue
            fields = line.split("\t")
            tag = fields[0]
            if tag == "F":
                if len(fields) != 3:
                    raise ParseError(line_no, f"feature row needs 3 fields, got {len(fields)}")
                term = fields[1].strip()
                if not term:
                    raise ParseError(line_no, "empty feature term")
                if term in seen_terms:
                    raise DuplicateTerm(term)
                seen_terms.add(term)
                try:
                    directness = Directness(fields[2].strip())
                except ValueError:
                    raise ParseError(line_no, f"directness must be direct|indirect, got {fields[2]!r}")
                features.append(AgingFeature(term=term, directness=directness))
            elif tag == "P":
                if len(fields) != 4:
                    raise ParseError(line_no, f"pattern row needs 4 fields, got {len(fields)}")
                raw = fields[1]
                if not raw:
                    raise ParseError(line_no, "empty pattern")
                if raw in seen_raws:
                    raise ParseError(line_no, f"duplicate pattern {raw!r}")
                seen_raws.add(raw)
                try:
                    taxonomy_type = TaxonomyType(fields[2].strip())
                except ValueError:
                    raise UnknownTaxonomyType(fields[2].strip())
                try:
                    status = PatternStatus(fields[3].strip())
                except ValueError:
                    raise ParseError(line_no, f"status must be active|excluded, got {fields[3]!r}")
                try:
                    compile_pattern(raw)
                except InvalidPattern as exc:
                    raise ParseError(line_no, str(exc))
                patterns.append(
                    SaadPattern(
                        raw=raw,
                        taxonomy_type=taxonomy_type,
                        status=status,
                        source=default_source,
                    )
                )
            else:
                raise ParseError(line_no, f"row must start with F or P, got {tag!r}")
    return Lexicon(features=features, patterns=patterns, version=version)


def save_lexicon(lexicon: Lexicon, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# version: {lexicon.version}\n")
        for f in lexicon.features:
            fh.write(f"F\t{f.term}\t{f.directness.value}\n")
        for p in lexicon.patterns:
            type_tag = p.taxonomy_type.value if p.taxonomy_type else ""
            fh.write(f"P\t{p.raw}\t{type_tag}\t{p.status.value}\n")


def seed_lexicon_path() -> Path:
    return Path(__file__).parent / "data" / "seed_lexicon.tsv"


def load_seed_lexicon() -> Lexicon:
    return load_lexicon(seed_lexicon_path(), default_source=PatternSource.PAPER)
