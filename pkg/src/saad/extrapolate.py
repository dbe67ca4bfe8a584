"""Iterative feature extrapolation over a pluggable word-embedding neighbor
oracle with a human verification hook.

Each step pops one seed term, asks the oracle for its nearest neighbors,
and routes every unseen candidate through the verify callback. Accepted
candidates join the expanded set and the seed queue; a term is never
verified or extrapolated twice, which bounds the loop by the oracle's
vocabulary.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Protocol

import numpy as np

from .lexicon import Directness


class Verdict(Enum):
    DIRECT = "direct"
    INDIRECT = "indirect"
    REJECT = "reject"


class OracleUnavailable(RuntimeError):
    """The embedding oracle could not serve a neighbor query."""


class EmptySeed(ValueError):
    """step() requires a non-empty seed queue."""


class EmbeddingOracle(Protocol):
    def neighbors(self, term: str, k: int) -> list[tuple[str, float]]:
        """Up to k (term, similarity) pairs, best first."""
        ...


@dataclass
class ExtrapolationSession:
    seed: deque[str]
    expanded: dict[str, Directness] = field(default_factory=dict)
    processed: set[str] = field(default_factory=set)
    pending_verifications: deque[tuple[str, str]] = field(default_factory=deque)
    k: int = 30

    @classmethod
    def start(cls, seeds: list[str], k: int = 30) -> "ExtrapolationSession":
        # preserve order, drop duplicates
        unique = list(dict.fromkeys(seeds))
        return cls(seed=deque(unique), k=k)

    def is_known(self, term: str) -> bool:
        return term in self.processed or term in self.expanded or term in self.seed


VerifyFn = Callable[[str], Verdict]


def step(
    session: ExtrapolationSession,
    oracle: EmbeddingOracle,
    verify: VerifyFn,
) -> ExtrapolationSession:
    """Extrapolate one seed term in place and return the session.

    The oracle is queried before any mutation so an OracleUnavailable
    failure leaves the session unchanged.
    """
    if not session.seed:
        raise EmptySeed("no seed terms left to extrapolate")
    term = session.seed[0]
    try:
        found = oracle.neighbors(term, session.k)
    except OracleUnavailable:
        raise
    except Exception as exc:
        raise OracleUnavailable(str(exc)) from exc

    session.seed.popleft()
    session.processed.add(term)
    for candidate, _score in found:
        if session.is_known(candidate):
            continue
        session.pending_verifications.append((candidate, term))
    while session.pending_verifications:
        candidate, _source = session.pending_verifications.popleft()
        verdict = verify(candidate)
        if verdict is Verdict.REJECT:
            session.processed.add(candidate)
        else:
            tag = Directness.DIRECT if verdict is Verdict.DIRECT else Directness.INDIRECT
            session.expanded[candidate] = tag
            session.seed.append(candidate)
    return session


def run_to_completion(
    seeds: list[str],
    oracle: EmbeddingOracle,
    verify: VerifyFn,
    k: int = 30,
) -> set[str]:
    """Drain the seed queue and return the accepted (expanded) terms."""
    if not seeds:
        raise EmptySeed("seeds must be non-empty")
    session = ExtrapolationSession.start(seeds, k=k)
    while session.seed:
        step(session, oracle, verify)
    return set(session.expanded)


# ---------------------------------------------------------------------------
# Default oracle: plain-text vector file, cosine-similarity neighbors
# ---------------------------------------------------------------------------

class VectorFileOracle:
    """Serves nearest neighbors from a text file of `word v1 v2 ...` rows."""

    def __init__(self, path: str | Path):
        words: list[str] = []
        rows: list[list[float]] = []
        dim: int | None = None
        with open(path, "r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                parts = line.split()
                if not parts:
                    continue
                if len(parts) < 2:
                    raise OracleUnavailable(f"vector file line {line_no}: no components")
                try:
                    vec = [float(x) for x in parts[1:]]
                except ValueError:
                    raise OracleUnavailable(f"vector file line {line_no}: bad float")
                if dim is None:
                    dim = len(vec)
                elif len(vec) != dim:
                    raise OracleUnavailable(
                        f"vector file line {line_no}: dimension {len(vec)} != {dim}"
                    )
                words.append(parts[0])
                rows.append(vec)
        if not words:
            raise OracleUnavailable("vector file is empty")
        matrix = np.asarray(rows, dtype=float)
        norms = np.linalg.norm(matrix, axis=1)
        norms[norms == 0.0] = 1.0
        self._words = words
        self._index = {w: i for i, w in enumerate(words)}
        self._unit = matrix / norms[:, None]

    @property
    def vocabulary(self) -> list[str]:
        return list(self._words)

    def neighbors(self, term: str, k: int) -> list[tuple[str, float]]:
        idx = self._index.get(term)
        if idx is None:
            return []
        sims = self._unit @ self._unit[idx]
        order = np.argsort(-sims, kind="stable")
        out: list[tuple[str, float]] = []
        for j in order:
            if j == idx:
                continue
            # clamp rounding noise into [0, 1]
            out.append((self._words[j], float(min(1.0, max(0.0, sims[j])))))
            if len(out) == k:
                break
        return out
