"""Edit distances and similar-path suggestions."""

from __future__ import annotations

import re
from typing import Iterable, Sequence, TypeVar

from ..paths import PolicyPath

T = TypeVar("T")

THRESHOLD = 0.6
_WORD_SPLIT_RE = re.compile(r"[\\\s]+")


def levenshtein(a: Sequence[T], b: Sequence[T]) -> int:
    """Unit-cost edit distance over strings or any sequences."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        cur = [i]
        for j, y in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[-1]


def words(path: str) -> list[str]:
    return [w for w in _WORD_SPLIT_RE.split(path.casefold()) if w]


def word_distance(a: str, b: str) -> int:
    return levenshtein(words(a), words(b))


def score(query: str, candidate: str) -> float:
    """Smaller of the character distance and the scaled word distance.

    Both strings are normalized paths. Word distance counts whole-word edits,
    so it is scaled by the mean word length to be comparable with characters.
    """
    qa, ca = query.casefold(), candidate.casefold()
    chars = levenshtein(qa, ca)
    ws = words(qa) + words(ca)
    mean = sum(map(len, ws)) / len(ws) if ws else 0.0
    return min(float(chars), word_distance(qa, ca) * mean)


def rank(query: str, paths: Iterable[str], k: int | None = 3, threshold: float = THRESHOLD) -> list[tuple[float, str]]:
    limit = threshold * len(query)
    scored = []
    for p in paths:
        s = score(query, p)
        if s <= limit:
            scored.append((s, p))
    scored.sort(key=lambda sp: (sp[0], sp[1]))
    return scored if k is None else scored[:k]


def suggest_paths(catalog, path: PolicyPath | str, k: int | None = 3, threshold: float = THRESHOLD) -> list[str]:
    """Up to ``k`` catalog paths close to ``path``, best first."""
    if k is not None and k < 1:
        raise ValueError("k must be at least 1")
    query = path.normalized if isinstance(path, PolicyPath) else str(path)
    return [p for _, p in rank(query, catalog.all_paths, k, threshold)]
