"""Policy paths as shown in the group policy editor.

A path is the chain of UI nodes from a class root down to one setting, e.g.
``Computer Configuration\\Administrative Templates\\System\\Logon\\...``.
Guides write the same path with ``>>`` separators, sometimes with the
``Policies`` node that the GPMC view inserts after the class root, and often
with the last segment in quotes. All of these normalize to one comparison key.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

from .errors import NormalizeError

_SEPARATOR_RE = re.compile(r"\s*(?:>>|\\)\s*")
_WS_RE = re.compile(r"\s+")
_QUOTES = "\"'“”‘’`"


class ClassRoot(str, enum.Enum):
    ComputerConfiguration = "Computer Configuration"
    UserConfiguration = "User Configuration"

    @property
    def hive(self) -> str:
        if self is ClassRoot.ComputerConfiguration:
            return "HKEY_LOCAL_MACHINE"
        return "HKEY_CURRENT_USER"

    @property
    def config(self) -> str:
        return "Computer" if self is ClassRoot.ComputerConfiguration else "User"


_ROOTS = {root.value.casefold(): root for root in ClassRoot}


def _clean_segment(segment: str) -> str:
    segment = _WS_RE.sub(" ", segment).strip()
    # Guides quote the setting name; strip any number of wrapping quote chars.
    while len(segment) >= 1 and segment[0] in _QUOTES:
        segment = segment[1:].strip()
    while len(segment) >= 1 and segment[-1] in _QUOTES:
        segment = segment[:-1].strip()
    return segment


def split_segments(text: str) -> list[str]:
    """Split on ``>>`` or backslash, trimming whitespace and quotes."""
    parts = [_clean_segment(p) for p in _SEPARATOR_RE.split(text.strip())]
    return [p for p in parts if p]


@dataclass(frozen=True, eq=False)
class PolicyPath:
    raw: str
    segments: tuple[str, ...]
    class_root: ClassRoot

    @classmethod
    def parse(cls, text: str) -> PolicyPath:
        segments = split_segments(text)
        if not segments:
            raise NormalizeError(f"empty policy path: {text!r}")
        root = _ROOTS.get(segments[0].casefold())
        if root is None:
            raise NormalizeError(f"policy path does not start with a class root: {text!r}")
        rest = segments[1:]
        while rest and rest[0].casefold() == "policies":
            rest = rest[1:]
        if not rest:
            raise NormalizeError(f"policy path names only a class root: {text!r}")
        return cls(raw=text, segments=(root.value, *rest), class_root=root)

    @property
    def normalized(self) -> str:
        return "\\".join(self.segments)

    @property
    def key(self) -> str:
        return self.normalized.casefold()

    @property
    def leaf(self) -> str:
        return self.segments[-1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolicyPath):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __str__(self) -> str:
        return self.normalized

    def __repr__(self) -> str:
        return f"PolicyPath({self.normalized!r})"


def normalize(text: str | PolicyPath) -> str:
    """Return the canonical backslash form; idempotent."""
    if isinstance(text, PolicyPath):
        return text.normalized
    return PolicyPath.parse(text).normalized


def path_key(text: str | PolicyPath) -> str:
    if isinstance(text, PolicyPath):
        return text.key
    return PolicyPath.parse(text).key
