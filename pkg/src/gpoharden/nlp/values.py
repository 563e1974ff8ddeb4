"""Turn captured value text into a typed policy value."""

from __future__ import annotations

import re
from typing import Sequence

from ..errors import ValueParseError
from ..guide.model import AuditSetting, AuditValue, Choice, Composite, Number, PolicyValue, Principals, Toggle

_QUOTES = "\"“”"
_NUMBER_RE = re.compile(r"^[\"“”]?(\d+)[\"“”]?(?:\s|$)")
_INCLUDE_RE = re.compile(r"^(?:include\s+)?only\b.*\b(?:following|accounts|groups)\b", re.I)
_NOBODY_RE = re.compile(r"^none$|\bno (?:one|entries)\b", re.I)


def clean(text: str) -> str:
    """Trim whitespace and one level of wrapping quotes."""
    text = " ".join(text.split())
    if len(text) >= 2 and text[0] in _QUOTES and text[-1] in _QUOTES:
        text = text[1:-1].strip()
    return text


def _toggle(text: str) -> Toggle | None:
    low = text.casefold()
    if low == "enabled":
        return Toggle(True)
    if low == "disabled":
        return Toggle(False)
    return None


def parse_value_text(
    main: str,
    sub: str | None = None,
    option: str | None = None,
    trailing_list: Sequence[str] = (),
) -> PolicyValue:
    raw = main
    main = clean(main or "")
    if not main:
        raise ValueParseError("empty value text", raw or "")

    if sub and option:
        head = _toggle(main) or Choice(main)
        return Composite(head, ((clean(option), Choice(clean(sub))),))

    toggle = _toggle(main)
    if toggle is not None:
        return toggle

    if _INCLUDE_RE.match(main):
        names = tuple(clean(x) for x in trailing_list if clean(x))
        if not names:
            raise ValueParseError("include-only phrase without a list of principals", raw)
        return Principals(names)

    m = _NUMBER_RE.match(main)
    if m:
        return Number(int(m.group(1)))

    unquoted = "".join(c for c in main if c not in _QUOTES).strip()
    if _NOBODY_RE.search(unquoted):
        return Principals(())
    audit = AuditSetting.lookup(unquoted)
    if audit is not None:
        return AuditValue(audit)
    return Choice(main)
