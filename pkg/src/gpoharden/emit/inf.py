"""Security templates (``GptTmpl.inf``) for the secedit engine."""

from __future__ import annotations

from typing import Iterable

from ..guide.model import SeceditAutomation, SeceditSection

_SECTION_ORDER = (SeceditSection.SystemAccess, SeceditSection.PrivilegeRights, SeceditSection.RegistryValues)
_HEADER = ["[Unicode]", "Unicode=yes", "[Version]", 'signature="$CHICAGO$"', "Revision=1"]


def inf_lines(entries: Iterable[SeceditAutomation]) -> list[str]:
    by_section: dict[SeceditSection, dict[str, str]] = {}
    for e in entries:
        # later entries for the same key win, as they would when applied in order
        by_section.setdefault(e.section, {})[e.key] = e.value
    lines = list(_HEADER)
    for section in _SECTION_ORDER:
        items = by_section.get(section)
        if not items:
            continue
        lines.append(f"[{section.value}]")
        for key in sorted(items, key=str.casefold):
            lines.append(f"{key} = {items[key]}")
    return lines


def emit_inf(entries: Iterable[SeceditAutomation]) -> bytes:
    """UTF-16LE with BOM and CRLF line ends, the encoding secedit writes itself."""
    text = "\r\n".join(inf_lines(entries)) + "\r\n"
    return b"\xff\xfe" + text.encode("utf-16-le")


def parse_inf(data: bytes) -> list[SeceditAutomation]:
    """Read back the sections this package writes; other sections are skipped."""
    text = data.decode("utf-16") if data[:2] in (b"\xff\xfe", b"\xfe\xff") else data.decode("utf-8")
    sections = {s.value.casefold(): s for s in SeceditSection}
    current = None
    out = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith(";"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = sections.get(line[1:-1].strip().casefold())
            continue
        if current is not None and "=" in line:
            key, _, value = line.partition("=")
            out.append(SeceditAutomation(current, key.strip(), value.strip()))
    return out
