"""Import the prose parts of an XCCDF benchmark.

Only Benchmark, Group, Rule, title, description and fixtext are read. Check
references are carried along untouched in ``rule.extra["check"]``. Element
names are matched without namespace so XCCDF 1.1 and 1.2 both load.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET

from ..errors import ParseError, SchemaError
from .model import ExtractionStatus, Guide, GuideSource, Implementation, Rule

_VULN_DISCUSSION_RE = re.compile(r"<VulnDiscussion>(.*?)</VulnDiscussion>", re.S)


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _child(node: ET.Element, name: str) -> ET.Element | None:
    for c in node:
        if _local(c.tag) == name:
            return c
    return None


def _text(node: ET.Element | None) -> str:
    if node is None:
        return ""
    return " ".join("".join(node.itertext()).split())


def _lines(node: ET.Element | None) -> str:
    """Like ``_text`` but keeps line breaks so bullet lists survive."""
    if node is None:
        return ""
    lines = (" ".join(line.split()) for line in "".join(node.itertext()).splitlines())
    return "\n".join(line for line in lines if line)


def _description(node: ET.Element | None) -> str | None:
    if node is None:
        return None
    raw = "".join(node.itertext())
    # DISA wraps the discussion in escaped pseudo-XML inside <description>
    m = _VULN_DISCUSSION_RE.search(raw)
    if m:
        raw = m.group(1)
    text = " ".join(raw.split())
    return text or None


def _check(node: ET.Element) -> dict | None:
    check = _child(node, "check")
    if check is None:
        return None
    out: dict = {"system": check.get("system", "")}
    ref = _child(check, "check-content-ref")
    if ref is not None:
        out["href"] = ref.get("href", "")
        if ref.get("name"):
            out["name"] = ref.get("name")
    content = _child(check, "check-content")
    if content is not None:
        out["content"] = _text(content)
    return out


def _rule(node: ET.Element, index: int) -> Rule:
    ident = node.get("id")
    if not ident:
        raise SchemaError(f"XCCDF Rule #{index + 1} has no id attribute")
    title = _text(_child(node, "title")) or ident
    fixtext = _child(node, "fixtext")
    implementations = (Implementation(description=_lines(fixtext)),) if fixtext is not None else ()
    extra = {}
    check = _check(node)
    if check is not None:
        extra["check"] = check
    if node.get("severity"):
        extra["severity"] = node.get("severity")
    return Rule(
        id=ident,
        rule_text=title,
        description=_description(_child(node, "description")),
        implementations=implementations,
        extraction_status=ExtractionStatus.NotAttempted,
        extra=extra,
    )


def import_xccdf(document: str | bytes) -> Guide:
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        line, col = exc.position
        raise ParseError("malformed XCCDF", f"line {line}, column {col + 1}") from None
    if _local(root.tag) != "Benchmark":
        raise SchemaError(f"XCCDF root element is <{_local(root.tag)}>, expected <Benchmark>")
    title = _text(_child(root, "title")) or root.get("id", "")
    # iter() walks in document order, which flattens nested Groups
    rule_nodes = [n for n in root.iter() if _local(n.tag) == "Rule"]
    rules = [_rule(n, i) for i, n in enumerate(rule_nodes)]
    return Guide(title=title, source=GuideSource.XCCDF, rules=tuple(rules))
