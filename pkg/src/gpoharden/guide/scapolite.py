"""Read and write guides in the YAML/Markdown rule format.

A guide file is a sequence of blocks separated by ``---`` lines::

    ---
    title: Windows Server 2016 STIG
    source: XCCDF
    ---
    id: SV-88407
    implementations:
    - automations:
      - system: org.scapolite.implementation.win_gpo
        ...
    ---
    ## /rule
    The Backup files and directories user right must only be ...

    ## /implementations/0/description
    Configure the policy value for ...

The first YAML block without an ``id`` is the guide header. Each rule is a
YAML block optionally followed by a Markdown block whose ``## /pointer``
headings address fields of the rule object.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any

from .. import yamlio
from ..errors import ParseError, SchemaError
from .codec import rule_from_data, rule_to_data
from .model import Guide, GuideSource, Rule

SEPARATOR = "---"
_HEADING_RE = re.compile(r"^## (/\S*)\s*$")
_STANDARD_PROSE = re.compile(r"^/(rule|description|implementations/\d+/description)$")


@dataclass
class _Block:
    line: int  # 1-based line of the first content line
    lines: list[str]

    @property
    def text(self) -> str:
        return "\n".join(self.lines)

    @property
    def is_markdown(self) -> bool:
        for ln in self.lines:
            if ln.strip():
                return ln.startswith("## /")
        return True


def _split_blocks(text: str) -> list[_Block]:
    blocks: list[_Block] = []
    current = _Block(1, [])
    for i, ln in enumerate(text.split("\n"), start=1):
        if ln.rstrip() == SEPARATOR:
            blocks.append(current)
            current = _Block(i + 1, [])
        else:
            current.lines.append(ln)
    blocks.append(current)
    return blocks


# -- JSON-pointer helpers --------------------------------------------------------


def _tokens(pointer: str) -> list[str]:
    if not pointer.startswith("/"):
        raise SchemaError(f"pointer {pointer!r} must start with '/'")
    return [t.replace("~1", "/").replace("~0", "~") for t in pointer[1:].split("/")]


def _index(container: list, token: str, pointer: str) -> int:
    if not token.isdigit() or int(token) >= len(container):
        raise SchemaError(f"pointer {pointer!r}: no array element {token!r}")
    return int(token)


def _set_pointer(doc: dict, pointer: str, value: Any) -> None:
    tokens = _tokens(pointer)
    node: Any = doc
    for tok in tokens[:-1]:
        if isinstance(node, list):
            node = node[_index(node, tok, pointer)]
        elif isinstance(node, dict):
            if tok not in node or node[tok] is None:
                node[tok] = {}
            node = node[tok]
        else:
            raise SchemaError(f"pointer {pointer!r} descends into a scalar")
    last = tokens[-1]
    if isinstance(node, list):
        node[_index(node, last, pointer)] = value
    elif isinstance(node, dict):
        node[last] = value
    else:
        raise SchemaError(f"pointer {pointer!r} descends into a scalar")


def _pop_pointer(doc: dict, pointer: str) -> Any:
    """Remove and return the string at ``pointer`` if it can live in Markdown."""
    node: Any = doc
    tokens = _tokens(pointer)
    for tok in tokens[:-1]:
        if isinstance(node, list) and tok.isdigit() and int(tok) < len(node):
            node = node[int(tok)]
        elif isinstance(node, dict) and tok in node:
            node = node[tok]
        else:
            return None
    last = tokens[-1]
    if not isinstance(node, dict) or not _prose_safe(node.get(last)):
        return None
    return node.pop(last)


def _prose_safe(value: Any) -> bool:
    if not isinstance(value, str) or not value or value != value.strip() or "\r" in value:
        return False
    return not any(ln.rstrip() == SEPARATOR or ln.startswith("## /") for ln in value.split("\n"))


# -- parsing -------------------------------------------------------------------


def _markdown_sections(block: _Block) -> list[tuple[str, str, int]]:
    sections: list[tuple[str, list[str], int]] = []
    for offset, ln in enumerate(block.lines):
        m = _HEADING_RE.match(ln)
        if m:
            sections.append((m.group(1), [], block.line + offset))
        elif sections:
            sections[-1][1].append(ln)
        elif ln.strip():
            raise ParseError("Markdown text before the first '## /' heading", f"line {block.line + offset}")
    return [(p, "\n".join(body).strip(), line) for p, body, line in sections]


def _load_mapping(block: _Block, what: str) -> Any:
    return yamlio.load(block.text, what, line_offset=block.line - 1)


def _header_fields(data: dict) -> tuple[str, GuideSource, dict]:
    title = data.get("title") or ""
    raw_source = data.get("source", GuideSource.Scapolite.value)
    try:
        source = GuideSource(raw_source)
    except ValueError:
        raise SchemaError(f"unknown guide source {raw_source!r}") from None
    extra = {k: v for k, v in data.items() if k not in ("title", "source", "rules")}
    return str(title), source, extra


def parse_scapolite(text: str | bytes) -> Guide:
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise ParseError(f"guide is not valid UTF-8: {exc.reason}") from None
    text = text.replace("\r\n", "\n")
    blocks = _split_blocks(text)

    title, source, guide_extra = "", GuideSource.Scapolite, {}
    header_seen = False
    rules: list[Rule] = []
    where_defined: dict[str, int] = {}

    i = 0
    while i < len(blocks):
        block = blocks[i]
        i += 1
        if not block.text.strip():
            continue
        if block.is_markdown:
            raise ParseError("Markdown block without a preceding rule", f"line {block.line}")
        data = _load_mapping(block, "guide")
        if data is None:
            continue
        if not isinstance(data, dict):
            raise SchemaError(f"line {block.line}: expected a mapping, got {type(data).__name__}")
        if "id" not in data:
            if header_seen or rules:
                raise SchemaError(f"line {block.line}: rule block without an id")
            header_seen = True
            title, source, guide_extra = _header_fields(data)
            inline = data.get("rules") or []
            if not isinstance(inline, list):
                raise SchemaError(f"line {block.line}: rules must be a list")
            for n, raw in enumerate(inline):
                rule = rule_from_data(raw, f"line {block.line}, rules/{n}")
                _register(where_defined, rule.id, block.line)
                rules.append(rule)
            continue

        extras: list[str] = []
        if i < len(blocks) and blocks[i].is_markdown:
            md = blocks[i]
            i += 1
            for pointer, body, line in _markdown_sections(md):
                try:
                    _set_pointer(data, pointer, body)
                except SchemaError as exc:
                    raise SchemaError(f"line {line}: {exc}") from None
                if not _STANDARD_PROSE.match(pointer):
                    extras.append(pointer)
        rule = rule_from_data(data, f"line {block.line}", tuple(extras))
        _register(where_defined, rule.id, block.line)
        rules.append(rule)

    return Guide(title=title, source=source, rules=tuple(rules), extra=guide_extra)


def _register(seen: dict[str, int], ident: str, line: int) -> None:
    if ident in seen:
        raise SchemaError(f"duplicate rule id {ident!r} at line {seen[ident]} and line {line}")
    seen[ident] = line


# -- serialization ---------------------------------------------------------------


def _rule_blocks(rule: Rule) -> list[str]:
    data = rule_to_data(rule)
    sections: list[tuple[str, str]] = []
    pointers = ["/rule", "/description", *rule.prose_pointers]
    pointers += [f"/implementations/{n}/description" for n in range(len(rule.implementations))]
    for pointer in pointers:
        value = _pop_pointer(data, pointer)
        if value is not None:
            sections.append((pointer, value))
    out = [yamlio.dump(data)]
    if sections:
        out.append("\n\n".join(f"## {p}\n{body}" for p, body in sections) + "\n")
    return out


def serialize_scapolite(guide: Guide) -> str:
    header: dict[str, Any] = {"title": guide.title, "source": guide.source.value}
    header.update(guide.extra)
    parts = [yamlio.dump(header)]
    for rule in guide.rules:
        parts.extend(_rule_blocks(rule))
    return "".join(f"{SEPARATOR}\n{p}" for p in parts)


__all__ = ["parse_scapolite", "serialize_scapolite"]
