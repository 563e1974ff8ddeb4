"""Compile ADMX/ADML pairs into :class:`SettingDefinition` records.

Categories are resolved across every file of a set, because real templates
hang their policies below categories declared in ``Windows.admx``
(``<parentCategory ref="windows:WindowsComponents"/>``).
"""

from __future__ import annotations

import logging
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Iterable

from ..errors import ParseError, SchemaError
from ..paths import ClassRoot, PolicyPath
from ..regdata import RegistryData, RegType
from .model import (
    BooleanKind,
    DecimalKind,
    EnumKind,
    ListKind,
    SettingDefinition,
    SettingElement,
    TextKind,
)

log = logging.getLogger(__name__)

ADMIN_TEMPLATES = "Administrative Templates"
_REF_RE = re.compile(r"^\$\((string|presentation)\.([^)]*)\)$")


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _children(node: ET.Element, name: str) -> list[ET.Element]:
    return [c for c in node if _local(c.tag) == name]


def _child(node: ET.Element, name: str) -> ET.Element | None:
    for c in node:
        if _local(c.tag) == name:
            return c
    return None


def _parse_xml(text: str | bytes, what: str) -> ET.Element:
    try:
        return ET.fromstring(text)
    except ET.ParseError as exc:
        line, col = exc.position
        raise ParseError(f"malformed XML in {what}", f"line {line}, column {col + 1}") from None


@dataclass
class _Resources:
    strings: dict[str, str] = field(default_factory=dict)
    presentations: dict[str, dict[str, str]] = field(default_factory=dict)


def _load_adml(text: str | bytes | None, what: str) -> _Resources:
    res = _Resources()
    if not text:
        return res
    root = _parse_xml(text, what)
    for node in root.iter():
        name = _local(node.tag)
        if name == "string" and node.get("id") is not None:
            res.strings[node.get("id")] = (node.text or "").strip()
        elif name == "presentation" and node.get("id") is not None:
            labels: dict[str, str] = {}
            for ctl in node:
                ref = ctl.get("refId")
                if ref is None:
                    continue
                label = _child(ctl, "label")
                text_ = label.text if label is not None else ctl.text
                labels[ref] = " ".join((text_ or "").split())
            res.presentations[node.get("id")] = labels
    return res


@dataclass
class _AdmxFile:
    root: ET.Element
    namespace: str
    prefix: str
    using: dict[str, str]
    resources: _Resources
    what: str
    warnings: list[str]

    def resolve(self, ref: str | None) -> str:
        if not ref:
            return ""
        m = _REF_RE.match(ref.strip())
        if not m:
            return ref
        kind, ident = m.groups()
        if kind == "string" and ident in self.resources.strings:
            return self.resources.strings[ident]
        self.warn(f"unresolved string reference $({kind}.{ident}); using {ident!r}")
        return ident

    def presentation(self, ref: str | None) -> dict[str, str]:
        if not ref:
            return {}
        m = _REF_RE.match(ref.strip())
        ident = m.group(2) if m else ref
        return self.resources.presentations.get(ident, {})

    def warn(self, message: str) -> None:
        message = f"{self.what}: {message}"
        self.warnings.append(message)
        log.warning(message)


def _open_admx(admx: str | bytes, adml: str | bytes | None, what: str, warnings: list[str]) -> _AdmxFile:
    root = _parse_xml(admx, what)
    if _local(root.tag) != "policyDefinitions":
        raise SchemaError(f"{what}: root element is <{_local(root.tag)}>, expected <policyDefinitions>")
    namespace, prefix, using = "", "", {}
    ns_node = _child(root, "policyNamespaces")
    if ns_node is not None:
        target = _child(ns_node, "target")
        if target is not None:
            namespace = target.get("namespace", "")
            prefix = target.get("prefix", "")
        for u in _children(ns_node, "using"):
            using[u.get("prefix", "")] = u.get("namespace", "")
    return _AdmxFile(root, namespace, prefix, using, _load_adml(adml, what + " (ADML)"), what, warnings)


# -- registry value decoding ---------------------------------------------------


def _value_node(node: ET.Element | None) -> RegistryData | None:
    """Decode the single value child of <enabledValue>, <value>, <trueValue>, ..."""
    if node is None:
        return None
    for c in node:
        name = _local(c.tag)
        if name == "decimal":
            return RegistryData.dword(int(c.get("value", "0")))
        if name == "longDecimal":
            return RegistryData(RegType.REG_QWORD, int(c.get("value", "0")))
        if name == "string":
            return RegistryData.sz(c.text or "")
        if name == "delete":
            return None
    return None


def _element(f: _AdmxFile, node: ET.Element, policy_key: str, labels: dict[str, str]) -> SettingElement | None:
    kind_name = _local(node.tag)
    ident = node.get("id", "")
    key = node.get("key", policy_key)
    value_name = node.get("valueName", "")
    required = node.get("required", "false").lower() == "true"
    label = labels.get(ident, "")
    if kind_name == "boolean":
        true_data = _value_node(_child(node, "trueValue")) or RegistryData.dword(1)
        false_data = _value_node(_child(node, "falseValue")) or RegistryData.dword(0)
        kind = BooleanKind(true_data, false_data)
    elif kind_name == "decimal":
        kind = DecimalKind(
            int(node.get("minValue", "0")),
            int(node.get("maxValue", "9999")),
            node.get("storeAsText", "false").lower() == "true",
        )
    elif kind_name == "text":
        kind = TextKind(int(node.get("maxLength", "1023")), node.get("expandable", "false").lower() == "true")
    elif kind_name == "enum":
        items = []
        for item in _children(node, "item"):
            data = _value_node(_child(item, "value"))
            if data is None:
                f.warn(f"enum {ident!r}: item without a registry value skipped")
                continue
            items.append((f.resolve(item.get("displayName")), data))
        if not items:
            f.warn(f"enum {ident!r} has no usable items; element dropped")
            return None
        kind = EnumKind(tuple(items))
    elif kind_name == "list":
        kind = ListKind(key, node.get("explicitValue", "false").lower() == "true", node.get("valuePrefix", ""))
    else:
        return None
    return SettingElement(ident, value_name, kind, key, label, required)


_SUPPORTED_ELEMENTS = {"boolean", "decimal", "text", "enum", "list"}


def _definitions(f: _AdmxFile, categories: dict, stem: str) -> list[SettingDefinition]:
    out: list[SettingDefinition] = []
    policies = _child(f.root, "policies")
    if policies is None:
        return out
    for pol in _children(policies, "policy"):
        name = pol.get("name", "")
        parent = _child(pol, "parentCategory")
        chain = _category_chain(f, categories, parent.get("ref") if parent is not None else None, name)
        display = f.resolve(pol.get("displayName")) or name
        key = pol.get("key", "")
        value_name = pol.get("valueName", "")
        enabled = _value_node(_child(pol, "enabledValue"))
        disabled = _value_node(_child(pol, "disabledValue"))
        if value_name and enabled is None and disabled is None \
                and _child(pol, "enabledValue") is None and _child(pol, "disabledValue") is None:
            # ADMX default for a bare valueName: enabled writes 1, disabled writes 0
            enabled, disabled = RegistryData.dword(1), RegistryData.dword(0)
        value_type = (enabled or disabled).value_type if (enabled or disabled) else RegType.REG_DWORD
        if enabled and disabled and enabled.value_type is not disabled.value_type:
            raise SchemaError(f"policy {name!r}: enabled and disabled values differ in type")

        non_automatable = False
        for extra in ("enabledList", "disabledList"):
            if _child(pol, extra) is not None:
                f.warn(f"policy {name!r}: <{extra}> is not supported and was ignored")
                non_automatable = True
        labels = f.presentation(pol.get("presentation"))
        elements: list[SettingElement] = []
        el_node = _child(pol, "elements")
        if el_node is not None:
            for node in el_node:
                kind_name = _local(node.tag)
                if kind_name not in _SUPPORTED_ELEMENTS:
                    f.warn(f"policy {name!r}: <{kind_name}> element {node.get('id')!r} not supported; "
                           "setting marked non-automatable")
                    non_automatable = True
                    continue
                el = _element(f, node, key, labels)
                if el is not None:
                    elements.append(el)

        cls = pol.get("class", "Machine")
        roots = {
            "Machine": [ClassRoot.ComputerConfiguration],
            "User": [ClassRoot.UserConfiguration],
            "Both": [ClassRoot.ComputerConfiguration, ClassRoot.UserConfiguration],
        }.get(cls)
        if roots is None:
            raise SchemaError(f"policy {name!r}: unknown class {cls!r}")
        for root in roots:
            ident = f"{stem}__{name.lower()}"
            if cls == "Both" and root is ClassRoot.UserConfiguration:
                ident += "__user"
            segments = [root.value, ADMIN_TEMPLATES, *chain, display]
            out.append(SettingDefinition(
                id=ident,
                ui_path=PolicyPath.parse("\\".join(segments)),
                hive=root.hive,
                key=key,
                value_name=value_name,
                value_type=value_type,
                enabled_data=enabled,
                disabled_data=disabled,
                elements=tuple(elements),
                non_automatable=non_automatable,
            ))
    return out


def _qualify(f: _AdmxFile, ref: str) -> tuple[str, str]:
    prefix, sep, local = ref.partition(":")
    if not sep:
        return f.namespace, ref
    if prefix == f.prefix:
        return f.namespace, local
    return f.using.get(prefix, prefix), local


def _category_chain(f: _AdmxFile, categories: dict, ref: str | None, policy: str) -> list[str]:
    chain: list[str] = []
    node = _qualify(f, ref) if ref else None
    seen = set()
    while node is not None:
        if node not in categories:
            raise SchemaError(f"policy {policy!r} references undefined category {node[1]!r}")
        if node in seen:
            raise SchemaError(f"policy {policy!r}: category cycle at {node[1]!r}")
        seen.add(node)
        display, node = categories[node]
        chain.append(display)
    chain.reverse()
    return chain


def _collect_categories(files: Iterable[_AdmxFile]) -> dict:
    # (namespace, name) -> (display name, qualified parent or None)
    categories: dict[tuple[str, str], tuple[str, tuple[str, str] | None]] = {}
    for f in files:
        node = _child(f.root, "categories")
        if node is None:
            continue
        for cat in _children(node, "category"):
            parent = _child(cat, "parentCategory")
            parent_ref = _qualify(f, parent.get("ref")) if parent is not None and parent.get("ref") else None
            display = f.resolve(cat.get("displayName")) or cat.get("name", "")
            categories[(f.namespace, cat.get("name", ""))] = (display, parent_ref)
    return categories


def load_admx_set(
    pairs: Iterable[tuple[str, str | bytes, str | bytes | None]],
    warnings: list[str] | None = None,
) -> list[SettingDefinition]:
    """Load several ``(stem, admx_text, adml_text)`` triples with shared categories."""
    if warnings is None:
        warnings = []
    files = []
    stems = []
    for stem, admx, adml in pairs:
        files.append(_open_admx(admx, adml, stem, warnings))
        stems.append(stem)
    categories = _collect_categories(files)
    out: list[SettingDefinition] = []
    for f, stem in zip(files, stems):
        out.extend(_definitions(f, categories, stem.lower()))
    return out


def load_admx(
    admx_document: str | bytes,
    adml_document: str | bytes | None,
    stem: str | None = None,
    warnings: list[str] | None = None,
) -> list[SettingDefinition]:
    """Compile one ADMX/ADML pair.

    ``stem`` prefixes every definition id; by default it is the file's target
    namespace prefix, which for Microsoft templates equals the lowercased file
    name (``controlpaneldisplay``).
    """
    if stem is None:
        probe = _open_admx(admx_document, None, "ADMX", [])
        stem = probe.prefix or "admx"
    return load_admx_set([(stem, admx_document, adml_document)], warnings)
