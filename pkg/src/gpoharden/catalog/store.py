"""The settings catalog: build, query, and persist."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .. import yamlio
from ..errors import CollisionError, ParseError, SchemaError, VersionError
from ..paths import PolicyPath
from .codec import LEGACY_KINDS, definition_from_dict, definition_to_dict
from .model import Definition, LegacyDefinition

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class SettingCatalog:
    settings: dict[str, Definition]
    all_paths: frozenset[str]
    source_fingerprint: str
    _by_id: dict[str, Definition] = field(default_factory=dict, compare=False, repr=False)

    def lookup(self, path: str | PolicyPath) -> Definition | None:
        """Exact match on the normalized path; ``None`` when unknown."""
        if isinstance(path, str):
            try:
                path = PolicyPath.parse(path)
            except Exception:
                return None
        return self.settings.get(path.key)

    def by_id(self, ident: str) -> Definition | None:
        return self._by_id.get(ident)

    def __len__(self) -> int:
        return len(self.settings)

    def __iter__(self) -> Iterator[Definition]:
        return iter(self.settings.values())


def lookup(catalog: SettingCatalog, path: str | PolicyPath) -> Definition | None:
    return catalog.lookup(path)


def fingerprint(defs: Iterable[Definition]) -> str:
    records = sorted((definition_to_dict(d) for d in defs), key=lambda r: r["ui_path"].casefold())
    blob = json.dumps(records, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return "sha256:" + hashlib.sha256(blob.encode("utf-8")).hexdigest()


def build_catalog(defs: Iterable[Definition]) -> SettingCatalog:
    settings: dict[str, Definition] = {}
    by_id: dict[str, Definition] = {}
    for d in defs:
        key = d.ui_path.key
        if key in settings:
            raise CollisionError(d.ui_path.normalized, settings[key].id, d.id)
        if d.id in by_id:
            raise CollisionError(d.ui_path.normalized, by_id[d.id].id, d.id)
        settings[key] = d
        by_id[d.id] = d
    return SettingCatalog(
        settings=settings,
        all_paths=frozenset(d.ui_path.normalized for d in settings.values()),
        source_fingerprint=fingerprint(settings.values()),
        _by_id=by_id,
    )


def load_legacy_definitions(document: str | bytes) -> list[LegacyDefinition]:
    """Parse the hand-maintained file of non-template settings."""
    data = yamlio.load(document, "legacy definitions")
    if data is None:
        return []
    if isinstance(data, dict) and "definitions" in data:
        data = data["definitions"] or []
    if not isinstance(data, list):
        raise SchemaError("legacy definitions must be a list of records")
    out: list[LegacyDefinition] = []
    seen: dict[str, str] = {}
    for i, rec in enumerate(data):
        where = f"record {i + 1}"
        if not isinstance(rec, dict) or rec.get("kind") not in LEGACY_KINDS:
            kind = rec.get("kind") if isinstance(rec, dict) else None
            raise SchemaError(f"{where}: unknown kind {kind!r}")
        d = definition_from_dict(rec, where)
        if d.ui_path.key in seen:
            raise CollisionError(d.ui_path.normalized, seen[d.ui_path.key], d.id)
        seen[d.ui_path.key] = d.id
        out.append(d)
    return out


def save_catalog(catalog: SettingCatalog) -> bytes:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "source_fingerprint": catalog.source_fingerprint,
        "settings": [definition_to_dict(d) for d in sorted(catalog, key=lambda d: d.ui_path.key)],
    }
    return yamlio.dump(doc).encode("utf-8")


def load_catalog(data: bytes | str) -> SettingCatalog:
    """Inverse of :func:`save_catalog`; never returns a partial catalog."""
    doc = yamlio.load(data, "catalog")
    if not isinstance(doc, dict):
        raise VersionError("catalog document has no header")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise VersionError(f"catalog schema_version {version!r}, expected {SCHEMA_VERSION}")
    records = doc.get("settings")
    if not isinstance(records, list):
        raise VersionError("catalog has no settings list")
    try:
        defs = [definition_from_dict(r, f"setting {i + 1}") for i, r in enumerate(records)]
    except ParseError as exc:
        raise VersionError(f"catalog body is corrupt: {exc}") from None
    catalog = build_catalog(defs)
    if catalog.source_fingerprint != doc.get("source_fingerprint"):
        raise VersionError("catalog fingerprint does not match its contents")
    return catalog
