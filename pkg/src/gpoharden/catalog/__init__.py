"""Settings catalog compiled from Administrative Templates and legacy definitions."""

from __future__ import annotations

from pathlib import Path

from .admx import load_admx, load_admx_set
from .model import (
    AuditSubcategory,
    BooleanKind,
    DecimalKind,
    Definition,
    EnumKind,
    EnumModel,
    IntegerModel,
    LegacyDefinition,
    ListKind,
    Privilege,
    RegistryValueInf,
    SettingDefinition,
    SettingElement,
    SystemAccess,
    TextKind,
)
from .store import (
    SettingCatalog,
    build_catalog,
    load_catalog,
    load_legacy_definitions,
    lookup,
    save_catalog,
)


def compile_directory(
    admx_dir: str | Path,
    adml_dir: str | Path | None = None,
    legacy_file: str | Path | None = None,
    warnings: list[str] | None = None,
) -> SettingCatalog:
    """Build a catalog from a PolicyDefinitions-style directory.

    ADML files are looked up by stem in ``adml_dir`` (default: ``admx_dir/en-US``).
    """
    admx_dir = Path(admx_dir)
    adml_dir = Path(adml_dir) if adml_dir is not None else admx_dir / "en-US"
    pairs = []
    for admx in sorted(admx_dir.glob("*.admx"), key=lambda p: p.name.lower()):
        adml = adml_dir / (admx.stem + ".adml")
        pairs.append((admx.stem, admx.read_bytes(), adml.read_bytes() if adml.exists() else None))
    defs: list[Definition] = list(load_admx_set(pairs, warnings))
    if legacy_file is not None:
        defs.extend(load_legacy_definitions(Path(legacy_file).read_bytes()))
    return build_catalog(defs)


__all__ = [
    "AuditSubcategory", "BooleanKind", "DecimalKind", "Definition", "EnumKind", "EnumModel",
    "IntegerModel", "LegacyDefinition", "ListKind", "Privilege", "RegistryValueInf",
    "SettingCatalog", "SettingDefinition", "SettingElement", "SystemAccess", "TextKind",
    "build_catalog", "compile_directory", "load_admx", "load_admx_set", "load_catalog",
    "load_legacy_definitions", "lookup", "save_catalog",
]
