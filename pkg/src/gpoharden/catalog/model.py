"""Definitions of configurable policy settings.

Two families live in a catalog: settings compiled from Administrative
Template files (:class:`SettingDefinition`, implemented purely through the
registry) and the older settings that are only reachable through a security
template or the audit policy (:class:`Privilege`, :class:`SystemAccess`,
:class:`RegistryValueInf`, :class:`AuditSubcategory`).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

from ..errors import SchemaError
from ..paths import PolicyPath
from ..regdata import RegistryData, RegType

HIVES = ("HKEY_LOCAL_MACHINE", "HKEY_CURRENT_USER")
AUDIT_VALUES = ("NoAuditing", "Success", "Failure", "SuccessAndFailure")
AUDIT_DISPLAY = {
    "NoAuditing": "No Auditing",
    "Success": "Success",
    "Failure": "Failure",
    "SuccessAndFailure": "Success and Failure",
}

_GUID_RE = re.compile(r"^\{[0-9a-fA-F]{8}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{12}\}$")


def display_key(text: str) -> str:
    """Comparison key for UI labels: case/whitespace-insensitive, trailing colon dropped."""
    return " ".join(text.split()).rstrip(":").strip().casefold()


# -- Administrative Template element kinds ----------------------------------


@dataclass(frozen=True)
class BooleanKind:
    true_data: RegistryData
    false_data: RegistryData


@dataclass(frozen=True)
class DecimalKind:
    min: int
    max: int
    store_as_text: bool = False

    def __post_init__(self) -> None:
        if self.min > self.max:
            raise SchemaError(f"decimal element has min {self.min} > max {self.max}")

    @property
    def value_type(self) -> RegType:
        return RegType.REG_SZ if self.store_as_text else RegType.REG_DWORD

    def encode(self, n: int) -> RegistryData:
        if self.store_as_text:
            return RegistryData.sz(str(n))
        return RegistryData.dword(n)


@dataclass(frozen=True)
class TextKind:
    max_length: int
    expandable: bool = False

    @property
    def value_type(self) -> RegType:
        return RegType.REG_EXPAND_SZ if self.expandable else RegType.REG_SZ


@dataclass(frozen=True)
class EnumKind:
    items: tuple[tuple[str, RegistryData], ...]

    def __post_init__(self) -> None:
        if not self.items:
            raise SchemaError("enum element without items")
        seen = set()
        for display, _ in self.items:
            if display in seen:
                raise SchemaError(f"duplicate enum display string {display!r}")
            seen.add(display)

    @property
    def displays(self) -> list[str]:
        return [d for d, _ in self.items]

    def find(self, display: str, strict: bool = False) -> tuple[str, RegistryData] | None:
        for d, data in self.items:
            if (d == display) if strict else (display_key(d) == display_key(display)):
                return d, data
        return None


@dataclass(frozen=True)
class ListKind:
    key_suffix: str
    explicit_names: bool = False
    value_prefix: str = ""


ElementKind = Union[BooleanKind, DecimalKind, TextKind, EnumKind, ListKind]


@dataclass(frozen=True)
class SettingElement:
    element_id: str
    value_name: str
    kind: ElementKind
    key: str
    label: str = ""
    required: bool = False

    @property
    def display_label(self) -> str:
        return self.label or self.element_id


@dataclass(frozen=True)
class SettingDefinition:
    id: str
    ui_path: PolicyPath
    hive: str
    key: str
    value_name: str
    value_type: RegType
    enabled_data: RegistryData | None = None
    disabled_data: RegistryData | None = None
    elements: tuple[SettingElement, ...] = ()
    non_automatable: bool = False

    def __post_init__(self) -> None:
        if self.hive not in HIVES:
            raise SchemaError(f"{self.id}: unknown hive {self.hive!r}")
        for data in (self.enabled_data, self.disabled_data):
            if data is not None and data.value_type is not self.value_type:
                raise SchemaError(
                    f"{self.id}: {data.value_type.value} data on a {self.value_type.value} setting"
                )

    def element(self, label: str) -> SettingElement | None:
        want = display_key(label)
        for el in self.elements:
            if display_key(el.display_label) == want or display_key(el.element_id) == want:
                return el
        return None


# -- settings without an Administrative Template ----------------------------


@dataclass(frozen=True)
class IntegerModel:
    min: int
    max: int


@dataclass(frozen=True)
class EnumModel:
    items: tuple[tuple[str, str], ...]

    def __post_init__(self) -> None:
        if not self.items:
            raise SchemaError("enum value model must not be empty")

    @property
    def displays(self) -> list[str]:
        return [d for d, _ in self.items]

    def find(self, display: str, strict: bool = False) -> tuple[str, str] | None:
        for d, enc in self.items:
            if (d == display) if strict else (display_key(d) == display_key(display)):
                return d, enc
        return None


@dataclass(frozen=True)
class Privilege:
    ui_path: PolicyPath
    constant: str
    id: str = ""

    def __post_init__(self) -> None:
        if not self.id:
            object.__setattr__(self, "id", f"privilege__{self.constant.lower()}")


@dataclass(frozen=True)
class SystemAccess:
    ui_path: PolicyPath
    inf_key: str
    value_model: IntegerModel | EnumModel
    id: str = ""

    def __post_init__(self) -> None:
        if not self.id:
            object.__setattr__(self, "id", f"system_access__{self.inf_key.lower()}")


@dataclass(frozen=True)
class RegistryValueInf:
    ui_path: PolicyPath
    inf_path: str
    value_model: EnumModel
    id: str = ""

    def __post_init__(self) -> None:
        if not self.id:
            leaf = self.inf_path.rsplit("\\", 1)[-1]
            object.__setattr__(self, "id", f"registry_value__{leaf.lower()}")


@dataclass(frozen=True)
class AuditSubcategory:
    ui_path: PolicyPath
    guid: str
    name: str
    value_model: tuple[str, ...] = AUDIT_VALUES
    id: str = field(default="")

    def __post_init__(self) -> None:
        if not _GUID_RE.match(self.guid):
            raise SchemaError(f"audit subcategory {self.name!r}: {self.guid!r} is not a braced GUID")
        if not self.value_model or any(v not in AUDIT_VALUES for v in self.value_model):
            raise SchemaError(f"audit subcategory {self.name!r}: bad value model {self.value_model!r}")
        if not self.id:
            object.__setattr__(self, "id", f"audit__{self.guid.strip('{}').lower()}")


LegacyDefinition = Union[Privilege, SystemAccess, RegistryValueInf, AuditSubcategory]
Definition = Union[SettingDefinition, Privilege, SystemAccess, RegistryValueInf, AuditSubcategory]
LEGACY_TYPES = (Privilege, SystemAccess, RegistryValueInf, AuditSubcategory)
