"""Plain-data (YAML-ready) encoding of catalog definitions."""

from __future__ import annotations

from typing import Any

from ..errors import NormalizeError, SchemaError
from ..paths import PolicyPath
from ..regdata import RegistryData, RegType
from .model import (
    AUDIT_VALUES,
    AuditSubcategory,
    BooleanKind,
    DecimalKind,
    Definition,
    EnumKind,
    EnumModel,
    IntegerModel,
    ListKind,
    Privilege,
    RegistryValueInf,
    SettingDefinition,
    SettingElement,
    SystemAccess,
    TextKind,
)

LEGACY_KINDS = ("privilege", "system_access", "registry_value_inf", "audit")


def _payload(data: RegistryData | None, value_type: RegType) -> Any:
    if data is None:
        return None
    if data.value_type is not value_type:
        return data.to_text()
    if value_type is RegType.REG_MULTI_SZ:
        return list(data.payload)
    if value_type is RegType.REG_BINARY:
        return data.to_text()
    return data.payload


def _unpayload(raw: Any, value_type: RegType) -> RegistryData | None:
    if raw is None:
        return None
    if isinstance(raw, str) and value_type not in (RegType.REG_SZ, RegType.REG_EXPAND_SZ):
        return RegistryData.from_text(raw)
    if value_type is RegType.REG_MULTI_SZ:
        return RegistryData(value_type, tuple(raw))
    return RegistryData(value_type, raw)


def _element_to_dict(el: SettingElement) -> dict[str, Any]:
    out: dict[str, Any] = {"id": el.element_id}
    k = el.kind
    if isinstance(k, BooleanKind):
        out.update(type="boolean", true_value=k.true_data.to_text(), false_value=k.false_data.to_text())
    elif isinstance(k, DecimalKind):
        out.update(type="decimal", min=k.min, max=k.max)
        if k.store_as_text:
            out["store_as_text"] = True
    elif isinstance(k, TextKind):
        out.update(type="text", max_length=k.max_length)
        if k.expandable:
            out["expandable"] = True
    elif isinstance(k, EnumKind):
        out.update(type="enum", items=[{"display": d, "data": v.to_text()} for d, v in k.items])
    else:
        out.update(type="list", key_suffix=k.key_suffix, explicit_names=k.explicit_names)
        if k.value_prefix:
            out["value_prefix"] = k.value_prefix
    out["value_name"] = el.value_name
    out["key"] = el.key
    if el.label:
        out["label"] = el.label
    if el.required:
        out["required"] = True
    return out


def _element_from_dict(d: dict[str, Any]) -> SettingElement:
    t = d.get("type")
    if t == "boolean":
        kind: Any = BooleanKind(RegistryData.from_text(d["true_value"]), RegistryData.from_text(d["false_value"]))
    elif t == "decimal":
        kind = DecimalKind(int(d["min"]), int(d["max"]), bool(d.get("store_as_text", False)))
    elif t == "text":
        kind = TextKind(int(d["max_length"]), bool(d.get("expandable", False)))
    elif t == "enum":
        kind = EnumKind(tuple((str(i["display"]), RegistryData.from_text(i["data"])) for i in d["items"]))
    elif t == "list":
        kind = ListKind(d["key_suffix"], bool(d.get("explicit_names", False)), d.get("value_prefix", ""))
    else:
        raise SchemaError(f"unknown element type {t!r}")
    return SettingElement(
        element_id=d["id"],
        value_name=d.get("value_name", ""),
        kind=kind,
        key=d["key"],
        label=d.get("label", ""),
        required=bool(d.get("required", False)),
    )


def _value_model_to_dict(model: IntegerModel | EnumModel) -> dict[str, Any]:
    if isinstance(model, IntegerModel):
        return {"min": model.min, "max": model.max}
    return {"items": {d: e for d, e in model.items}}


def _value_model_from_dict(raw: Any, where: str) -> IntegerModel | EnumModel:
    if not isinstance(raw, dict):
        raise SchemaError(f"{where}: value_model must be a mapping")
    if "items" in raw:
        return _enum_model(raw["items"], where)
    if "min" in raw and "max" in raw:
        return IntegerModel(int(raw["min"]), int(raw["max"]))
    raise SchemaError(f"{where}: value_model needs min/max or items")


def _enum_model(raw: Any, where: str) -> EnumModel:
    if not isinstance(raw, dict) or not raw:
        raise SchemaError(f"{where}: enum value model must be a nonempty mapping")
    return EnumModel(tuple((str(k), str(v)) for k, v in raw.items()))


def definition_to_dict(d: Definition) -> dict[str, Any]:
    if isinstance(d, SettingDefinition):
        registry: dict[str, Any] = {
            "name": d.value_name,
            "path": d.key,
            "hive": d.hive,
            "type": d.value_type.value,
        }
        if d.enabled_data is not None:
            registry["enabled_value"] = _payload(d.enabled_data, d.value_type)
        if d.disabled_data is not None:
            registry["disabled_value"] = _payload(d.disabled_data, d.value_type)
        out: dict[str, Any] = {"kind": "admx", "id": d.id, "ui_path": d.ui_path.normalized, "registry": registry}
        if d.elements:
            out["elements"] = [_element_to_dict(e) for e in d.elements]
        if d.non_automatable:
            out["non_automatable"] = True
        return out
    if isinstance(d, Privilege):
        return {"kind": "privilege", "id": d.id, "ui_path": d.ui_path.normalized, "constant": d.constant}
    if isinstance(d, SystemAccess):
        return {"kind": "system_access", "id": d.id, "ui_path": d.ui_path.normalized,
                "inf_key": d.inf_key, "value_model": _value_model_to_dict(d.value_model)}
    if isinstance(d, RegistryValueInf):
        return {"kind": "registry_value_inf", "id": d.id, "ui_path": d.ui_path.normalized,
                "inf_path": d.inf_path, "value_model": {k: v for k, v in d.value_model.items}}
    if isinstance(d, AuditSubcategory):
        out = {"kind": "audit", "id": d.id, "ui_path": d.ui_path.normalized, "guid": d.guid, "name": d.name}
        if tuple(d.value_model) != AUDIT_VALUES:
            out["value_model"] = list(d.value_model)
        return out
    raise TypeError(f"not a definition: {d!r}")


def _path(raw: Any, where: str) -> PolicyPath:
    if not isinstance(raw, str):
        raise SchemaError(f"{where}: ui_path must be a string")
    try:
        return PolicyPath.parse(raw)
    except NormalizeError as exc:
        raise SchemaError(f"{where}: {exc}") from None


def definition_from_dict(raw: Any, where: str = "record") -> Definition:
    if not isinstance(raw, dict):
        raise SchemaError(f"{where}: expected a mapping, got {type(raw).__name__}")
    kind = raw.get("kind")
    try:
        if kind == "admx":
            reg = raw["registry"]
            vt = RegType.parse(reg["type"])
            return SettingDefinition(
                id=raw["id"],
                ui_path=_path(raw["ui_path"], where),
                hive=reg["hive"],
                key=reg.get("path", ""),
                value_name=reg.get("name", ""),
                value_type=vt,
                enabled_data=_unpayload(reg.get("enabled_value"), vt),
                disabled_data=_unpayload(reg.get("disabled_value"), vt),
                elements=tuple(_element_from_dict(e) for e in raw.get("elements", [])),
                non_automatable=bool(raw.get("non_automatable", False)),
            )
        ident = str(raw.get("id", "") or "")
        if kind == "privilege":
            return Privilege(_path(raw["ui_path"], where), str(raw["constant"]), ident)
        if kind == "system_access":
            return SystemAccess(_path(raw["ui_path"], where), str(raw["inf_key"]),
                                _value_model_from_dict(raw["value_model"], where), ident)
        if kind == "registry_value_inf":
            return RegistryValueInf(_path(raw["ui_path"], where), str(raw["inf_path"]),
                                    _enum_model(raw["value_model"], where), ident)
        if kind == "audit":
            model = tuple(raw.get("value_model", AUDIT_VALUES))
            return AuditSubcategory(_path(raw["ui_path"], where), str(raw["guid"]), str(raw["name"]), model, ident)
    except KeyError as exc:
        raise SchemaError(f"{where}: missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{where}: {exc}") from None
    raise SchemaError(f"{where}: unknown kind {kind!r}")
