"""Plain-data encoding of policy values, automations, and rules.

The encoding is what appears in the YAML part of a guide file::

    value: Enabled                      # Toggle
    value: 3                            # Number
    value: Send NTLMv2 response only    # Choice
    value: [Administrators]             # Principals
    value: {main_setting: Enabled, Configure MrxSmb10 driver: Disable driver (recommended)}
"""

from __future__ import annotations

from typing import Any

from ..errors import ParseError, SchemaError
from ..regdata import RegistryData
from .model import (
    WIN_GPO,
    WINDOWS_AUDITPOL,
    WINDOWS_REGISTRY,
    WINDOWS_SECEDIT,
    AuditAutomation,
    AuditSetting,
    AuditValue,
    Automation,
    Choice,
    Composite,
    ExtractionStatus,
    Implementation,
    Number,
    OpaqueAutomation,
    PolicyValue,
    Principals,
    RegistryAutomation,
    Rule,
    SeceditAutomation,
    SeceditSection,
    Status,
    Text,
    Toggle,
    WinGpoAutomation,
)

MAIN_SETTING = "main_setting"
DELETE = "DELETE"


# -- values ------------------------------------------------------------------


def _scalar_value(s: str) -> PolicyValue:
    low = s.strip().casefold()
    if low == "enabled":
        return Toggle(True)
    if low == "disabled":
        return Toggle(False)
    audit = AuditSetting.lookup(s)
    if audit is not None:
        return AuditValue(audit)
    return Choice(s)


def value_from_data(raw: Any, where: str = "value") -> PolicyValue:
    if isinstance(raw, bool):
        return Toggle(raw)
    if isinstance(raw, int):
        return Number(raw)
    if isinstance(raw, str):
        return _scalar_value(raw)
    if isinstance(raw, list):
        if not all(isinstance(x, str) for x in raw):
            raise SchemaError(f"{where}: principal lists hold names only")
        return Principals(tuple(raw))
    if isinstance(raw, dict):
        if MAIN_SETTING in raw:
            main = value_from_data(raw[MAIN_SETTING], where)
            if not isinstance(main, (Toggle, Choice)):
                raise SchemaError(f"{where}: main_setting must be Enabled, Disabled or a choice")
            sub = tuple(
                (str(k), value_from_data(v, f"{where}/{k}")) for k, v in raw.items() if k != MAIN_SETTING
            )
            return Composite(main, sub)
        if set(raw) == {"choice"}:
            return Choice(str(raw["choice"]))
        if set(raw) == {"text"}:
            return Text(str(raw["text"]))
        if set(raw) == {"number"}:
            return Number(int(raw["number"]))
    raise SchemaError(f"{where}: cannot interpret {raw!r} as a policy value")


def value_to_data(value: PolicyValue) -> Any:
    if isinstance(value, Toggle):
        return "Enabled" if value.enabled else "Disabled"
    if isinstance(value, Number):
        return value.n
    if isinstance(value, Choice):
        return value.display if _scalar_value(value.display) == value else {"choice": value.display}
    if isinstance(value, Text):
        return {"text": value.s}
    if isinstance(value, Principals):
        return list(value.names)
    if isinstance(value, AuditValue):
        return value.v.display
    if isinstance(value, Composite):
        out: dict[str, Any] = {MAIN_SETTING: value_to_data(value.main)}
        for label, sub in value.sub:
            if label == MAIN_SETTING:
                raise SchemaError("sub-setting label collides with main_setting")
            out[label] = value_to_data(sub)
        return out
    raise TypeError(f"not a policy value: {value!r}")


# -- automations ---------------------------------------------------------------

_GPO_KEYS = ("system", "ui_path", "value", "verification_status", "error_class",
             "error_hint", "candidates", "first_verification")


def _status(raw: Any, where: str) -> Status:
    if raw is None:
        return Status.Unchecked
    text = str(raw).strip().rstrip(".")
    try:
        return Status(text)
    except ValueError:
        raise SchemaError(f"{where}: verification_status must be Checked. or Unchecked., got {raw!r}") from None


def _section(raw: Any, where: str) -> SeceditSection:
    text = "".join(str(raw).split()).casefold()
    for s in SeceditSection:
        if text in (s.name.casefold(), "".join(s.value.split()).casefold()):
            return s
    raise SchemaError(f"{where}: unknown secedit section {raw!r}")


def automation_from_data(raw: Any, where: str = "automation") -> Automation:
    if not isinstance(raw, dict):
        raise SchemaError(f"{where}: automation must be a mapping")
    system = raw.get("system")
    try:
        if system == WIN_GPO:
            if not isinstance(raw.get("ui_path"), str):
                raise SchemaError(f"{where}: ui_path must be a string")
            if "value" not in raw or raw["value"] is None:
                raise SchemaError(f"{where}: missing value")
            return WinGpoAutomation(
                ui_path=raw["ui_path"],
                value=value_from_data(raw["value"], f"{where}/value"),
                verification_status=_status(raw.get("verification_status"), where),
                error_class=raw.get("error_class"),
                error_hint=raw.get("error_hint"),
                candidates=raw.get("candidates"),
                first_verification=raw.get("first_verification"),
                extra={k: v for k, v in raw.items() if k not in _GPO_KEYS},
            )
        if system == WINDOWS_REGISTRY:
            action = raw["action"]
            data = None if str(action).strip().upper() == DELETE else RegistryData.from_text(str(action))
            return RegistryAutomation(
                config=raw["config"],
                registry_key=raw["registry_key"],
                value_name=raw.get("value_name") or "",
                action=data,
            )
        if system == WINDOWS_SECEDIT:
            return SeceditAutomation(_section(raw["section"], where), str(raw["key"]), str(raw["value"]))
        if system == WINDOWS_AUDITPOL:
            return AuditAutomation(str(raw["subcategory"]), str(raw["guid"]), int(raw["setting_value"]))
    except KeyError as exc:
        raise SchemaError(f"{where}: missing field {exc.args[0]!r}") from None
    except ParseError as exc:
        raise SchemaError(f"{where}: {exc}") from None
    return OpaqueAutomation(dict(raw))


def automation_to_data(a: Automation) -> dict[str, Any]:
    if isinstance(a, WinGpoAutomation):
        out: dict[str, Any] = {
            "system": WIN_GPO,
            "ui_path": a.ui_path,
            "value": value_to_data(a.value),
            "verification_status": a.verification_status.value + ".",
        }
        for key in ("error_class", "error_hint", "candidates", "first_verification"):
            v = getattr(a, key)
            if v is not None:
                out[key] = v
        out.update(a.extra)
        return out
    if isinstance(a, RegistryAutomation):
        return {
            "system": WINDOWS_REGISTRY,
            "config": a.config,
            "registry_key": a.registry_key,
            "value_name": a.value_name,
            "action": DELETE if a.action is None else a.action.to_text(),
        }
    if isinstance(a, SeceditAutomation):
        return {"system": WINDOWS_SECEDIT, "section": a.section.value, "key": a.key, "value": a.value}
    if isinstance(a, AuditAutomation):
        return {"system": WINDOWS_AUDITPOL, "subcategory": a.subcategory, "guid": a.guid,
                "setting_value": a.setting_value}
    if isinstance(a, OpaqueAutomation):
        return dict(a.data)
    raise TypeError(f"not an automation: {a!r}")


# -- rules ---------------------------------------------------------------------

_RULE_KEYS = ("id", "rule", "description", "implementations", "extraction_status")


def implementation_from_data(raw: Any, where: str) -> Implementation:
    if not isinstance(raw, dict):
        raise SchemaError(f"{where}: implementation must be a mapping")
    autos = raw.get("automations") or []
    if not isinstance(autos, list):
        raise SchemaError(f"{where}: automations must be a list")
    desc = raw.get("description")
    return Implementation(
        description="" if desc is None else str(desc),
        automations=tuple(automation_from_data(a, f"{where}/automations/{i}") for i, a in enumerate(autos)),
        extra={k: v for k, v in raw.items() if k not in ("description", "automations")},
    )


def implementation_to_data(impl: Implementation) -> dict[str, Any]:
    out: dict[str, Any] = {}
    if impl.description:
        out["description"] = impl.description
    if impl.automations:
        out["automations"] = [automation_to_data(a) for a in impl.automations]
    out.update(impl.extra)
    return out


def rule_from_data(raw: Any, where: str = "rule", prose_pointers: tuple[str, ...] = ()) -> Rule:
    if not isinstance(raw, dict):
        raise SchemaError(f"{where}: rule must be a mapping")
    if raw.get("id") in (None, ""):
        raise SchemaError(f"{where}: rule without an id")
    ident = str(raw["id"])
    impls = raw.get("implementations") or []
    if not isinstance(impls, list):
        raise SchemaError(f"{where}: implementations must be a list")
    status = raw.get("extraction_status", ExtractionStatus.NotAttempted.value)
    try:
        status = ExtractionStatus(status)
    except ValueError:
        raise SchemaError(f"{where}: unknown extraction_status {status!r}") from None
    rule_text = raw.get("rule")
    if not isinstance(rule_text, str) or not rule_text.strip():
        raise SchemaError(f"rule {ident!r} ({where}) has no rule text")
    desc = raw.get("description")
    return Rule(
        id=ident,
        rule_text=rule_text,
        description=None if desc is None else str(desc),
        implementations=tuple(
            implementation_from_data(x, f"rule {ident}/implementations/{i}") for i, x in enumerate(impls)
        ),
        extraction_status=status,
        extra={k: v for k, v in raw.items() if k not in _RULE_KEYS},
        prose_pointers=prose_pointers,
    )


def rule_to_data(rule: Rule) -> dict[str, Any]:
    out: dict[str, Any] = {"id": rule.id, "rule": rule.rule_text}
    if rule.description is not None:
        out["description"] = rule.description
    if rule.extraction_status is not ExtractionStatus.NotAttempted:
        out["extraction_status"] = rule.extraction_status.value
    if rule.implementations:
        out["implementations"] = [implementation_to_data(i) for i in rule.implementations]
    out.update(rule.extra)
    return out
