"""Translate checked policy automations into registry, security-template and audit entries."""

from __future__ import annotations

from dataclasses import replace

from .catalog.model import (
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
from .errors import ConsistencyError, PreconditionError
from .guide.model import (
    AuditSetting,
    AuditAutomation,
    AuditValue,
    Composite,
    Guide,
    LowLevelAutomation,
    LOW_LEVEL_TYPES,
    PolicyValue,
    Principals,
    RegistryAutomation,
    SeceditAutomation,
    SeceditSection,
    Status,
    Toggle,
    WinGpoAutomation,
)
from .regdata import RegistryData
from .verify.check import coerce_number, element_accepts

# Registry policy convention: this value name clears every value under its key.
DELVALS = "**delvals."


def _reg(config: str, key: str, name: str, data: RegistryData | None) -> RegistryAutomation:
    return RegistryAutomation(config=config, registry_key=key, value_name=name, action=data)


def _element_entries(config: str, el: SettingElement, value: PolicyValue) -> list[RegistryAutomation]:
    k = el.kind
    if isinstance(k, EnumKind):
        hit = k.find(str(value))
        if hit is None:
            raise ConsistencyError(f"{value} is not an item of element {el.element_id}")
        return [_reg(config, el.key, el.value_name, hit[1])]
    if isinstance(k, DecimalKind):
        return [_reg(config, el.key, el.value_name, k.encode(coerce_number(value)))]
    if isinstance(k, TextKind):
        return [_reg(config, el.key, el.value_name, RegistryData(k.value_type, str(value)))]
    if isinstance(k, BooleanKind):
        return [_reg(config, el.key, el.value_name, k.true_data if value.enabled else k.false_data)]
    if isinstance(k, ListKind):
        out = [_reg(config, el.key, DELVALS, None)]
        for i, item in enumerate(value.names, 1):
            if k.explicit_names:
                name, _, data = item.partition("=")
                out.append(_reg(config, el.key, name.strip(), RegistryData.sz(data.strip())))
            else:
                out.append(_reg(config, el.key, f"{k.value_prefix}{i}", RegistryData.sz(item)))
        return out
    raise ConsistencyError(f"element {el.element_id} has an unsupported kind")


def _disable(config: str, defn: SettingDefinition) -> list[RegistryAutomation]:
    out = []
    if defn.value_name:
        out.append(_reg(config, defn.key, defn.value_name, defn.disabled_data))
    for el in defn.elements:
        if isinstance(el.kind, ListKind):
            out.append(_reg(config, el.key, DELVALS, None))
        elif isinstance(el.kind, BooleanKind):
            out.append(_reg(config, el.key, el.value_name, el.kind.false_data))
        else:
            out.append(_reg(config, el.key, el.value_name, None))
    return out


def _enable(config: str, defn: SettingDefinition, subs: list[tuple[SettingElement, PolicyValue]]) -> list[RegistryAutomation]:
    out = []
    if defn.value_name and defn.enabled_data is not None:
        out.append(_reg(config, defn.key, defn.value_name, defn.enabled_data))
    for el, v in subs:
        out.extend(_element_entries(config, el, v))
    return out


def _lower_template(config: str, defn: SettingDefinition, value: PolicyValue) -> list[RegistryAutomation]:
    if isinstance(value, Toggle):
        return _enable(config, defn, []) if value.enabled else _disable(config, defn)
    if isinstance(value, Composite):
        if isinstance(value.main, Toggle) and not value.main.enabled:
            return _disable(config, defn)
        subs = []
        for label, sub in value.sub:
            el = defn.element(label)
            if el is None:
                raise ConsistencyError(f"{defn.ui_path}: no element labelled {label!r}")
            subs.append((el, sub))
        return _enable(config, defn, subs)
    fits = [el for el in defn.elements if element_accepts(el, value)]
    if len(fits) != 1:
        raise ConsistencyError(f"{defn.ui_path}: value {value} does not address exactly one element")
    return _enable(config, defn, [(fits[0], value)])


def _encoded(model: IntegerModel | EnumModel, value: PolicyValue) -> str:
    if isinstance(model, IntegerModel):
        return str(coerce_number(value))
    hit = model.find(str(value))
    if hit is None:
        raise ConsistencyError(f"{value} is not admissible")
    return hit[1]


def _audit_code(value: PolicyValue) -> int:
    if isinstance(value, AuditValue):
        return value.v.code
    setting = AuditSetting.lookup(str(value))
    if setting is None:
        raise ConsistencyError(f"{value} is not an audit setting")
    return setting.code


def lower_definition(defn: Definition, value: PolicyValue, config: str) -> list[LowLevelAutomation]:
    if isinstance(defn, SettingDefinition):
        return list(_lower_template(config, defn, value))
    if isinstance(defn, Privilege):
        names = value.names if isinstance(value, Principals) else ()
        return [SeceditAutomation(SeceditSection.PrivilegeRights, defn.constant, ",".join(names))]
    if isinstance(defn, SystemAccess):
        return [SeceditAutomation(SeceditSection.SystemAccess, defn.inf_key, _encoded(defn.value_model, value))]
    if isinstance(defn, RegistryValueInf):
        return [SeceditAutomation(SeceditSection.RegistryValues, defn.inf_path, _encoded(defn.value_model, value))]
    if isinstance(defn, AuditSubcategory):
        return [AuditAutomation(defn.name, defn.guid, _audit_code(value))]
    raise ConsistencyError(f"unknown definition type {type(defn).__name__}")


def lower_automation(catalog, auto: WinGpoAutomation) -> list[LowLevelAutomation]:
    if auto.verification_status is not Status.Checked:
        raise PreconditionError(f"{auto.ui_path}: only checked automations can be lowered")
    path = auto.policy_path
    defn = catalog.lookup(path) if path is not None else None
    if defn is None:
        raise ConsistencyError(f"{auto.ui_path}: no longer in the catalog")
    out = lower_definition(defn, auto.value, path.class_root.config)
    if not out:
        raise ConsistencyError(f"{auto.ui_path}: setting has nothing to write for {auto.value}")
    return out


def lower_guide(catalog, guide: Guide) -> tuple[Guide, list[str]]:
    """Attach low-level automations next to every checked policy automation.

    Existing low-level automations of those implementations are replaced, so
    lowering twice gives the same guide. Problems are collected per rule.
    """
    issues: list[str] = []
    rules = []
    for rule in guide.rules:
        impls = []
        for impl in rule.implementations:
            checked = [a for a in impl.automations
                       if isinstance(a, WinGpoAutomation) and a.verification_status is Status.Checked]
            if not checked:
                impls.append(impl)
                continue
            lowered: list[LowLevelAutomation] = []
            for a in checked:
                try:
                    lowered.extend(lower_automation(catalog, a))
                except (ConsistencyError, PreconditionError) as exc:
                    issues.append(f"{rule.id}: {exc}")
            kept = tuple(a for a in impl.automations if not isinstance(a, LOW_LEVEL_TYPES))
            impls.append(replace(impl, automations=kept + tuple(lowered)))
        rules.append(replace(rule, implementations=tuple(impls)))
    return replace(guide, rules=tuple(rules)), issues


__all__ = ["DELVALS", "lower_automation", "lower_definition", "lower_guide"]
