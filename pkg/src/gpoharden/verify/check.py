"""Check extracted automations against the settings catalog."""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Any

from ..catalog.model import (
    AUDIT_DISPLAY,
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
from ..guide.codec import MAIN_SETTING
from ..guide.model import (
    AuditSetting,
    AuditValue,
    Choice,
    Composite,
    Guide,
    Number,
    PolicyValue,
    Principals,
    Rule,
    Status,
    Text,
    Toggle,
    WinGpoAutomation,
)
from ..nlp.extract import AMBIGUOUS
from .distance import suggest_paths

CONFIGURE = "CONFIGURE"

HINT_NOT_FOUND = (
    "No setting has this path. {n} similar path(s) are listed under candidates; "
    "if one of them is the intended setting, put it into ui_path."
)
HINT_NOT_FOUND_NONE = "No setting has this path and no similar path was found; correct ui_path by hand."
HINT_VALUE = "The value is not admissible here. Replace value with one of the candidates."
HINT_SUB = (
    "The setting has sub-settings that need a value. Pick one entry per key in candidates "
    "and write them into value, with the main state under main_setting."
)
HINT_NOT_AUTOMATABLE = "The setting has parts that cannot be written automatically; apply it by hand."


class Outcome(str, enum.Enum):
    Checked = "Checked"
    PathNotFound = "PathNotFound"
    ValueInvalid = "ValueInvalid"
    Underspecified = "Underspecified"


@dataclass(frozen=True)
class VerificationOutcome:
    status: Outcome
    error_class: str | None = None
    error_hint: str | None = None
    candidates: Any = None

    def __post_init__(self) -> None:
        has_error = any(x is not None for x in (self.error_class, self.error_hint, self.candidates))
        if (self.status is Outcome.Checked) == has_error:
            raise ValueError("a Checked outcome carries no error fields, and only it")

    @property
    def ok(self) -> bool:
        return self.status is Outcome.Checked


OK = VerificationOutcome(Outcome.Checked)


def _invalid(candidates: list) -> VerificationOutcome:
    return VerificationOutcome(Outcome.ValueInvalid, CONFIGURE, HINT_VALUE, list(candidates))


# -- per-element values ----------------------------------------------------------


def element_accepts(el: SettingElement, value: PolicyValue, strict: bool = False) -> bool:
    k = el.kind
    if isinstance(k, EnumKind):
        return isinstance(value, Choice) and k.find(value.display, strict) is not None
    if isinstance(k, DecimalKind):
        n = coerce_number(value)
        return n is not None and k.min <= n <= k.max
    if isinstance(k, TextKind):
        s = value.s if isinstance(value, Text) else value.display if isinstance(value, Choice) else None
        return s is not None and len(s) <= k.max_length
    if isinstance(k, BooleanKind):
        return isinstance(value, Toggle)
    if isinstance(k, ListKind):
        return isinstance(value, Principals)
    return False


def coerce_number(value: PolicyValue) -> int | None:
    if isinstance(value, Number):
        return value.n
    if isinstance(value, (Choice, Text)):
        s = str(value).strip()
        if s.isdigit():
            return int(s)
    return None


def element_candidates(el: SettingElement) -> Any:
    k = el.kind
    if isinstance(k, EnumKind):
        return k.displays
    if isinstance(k, DecimalKind):
        return [f"{k.min}..{k.max}"]
    if isinstance(k, BooleanKind):
        return ["Disabled", "Enabled"]
    if isinstance(k, TextKind):
        return [f"text, at most {k.max_length} characters"]
    return ["list of entries"]


def _label(el: SettingElement) -> str:
    return " ".join(el.display_label.split()).rstrip(":").strip()


def _underspecified(defn: SettingDefinition, missing: list[SettingElement]) -> VerificationOutcome:
    cands: dict[str, Any] = {MAIN_SETTING: ["Disabled", "Enabled"]}
    for el in missing:
        cands[_label(el)] = element_candidates(el)
    return VerificationOutcome(Outcome.Underspecified, CONFIGURE, HINT_SUB, cands)


def _single_element(defn: SettingDefinition, value: PolicyValue, strict: bool) -> SettingElement | None:
    """The one element a bare (non-toggle) value can address."""
    hits = [el for el in defn.elements if element_accepts(el, value, strict)]
    return hits[0] if len(hits) == 1 else None


def _validate_template(defn: SettingDefinition, value: PolicyValue, strict: bool) -> VerificationOutcome:
    if defn.non_automatable:
        return VerificationOutcome(Outcome.Underspecified, CONFIGURE, HINT_NOT_AUTOMATABLE,
                                   {MAIN_SETTING: ["Disabled", "Enabled"]})
    required = [el for el in defn.elements if el.required]
    if isinstance(value, Toggle):
        if defn.enabled_data is None and defn.disabled_data is None and not defn.elements:
            return _invalid([])
        if value.enabled and required:
            return _underspecified(defn, required)
        return OK
    if isinstance(value, Composite):
        main = value.main
        if isinstance(main, Choice):
            return _invalid(["Disabled", "Enabled"])
        if not main.enabled:
            return OK
        given: dict[str, SettingElement] = {}
        for label, sub in value.sub:
            el = defn.element(label)
            if el is None:
                return VerificationOutcome(
                    Outcome.Underspecified, CONFIGURE, HINT_SUB,
                    {MAIN_SETTING: ["Disabled", "Enabled"], **{_label(e): element_candidates(e) for e in defn.elements}},
                )
            if not element_accepts(el, sub, strict):
                return _invalid(element_candidates(el))
            given[el.element_id] = el
        missing = [el for el in required if el.element_id not in given]
        return _underspecified(defn, missing) if missing else OK
    # a bare value addresses the only element it fits
    if _single_element(defn, value, strict) is not None:
        others = [el for el in required if not element_accepts(el, value, strict)]
        return _underspecified(defn, others) if others else OK
    admissible: list[str] = ["Enabled", "Disabled"]
    for el in defn.elements:
        c = element_candidates(el)
        admissible.extend(x for x in c if x not in admissible)
    return _invalid(admissible)


def _validate_legacy(defn: Definition, value: PolicyValue, strict: bool) -> VerificationOutcome:
    if isinstance(defn, Privilege):
        return OK if isinstance(value, Principals) else _invalid(["list of accounts or groups"])
    if isinstance(defn, SystemAccess):
        model = defn.value_model
        if isinstance(model, IntegerModel):
            n = coerce_number(value)
            return OK if n is not None and model.min <= n <= model.max else _invalid([f"{model.min}..{model.max}"])
        return _validate_enum_model(model, value, strict)
    if isinstance(defn, RegistryValueInf):
        return _validate_enum_model(defn.value_model, value, strict)
    if isinstance(defn, AuditSubcategory):
        setting = value.v if isinstance(value, AuditValue) else (
            AuditSetting.lookup(value.display) if isinstance(value, Choice) else None)
        if setting is not None and setting.value in defn.value_model:
            return OK
        return _invalid([AUDIT_DISPLAY[v] for v in defn.value_model])
    raise TypeError(f"unknown definition type {type(defn).__name__}")


def _validate_enum_model(model: EnumModel, value: PolicyValue, strict: bool) -> VerificationOutcome:
    if isinstance(value, (Toggle, Choice, Text)) and model.find(str(value), strict) is not None:
        return OK
    return _invalid(model.displays)


def validate_value(defn: Definition, value: PolicyValue, strict: bool = False) -> VerificationOutcome:
    """Is ``value`` admissible for ``defn``? Returns ``OK`` or the failure outcome."""
    if isinstance(defn, SettingDefinition):
        return _validate_template(defn, value, strict)
    return _validate_legacy(defn, value, strict)


def not_found_class(leaf: str) -> str:
    return f'NOT_FOUND policy name "{"".join(leaf.split()).casefold()}"'


def verify_automation(catalog, auto: WinGpoAutomation, strict: bool = False, k: int = 3) -> VerificationOutcome:
    path = auto.policy_path
    defn = catalog.lookup(path) if path is not None else None
    if defn is None:
        leaf = path.leaf if path is not None else auto.ui_path.split("\\")[-1]
        cands = suggest_paths(catalog, path if path is not None else auto.ui_path, k)
        hint = HINT_NOT_FOUND.format(n=len(cands)) if cands else HINT_NOT_FOUND_NONE
        return VerificationOutcome(Outcome.PathNotFound, not_found_class(leaf), hint, cands)
    return validate_value(defn, auto.value, strict)


# -- guide level -------------------------------------------------------------------


@dataclass(frozen=True)
class VerificationReport:
    checked: int = 0
    path_not_found: int = 0
    value_invalid: int = 0
    underspecified: int = 0
    ambiguous: int = 0

    @property
    def flagged(self) -> int:
        return self.path_not_found + self.value_invalid + self.underspecified

    @property
    def needs_attention(self) -> bool:
        return bool(self.flagged or self.ambiguous)

    def as_dict(self) -> dict[str, int]:
        return {
            "checked": self.checked,
            "path_not_found": self.path_not_found,
            "value_invalid": self.value_invalid,
            "underspecified": self.underspecified,
            "ambiguous": self.ambiguous,
        }


_COUNTER = {
    Outcome.Checked: "checked",
    Outcome.PathNotFound: "path_not_found",
    Outcome.ValueInvalid: "value_invalid",
    Outcome.Underspecified: "underspecified",
}


def _is_ambiguous(auto: WinGpoAutomation) -> bool:
    return auto.error_class == AMBIGUOUS


def apply_outcome(auto: WinGpoAutomation, outcome: VerificationOutcome) -> WinGpoAutomation:
    first = auto.first_verification or outcome.status.value
    if outcome.ok:
        return replace(auto, verification_status=Status.Checked, error_class=None, error_hint=None,
                       candidates=None, first_verification=first)
    return replace(auto, verification_status=Status.Unchecked, error_class=outcome.error_class,
                   error_hint=outcome.error_hint, candidates=outcome.candidates, first_verification=first)


def verify_guide(catalog, guide: Guide, strict: bool = False, k: int = 3) -> tuple[Guide, VerificationReport]:
    """Verify every unchecked automation.

    Checked automations are counted but not re-examined, so running this on
    its own output changes nothing. Ambiguous extractions are counted apart
    and left for a human to resolve.
    """
    counts = dict.fromkeys(VerificationReport.__dataclass_fields__, 0)
    rules: list[Rule] = []
    for rule in guide.rules:
        impls = []
        for impl in rule.implementations:
            autos = []
            for a in impl.automations:
                if isinstance(a, WinGpoAutomation):
                    if a.verification_status is Status.Checked:
                        counts["checked"] += 1
                    elif _is_ambiguous(a):
                        counts["ambiguous"] += 1
                        if a.first_verification is None:
                            a = replace(a, first_verification="Ambiguous")
                    else:
                        outcome = verify_automation(catalog, a, strict, k)
                        counts[_COUNTER[outcome.status]] += 1
                        a = apply_outcome(a, outcome)
                autos.append(a)
            impls.append(replace(impl, automations=tuple(autos)))
        rules.append(replace(rule, implementations=tuple(impls)))
    return replace(guide, rules=tuple(rules)), VerificationReport(**counts)
