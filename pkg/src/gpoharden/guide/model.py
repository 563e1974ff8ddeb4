"""In-memory form of a hardening guide.

Every class here is a frozen dataclass; pipeline stages build new values with
:func:`dataclasses.replace` instead of mutating.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Union

from ..errors import NormalizeError, SchemaError
from ..paths import PolicyPath
from ..regdata import RegistryData

WIN_GPO = "org.scapolite.implementation.win_gpo"
WINDOWS_REGISTRY = "org.scapolite.implementation.windows_registry"
WINDOWS_SECEDIT = "org.scapolite.implementation.windows_secedit"
WINDOWS_AUDITPOL = "org.scapolite.implementation.windows_auditpol"


# -- values ------------------------------------------------------------------


@dataclass(frozen=True)
class Toggle:
    enabled: bool

    def __str__(self) -> str:
        return "Enabled" if self.enabled else "Disabled"


@dataclass(frozen=True)
class Number:
    n: int

    def __str__(self) -> str:
        return str(self.n)


@dataclass(frozen=True)
class Choice:
    display: str

    def __str__(self) -> str:
        return self.display


@dataclass(frozen=True)
class Text:
    s: str

    def __str__(self) -> str:
        return self.s


@dataclass(frozen=True)
class Principals:
    names: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not isinstance(self.names, tuple):
            object.__setattr__(self, "names", tuple(self.names))

    def __str__(self) -> str:
        return ", ".join(self.names) if self.names else "(no one)"


class AuditSetting(str, enum.Enum):
    NoAuditing = "NoAuditing"
    Success = "Success"
    Failure = "Failure"
    SuccessAndFailure = "SuccessAndFailure"

    @property
    def code(self) -> int:
        return list(AuditSetting).index(self)

    @property
    def display(self) -> str:
        return {
            "NoAuditing": "No Auditing",
            "SuccessAndFailure": "Success and Failure",
        }.get(self.value, self.value)

    @classmethod
    def from_code(cls, code: int) -> AuditSetting:
        return list(cls)[code]

    @classmethod
    def lookup(cls, text: str) -> AuditSetting | None:
        key = "".join(text.split()).casefold()
        for a in cls:
            if key == a.value.casefold():
                return a
        return None


@dataclass(frozen=True)
class AuditValue:
    v: AuditSetting

    def __str__(self) -> str:
        return self.v.display


@dataclass(frozen=True)
class Composite:
    main: Union[Toggle, Choice]
    sub: tuple[tuple[str, "PolicyValue"], ...] = ()

    def __post_init__(self) -> None:
        if not isinstance(self.main, (Toggle, Choice)):
            raise SchemaError(f"composite main value must be a toggle or choice, got {self.main!r}")
        if isinstance(self.sub, dict):
            object.__setattr__(self, "sub", tuple(self.sub.items()))
        labels = [label for label, _ in self.sub]
        if len(set(labels)) != len(labels):
            raise SchemaError(f"duplicate sub-setting labels in {labels!r}")

    def __str__(self) -> str:
        parts = [str(self.main)] + [f"{label}={value}" for label, value in self.sub]
        return "; ".join(parts)


PolicyValue = Union[Toggle, Number, Choice, Text, Principals, AuditValue, Composite]


# -- automations ---------------------------------------------------------------


class Status(str, enum.Enum):
    Checked = "Checked"
    Unchecked = "Unchecked"


@dataclass(frozen=True)
class WinGpoAutomation:
    ui_path: str
    value: PolicyValue
    verification_status: Status = Status.Unchecked
    error_class: str | None = None
    error_hint: str | None = None
    candidates: Any = None
    # outcome of the first verification run, kept for the statistics report
    first_verification: str | None = None
    extra: dict = field(default_factory=dict)

    system = WIN_GPO

    def __post_init__(self) -> None:
        if self.verification_status is Status.Checked and (
            self.error_class is not None or self.error_hint is not None or self.candidates is not None
        ):
            raise SchemaError(f"checked automation for {self.ui_path!r} carries error fields")

    @property
    def policy_path(self) -> PolicyPath | None:
        try:
            return PolicyPath.parse(self.ui_path)
        except NormalizeError:
            return None


@dataclass(frozen=True)
class RegistryAutomation:
    config: str
    registry_key: str
    value_name: str
    action: RegistryData | None  # None means delete

    system = WINDOWS_REGISTRY

    def __post_init__(self) -> None:
        if self.config not in ("Computer", "User"):
            raise SchemaError(f"registry automation config must be Computer or User, got {self.config!r}")
        if not self.registry_key:
            raise SchemaError("registry automation without a key")

    @property
    def is_delete(self) -> bool:
        return self.action is None


class SeceditSection(str, enum.Enum):
    SystemAccess = "System Access"
    PrivilegeRights = "Privilege Rights"
    RegistryValues = "Registry Values"


@dataclass(frozen=True)
class SeceditAutomation:
    section: SeceditSection
    key: str
    value: str

    system = WINDOWS_SECEDIT


@dataclass(frozen=True)
class AuditAutomation:
    subcategory: str
    guid: str
    setting_value: int

    system = WINDOWS_AUDITPOL

    def __post_init__(self) -> None:
        if self.setting_value not in (0, 1, 2, 3):
            raise SchemaError(f"audit setting_value must be 0..3, got {self.setting_value!r}")


@dataclass(frozen=True)
class OpaqueAutomation:
    """An automation for a system this package does not interpret."""

    data: dict

    @property
    def system(self) -> str:
        return str(self.data.get("system", ""))


LowLevelAutomation = Union[RegistryAutomation, SeceditAutomation, AuditAutomation]
LOW_LEVEL_TYPES = (RegistryAutomation, SeceditAutomation, AuditAutomation)
Automation = Union[WinGpoAutomation, RegistryAutomation, SeceditAutomation, AuditAutomation, OpaqueAutomation]


# -- rules and guides ----------------------------------------------------------


class ExtractionStatus(str, enum.Enum):
    NotAttempted = "NotAttempted"
    Extracted = "Extracted"
    NotExtracted = "NotExtracted"
    Ambiguous = "Ambiguous"
    ManuallyAuthored = "ManuallyAuthored"


@dataclass(frozen=True)
class Implementation:
    description: str = ""
    automations: tuple[Automation, ...] = ()
    extra: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not isinstance(self.automations, tuple):
            object.__setattr__(self, "automations", tuple(self.automations))

    @property
    def policy_automations(self) -> list[WinGpoAutomation]:
        return [a for a in self.automations if isinstance(a, WinGpoAutomation)]

    @property
    def low_level(self) -> list[LowLevelAutomation]:
        return [a for a in self.automations if isinstance(a, LOW_LEVEL_TYPES)]


@dataclass(frozen=True)
class Rule:
    id: str
    rule_text: str
    description: str | None = None
    implementations: tuple[Implementation, ...] = ()
    extraction_status: ExtractionStatus = ExtractionStatus.NotAttempted
    extra: dict = field(default_factory=dict)
    # extra keys whose text lives in Markdown sections of the guide file
    prose_pointers: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        if not self.id:
            raise SchemaError("rule without an id")
        if not self.rule_text or not self.rule_text.strip():
            raise SchemaError(f"rule {self.id!r} has empty rule text")
        if not isinstance(self.implementations, tuple):
            object.__setattr__(self, "implementations", tuple(self.implementations))

    def policy_automations(self) -> list[WinGpoAutomation]:
        return [a for impl in self.implementations for a in impl.policy_automations]

    def low_level(self) -> list[LowLevelAutomation]:
        return [a for impl in self.implementations for a in impl.low_level]


class GuideSource(str, enum.Enum):
    Scapolite = "Scapolite"
    XCCDF = "XCCDF"


@dataclass(frozen=True)
class Guide:
    title: str = ""
    source: GuideSource = GuideSource.Scapolite
    rules: tuple[Rule, ...] = ()
    extra: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not isinstance(self.rules, tuple):
            object.__setattr__(self, "rules", tuple(self.rules))
        seen: set[str] = set()
        for r in self.rules:
            if r.id in seen:
                raise SchemaError(f"duplicate rule id {r.id!r}")
            seen.add(r.id)

    def rule(self, ident: str) -> Rule | None:
        for r in self.rules:
            if r.id == ident:
                return r
        return None
