"""An in-memory stand-in for a Windows host: apply, check and revert plan rules.

The state has four stores matching the three artifact kinds: registry values
(written by policy files and by security-template registry entries),
privilege assignments and system-access values (security template), and
audit subcategory settings.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

from . import yamlio
from .errors import ParseError, SchemaError, VersionError
from .guide.model import (
    AuditAutomation,
    LowLevelAutomation,
    RegistryAutomation,
    SeceditAutomation,
    SeceditSection,
)
from .lower import DELVALS
from .regdata import RegistryData, RegType

STATE_VERSION = 1
HIVES = {"Computer": "HKEY_LOCAL_MACHINE", "User": "HKEY_CURRENT_USER"}
_INF_HIVES = {"MACHINE": "HKEY_LOCAL_MACHINE", "USER": "HKEY_CURRENT_USER"}
_INF_TYPES = {1: RegType.REG_SZ, 2: RegType.REG_EXPAND_SZ, 3: RegType.REG_BINARY, 4: RegType.REG_DWORD,
              7: RegType.REG_MULTI_SZ}


class _Absent:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "Absent"

    def __reduce__(self):
        return (_Absent, ())


Absent = _Absent()


@dataclass(frozen=True)
class RegValue:
    key: str
    name: str
    data: RegistryData


# store name, then the case-folded address inside that store
Location = tuple


def reg_location(hive: str, key: str, name: str) -> Location:
    return ("registry", hive, key.casefold(), name.casefold())


@dataclass
class MachineState:
    registry: dict = field(default_factory=dict)  # Location -> RegValue
    privileges: dict = field(default_factory=dict)  # constant -> tuple of principals
    system_access: dict = field(default_factory=dict)  # key -> str
    audit: dict = field(default_factory=dict)  # guid (lower case) -> 0..3

    def copy(self) -> MachineState:
        return MachineState(dict(self.registry), dict(self.privileges), dict(self.system_access), dict(self.audit))

    def get(self, loc: Location):
        store, *addr = loc
        if store == "registry":
            return self.registry.get(loc, Absent)
        table = getattr(self, store)
        return table.get(addr[0], Absent)

    def put(self, loc: Location, value) -> None:
        store, *addr = loc
        table = self.registry if store == "registry" else getattr(self, store)
        k = loc if store == "registry" else addr[0]
        if value is Absent:
            table.pop(k, None)
        else:
            table[k] = value

    def values_under(self, hive: str, key: str) -> list[Location]:
        kf = key.casefold()
        return sorted(loc for loc in self.registry if loc[1] == hive and loc[2] == kf)

    def canonical(self) -> dict:
        return {
            "registry": sorted(
                [loc[1], v.key, v.name, v.data.to_text()] for loc, v in self.registry.items()
            ),
            "privileges": {k: list(v) for k, v in sorted(self.privileges.items())},
            "system_access": dict(sorted(self.system_access.items())),
            "audit": dict(sorted(self.audit.items())),
        }

    def state_hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, ensure_ascii=False, separators=(",", ":"))
        return "sha256:" + hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MachineState):
            return NotImplemented
        return self.canonical() == other.canonical()


# -- low-level automation -> (location, expected value) -------------------------


@dataclass(frozen=True)
class WipeKey:
    """``**delvals.``: every value under the key goes away."""

    hive: str
    key: str


Write = Union[tuple, WipeKey]  # (Location, value or Absent)


def _inf_registry(path: str, raw: str) -> tuple[Location, RegValue]:
    head, _, rest = path.partition("\\")
    hive = _INF_HIVES.get(head.upper())
    key, _, name = rest.rpartition("\\")
    if hive is None or not key or not name:
        raise SchemaError(f"registry value path {path!r} needs MACHINE\\ or USER\\, a key and a name")
    code, _, text = raw.partition(",")
    try:
        t = _INF_TYPES[int(code)]
    except (KeyError, ValueError):
        raise SchemaError(f"registry value {path!r}: unsupported type in {raw!r}") from None
    if t is RegType.REG_DWORD:
        data = RegistryData.dword(int(text))
    elif t is RegType.REG_MULTI_SZ:
        data = RegistryData(t, tuple(text.split(",")) if text else ())
    elif t is RegType.REG_BINARY:
        data = RegistryData(t, bytes.fromhex(text))
    else:
        data = RegistryData(t, text.strip('"'))
    return reg_location(hive, key, name), RegValue(key, name, data)


def writes_of(a: LowLevelAutomation) -> list[Write]:
    if isinstance(a, RegistryAutomation):
        hive = HIVES[a.config]
        if a.value_name == DELVALS and a.action is None:
            return [WipeKey(hive, a.registry_key)]
        loc = reg_location(hive, a.registry_key, a.value_name)
        return [(loc, Absent if a.action is None else RegValue(a.registry_key, a.value_name, a.action))]
    if isinstance(a, SeceditAutomation):
        if a.section is SeceditSection.PrivilegeRights:
            names = tuple(n.strip() for n in a.value.split(",") if n.strip())
            return [(("privileges", a.key), names)]
        if a.section is SeceditSection.SystemAccess:
            return [(("system_access", a.key), a.value.strip())]
        return [_inf_registry(a.key, a.value)]
    if isinstance(a, AuditAutomation):
        return [(("audit", a.guid.lower()), a.setting_value)]
    raise SchemaError(f"cannot simulate {type(a).__name__}")


def _same(loc: Location, expected, actual) -> bool:
    if loc[0] == "registry" and expected is not Absent and actual is not Absent:
        return expected.data == actual.data
    return expected == actual


# -- rules ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Checkpoint:
    rule_id: str
    prior: tuple = ()  # (Location, previous value or Absent), one per location

    def __post_init__(self) -> None:
        locs = [loc for loc, _ in self.prior]
        if len(set(locs)) != len(locs):
            raise SchemaError("checkpoint lists a location twice")


@dataclass(frozen=True)
class ComplianceResult:
    rule_id: str
    compliant: bool
    mismatches: tuple = ()  # (Location, expected, actual or Absent)


@dataclass(frozen=True)
class Stats:
    total: int = 0
    compliant: int = 0
    conflicts: tuple = ()  # (Location, rule ids)

    @property
    def percentage(self) -> float | None:
        return None if self.total == 0 else 100.0 * self.compliant / self.total

    def percentage_text(self) -> str:
        p = self.percentage
        return "-" if p is None else f"{p:.1f}%"


def _automations(rule) -> Sequence[LowLevelAutomation]:
    return getattr(rule, "low_level", rule)


def _rule_id(rule) -> str:
    return getattr(rule, "rule_id", "")


def apply_rule(state: MachineState, rule) -> tuple[MachineState, Checkpoint]:
    """Write every automation of one plan rule; the input state is not modified.

    The rule is applied as a unit: if any automation cannot be simulated,
    nothing is written.
    """
    new = state.copy()
    prior: dict[Location, object] = {}

    def touch(loc: Location) -> None:
        if loc not in prior:
            prior[loc] = new.get(loc)

    for a in _automations(rule):
        for w in writes_of(a):
            if isinstance(w, WipeKey):
                for loc in new.values_under(w.hive, w.key):
                    touch(loc)
                    new.put(loc, Absent)
                continue
            loc, value = w
            touch(loc)
            new.put(loc, value)
    return new, Checkpoint(_rule_id(rule), tuple(prior.items()))


def revert_rule(state: MachineState, checkpoint: Checkpoint) -> MachineState:
    new = state.copy()
    for loc, value in checkpoint.prior:
        new.put(loc, value)
    return new


def check_rule(state: MachineState, rule) -> ComplianceResult:
    mismatches = []
    expected: dict[Location, object] = {}
    wiped: list[WipeKey] = []
    for a in _automations(rule):
        for w in writes_of(a):
            if isinstance(w, WipeKey):
                wiped.append(w)
                # values written before the wipe are gone
                for loc in [l for l in expected if l[0] == "registry" and l[1] == w.hive and l[2] == w.key.casefold()]:
                    expected[loc] = Absent
            else:
                expected[w[0]] = w[1]
    for loc, want in expected.items():
        have = state.get(loc)
        if not _same(loc, want, have):
            mismatches.append((loc, want, have))
    for w in wiped:
        for loc in state.values_under(w.hive, w.key):
            if loc not in expected:
                mismatches.append((loc, Absent, state.get(loc)))
    return ComplianceResult(_rule_id(rule), not mismatches, tuple(mismatches))


def plan_conflicts(rules: Iterable) -> tuple:
    """Locations that two rules set to different values (the later one wins)."""
    seen: dict[Location, tuple[object, str]] = {}
    out: dict[Location, list[str]] = {}
    for rule in rules:
        for a in _automations(rule):
            for w in writes_of(a):
                if isinstance(w, WipeKey):
                    continue
                loc, value = w
                if loc in seen and not _same(loc, seen[loc][0], value):
                    ids = out.setdefault(loc, [seen[loc][1]])
                    if _rule_id(rule) not in ids:
                        ids.append(_rule_id(rule))
                seen[loc] = (value, _rule_id(rule))
    return tuple((loc, tuple(ids)) for loc, ids in out.items())


def _rules(plan) -> Sequence:
    return getattr(plan, "rules", plan)


def check_all(state: MachineState, plan) -> Stats:
    rules = _rules(plan)
    ok = sum(1 for r in rules if check_rule(state, r).compliant)
    return Stats(len(rules), ok, plan_conflicts(rules))


def apply_all(state: MachineState, plan) -> tuple[MachineState, list[Checkpoint], Stats]:
    checkpoints = []
    for r in _rules(plan):
        state, cp = apply_rule(state, r)
        checkpoints.append(cp)
    return state, checkpoints, check_all(state, plan)


def revert_all(state: MachineState, checkpoints: Sequence[Checkpoint]) -> MachineState:
    """Undo in reverse order of application."""
    for cp in reversed(checkpoints):
        state = revert_rule(state, cp)
    return state


# -- persistence ------------------------------------------------------------------------


def state_to_data(state: MachineState) -> dict:
    return {
        "schema_version": STATE_VERSION,
        "registry": [
            {"hive": loc[1], "key": v.key, "name": v.name, "data": v.data.to_text()}
            for loc, v in sorted(state.registry.items())
        ],
        "privileges": {k: list(v) for k, v in sorted(state.privileges.items())},
        "system_access": dict(sorted(state.system_access.items())),
        "audit": dict(sorted(state.audit.items())),
    }


def state_from_data(data) -> MachineState:
    if not isinstance(data, dict) or data.get("schema_version") != STATE_VERSION:
        got = data.get("schema_version") if isinstance(data, dict) else None
        raise VersionError(f"state snapshot version {got!r}, expected {STATE_VERSION}")
    try:
        s = MachineState()
        for e in data.get("registry") or []:
            hive = str(e["hive"])
            if hive not in HIVES.values():
                raise SchemaError(f"unknown hive {hive!r}")
            key, name = str(e["key"]), str(e.get("name") or "")
            if not key:
                raise SchemaError("registry entry with empty key")
            s.registry[reg_location(hive, key, name)] = RegValue(key, name, RegistryData.from_text(str(e["data"])))
        for k, v in (data.get("privileges") or {}).items():
            s.privileges[str(k)] = tuple(str(x) for x in (v or []))
        for k, v in (data.get("system_access") or {}).items():
            s.system_access[str(k)] = str(v)
        for k, v in (data.get("audit") or {}).items():
            if int(v) not in (0, 1, 2, 3):
                raise SchemaError(f"audit value {v!r} outside 0..3")
            s.audit[str(k).lower()] = int(v)
    except (KeyError, TypeError, ValueError, AttributeError, SchemaError, ParseError) as exc:
        raise VersionError(f"state snapshot does not match schema version {STATE_VERSION}: {exc}") from None
    return s


def save_state(state: MachineState) -> bytes:
    return yamlio.dump(state_to_data(state)).encode("utf-8")


def load_state(document: bytes | str) -> MachineState:
    try:
        data = yamlio.load(document, "state snapshot")
    except ParseError as exc:
        raise VersionError(f"unreadable state snapshot: {exc}") from None
    return state_from_data(data)


# -- checkpoint journal for the command line ------------------------------------------


def _value_to_data(loc: Location, value):
    if value is Absent:
        return None
    if loc[0] == "registry":
        return {"key": value.key, "name": value.name, "data": value.data.to_text()}
    if loc[0] == "privileges":
        return list(value)
    return value


def _value_from_data(loc: Location, raw):
    if raw is None:
        return Absent
    if loc[0] == "registry":
        return RegValue(raw["key"], raw["name"], RegistryData.from_text(raw["data"]))
    if loc[0] == "privileges":
        return tuple(raw)
    return raw


def checkpoints_to_data(checkpoints: Sequence[Checkpoint]) -> dict:
    return {
        "schema_version": STATE_VERSION,
        "checkpoints": [
            {"rule_id": cp.rule_id,
             "prior": [{"location": list(loc), "value": _value_to_data(loc, v)} for loc, v in cp.prior]}
            for cp in checkpoints
        ],
    }


def checkpoints_from_data(data) -> list[Checkpoint]:
    if not isinstance(data, dict) or data.get("schema_version") != STATE_VERSION:
        raise VersionError("checkpoint journal has an unexpected version")
    try:
        out = []
        for cp in data.get("checkpoints") or []:
            prior = []
            for p in cp["prior"]:
                loc = tuple(p["location"])
                prior.append((loc, _value_from_data(loc, p["value"])))
            out.append(Checkpoint(str(cp["rule_id"]), tuple(prior)))
        return out
    except (KeyError, TypeError, ValueError, ParseError) as exc:
        raise VersionError(f"checkpoint journal is malformed: {exc}") from None
