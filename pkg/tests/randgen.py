"""Seeded generators for the fixed-count acceptance properties.

Hypothesis decides its own example count, so criteria that name an exact
number of cases draw them here from ``random.Random`` instead.
"""

from __future__ import annotations

import random

from gpoharden.emit import PlanRule
from gpoharden.guide import AuditAutomation, RegistryAutomation, SeceditAutomation, SeceditSection
from gpoharden.lower import DELVALS
from gpoharden.mocksys import MachineState, RegValue, reg_location
from gpoharden.regdata import RegistryData, RegType

_ALPHABET = "abcdeXYZ \\.-_é∆日"
KEYS = ["Software\\Policies\\A", "software\\policies\\a\\B", "SYSTEM\\C", "System\\c\\D"]
NAMES = ["Enable", "enable", "Level", "Size", ""]
PRIVS = ["SeBackupPrivilege", "SeTcbPrivilege", "SeAuditPrivilege"]
ACCOUNTS = ["Administrators", "Users", "Guests", "LOCAL SERVICE"]
GUIDS = ["{0cce9215-69ae-11d9-bed3-505054503030}", "{0cce923f-69ae-11d9-bed3-505054503030}"]


def text(rng: random.Random, lo: int = 0, hi: int = 12) -> str:
    return "".join(rng.choice(_ALPHABET) for _ in range(rng.randint(lo, hi)))


def string_pair(rng: random.Random) -> tuple[str, str]:
    return text(rng), text(rng)


def reg_data(rng: random.Random) -> RegistryData:
    kind = rng.randrange(6)
    if kind == 0:
        return RegistryData.dword(rng.randrange(2**32))
    if kind == 1:
        return RegistryData(RegType.REG_QWORD, rng.randrange(2**64))
    if kind == 2:
        return RegistryData.sz(text(rng))
    if kind == 3:
        return RegistryData(RegType.REG_EXPAND_SZ, text(rng))
    if kind == 4:
        return RegistryData(RegType.REG_BINARY, rng.randbytes(rng.randint(0, 12)))
    items = tuple(text(rng) for _ in range(rng.randint(0, 4)))
    if items == ("",):
        items = ()
    return RegistryData(RegType.REG_MULTI_SZ, items)


def pol_entry_set(rng: random.Random, config: str = "Computer") -> list[RegistryAutomation]:
    out, seen = [], set()
    for _ in range(rng.randint(0, 15)):
        key = "\\".join(text(rng, 1, 6).replace("\\", "/") for _ in range(rng.randint(1, 4)))
        r = rng.random()
        if r < 0.1:
            name, action = DELVALS, None
        else:
            name = text(rng, 0, 10).lstrip("*")
            action = None if r < 0.25 else reg_data(rng)
        ident = (key.casefold(), name.casefold())
        if ident in seen:
            continue
        seen.add(ident)
        out.append(RegistryAutomation(config, key, name, action))
    return out


def machine_state(rng: random.Random) -> MachineState:
    s = MachineState()
    for _ in range(rng.randint(0, 8)):
        key, name = rng.choice(KEYS), rng.choice(NAMES)
        s.put(reg_location("HKEY_LOCAL_MACHINE", key, name), RegValue(key, name, reg_data(rng)))
    for p in rng.sample(PRIVS, rng.randint(0, len(PRIVS))):
        s.put(("privileges", p), tuple(rng.sample(ACCOUNTS, rng.randint(0, 3))))
    if rng.random() < 0.5:
        s.put(("system_access", "MinimumPasswordLength"), str(rng.randint(0, 14)))
    for g in rng.sample(GUIDS, rng.randint(0, len(GUIDS))):
        s.put(("audit", g), rng.randint(0, 3))
    return s


def low_level(rng: random.Random):
    kind = rng.randrange(6)
    if kind == 0:
        return RegistryAutomation("Computer", rng.choice(KEYS), rng.choice(NAMES), reg_data(rng))
    if kind == 1:
        return RegistryAutomation("Computer", rng.choice(KEYS), rng.choice(NAMES), None)
    if kind == 2:
        return RegistryAutomation("Computer", rng.choice(KEYS), DELVALS, None)
    if kind == 3:
        names = rng.sample(ACCOUNTS, rng.randint(0, 3))
        return SeceditAutomation(SeceditSection.PrivilegeRights, rng.choice(PRIVS), ",".join(names))
    if kind == 4:
        return SeceditAutomation(SeceditSection.SystemAccess, "MinimumPasswordLength", str(rng.randint(0, 14)))
    return AuditAutomation("Audit Logon", rng.choice(GUIDS), rng.randint(0, 3))


def plan_rule(rng: random.Random, rule_id: str = "R") -> PlanRule:
    return PlanRule(rule_id, "path", "value", tuple(low_level(rng) for _ in range(rng.randint(1, 5))))
