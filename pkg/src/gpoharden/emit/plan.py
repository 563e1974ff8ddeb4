"""The implementation plan: every lowered rule with its low-level automations, as JSON."""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from functools import lru_cache
from importlib import resources

import jsonschema

from ..errors import ParseError, SchemaError, VersionError
from ..guide.codec import automation_from_data, automation_to_data
from ..guide.model import Guide, LowLevelAutomation, Status

SCHEMA_VERSION = 1
log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PlanRule:
    rule_id: str
    ui_path: str
    value: str
    low_level: tuple[LowLevelAutomation, ...]


@dataclass(frozen=True)
class Plan:
    guide_title: str
    generated_at: str
    rules: tuple[PlanRule, ...] = ()

    def __post_init__(self) -> None:
        ids = [r.rule_id for r in self.rules]
        if len(set(ids)) != len(ids):
            raise SchemaError("plan rule ids must be unique")

    def rule(self, rule_id: str) -> PlanRule | None:
        return next((r for r in self.rules if r.rule_id == rule_id), None)


def timestamp() -> str:
    """Build time for artifacts: ``SOURCE_DATE_EPOCH`` if set, else the Unix epoch.

    A wall-clock default would make re-exports differ byte-wise.
    """
    raw = os.environ.get("SOURCE_DATE_EPOCH", "0")
    try:
        secs = int(raw)
    except ValueError:
        secs = 0
    return datetime.fromtimestamp(secs, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def build_plan(guide: Guide, generated_at: str | None = None) -> Plan:
    rules = []
    for r in guide.rules:
        low = tuple(r.low_level())
        if not low:
            continue
        checked = [a for a in r.policy_automations() if a.verification_status is Status.Checked]
        head = checked[0] if checked else None
        rules.append(PlanRule(
            rule_id=r.id,
            ui_path=head.ui_path if head else "",
            value=str(head.value) if head else "",
            low_level=low,
        ))
    if not rules:
        log.warning("guide %r has no lowered rules; writing an empty plan", guide.title)
    return Plan(guide.title, generated_at or timestamp(), tuple(rules))


def plan_to_data(plan: Plan) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "guide_title": plan.guide_title,
        "generated_at": plan.generated_at,
        "rules": [
            {
                "rule_id": r.rule_id,
                "ui_path": r.ui_path,
                "value": r.value,
                "low_level": [automation_to_data(a) for a in r.low_level],
            }
            for r in plan.rules
        ],
    }


def dump_plan(plan: Plan) -> bytes:
    return (json.dumps(plan_to_data(plan), indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def export_plan(guide: Guide, generated_at: str | None = None) -> bytes:
    return dump_plan(build_plan(guide, generated_at))


@lru_cache(maxsize=1)
def plan_schema() -> dict:
    return json.loads(resources.files("gpoharden.data").joinpath("plan.schema.json").read_text("utf-8"))


def load_plan(document: bytes | str) -> Plan:
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ParseError(f"plan is not JSON: {exc.msg}", f"line {exc.lineno}, column {exc.colno}") from None
    if isinstance(data, dict) and data.get("schema_version") != SCHEMA_VERSION:
        raise VersionError(f"plan schema_version {data.get('schema_version')!r}, expected {SCHEMA_VERSION}")
    try:
        jsonschema.validate(data, plan_schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "document"
        raise SchemaError(f"plan invalid at {where}: {exc.message}") from None
    rules = tuple(
        PlanRule(
            rule_id=r["rule_id"],
            ui_path=r["ui_path"],
            value=r["value"],
            low_level=tuple(automation_from_data(a, f"plan/{r['rule_id']}") for a in r["low_level"]),
        )
        for r in data["rules"]
    )
    return Plan(data["guide_title"], data["generated_at"], rules)
