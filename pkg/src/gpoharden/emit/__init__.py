"""Deployable artifacts built from a lowered guide."""

from .audit import emit_audit_csv, parse_audit_csv
from .inf import emit_inf, parse_inf
from .plan import Plan, PlanRule, build_plan, dump_plan, export_plan, load_plan, timestamp
from .pol import emit_pol, parse_pol, split_scopes
from .report import export_report, export_report_csv, export_report_html

__all__ = [
    "Plan", "PlanRule", "build_plan", "dump_plan", "emit_audit_csv", "emit_inf", "emit_pol",
    "export_plan", "export_report", "export_report_csv", "export_report_html", "load_plan",
    "parse_audit_csv", "parse_inf", "parse_pol", "split_scopes", "timestamp",
]
