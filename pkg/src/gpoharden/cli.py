"""Command line front end.

Every stage reads and rewrites files; summaries go to stdout as ``key=value``
lines. Exit status: 0 done, 1 something needs attention, 2 bad usage or input.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Callable, Sequence

from . import __version__, yamlio
from .catalog import compile_directory, load_catalog, save_catalog
from .errors import HardeningError
from .emit import (
    emit_audit_csv,
    emit_inf,
    emit_pol,
    export_plan,
    export_report_csv,
    export_report_html,
    load_plan,
    split_scopes,
)
from .guide import Guide, import_xccdf, parse_scapolite, serialize_scapolite
from .guide.codec import value_from_data
from .guide.model import (
    AuditAutomation,
    ExtractionStatus,
    Implementation,
    RegistryAutomation,
    SeceditAutomation,
    Status,
    WinGpoAutomation,
)
from .lower import lower_guide
from .mocksys import (
    apply_all,
    check_all,
    checkpoints_from_data,
    checkpoints_to_data,
    load_state,
    revert_all,
    save_state,
)
from .nlp import extract_guide, load_rules
from .verify import verify_guide

OK, ATTENTION, INPUT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


def _out(key: str, value) -> None:
    print(f"{key}={value}")


def _read(path: str | Path) -> bytes:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"no such file: {p}")
    return p.read_bytes()


def _write(path: str | Path, data: bytes) -> None:
    """Write only when the content changes, so reruns leave files untouched."""
    p = Path(path)
    if p.is_file() and p.read_bytes() == data:
        return
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_bytes(data)


def _load_guide(path: str) -> Guide:
    return parse_scapolite(_read(path))


def _save_guide(path: str, guide: Guide) -> None:
    _write(path, serialize_scapolite(guide).encode("utf-8"))


# -- stages -------------------------------------------------------------------


def cmd_catalog_build(args) -> int:
    admx = Path(args.admx)
    if not admx.is_dir():
        raise UsageError(f"no such directory: {admx}")
    warnings: list[str] = []
    catalog = compile_directory(admx, args.adml, args.legacy, warnings)
    _write(args.out, save_catalog(catalog))
    _out("definitions", len(catalog))
    _out("warnings", len(warnings))
    return OK


def cmd_guide_import(args) -> int:
    guide = import_xccdf(_read(args.xccdf))
    _save_guide(args.out, guide)
    _out("rules", len(guide.rules))
    return OK


def _fix_rule(rule, fix: dict, where: str):
    impls = rule.implementations or (Implementation(),)
    impl0 = impls[0]
    autos = list(impl0.automations)
    idx = next((i for i, a in enumerate(autos) if isinstance(a, WinGpoAutomation)), None)
    if idx is None:
        if "ui_path" not in fix or "value" not in fix:
            raise UsageError(f"{where}: rule {rule.id} has no automation; a fix needs ui_path and value")
        autos.insert(0, WinGpoAutomation(ui_path=str(fix["ui_path"]), value=value_from_data(fix["value"], where)))
        status = ExtractionStatus.ManuallyAuthored
    else:
        old = autos[idx]
        ui_path = str(fix.get("ui_path", old.ui_path))
        value = value_from_data(fix["value"], where) if "value" in fix else old.value
        if ui_path == old.ui_path and value == old.value and old.error_class is None:
            return rule, False
        autos[idx] = replace(old, ui_path=ui_path, value=value, verification_status=Status.Unchecked,
                             error_class=None, error_hint=None, candidates=None)
        status = rule.extraction_status
    impls = (replace(impl0, automations=tuple(autos)),) + tuple(impls[1:])
    return replace(rule, implementations=impls, extraction_status=status), True


def cmd_guide_fix(args) -> int:
    guide = _load_guide(args.guide)
    data = yamlio.load(_read(args.fixes), "fixes file")
    fixes = data.get("fixes") if isinstance(data, dict) else data
    if not isinstance(fixes, list):
        raise UsageError("fixes file needs a list under 'fixes'")
    by_id = {}
    for i, f in enumerate(fixes):
        if not isinstance(f, dict) or "rule" not in f:
            raise UsageError(f"fix #{i + 1} needs a 'rule' id")
        by_id[str(f["rule"])] = (f, f"fix #{i + 1}")
    unknown = sorted(set(by_id) - {r.id for r in guide.rules})
    if unknown:
        raise UsageError(f"fixes name unknown rules: {', '.join(unknown)}")
    changed = 0
    rules = []
    for r in guide.rules:
        if r.id in by_id:
            r, did = _fix_rule(r, *by_id[r.id])
            changed += did
        rules.append(r)
    _save_guide(args.guide, replace(guide, rules=tuple(rules)))
    _out("fixed", changed)
    return OK


def cmd_extract(args) -> int:
    guide = _load_guide(args.guide)
    rules = load_rules(args.rules) if args.rules else None
    guide = extract_guide(guide, rules, force=args.force)
    _save_guide(args.guide, guide)
    counts = {s: 0 for s in ExtractionStatus}
    for r in guide.rules:
        counts[r.extraction_status] += 1
    _out("rules", len(guide.rules))
    _out("extracted", counts[ExtractionStatus.Extracted])
    _out("not_extracted", counts[ExtractionStatus.NotExtracted])
    _out("ambiguous", counts[ExtractionStatus.Ambiguous])
    _out("manually_authored", counts[ExtractionStatus.ManuallyAuthored])
    return OK


def cmd_verify(args) -> int:
    if args.suggestions < 1:
        raise UsageError("--suggestions must be at least 1")
    catalog = load_catalog(_read(args.catalog))
    guide, report = verify_guide(catalog, _load_guide(args.guide), strict=args.strict, k=args.suggestions)
    _save_guide(args.guide, guide)
    for k, v in report.as_dict().items():
        _out(k, v)
    return ATTENTION if report.needs_attention else OK


def cmd_lower(args) -> int:
    catalog = load_catalog(_read(args.catalog))
    guide, issues = lower_guide(catalog, _load_guide(args.guide))
    _save_guide(args.guide, guide)
    for msg in issues:
        print(f"issue: {msg}", file=sys.stderr)
    _out("lowered_rules", sum(1 for r in guide.rules if r.low_level()))
    _out("low_level_automations", sum(len(r.low_level()) for r in guide.rules))
    _out("issues", len(issues))
    return ATTENTION if issues else OK


_POL_DIRS = {"Computer": "Machine", "User": "User"}


def cmd_export(args) -> int:
    guide = _load_guide(args.guide)
    out = Path(args.output)
    low = [a for r in guide.rules for a in r.low_level()]
    written: list[Path] = []

    def put(name: str, data: bytes) -> None:
        _write(out / name, data)
        written.append(out / name)

    kind = args.kind
    if kind == "plan":
        put("plan.json", export_plan(guide))
    elif kind == "pol":
        for config, entries in sorted(split_scopes(a for a in low if isinstance(a, RegistryAutomation)).items()):
            put(f"{_POL_DIRS[config]}/registry.pol", emit_pol(entries))
    elif kind == "inf":
        put("GptTmpl.inf", emit_inf(a for a in low if isinstance(a, SeceditAutomation)))
    elif kind == "audit":
        put("audit.csv", emit_audit_csv(a for a in low if isinstance(a, AuditAutomation)))
    elif kind == "report":
        put("report.csv", export_report_csv(guide))
        put("report.html", export_report_html(guide))
    for p in written:
        _out("wrote", p.as_posix())
    return OK


# -- simulator ----------------------------------------------------------------------


def _journal_path(args) -> Path:
    return Path(args.journal) if args.journal else Path(str(args.state) + ".journal")


def _print_stats(stats) -> None:
    _out("total", stats.total)
    _out("compliant", stats.compliant)
    _out("percentage", stats.percentage_text())
    _out("conflicts", len(stats.conflicts))


def cmd_sim_apply(args) -> int:
    plan = load_plan(_read(args.plan))
    state = load_state(_read(args.state))
    journal = _journal_path(args)
    previous = checkpoints_from_data(yamlio.load(journal.read_bytes(), "journal")) if journal.is_file() else []
    state, checkpoints, stats = apply_all(state, plan)
    # the earliest checkpoint of a rule holds the state before it was first applied
    known = {cp.rule_id for cp in previous}
    merged = previous + [cp for cp in checkpoints if cp.rule_id not in known]
    _write(args.state, save_state(state))
    _write(journal, yamlio.dump(checkpoints_to_data(merged)).encode("utf-8"))
    _print_stats(stats)
    return OK if stats.compliant == stats.total else ATTENTION


def cmd_sim_check(args) -> int:
    plan = load_plan(_read(args.plan))
    stats = check_all(load_state(_read(args.state)), plan)
    _print_stats(stats)
    return OK if stats.compliant == stats.total else ATTENTION


def cmd_sim_revert(args) -> int:
    state = load_state(_read(args.state))
    journal = _journal_path(args)
    if not journal.is_file():
        _out("reverted", 0)
        _out("state_hash", state.state_hash())
        return OK
    checkpoints = checkpoints_from_data(yamlio.load(journal.read_bytes(), "journal"))
    state = revert_all(state, checkpoints)
    _write(args.state, save_state(state))
    journal.unlink()
    _out("reverted", len(checkpoints))
    _out("state_hash", state.state_hash())
    return OK


# -- statistics ------------------------------------------------------------------------


def guide_stats(guide: Guide, manifest: dict | None = None) -> list[tuple[str, int]]:
    """Rule counts in the shape of an extraction/verification summary table."""
    total = len(guide.rules)
    extracted = first_ok = first_failed = corrected = automated = 0
    extracted_ids = set()
    for r in guide.rules:
        autos = r.policy_automations()
        if r.extraction_status in (ExtractionStatus.Extracted, ExtractionStatus.Ambiguous):
            extracted += 1
            extracted_ids.add(r.id)
        first = autos[0].first_verification if autos else None
        checked = any(a.verification_status is Status.Checked for a in autos)
        if first == "Checked":
            first_ok += 1
        elif first is not None:
            first_failed += 1
            corrected += checked
        automated += checked
    rows = [
        ("Rules", total),
        ("Configurations extracted", extracted),
        ("Rules without extracted values", total - extracted),
        ("First-time verified", first_ok),
        ("Not verified the first time", first_failed),
    ]
    if manifest is not None:
        automatable = {rid for rid, m in manifest.items() if m.get("automatable", True)}
        rows.append(("Non-automatable but extracted", len(extracted_ids - automatable)))
        rows.append(("Automatable but not extracted", len(automatable - extracted_ids)))
    rows.append(("Verified after manual correction", corrected))
    rows.append(("Automated rules", automated))
    return rows


def cmd_stats(args) -> int:
    guide = _load_guide(args.guide)
    manifest = None
    if args.manifest:
        data = yamlio.load(_read(args.manifest), "manifest")
        manifest = {str(r["id"]): r for r in (data.get("rules") if isinstance(data, dict) else data) or []}
    rows = guide_stats(guide, manifest)
    total = rows[0][1]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("category", "count", "percent"))
    for name, n in rows:
        w.writerow((name, n, f"{100.0 * n / total:.1f}" if total else "-"))
    sys.stdout.write(buf.getvalue())
    return OK


# -- parser ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gpoharden", description="Turn hardening guides into Windows policy artifacts.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    cat = sub.add_parser("catalog", help="settings catalog").add_subparsers(dest="action", required=True)
    b = cat.add_parser("build", help="compile ADMX/ADML files and legacy definitions")
    b.add_argument("--admx", required=True, help="directory with .admx files")
    b.add_argument("--adml", help="directory with .adml files (default: ADMX_DIR/en-US)")
    b.add_argument("--legacy", help="YAML file with privilege, security-option and audit definitions")
    b.add_argument("--out", required=True, help="catalog file to write")
    b.set_defaults(func=cmd_catalog_build)

    g = sub.add_parser("guide", help="guide files").add_subparsers(dest="action", required=True)
    gi = g.add_parser("import", help="convert an XCCDF benchmark into a guide file")
    gi.add_argument("xccdf")
    gi.add_argument("--out", required=True)
    gi.set_defaults(func=cmd_guide_import)
    gf = g.add_parser("fix", help="apply manual corrections to automations")
    gf.add_argument("guide")
    gf.add_argument("--fixes", required=True, help="YAML list of {rule, ui_path?, value?}")
    gf.set_defaults(func=cmd_guide_fix)

    e = sub.add_parser("extract", help="extract policy automations from the prose")
    e.add_argument("guide")
    e.add_argument("--rules", help="extraction rule file (default: bundled rules)")
    e.add_argument("--force", action="store_true", help="re-extract rules that were already processed")
    e.set_defaults(func=cmd_extract)

    v = sub.add_parser("verify", help="check automations against the catalog")
    v.add_argument("guide")
    v.add_argument("--catalog", required=True)
    v.add_argument("--strict", action="store_true", help="match display strings exactly")
    v.add_argument("--suggestions", type=int, default=3, metavar="K", help="similar paths to offer (default 3)")
    v.set_defaults(func=cmd_verify)

    lo = sub.add_parser("lower", help="add registry, template and audit automations")
    lo.add_argument("guide")
    lo.add_argument("--catalog", required=True)
    lo.set_defaults(func=cmd_lower)

    x = sub.add_parser("export", help="write deployable artifacts")
    x.add_argument("kind", choices=("plan", "pol", "inf", "audit", "report"))
    x.add_argument("guide")
    x.add_argument("--output", required=True, metavar="DIR")
    x.set_defaults(func=cmd_export)

    sim = sub.add_parser("sim", help="simulated host").add_subparsers(dest="action", required=True)
    for name, func, needs_plan in (("apply", cmd_sim_apply, True), ("check", cmd_sim_check, True),
                                   ("revert", cmd_sim_revert, False)):
        sp = sim.add_parser(name)
        sp.add_argument("--plan", required=needs_plan)
        sp.add_argument("--state", required=True, help="state snapshot file, updated in place")
        sp.add_argument("--journal", help="checkpoint journal (default: STATE.journal)")
        sp.set_defaults(func=func)

    st = sub.add_parser("stats", help="extraction and verification counts")
    st.add_argument("guide")
    st.add_argument("--manifest", help="YAML list of rules with an 'automatable' flag")
    st.set_defaults(func=cmd_stats)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(format="%(levelname)s: %(message)s", level=logging.WARNING)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return INPUT_ERROR if exc.code else OK
    func: Callable[[argparse.Namespace], int] = args.func
    try:
        return func(args)
    except (UsageError, HardeningError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
