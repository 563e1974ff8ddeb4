"""Review report pairing each rule's prose with its automation."""

from __future__ import annotations

import csv
import html
import io

from ..guide.model import Guide, Rule

COLUMNS = ("id", "description", "ui_path", "value", "extraction_status", "verification_status",
           "error_class", "error_hint")
EXCERPT = 160


def _excerpt(text: str | None) -> str:
    text = " ".join((text or "").split())
    return text if len(text) <= EXCERPT else text[:EXCERPT - 3].rstrip() + "..."


def report_rows(guide: Guide) -> list[dict[str, str]]:
    return [_row(r) for r in guide.rules]


def _row(r: Rule) -> dict[str, str]:
    desc = r.implementations[0].description if r.implementations else ""
    autos = r.policy_automations()
    a = autos[0] if autos else None
    return {
        "id": r.id,
        "description": _excerpt(desc or r.description or r.rule_text),
        "ui_path": a.ui_path if a else "",
        "value": str(a.value) if a else "",
        "extraction_status": r.extraction_status.value,
        "verification_status": a.verification_status.value if a else "",
        "error_class": (a.error_class or "") if a else "",
        "error_hint": (a.error_hint or "") if a else "",
    }


def export_report_csv(guide: Guide) -> bytes:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\r\n")
    w.writeheader()
    w.writerows(report_rows(guide))
    return buf.getvalue().encode("utf-8")


def export_report_html(guide: Guide) -> bytes:
    esc = html.escape
    head = "".join(f"<th>{esc(c)}</th>" for c in COLUMNS)
    body = []
    for row in report_rows(guide):
        cls = "ok" if row["verification_status"] == "Checked" else "todo"
        cells = "".join(f"<td>{esc(row[c])}</td>" for c in COLUMNS)
        body.append(f'<tr class="{cls}">{cells}</tr>')
    doc = "\n".join([
        "<!DOCTYPE html>",
        '<html lang="en">',
        "<head>",
        '<meta charset="utf-8">',
        f"<title>{esc(guide.title or 'Guide')} review</title>",
        "<style>table{border-collapse:collapse}td,th{border:1px solid #999;padding:2px 6px;"
        "vertical-align:top}tr.todo{background:#fee}</style>",
        "</head>",
        "<body>",
        f"<h1>{esc(guide.title or 'Guide')}</h1>",
        f"<table>\n<tr>{head}</tr>",
        *body,
        "</table>",
        "</body>",
        "</html>",
    ])
    return (doc + "\n").encode("utf-8")


def export_report(guide: Guide) -> tuple[bytes, bytes]:
    """Return ``(csv, html)``."""
    return export_report_csv(guide), export_report_html(guide)
