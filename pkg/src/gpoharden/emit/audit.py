"""Advanced audit policy files (``audit.csv``)."""

from __future__ import annotations

import csv
import io
from typing import Iterable

from ..errors import FormatError
from ..guide.model import AuditAutomation, AuditSetting

HEADER = ("Machine Name", "Policy Target", "Subcategory", "Subcategory GUID",
          "Inclusion Setting", "Exclusion Setting", "Setting Value")


def emit_audit_csv(entries: Iterable[AuditAutomation]) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(HEADER)
    for e in entries:
        w.writerow(("", "System", e.subcategory, e.guid,
                    AuditSetting.from_code(e.setting_value).display, "", e.setting_value))
    return buf.getvalue().encode("utf-8")


def parse_audit_csv(data: bytes) -> list[AuditAutomation]:
    rows = list(csv.reader(io.StringIO(data.decode("utf-8-sig"), newline="")))
    if not rows or tuple(rows[0]) != HEADER:
        raise FormatError("audit.csv header row missing or different", 0)
    out = []
    for n, row in enumerate(rows[1:], 2):
        if len(row) != len(HEADER):
            raise FormatError(f"row {n} has {len(row)} fields, expected {len(HEADER)}")
        try:
            out.append(AuditAutomation(row[2], row[3], int(row[6])))
        except ValueError:
            raise FormatError(f"row {n}: setting value {row[6]!r} is not a number") from None
    return out
