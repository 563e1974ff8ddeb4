"""Reference implementations written independently of the package code.

They are deliberately naive: slow, but simple enough to check by eye.
"""

from __future__ import annotations

import functools


def levenshtein_memo(a: str, b: str) -> int:
    """Textbook recursive edit distance with memoization."""

    @functools.lru_cache(maxsize=None)
    def d(i: int, j: int) -> int:
        if i == 0:
            return j
        if j == 0:
            return i
        return min(
            d(i - 1, j) + 1,
            d(i, j - 1) + 1,
            d(i - 1, j - 1) + (a[i - 1] != b[j - 1]),
        )

    return d(len(a), len(b))


def _u16(text: str) -> bytes:
    out = bytearray()
    for ch in text:
        cp = ord(ch)
        assert cp < 0x10000, "oracle only handles the BMP"
        out += bytes((cp & 0xFF, cp >> 8))
    return bytes(out)


def _le32(n: int) -> bytes:
    return bytes((n & 0xFF, (n >> 8) & 0xFF, (n >> 16) & 0xFF, (n >> 24) & 0xFF))


def preg_dword_entry(key: str, name: str, value: int) -> bytes:
    """One ``[key;name;type;size;data]`` record holding a REG_DWORD."""
    return b"".join([
        _u16("["), _u16(key), b"\0\0", _u16(";"),
        _u16(name), b"\0\0", _u16(";"),
        _le32(4), _u16(";"),
        _le32(4), _u16(";"),
        _le32(value),
        _u16("]"),
    ])


PREG_HEADER = bytes([0x50, 0x52, 0x65, 0x67, 0x01, 0x00, 0x00, 0x00])

UAC_DWORD = ("SOFTWARE\\Microsoft\\Windows\\CurrentVersion\\Policies\\System", "LocalAccountTokenFilterPolicy", 0)

ONE_PRIVILEGE_INF_TEXT = (
    "[Unicode]\r\n"
    "Unicode=yes\r\n"
    "[Version]\r\n"
    'signature="$CHICAGO$"\r\n'
    "Revision=1\r\n"
    "[Privilege Rights]\r\n"
    "SeBackupPrivilege = Administrators\r\n"
)

AUDIT3_TEXT = (
    "Machine Name,Policy Target,Subcategory,Subcategory GUID,Inclusion Setting,Exclusion Setting,Setting Value\r\n"
    ",System,Audit Credential Validation,{0cce923f-69ae-11d9-bed3-505054503030},Success,,1\r\n"
    ",System,Audit Logon,{0cce9215-69ae-11d9-bed3-505054503030},Success and Failure,,3\r\n"
    ",System,Audit Account Lockout,{0cce9217-69ae-11d9-bed3-505054503030},Failure,,2\r\n"
)


def write_golden(directory) -> None:
    from pathlib import Path

    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    (d / "uac.pol").write_bytes(PREG_HEADER + preg_dword_entry(*UAC_DWORD))
    (d / "one_privilege.inf").write_bytes(b"\xff\xfe" + _u16(ONE_PRIVILEGE_INF_TEXT))
    (d / "audit3.csv").write_bytes(AUDIT3_TEXT.encode("ascii"))


if __name__ == "__main__":
    import sys

    write_golden(sys.argv[1])
