"""Registry policy files (``registry.pol``, the PReg format).

Layout: ``PReg`` magic, a little-endian u32 version (1), then entries
``[key\\0;value\\0;type;size;data]`` where brackets, semicolons and strings
are UTF-16LE and ``type``/``size`` are raw little-endian u32. Deleting a
value is spelled as a REG_SZ entry named ``**del.<name>``; ``**delvals.``
clears the whole key.
"""

from __future__ import annotations

import struct
from typing import Iterable

from ..errors import FormatError, ScopeError
from ..guide.model import RegistryAutomation
from ..lower import DELVALS
from ..regdata import RegistryData, RegType

MAGIC = b"PReg"
VERSION = 1
HEADER = MAGIC + struct.pack("<I", VERSION)
DEL_PREFIX = "**del."
_DELETE_DATA = " "

_OPEN, _SEMI, _CLOSE = "[".encode("utf-16-le"), ";".encode("utf-16-le"), "]".encode("utf-16-le")
_NUL = b"\x00\x00"


def _cstr(s: str) -> bytes:
    if "\x00" in s:
        raise FormatError(f"string {s!r} contains NUL")
    return s.encode("utf-16-le") + _NUL


def encode_data(data: RegistryData) -> bytes:
    t, p = data.value_type, data.payload
    if t in (RegType.REG_SZ, RegType.REG_EXPAND_SZ):
        return _cstr(p)
    if t is RegType.REG_DWORD:
        return struct.pack("<I", p)
    if t is RegType.REG_QWORD:
        return struct.pack("<Q", p)
    if t is RegType.REG_MULTI_SZ:
        return b"".join(_cstr(s) for s in p) + _NUL
    return bytes(p)


def decode_data(t: RegType, raw: bytes, offset: int) -> RegistryData:
    try:
        if t in (RegType.REG_SZ, RegType.REG_EXPAND_SZ):
            text = raw.decode("utf-16-le")
            return RegistryData(t, text[:-1] if text.endswith("\x00") else text)
        if t is RegType.REG_DWORD:
            (n,) = struct.unpack("<I", raw)
            return RegistryData(t, n)
        if t is RegType.REG_QWORD:
            (n,) = struct.unpack("<Q", raw)
            return RegistryData(t, n)
        if t is RegType.REG_MULTI_SZ:
            text = raw.decode("utf-16-le")
            if text.endswith("\x00\x00"):
                text = text[:-2]
            elif text.endswith("\x00"):
                text = text[:-1]
            return RegistryData(t, tuple(text.split("\x00")) if text else ())
        return RegistryData(t, bytes(raw))
    except (UnicodeDecodeError, struct.error) as exc:
        raise FormatError(f"bad {t.value} data ({exc})", offset) from None


def sort_key(e: RegistryAutomation) -> tuple:
    # a key-wide wipe must precede the values written under the same key
    return (e.registry_key.casefold(), e.value_name != DELVALS, e.value_name.casefold())


def canonical(entries: Iterable[RegistryAutomation]) -> list[RegistryAutomation]:
    return sorted(entries, key=sort_key)


def _entry(e: RegistryAutomation) -> bytes:
    if e.action is None:
        name = e.value_name if e.value_name == DELVALS else DEL_PREFIX + e.value_name
        data = RegistryData.sz(_DELETE_DATA)
    else:
        name, data = e.value_name, e.action
    payload = encode_data(data)
    return b"".join((
        _OPEN, _cstr(e.registry_key), _SEMI, _cstr(name), _SEMI,
        struct.pack("<I", data.value_type.code), _SEMI,
        struct.pack("<I", len(payload)), _SEMI,
        payload, _CLOSE,
    ))


def emit_pol(entries: Iterable[RegistryAutomation]) -> bytes:
    entries = list(entries)
    scopes = {e.config for e in entries}
    if len(scopes) > 1:
        raise ScopeError(f"one registry.pol holds one scope, got {sorted(scopes)}")
    return HEADER + b"".join(_entry(e) for e in canonical(entries))


def split_scopes(entries: Iterable[RegistryAutomation]) -> dict[str, list[RegistryAutomation]]:
    out: dict[str, list[RegistryAutomation]] = {}
    for e in entries:
        out.setdefault(e.config, []).append(e)
    return out


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def expect(self, token: bytes, what: str) -> None:
        if self.data[self.pos:self.pos + 2] != token:
            if self.pos + 2 > len(self.data):
                raise FormatError(f"truncated entry, expected {what}", self.pos)
            raise FormatError(f"expected {what}", self.pos)
        self.pos += 2

    def cstr(self, what: str) -> str:
        start = self.pos
        while True:
            if self.pos + 2 > len(self.data):
                raise FormatError(f"truncated entry, unterminated {what}", start)
            if self.data[self.pos:self.pos + 2] == _NUL:
                break
            self.pos += 2
        try:
            text = self.data[start:self.pos].decode("utf-16-le")
        except UnicodeDecodeError:
            raise FormatError(f"{what} is not UTF-16LE", start) from None
        self.pos += 2
        return text

    def u32(self, what: str) -> int:
        if self.pos + 4 > len(self.data):
            raise FormatError(f"truncated entry, missing {what}", self.pos)
        (n,) = struct.unpack_from("<I", self.data, self.pos)
        self.pos += 4
        return n


def parse_pol(data: bytes, config: str = "Computer") -> list[RegistryAutomation]:
    if len(data) < 8 or data[:4] != MAGIC:
        raise FormatError("not a registry policy file (bad magic)", 0)
    (version,) = struct.unpack_from("<I", data, 4)
    if version != VERSION:
        raise FormatError(f"unsupported version {version}", 4)
    r = _Reader(data)
    r.pos = 8
    out = []
    while r.pos < len(data):
        start = r.pos
        r.expect(_OPEN, "'['")
        key = r.cstr("key")
        r.expect(_SEMI, "';' after key")
        name = r.cstr("value name")
        r.expect(_SEMI, "';' after value name")
        code_at = r.pos
        code = r.u32("type")
        r.expect(_SEMI, "';' after type")
        size_at = r.pos
        size = r.u32("size")
        r.expect(_SEMI, "';' after size")
        if r.pos + size > len(data):
            raise FormatError(f"data size {size} runs past end of file", size_at)
        raw = data[r.pos:r.pos + size]
        r.pos += size
        r.expect(_CLOSE, "']'")
        try:
            t = RegType.from_code(code)
        except ValueError:
            raise FormatError(f"unsupported type code {code}", code_at) from None
        if not key:
            raise FormatError("entry with empty key", start)
        if name == DELVALS:
            out.append(RegistryAutomation(config, key, name, None))
        elif name.startswith(DEL_PREFIX):
            out.append(RegistryAutomation(config, key, name[len(DEL_PREFIX):], None))
        else:
            out.append(RegistryAutomation(config, key, name, decode_data(t, raw, start)))
    return out
