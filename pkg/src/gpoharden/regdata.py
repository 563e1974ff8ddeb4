"""Typed registry values and their one-line text form (``DWORD:0``)."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Union

from .errors import ParseError, SchemaError


class RegType(str, enum.Enum):
    REG_SZ = "REG_SZ"
    REG_EXPAND_SZ = "REG_EXPAND_SZ"
    REG_BINARY = "REG_BINARY"
    REG_DWORD = "REG_DWORD"
    REG_MULTI_SZ = "REG_MULTI_SZ"
    REG_QWORD = "REG_QWORD"

    @property
    def code(self) -> int:
        return _TYPE_CODES[self]

    @property
    def short(self) -> str:
        return self.value[4:]

    @classmethod
    def from_code(cls, code: int) -> RegType:
        for t, c in _TYPE_CODES.items():
            if c == code:
                return t
        raise ValueError(f"unsupported registry type code {code}")

    @classmethod
    def parse(cls, text: str) -> RegType:
        name = text.strip().upper()
        if not name.startswith("REG_"):
            name = "REG_" + name
        try:
            return cls(name)
        except ValueError:
            raise SchemaError(f"unknown registry value type {text!r}") from None


_TYPE_CODES = {
    RegType.REG_SZ: 1,
    RegType.REG_EXPAND_SZ: 2,
    RegType.REG_BINARY: 3,
    RegType.REG_DWORD: 4,
    RegType.REG_MULTI_SZ: 7,
    RegType.REG_QWORD: 11,
}

Payload = Union[int, str, tuple, bytes]


@dataclass(frozen=True)
class RegistryData:
    value_type: RegType
    payload: Payload

    def __post_init__(self) -> None:
        t, p = self.value_type, self.payload
        if t is RegType.REG_DWORD:
            ok = isinstance(p, int) and not isinstance(p, bool) and 0 <= p < 2**32
        elif t is RegType.REG_QWORD:
            ok = isinstance(p, int) and not isinstance(p, bool) and 0 <= p < 2**64
        elif t in (RegType.REG_SZ, RegType.REG_EXPAND_SZ):
            ok = isinstance(p, str)
        elif t is RegType.REG_MULTI_SZ:
            if isinstance(p, list):
                object.__setattr__(self, "payload", tuple(p))
                p = self.payload
            ok = isinstance(p, tuple) and all(isinstance(s, str) for s in p)
        else:
            ok = isinstance(p, (bytes, bytearray))
            if ok and isinstance(p, bytearray):
                object.__setattr__(self, "payload", bytes(p))
        if not ok:
            raise SchemaError(f"payload {p!r} does not fit {t.value}")

    @classmethod
    def dword(cls, n: int) -> RegistryData:
        return cls(RegType.REG_DWORD, n)

    @classmethod
    def sz(cls, s: str) -> RegistryData:
        return cls(RegType.REG_SZ, s)

    def to_text(self) -> str:
        t, p = self.value_type, self.payload
        if t in (RegType.REG_DWORD, RegType.REG_QWORD):
            body = str(p)
        elif t is RegType.REG_MULTI_SZ:
            body = json.dumps(list(p), ensure_ascii=False)
        elif t is RegType.REG_BINARY:
            body = p.hex()
        else:
            body = p
        return f"{t.short}:{body}"

    @classmethod
    def from_text(cls, text: str) -> RegistryData:
        head, sep, body = text.partition(":")
        if not sep:
            raise ParseError(f"registry data must look like TYPE:VALUE, got {text!r}")
        t = RegType.parse(head)
        try:
            if t in (RegType.REG_DWORD, RegType.REG_QWORD):
                payload: Payload = int(body.strip(), 0)
            elif t is RegType.REG_MULTI_SZ:
                items = json.loads(body)
                if not isinstance(items, list):
                    raise ValueError("not a list")
                payload = tuple(items)
            elif t is RegType.REG_BINARY:
                payload = bytes.fromhex(body)
            else:
                payload = body
        except ValueError as exc:
            raise ParseError(f"bad {t.value} payload {body!r}: {exc}") from None
        return cls(t, payload)

    def __str__(self) -> str:
        return self.to_text()
