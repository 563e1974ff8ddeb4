"""Tokenizer and lexicon tagger for schematic guide prose."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable

from .. import yamlio
from ..errors import SchemaError

TAGS = frozenset({"IN", "TO", "DT", "CC", "CD", "VB", "VBD", "VBN", "NN", "NNP", "NNS", "JJ",
                  ".", "(", ")", ":", "SYM"})

_OPEN_QUOTES = {'"': '"', "“": "”", "”": "”"}
_BREAK_BEFORE_WS = ".,;:"
_CD_RE = re.compile(r"^\d+(?:[.,]\d+)*$")


@dataclass(frozen=True)
class Token:
    text: str
    tag: str = ""
    start: int = 0
    end: int = 0
    quoted: bool = False

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("empty token")
        if self.tag and self.tag not in TAGS:
            raise ValueError(f"unknown tag {self.tag!r}")


def scan(sentence: str) -> list[Token]:
    """Split into untagged tokens carrying their source offsets.

    ``start:end`` always covers the token in ``sentence``; for quoted spans
    it includes the quote characters while ``text`` does not.
    """
    out: list[Token] = []
    i, n = 0, len(sentence)

    def at_break(j: int) -> bool:
        return j + 1 >= n or sentence[j + 1].isspace()

    while i < n:
        c = sentence[i]
        if c.isspace():
            i += 1
            continue
        if c in _OPEN_QUOTES:
            close = sentence.find(_OPEN_QUOTES[c], i + 1)
            if c == '"' and close < 0:
                close = sentence.find("”", i + 1)
            if close > i + 1 and sentence[i + 1:close].strip():
                out.append(Token(sentence[i + 1:close].strip(), start=i, end=close + 1, quoted=True))
                i = close + 1
                continue
            i += 1  # stray quote
            continue
        if sentence.startswith(">>", i):
            out.append(Token(">>", start=i, end=i + 2))
            i += 2
            continue
        if c in "()":
            out.append(Token(c, start=i, end=i + 1))
            i += 1
            continue
        if c in _BREAK_BEFORE_WS and at_break(i):
            out.append(Token(c, start=i, end=i + 1))
            i += 1
            continue
        j = i
        while j < n:
            ch = sentence[j]
            if ch.isspace() or ch in "()" or ch in _OPEN_QUOTES or sentence.startswith(">>", j):
                break
            if ch in _BREAK_BEFORE_WS and at_break(j):
                break
            j += 1
        if j == i:  # lone punctuation that is not a break point
            j = i + 1
        out.append(Token(sentence[i:j], start=i, end=j))
        i = j
    return out


def tokenize(sentence: str) -> list[str]:
    return [t.text for t in scan(sentence)]


@dataclass(frozen=True)
class Lexicon:
    words: dict
    sentence_initial: dict
    after_to: dict
    suffixes: tuple[tuple[str, str], ...]

    @classmethod
    def from_data(cls, data: dict) -> Lexicon:
        if not isinstance(data, dict):
            raise SchemaError("lexicon must be a mapping")
        words = dict(data.get("words") or {})
        initial = dict(data.get("sentence_initial") or {})
        after_to = dict(data.get("after_to") or {})
        suffixes = tuple((str(s), str(t)) for s, t in data.get("suffixes") or [])
        for table in (words, initial, after_to, dict(suffixes)):
            bad = [t for t in table.values() if t not in TAGS]
            if bad:
                raise SchemaError(f"lexicon uses unknown tags {bad!r}")
        return cls(words, initial, after_to, suffixes)

    @classmethod
    def load(cls, path: str | Path | None = None) -> Lexicon:
        if path is None:
            return default_lexicon()
        return cls.from_data(yamlio.load(Path(path).read_bytes(), "lexicon"))


@lru_cache(maxsize=1)
def default_lexicon() -> Lexicon:
    text = resources.files("gpoharden.data").joinpath("lexicon.yaml").read_bytes()
    return Lexicon.from_data(yamlio.load(text, "lexicon"))


def _tag_one(tok: Token, index: int, prev: Token | None, lex: Lexicon) -> str:
    t = tok.text
    if t == ">>":
        return "SYM"
    if t in ("(", ")"):
        return t
    if t == "." and not tok.quoted:
        return "."
    if t in ",;:" and not tok.quoted:
        return ":"
    if _CD_RE.match(t):
        return "CD"
    if prev is not None and prev.tag == "TO" and t in lex.after_to:
        return lex.after_to[t]
    if index == 0 and t in lex.sentence_initial:
        return lex.sentence_initial[t]
    if t in lex.words:
        return lex.words[t]
    if index == 0 and t.lower() in lex.words:
        return lex.words[t.lower()]
    first = t[0]
    if first.isupper():
        return "NNP"
    if first.isalpha() or first.isdigit():
        low = t.lower()
        for suffix, tag in lex.suffixes:
            if low.endswith(suffix) and len(low) > len(suffix):
                return tag
        return "NN"
    return "SYM"


def tag(tokens: Iterable[Token | str], lexicon: Lexicon | None = None) -> list[Token]:
    """Attach a POS tag to every token; plain strings are accepted too."""
    lex = lexicon or default_lexicon()
    out: list[Token] = []
    for i, tok in enumerate(tokens):
        if isinstance(tok, str):
            tok = Token(tok)
        prev = out[-1] if out else None
        out.append(Token(tok.text, _tag_one(tok, i, prev, lex), tok.start, tok.end, tok.quoted))
    return out
