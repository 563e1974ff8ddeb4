"""Tag-sequence extraction rules.

Patterns use the angle-bracket chunk syntax, extended with capture groups::

    <IN> {PATH:<.*>+} <TO> {MAIN_VALUE:<VBN|VBD|VB>} <.>

``<A|B>`` matches one token tagged A or B, ``<.*>`` any token, ``<.>`` the
sentence-final period, and a trailing ``+`` means one or more. ``{ROLE: ...}``
marks the enclosed steps as a capture; braces without a role only group.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Sequence

from .. import yamlio
from ..errors import SchemaError
from .tokens import TAGS, Token

ROLES = ("PATH", "MAIN_VALUE", "SUB_VALUE", "OPTION_NAME")


class Quantifier(str, enum.Enum):
    One = "One"
    OneOrMore = "OneOrMore"


@dataclass(frozen=True)
class Step:
    tags: frozenset[str] | None  # None is the wildcard
    quantifier: Quantifier = Quantifier.One
    capture: str | None = None

    def accepts(self, tag: str) -> bool:
        return self.tags is None or tag in self.tags


@dataclass(frozen=True)
class ExtractionRuleDef:
    name: str
    pattern: tuple[Step, ...]
    priority: int = 0
    source: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        roles = [s.capture for s in self.pattern]
        if "PATH" not in roles:
            raise SchemaError(f"extraction rule {self.name!r} captures no PATH")
        for role in set(r for r in roles if r):
            idx = [i for i, r in enumerate(roles) if r == role]
            if idx != list(range(idx[0], idx[-1] + 1)):
                raise SchemaError(f"extraction rule {self.name!r}: {role} capture is not contiguous")


_LEXEME_RE = re.compile(r"\s*(?:(<[^<>]*>\+?)|(\{)([A-Z_]+:)?|(\}))")


def parse_pattern(text: str) -> tuple[Step, ...]:
    steps: list[Step] = []
    role: str | None = None
    depth = 0
    role_depth = -1
    seen_roles: set[str] = set()
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _LEXEME_RE.match(text, pos)
        if not m or m.end() == pos:
            raise SchemaError(f"bad pattern syntax at offset {pos}: {text[pos:pos + 20]!r}")
        pos = m.end()
        atom, open_brace, role_label, close_brace = m.groups()
        if open_brace:
            depth += 1
            if role_label:
                if role is not None:
                    raise SchemaError("captures cannot nest")
                role = role_label[:-1]
                if role not in ROLES:
                    raise SchemaError(f"unknown capture role {role!r}")
                if role in seen_roles:
                    raise SchemaError(f"capture role {role} used twice")
                seen_roles.add(role)
                role_depth = depth
        elif close_brace:
            if depth == 0:
                raise SchemaError("unbalanced '}' in pattern")
            if depth == role_depth:
                role, role_depth = None, -1
            depth -= 1
        else:
            plus = atom.endswith("+")
            body = atom[1:-2] if plus else atom[1:-1]
            if body == ".*":
                tags = None
            else:
                names = [b.strip() for b in body.split("|")]
                unknown = [n for n in names if n not in TAGS]
                if unknown:
                    raise SchemaError(f"unknown tag(s) {unknown!r} in pattern")
                tags = frozenset(names)
            steps.append(Step(tags, Quantifier.OneOrMore if plus else Quantifier.One, role))
    if depth:
        raise SchemaError("unbalanced '{' in pattern")
    if not steps:
        raise SchemaError("empty pattern")
    return tuple(steps)


def make_rule(name: str, pattern: str, priority: int = 0) -> ExtractionRuleDef:
    return ExtractionRuleDef(name, parse_pattern(pattern), priority, pattern)


def load_rules(path: str | Path | None = None) -> list[ExtractionRuleDef]:
    """Read a rule file (default: the bundled one), sorted by priority."""
    if path is None:
        return list(_default_rules())
    return _rules_from_data(yamlio.load(Path(path).read_bytes(), "extraction rules"))


@lru_cache(maxsize=1)
def _default_rules() -> tuple[ExtractionRuleDef, ...]:
    text = resources.files("gpoharden.data").joinpath("rules.yaml").read_bytes()
    return tuple(_rules_from_data(yamlio.load(text, "extraction rules")))


def _rules_from_data(data) -> list[ExtractionRuleDef]:
    if isinstance(data, dict):
        data = data.get("rules")
    if not isinstance(data, list):
        raise SchemaError("extraction rule file needs a list of rules")
    out = []
    for i, r in enumerate(data):
        try:
            out.append(make_rule(str(r["name"]), str(r["pattern"]), int(r.get("priority", 0))))
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"extraction rule #{i + 1}: missing or bad field {exc}") from None
    names = [r.name for r in out]
    if len(set(names)) != len(names):
        raise SchemaError("extraction rule names must be unique")
    return sorted(out, key=lambda r: r.priority)


# -- matching ------------------------------------------------------------------


@dataclass(frozen=True)
class Match:
    rule: str
    start: int  # token index, inclusive
    end: int  # token index, exclusive
    spans: dict  # role -> (first token, last token + 1)


def _ends_from(steps: Sequence[Step], tokens: Sequence[Token], start: int) -> set[int]:
    """Simulate the pattern NFA from ``start``; return every accepting end."""
    # state k means "steps[:k] consumed"; after a OneOrMore step we may stay
    states = {0}
    ends: set[int] = set()
    pos = start
    while states and pos <= len(tokens):
        if len(steps) in states:
            ends.add(pos)
        if pos == len(tokens):
            break
        tag_ = tokens[pos].tag
        nxt: set[int] = set()
        for k in states:
            if k < len(steps) and steps[k].accepts(tag_):
                nxt.add(k + 1)
            if 0 < k and steps[k - 1].quantifier is Quantifier.OneOrMore and steps[k - 1].accepts(tag_):
                nxt.add(k)
        states = nxt
        pos += 1
    return ends


def _assign(steps: Sequence[Step], tokens: Sequence[Token], start: int, end: int) -> list[tuple[int, int]]:
    """Give each step a token range, letting earlier steps take as much as possible."""
    memo: dict[tuple[int, int], list | None] = {}

    def go(k: int, pos: int) -> list | None:
        if k == len(steps):
            return [] if pos == end else None
        key = (k, pos)
        if key in memo:
            return memo[key]
        result = None
        step = steps[k]
        limit = pos
        while limit < end and step.accepts(tokens[limit].tag):
            limit += 1
            if step.quantifier is Quantifier.One:
                break
        for stop in range(limit, pos, -1):
            rest = go(k + 1, stop)
            if rest is not None:
                result = [(pos, stop)] + rest
                break
        memo[key] = result
        return result

    out = go(0, start)
    assert out is not None
    return out


def match_rule(rule: ExtractionRuleDef, tokens: Sequence[Token]) -> Match | None:
    """Leftmost-longest match of one rule."""
    for start in range(len(tokens)):
        if not rule.pattern[0].accepts(tokens[start].tag):
            continue
        ends = _ends_from(rule.pattern, tokens, start)
        if ends:
            end = max(ends)
            ranges = _assign(rule.pattern, tokens, start, end)
            spans: dict[str, tuple[int, int]] = {}
            for step, (a, b) in zip(rule.pattern, ranges):
                if step.capture:
                    lo, hi = spans.get(step.capture, (a, b))
                    spans[step.capture] = (min(lo, a), max(hi, b))
            return Match(rule.name, start, end, spans)
    return None


# -- rule sets -----------------------------------------------------------------


@dataclass(frozen=True)
class ExtractionResult:
    matched_rule: str
    path_text: str
    main_value_text: str
    sub_value_text: str | None = None
    option_name_text: str | None = None
    trailing_list: tuple[str, ...] = ()


@dataclass(frozen=True)
class NoMatch:
    pass


@dataclass(frozen=True)
class Ambiguous:
    candidates: tuple[ExtractionResult, ...]


def _span_text(sentence: str | None, tokens: Sequence[Token], span: tuple[int, int] | None) -> str | None:
    if span is None:
        return None
    a, b = span
    if b - a == 1 and tokens[a].quoted:
        return tokens[a].text
    if sentence is None:  # tokens without source offsets
        return " ".join(t.text for t in tokens[a:b])
    return sentence[tokens[a].start:tokens[b - 1].end].strip()


def to_result(m: Match, sentence: str | None, tokens: Sequence[Token], trailing=()) -> ExtractionResult:
    return ExtractionResult(
        matched_rule=m.rule,
        path_text=_span_text(sentence, tokens, m.spans["PATH"]) or "",
        main_value_text=_span_text(sentence, tokens, m.spans.get("MAIN_VALUE")) or "",
        sub_value_text=_span_text(sentence, tokens, m.spans.get("SUB_VALUE")),
        option_name_text=_span_text(sentence, tokens, m.spans.get("OPTION_NAME")),
        trailing_list=tuple(trailing),
    )


def match_patterns(
    tokens: Sequence[Token],
    rules: Sequence[ExtractionRuleDef] | None = None,
    sentence: str | None = None,
    trailing: Sequence[str] = (),
) -> ExtractionResult | NoMatch | Ambiguous:
    """Try rules by ascending priority.

    Within one priority level the first rule in file order wins, unless the
    matching rules disagree on where the path is; then the sentence is
    reported as ambiguous instead of guessing.
    """
    if rules is None:
        rules = _default_rules()
    levels: dict[int, list[ExtractionRuleDef]] = {}
    for r in rules:
        levels.setdefault(r.priority, []).append(r)
    for prio in sorted(levels):
        hits = [m for m in (match_rule(r, tokens) for r in levels[prio]) if m is not None]
        if not hits:
            continue
        if len({m.spans["PATH"] for m in hits}) > 1:
            return Ambiguous(tuple(to_result(m, sentence, tokens, trailing) for m in hits))
        return to_result(hits[0], sentence, tokens, trailing)
    return NoMatch()
