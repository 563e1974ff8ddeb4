"""Guide-level extraction: description text in, unchecked policy automations out."""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Iterator, Sequence

from ..errors import NormalizeError, ValueParseError
from ..guide.model import (
    Choice,
    ExtractionStatus,
    Guide,
    Implementation,
    Rule,
    WinGpoAutomation,
)
from ..paths import PolicyPath
from .patterns import Ambiguous, ExtractionResult, ExtractionRuleDef, NoMatch, load_rules, match_patterns
from .tokens import Lexicon, Token, scan, tag
from .values import parse_value_text

_BULLET_RE = re.compile(r"^\s*[-*•]\s+(.*\S)\s*$")
AMBIGUOUS = "AMBIGUOUS"


@dataclass(frozen=True)
class Sentence:
    text: str
    tokens: tuple[Token, ...]
    trailing: tuple[str, ...] = ()


def _sentences_of(paragraph: str, lexicon: Lexicon | None) -> list[Sentence]:
    tokens = scan(paragraph)
    out: list[Sentence] = []
    chunk: list[Token] = []
    for tok in tokens + [None]:
        if tok is not None:
            chunk.append(tok)
            if not (tok.text == "." and not tok.quoted):
                continue
        if chunk:
            base = chunk[0].start
            text = paragraph[base:chunk[-1].end]
            shifted = [Token(t.text, "", t.start - base, t.end - base, t.quoted) for t in chunk]
            out.append(Sentence(text, tuple(tag(shifted, lexicon))))
            chunk = []
    return out


def split_sentences(description: str, lexicon: Lexicon | None = None) -> list[Sentence]:
    """Split prose into tagged sentences.

    Consecutive non-bullet lines form one paragraph. List items attach to the
    last sentence before them as its trailing list: bullet lines always, and
    bare lines without a final period once a line has ended in a colon.
    """
    sentences: list[Sentence] = []
    para: list[str] = []
    listing = False

    def flush() -> None:
        if para:
            sentences.extend(_sentences_of(" ".join(para), lexicon))
            para.clear()

    def attach(item: str) -> None:
        if sentences:
            last = sentences[-1]
            sentences[-1] = replace(last, trailing=last.trailing + (item,))

    for line in description.splitlines():
        text = line.strip()
        bullet = _BULLET_RE.match(line)
        if bullet:
            flush()
            attach(bullet.group(1))
        elif not text:
            flush()
        elif listing and not para and not text.endswith("."):
            attach(text)
        else:
            listing = False
            para.append(text)
            if text.endswith(":"):
                flush()
                listing = True
    flush()
    return sentences


def extract_text(
    description: str,
    rules: Sequence[ExtractionRuleDef] | None = None,
    lexicon: Lexicon | None = None,
) -> ExtractionResult | Ambiguous | NoMatch:
    """First sentence that matches (or is ambiguous) decides."""
    for s in split_sentences(description, lexicon):
        result = match_patterns(s.tokens, rules, s.text, s.trailing)
        if not isinstance(result, NoMatch):
            return result
    return NoMatch()


def _automation(result: ExtractionResult) -> WinGpoAutomation:
    """Raises NormalizeError or ValueParseError when the capture is unusable."""
    path = PolicyPath.parse(result.path_text)
    value = parse_value_text(
        result.main_value_text, result.sub_value_text, result.option_name_text, result.trailing_list
    )
    return WinGpoAutomation(ui_path=path.normalized, value=value)


def _ambiguous_automation(amb: Ambiguous) -> WinGpoAutomation | None:
    paths: list[str] = []
    chosen = None
    for cand in amb.candidates:
        try:
            path = PolicyPath.parse(cand.path_text).normalized
        except NormalizeError:
            continue
        if path not in paths:
            paths.append(path)
        if chosen is None:
            try:
                chosen = _automation(cand)
            except ValueParseError:
                pass
    if not paths:
        return None
    if chosen is None:
        first = next(c for c in amb.candidates if c.path_text)
        chosen = WinGpoAutomation(ui_path=paths[0], value=Choice(first.main_value_text))
    names = ", ".join(c.matched_rule for c in amb.candidates)
    return replace(
        chosen,
        error_class=AMBIGUOUS,
        error_hint=f"extraction rules {names} read this sentence differently; pick the intended path",
        candidates=paths,
    )


def _with_automation(rule: Rule, auto: WinGpoAutomation | None, status: ExtractionStatus) -> Rule:
    impl0, rest = rule.implementations[0], rule.implementations[1:]
    kept = tuple(a for a in impl0.automations if not isinstance(a, WinGpoAutomation))
    if auto is not None:
        kept = (auto,) + kept
    return replace(rule, implementations=(replace(impl0, automations=kept),) + rest, extraction_status=status)


def extract_rule(
    rule: Rule,
    rules: Sequence[ExtractionRuleDef] | None = None,
    lexicon: Lexicon | None = None,
) -> Rule:
    if not rule.implementations or not rule.implementations[0].description:
        if not rule.implementations:
            rule = replace(rule, implementations=(Implementation(),))
        return _with_automation(rule, None, ExtractionStatus.NotExtracted)
    result = extract_text(rule.implementations[0].description, rules, lexicon)
    if isinstance(result, NoMatch):
        return _with_automation(rule, None, ExtractionStatus.NotExtracted)
    if isinstance(result, Ambiguous):
        auto = _ambiguous_automation(result)
        if auto is None:
            return _with_automation(rule, None, ExtractionStatus.NotExtracted)
        return _with_automation(rule, auto, ExtractionStatus.Ambiguous)
    try:
        auto = _automation(result)
    except (NormalizeError, ValueParseError):
        return _with_automation(rule, None, ExtractionStatus.NotExtracted)
    return _with_automation(rule, auto, ExtractionStatus.Extracted)


def _todo(rule: Rule, force: bool) -> bool:
    if force:
        return rule.extraction_status is not ExtractionStatus.ManuallyAuthored
    return rule.extraction_status is ExtractionStatus.NotAttempted


def extract_guide(
    guide: Guide,
    rules: Sequence[ExtractionRuleDef] | None = None,
    lexicon: Lexicon | None = None,
    force: bool = False,
) -> Guide:
    """Extract every rule not yet attempted; already processed rules pass through.

    With ``force`` all rules except manually authored ones are re-extracted.
    """
    ruleset = list(rules) if rules is not None else load_rules()
    new = tuple(extract_rule(r, ruleset, lexicon) if _todo(r, force) else r for r in guide.rules)
    return replace(guide, rules=new)


def iter_results(guide: Guide, rules=None, lexicon=None) -> Iterator[tuple[str, object]]:
    """Raw per-rule matcher output, for diagnostics and tests."""
    for r in guide.rules:
        desc = r.implementations[0].description if r.implementations else ""
        yield r.id, extract_text(desc, rules, lexicon) if desc else NoMatch()


__all__ = [
    "AMBIGUOUS", "Sentence", "extract_guide", "extract_rule", "extract_text", "iter_results",
    "split_sentences",
]
