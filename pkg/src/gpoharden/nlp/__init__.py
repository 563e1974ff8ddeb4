"""Rule-based extraction of policy settings from implementation prose."""

from ..paths import PolicyPath
from .extract import AMBIGUOUS, extract_guide, extract_rule, extract_text, split_sentences
from .patterns import (
    Ambiguous,
    ExtractionResult,
    ExtractionRuleDef,
    NoMatch,
    load_rules,
    make_rule,
    match_patterns,
    parse_pattern,
)
from .tokens import Lexicon, Token, default_lexicon, scan, tag, tokenize
from .values import parse_value_text


def normalize_path(path_text: str) -> PolicyPath:
    return PolicyPath.parse(path_text)


__all__ = [
    "AMBIGUOUS", "Ambiguous", "ExtractionResult", "ExtractionRuleDef", "Lexicon", "NoMatch", "Token",
    "default_lexicon", "extract_guide", "extract_rule", "extract_text", "load_rules", "make_rule",
    "match_patterns", "normalize_path", "parse_pattern", "parse_value_text", "scan", "split_sentences",
    "tag", "tokenize",
]
