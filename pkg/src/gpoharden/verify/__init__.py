"""Verification of extracted automations and similar-path suggestions."""

from .check import (
    CONFIGURE,
    OK,
    Outcome,
    VerificationOutcome,
    VerificationReport,
    apply_outcome,
    not_found_class,
    validate_value,
    verify_automation,
    verify_guide,
)
from .distance import levenshtein, score, suggest_paths, word_distance

__all__ = [
    "CONFIGURE", "OK", "Outcome", "VerificationOutcome", "VerificationReport", "apply_outcome",
    "levenshtein", "not_found_class", "score", "suggest_paths", "validate_value", "verify_automation",
    "verify_guide", "word_distance",
]
