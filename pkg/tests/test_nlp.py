import pytest
from hypothesis import given, strategies as st

from gpoharden.errors import ValueParseError
from gpoharden.guide import (
    AuditSetting,
    AuditValue,
    Choice,
    Composite,
    ExtractionStatus,
    Number,
    Principals,
    Rule,
    Implementation,
    Toggle,
)
from gpoharden.nlp import (
    Ambiguous,
    ExtractionResult,
    NoMatch,
    extract_rule,
    extract_text,
    load_rules,
    make_rule,
    match_patterns,
    parse_pattern,
    parse_value_text,
    split_sentences,
    tag,
    tokenize,
)

SMB = ("Configure the policy value for Computer Configuration >> Administrative Templates >> "
       "MS Security Guide >> Configure SMBv1 client driver to Enabled with Disable driver "
       "(recommended) selected for Configure MrxSmb10 driver.")
BACKUP = ('Configure the policy value for Computer Configuration >> Windows Settings >> Security Settings >> '
          'Local Policies >> User Rights Assignment >> "Back up files and directories" to include only the '
          'following accounts or groups:\n- Administrators')
LOCKOUT = ('Configure the policy value for Computer Configuration >> Windows Settings >> Security Settings >> '
           'Account Policies >> Account Lockout Policy >> "Account lockout threshold" to "3" or fewer invalid '
           'logon attempts (excluding "0", which is unacceptable).')


def test_tokenize_keeps_quoted_spans_together():
    toks = tokenize('set "Back up files" to "3" or fewer.')
    assert toks == ["set", "Back up files", "to", "3", "or", "fewer", "."]


def test_tags_on_worked_sentence():
    tagged = {t.text: t.tag for t in tag(tokenize(SMB))}
    assert tagged["for"] == "IN" and tagged["to"] == "TO"
    assert tagged["Enabled"] in ("VB", "VBN", "VBD")
    assert tagged["selected"] == "VBN"
    assert tagged["."] == "."


def test_worked_sentence_extracts_exactly():
    r = extract_text(SMB)
    assert isinstance(r, ExtractionResult)
    assert r.matched_rule == "enabled_with_x_selected_for_y"
    assert r.path_text == ("Computer Configuration >> Administrative Templates >> MS Security Guide >> "
                           "Configure SMBv1 client driver")
    assert r.main_value_text == "Enabled"
    assert r.sub_value_text == "Disable driver (recommended)"
    assert r.option_name_text == "Configure MrxSmb10 driver"


def test_include_only_list():
    r = extract_text(BACKUP)
    assert r.matched_rule == "include_only_principals"
    assert r.trailing_list == ("Administrators",)
    assert parse_value_text(r.main_value_text, trailing_list=r.trailing_list) == Principals(("Administrators",))


def test_numeric_bound():
    r = extract_text(LOCKOUT)
    assert r.matched_rule == "numeric_bound"
    assert parse_value_text(r.main_value_text) == Number(3)


def test_unrelated_prose_does_not_match():
    assert isinstance(extract_text("Install the latest updates. Reboot afterwards."), NoMatch)
    assert isinstance(extract_text(""), NoMatch)


def test_ambiguity_across_rules_of_equal_priority():
    text = ('Configure the policy value for Computer Configuration >> Windows Settings >> Security Settings >> '
            'Local Policies >> User Rights Assignment >> "Generate security audits" to include only the '
            'following accounts or groups: "LOCAL SERVICE" with "Success" selected.')
    r = extract_text(text)
    assert isinstance(r, Ambiguous)
    assert {c.matched_rule for c in r.candidates} == {"include_only_principals", "audit_selected"}


def test_first_priority_level_wins():
    low = make_rule("catch_all", "{PATH:<.*>+} <.>", priority=99)
    r = match_patterns(tag(tokenize(SMB)), [low, *load_rules()])
    assert r.matched_rule == "enabled_with_x_selected_for_y"


def test_pattern_requires_path_capture():
    with pytest.raises(Exception):
        make_rule("bad", "<IN> {MAIN_VALUE:<.*>+} <.>")
    assert len(parse_pattern("<IN> {PATH:<.*>+} <.>")) == 3


def test_split_sentences_bullets_and_listing():
    s = split_sentences("First sentence. Second to the following:\n- A\n- B")
    assert [x.trailing for x in s][-1] == ("A", "B")
    s = split_sentences("Do it to the following groups:\n\nAdministrators\nAuthenticated Users")
    assert s[-1].trailing == ("Administrators", "Authenticated Users")


@pytest.mark.parametrize("text,expected", [
    ("Enabled", Toggle(True)),
    ('"Disabled"', Toggle(False)),
    ('"14" characters', Number(14)),
    ("be defined but containing no entries (blank)", Principals(())),
    ('"Success"', AuditValue(AuditSetting.Success)),
    ('"Success" and "Failure"', AuditValue(AuditSetting.SuccessAndFailure)),
    ('"Send NTLMv2 response only. Refuse LM & NTLM"', Choice("Send NTLMv2 response only. Refuse LM & NTLM")),
])
def test_value_text(text, expected):
    assert parse_value_text(text) == expected


def test_composite_value():
    v = parse_value_text("Enabled", "Disable driver (recommended)", "Configure MrxSmb10 driver")
    assert v == Composite(Toggle(True), (("Configure MrxSmb10 driver", Choice("Disable driver (recommended)")),))


def test_value_errors():
    with pytest.raises(ValueParseError):
        parse_value_text("  ")
    with pytest.raises(ValueParseError):
        parse_value_text("include only the following accounts or groups")


def _rule(desc):
    return Rule("R-1", "rule text", implementations=(Implementation(desc),))


def test_extract_rule_statuses():
    assert extract_rule(_rule(SMB)).extraction_status is ExtractionStatus.Extracted
    assert extract_rule(_rule("Nothing to see here.")).extraction_status is ExtractionStatus.NotExtracted
    r = extract_rule(_rule(BACKUP))
    (a,) = r.policy_automations()
    assert a.ui_path.endswith("User Rights Assignment\\Back up files and directories")


def test_extract_guide_only_touches_unattempted(guide):
    from gpoharden.nlp import extract_guide

    once = extract_guide(guide)
    assert extract_guide(once) == once
    assert extract_guide(once, force=True) == once


@given(st.text(max_size=200))
def test_extract_text_never_raises(text):
    extract_text(text)
