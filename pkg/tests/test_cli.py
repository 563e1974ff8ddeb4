import shutil
from pathlib import Path

import pytest

from conftest import ADML, ADMX, CORPUS, LEGACY, run_pipeline
from gpoharden.cli import main
from gpoharden.guide import Guide, Status, parse_scapolite, serialize_scapolite


def snapshot(root: Path) -> dict[str, bytes]:
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def test_pipeline_exit_codes(pipeline):
    c = pipeline["codes"]
    assert c["catalog"] == 0 and c["import"] == 0 and c["extract"] == 0
    assert (c["verify1"], c["verify2"], c["lower"], c["export_plan"]) == (1, 0, 0, 0)
    assert all(c["export_" + k] == 0 for k in ("pol", "inf", "audit", "report"))
    out = pipeline["out"]
    for name in ("plan.json", "Machine/registry.pol", "GptTmpl.inf", "audit.csv", "report.csv", "report.html"):
        assert (out / name).is_file(), name


def test_catalog_build_summary(tmp_path, capsys):
    assert main(["catalog", "build", "--admx", str(ADMX), "--adml", str(ADML), "--legacy", str(LEGACY),
                 "--out", str(tmp_path / "c.yaml")]) == 0
    assert "definitions=40" in capsys.readouterr().out


def test_catalog_build_empty_dir(tmp_path, capsys):
    (tmp_path / "admx").mkdir()
    assert main(["catalog", "build", "--admx", str(tmp_path / "admx"), "--out", str(tmp_path / "c.yaml")]) == 0
    assert "definitions=0" in capsys.readouterr().out


def test_catalog_build_collision(tmp_path):
    d = tmp_path / "admx"
    (d / "en-US").mkdir(parents=True)
    for stem in ("SecGuide", "SecGuideCopy"):
        shutil.copy(ADMX / "SecGuide.admx", d / f"{stem}.admx")
        shutil.copy(ADML / "SecGuide.adml", d / "en-US" / f"{stem}.adml")
    assert main(["catalog", "build", "--admx", str(d), "--adml", str(d / "en-US"), "--out", str(tmp_path / "c")]) == 2


def test_missing_inputs_exit_2(tmp_path, capsys):
    assert main(["extract", str(tmp_path / "nope.md")]) == 2
    assert main(["verify", str(tmp_path / "nope.md"), "--catalog", str(tmp_path / "c")]) == 2
    assert main(["sim", "check", "--plan", str(tmp_path / "p"), "--state", str(tmp_path / "s")]) == 2
    assert "error:" in capsys.readouterr().err


def test_bad_usage_exit_2():
    assert main(["frobnicate"]) == 2
    assert main([]) == 2


def test_empty_guide(tmp_path, capsys):
    g = tmp_path / "g.md"
    g.write_text(serialize_scapolite(Guide("Empty")), encoding="utf-8")
    assert main(["extract", str(g)]) == 0
    capsys.readouterr()
    assert main(["stats", str(g)]) == 0
    rows = capsys.readouterr().out.strip().splitlines()[1:]
    assert all(row.split(",")[1] == "0" for row in rows)


def test_verify_on_checked_guide_exits_0(pipeline, tmp_path):
    g = tmp_path / "g.md"
    shutil.copy(pipeline["guide"], g)
    assert main(["verify", str(g), "--catalog", str(pipeline["catalog"])]) == 0


def test_stats_match_manifest(pipeline, manifest, capsys):
    assert main(["stats", str(pipeline["guide"]), "--manifest", str(CORPUS / "manifest.yaml")]) == 0
    rows = dict(line.split(",")[:2] for line in capsys.readouterr().out.strip().splitlines()[1:])
    guide = parse_scapolite(pipeline["guide"].read_bytes())
    checked = sum(1 for r in guide.rules for a in r.policy_automations() if a.verification_status is Status.Checked)
    automatable = sum(1 for m in manifest.values() if m["automatable"])
    first_ok = sum(1 for m in manifest.values() if m.get("first_verification") == "Checked")
    assert int(rows["Rules"]) == len(manifest)
    assert int(rows["Automated rules"]) == checked == automatable
    assert int(rows["First-time verified"]) == first_ok
    assert int(rows["Automatable but not extracted"]) == 0
    assert int(rows["Non-automatable but extracted"]) == 0


def test_sim_cycle(pipeline, tmp_path, capsys):
    state = tmp_path / "state.yaml"
    shutil.copy(CORPUS / "default_state.yaml", state)
    plan = str(pipeline["out"] / "plan.json")
    original = state.read_bytes()
    assert main(["sim", "check", "--plan", plan, "--state", str(state)]) == 1
    assert "percentage=0.0%" in capsys.readouterr().out
    assert main(["sim", "apply", "--plan", plan, "--state", str(state)]) == 0
    assert main(["sim", "check", "--plan", plan, "--state", str(state)]) == 0
    assert "percentage=100.0%" in capsys.readouterr().out
    assert main(["sim", "revert", "--plan", plan, "--state", str(state)]) == 0
    from gpoharden.mocksys import load_state

    assert load_state(state.read_bytes()) == load_state(original)
    assert not (tmp_path / "state.yaml.journal").exists()


def test_sim_rejects_bad_state(pipeline, tmp_path):
    state = tmp_path / "state.yaml"
    state.write_text("schema_version: 7\n")
    assert main(["sim", "check", "--plan", str(pipeline["out"] / "plan.json"), "--state", str(state)]) == 2


def test_every_stage_is_idempotent(tmp_path):
    """Running each stage a second time leaves every file unchanged."""
    from gpoharden.cli import main as run

    w = tmp_path
    cat, guide, out = w / "catalog.yaml", w / "guide.md", w / "out"
    stages = [
        ["catalog", "build", "--admx", str(ADMX), "--adml", str(ADML), "--legacy", str(LEGACY), "--out", str(cat)],
        ["guide", "import", str(CORPUS / "benchmark.xml"), "--out", str(guide)],
        ["extract", str(guide)],
        ["verify", str(guide), "--catalog", str(cat)],
        ["guide", "fix", str(guide), "--fixes", str(CORPUS / "fixes.yaml")],
        ["verify", str(guide), "--catalog", str(cat)],
        ["lower", str(guide), "--catalog", str(cat)],
        *(["export", k, str(guide), "--output", str(out)] for k in ("plan", "pol", "inf", "audit", "report")),
    ]
    for argv in stages:
        first = run(argv)
        snap = snapshot(w)
        assert run(argv) == first, argv
        assert snapshot(w) == snap, argv


def test_two_runs_give_identical_artifacts(tmp_path):
    a = run_pipeline(tmp_path / "a")
    b = run_pipeline(tmp_path / "b")
    assert snapshot(a["out"]) == snapshot(b["out"])
    assert a["guide"].read_bytes() == b["guide"].read_bytes()


def _imported(tmp_path):
    g = tmp_path / "g.md"
    assert main(["guide", "import", str(CORPUS / "benchmark.xml"), "--out", str(g)]) == 0
    assert main(["extract", str(g)]) == 0
    return g


def test_fix_unknown_rule_is_usage_error(tmp_path):
    g = _imported(tmp_path)
    fixes = tmp_path / "f.yaml"
    fixes.write_text("fixes:\n- {rule: SV-0, value: Enabled}\n")
    before = g.read_bytes()
    assert main(["guide", "fix", str(g), "--fixes", str(fixes)]) == 2
    assert g.read_bytes() == before


def test_fix_on_rule_without_automation_marks_it_manual(tmp_path):
    from gpoharden.guide import ExtractionStatus

    g = _imported(tmp_path)
    fixes = tmp_path / "f.yaml"
    fixes.write_text("fixes:\n- rule: SV-87875\n  ui_path: 'Computer Configuration\\Administrative Templates\\"
                     "Windows Components\\Windows Installer\\Always install with elevated privileges'\n"
                     "  value: Disabled\n")
    assert main(["guide", "fix", str(g), "--fixes", str(fixes)]) == 0
    r = parse_scapolite(g.read_bytes()).rule("SV-87875")
    assert r.extraction_status is ExtractionStatus.ManuallyAuthored
    (a,) = r.policy_automations()
    assert a.verification_status is Status.Unchecked
    # forced re-extraction leaves manual work alone
    assert main(["extract", str(g), "--force"]) == 0
    assert parse_scapolite(g.read_bytes()).rule("SV-87875") == r


def test_fix_without_path_or_value_on_empty_rule(tmp_path):
    g = _imported(tmp_path)
    fixes = tmp_path / "f.yaml"
    fixes.write_text("fixes:\n- {rule: SV-87875, value: Enabled}\n")
    assert main(["guide", "fix", str(g), "--fixes", str(fixes)]) == 2
