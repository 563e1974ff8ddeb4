from __future__ import annotations

import sys
from pathlib import Path

import pytest
import yaml

HERE = Path(__file__).parent
FIXTURES = HERE / "fixtures"
CORPUS = FIXTURES / "corpus"
ADMX = FIXTURES / "admx"
ADML = ADMX / "en-US"
LEGACY = FIXTURES / "legacy.yaml"
GOLDEN = FIXTURES / "golden"

sys.path.insert(0, str(HERE))

from gpoharden.catalog import compile_directory  # noqa: E402
from gpoharden.guide import import_xccdf  # noqa: E402


def build_catalog():
    return compile_directory(ADMX, ADML, LEGACY, [])


def corpus_guide():
    return import_xccdf((CORPUS / "benchmark.xml").read_bytes())


def corpus_manifest() -> dict[str, dict]:
    data = yaml.safe_load((CORPUS / "manifest.yaml").read_text(encoding="utf-8"))
    return {m["id"]: m for m in data["rules"]}


@pytest.fixture(scope="session")
def catalog():
    return build_catalog()


@pytest.fixture(scope="session")
def manifest():
    return corpus_manifest()


@pytest.fixture
def guide():
    return corpus_guide()


def run_pipeline(workdir: Path) -> dict:
    """Run every CLI stage over the corpus; return exit codes and paths."""
    from gpoharden.cli import main

    w = Path(workdir)
    cat, guide, out = w / "catalog.yaml", w / "guide.md", w / "out"
    codes = {}
    codes["catalog"] = main(["catalog", "build", "--admx", str(ADMX), "--adml", str(ADML),
                             "--legacy", str(LEGACY), "--out", str(cat)])
    codes["import"] = main(["guide", "import", str(CORPUS / "benchmark.xml"), "--out", str(guide)])
    codes["extract"] = main(["extract", str(guide)])
    codes["verify1"] = main(["verify", str(guide), "--catalog", str(cat)])
    codes["fix"] = main(["guide", "fix", str(guide), "--fixes", str(CORPUS / "fixes.yaml")])
    codes["verify2"] = main(["verify", str(guide), "--catalog", str(cat)])
    codes["lower"] = main(["lower", str(guide), "--catalog", str(cat)])
    for kind in ("plan", "pol", "inf", "audit", "report"):
        codes["export_" + kind] = main(["export", kind, str(guide), "--output", str(out)])
    return {"codes": codes, "catalog": cat, "guide": guide, "out": out}


@pytest.fixture(scope="session")
def pipeline(tmp_path_factory):
    return run_pipeline(tmp_path_factory.mktemp("pipeline"))


@pytest.fixture(scope="session")
def lowered(pipeline):
    from gpoharden.guide import parse_scapolite

    return parse_scapolite(pipeline["guide"].read_bytes())


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
