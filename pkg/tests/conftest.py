from __future__ import annotations

import hashlib
import shutil
from dataclasses import dataclass, field
from pathlib import Path

import pytest
from click.testing import CliRunner

from ecorelint.cli import cli as cli_group
from ecorelint.xmi import load_model

FIXTURES = Path(__file__).parent / "fixtures"
MODELS = FIXTURES / "models"
RULES = FIXTURES / "rules"
INSTANCES = FIXTURES / "instances"
UNSAT = FIXTURES / "unsat"


def sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def tree_hashes(root: Path) -> dict[str, str]:
    return {str(p.relative_to(root)): sha256(p) for p in sorted(root.rglob("*")) if p.is_file()}


@dataclass
class InvocationLedger:
    """Every CLI call made through the ``cli`` fixture, for the no-mutation check."""

    invocations: int = 0
    files_checked: int = 0
    violations: list[str] = field(default_factory=list)


LEDGER = InvocationLedger()


def _file_args(args) -> list[Path]:
    out = []
    for arg in args:
        p = Path(str(arg))
        if p.is_file():
            out.append(p)
    return out


def run_cli(*args, input=None, env=None):
    """Invoke the CLI in-process, checking that no file argument changes unless
    ``--write`` was given."""
    args = [str(a) for a in args]
    files = _file_args(args)
    before = {p: sha256(p) for p in files}
    result = CliRunner().invoke(cli_group, args, input=input, env=env, catch_exceptions=False)
    LEDGER.invocations += 1
    if "--write" not in args:
        for p, digest in before.items():
            LEDGER.files_checked += 1
            if not p.exists() or sha256(p) != digest:
                LEDGER.violations.append(f"{' '.join(args)} changed {p}")
    return result


@pytest.fixture
def cli():
    return run_cli


@pytest.fixture
def fixture_copy(tmp_path):
    """Copy fixture files into tmp_path so tests may write to them."""
    def make(*rel: str) -> list[Path]:
        out = []
        for r in rel:
            src = FIXTURES / r
            dst = tmp_path / src.name
            shutil.copyfile(src, dst)
            out.append(dst)
        return out if len(out) != 1 else out[0]
    return make


@pytest.fixture(scope="session")
def corpus():
    """name -> parsed model for every canonical model fixture."""
    return {p.stem: load_model(p) for p in sorted(MODELS.glob("*.ecore"))}


@pytest.fixture(scope="session", autouse=True)
def fixtures_untouched():
    before = tree_hashes(FIXTURES)
    yield
    after = tree_hashes(FIXTURES)
    changed = sorted(k for k in before.keys() | after.keys() if before.get(k) != after.get(k))
    assert not changed, f"test suite modified fixture files: {changed}"


def pytest_collection_modifyitems(session, config, items):
    # acceptance checks go last so the no-mutation check sees every CLI call
    items.sort(key=lambda item: item.get_closest_marker("acceptance") is not None)


def pytest_terminal_summary(terminalreporter):
    terminalreporter.write_line(
        f"cli invocations guarded: {LEDGER.invocations}, input files re-hashed: "
        f"{LEDGER.files_checked}, unexpected mutations: {len(LEDGER.violations)}")
