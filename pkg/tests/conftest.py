from __future__ import annotations

import sys
from pathlib import Path

import pytest

HERE = Path(__file__).parent
FIXTURES = HERE.parent / "fixtures"
sys.path.insert(0, str(HERE))

from kgraph.core import parse_skeleton, validate  # noqa: E402


def load(name: str):
    return validate(parse_skeleton((FIXTURES / f"{name}.kg").read_text()))


@pytest.fixture
def fixture_graph():
    return load


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(results, key=lambda s: (int(s.split()[0]), s)):
        terminalreporter.write_line(f"{results[label]}  criterion {label}")
