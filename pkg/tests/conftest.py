from pathlib import Path

import pytest

from meanking.designs import oa_mols, oa_trivial
from meanking.mub import mub_auto
from meanking.protocol import assemble

FIXTURES = Path(__file__).parent / "fixtures"

# (d, k, method) for every configuration the certification must cover
CONFIGS = [
    (2, 3, "mols"),
    (3, 4, "mols"),
    (5, 6, "mols"),
    (7, 8, "mols"),
    (9, 10, "mols"),
    (2, 2, "trivial"),
    (3, 4, "trivial"),
    (6, 2, "trivial"),
]

_cache = {}


def make_oa(d, k, method):
    if method == "trivial":
        return oa_trivial(k, d)
    return oa_mols(d).columns(range(k))


def instance(d, k, method):
    key = (d, k, method)
    if key not in _cache:
        _cache[key] = assemble(mub_auto(d, k), make_oa(d, k, method))
    return _cache[key]


@pytest.fixture
def fig1_path():
    return FIXTURES / "fig1_oa.txt"


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
