import os
import warnings

import pytest

from softlandau.grid import make_grid
from softlandau.kernel import cell_averaged_tables

CACHE_ENV = os.environ.get("LANDAU_CACHE_DIR")


@pytest.fixture(scope="session")
def table_cache(tmp_path_factory):
    """Kernel-table cache shared by the whole session (LANDAU_CACHE_DIR wins)."""
    return CACHE_ENV or str(tmp_path_factory.mktemp("tables"))


@pytest.fixture(scope="session")
def get_tables(table_cache):
    built = {}

    def get(n, gamma=-2.0, L=5.0):
        key = (n, float(gamma), float(L))
        if key not in built:
            built[key] = cell_averaged_tables(make_grid(n, L), gamma, cache_dir=table_cache)
        return built[key]

    return get


@pytest.fixture(autouse=True)
def _no_cache_env(monkeypatch):
    """Keep the caller's LANDAU_CACHE_DIR away from code under test."""
    monkeypatch.delenv("LANDAU_CACHE_DIR", raising=False)


@pytest.fixture
def quiet():
    """Silence the negative-density convolution warning inside a test."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        yield


def pytest_terminal_summary(terminalreporter):
    """One pass/fail line per acceptance criterion, in criterion order."""
    lines = []
    for key in ("passed", "failed", "xfailed", "xpassed"):
        for rep in terminalreporter.stats.get(key, []):
            if "test_acceptance.py::test_criterion_" not in getattr(rep, "nodeid", ""):
                continue
            if rep.when != "call" and not (key == "failed" and rep.when == "setup"):
                continue
            props = dict(rep.user_properties)
            ok = key in ("passed", "xpassed")
            lines.append((props.get("criterion", 99), ok, props.get("summary", rep.nodeid)))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for num, ok, text in sorted(lines):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {num:2d}. {text}")
