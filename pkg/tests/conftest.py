import pathlib

import pytest

from sessionbridge.cli.parser import parse

ROOT = pathlib.Path(__file__).resolve().parent.parent
PROGRAMS = ROOT / "programs"


def load(name, calculus=None):
    from sessionbridge.cli.parser import calculus_of
    path = PROGRAMS / name
    return parse(path.read_text(), calculus or calculus_of(path))


@pytest.fixture
def programs():
    return PROGRAMS


# ---------------------------------------------------------------- acceptance reporting

import time

SESSION_START = time.perf_counter()
VERDICTS = {}


def record(n, ok, detail=""):
    VERDICTS[n] = (ok, detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())


def pytest_collection_modifyitems(items):
    # suite-level timing is judged after everything else has run
    last = [i for i in items if i.get_closest_marker("last")]
    items[:] = [i for i in items if i not in last] + last


def pytest_configure(config):
    config.addinivalue_line("markers", "last: run after all other tests")


def pytest_terminal_summary(terminalreporter):
    if not VERDICTS:
        return
    terminalreporter.section("acceptance")
    for n in sorted(VERDICTS):
        ok, detail = VERDICTS[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
