from __future__ import annotations

from pathlib import Path

import pytest

from vspec.driver import compile_source

CORPUS = Path(__file__).parent / "corpus"
GOLDEN = Path(__file__).parent / "golden"
CORPUS_NAMES = ("car", "decidability", "pk")

# Parameter values used wherever the medical spec has to be made concrete.
PK_PARAMS = {
    "Ka": "3.5",
    "Ke": "4.5",
    "Vd": "2",
    "C_safe": "10",
    "ttd": "6",
    "Ka_over": "0.9",
    "Ka_under": "0.8",
    "Ke_over": "0.7",
    "Ke_under": "0.6",
}


def corpus_source(name: str) -> str:
    return (CORPUS / f"{name}.vcl").read_text(encoding="utf-8")


def compile_corpus(name: str):
    return compile_source(corpus_source(name))


@pytest.fixture(params=CORPUS_NAMES)
def corpus_name(request) -> str:
    return request.param


# -- acceptance reporting ---------------------------------------------------

_criteria: dict[int, tuple[str, bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when != "call" and not report.failed:
        return
    number, title = mark.args
    _, ok = _criteria.get(number, (title, True))
    _criteria[number] = (title, ok and report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok = _criteria[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")
