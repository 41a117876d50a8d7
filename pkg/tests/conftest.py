import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("ci", max_examples=60, deadline=None)
settings.load_profile("ci")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance summary: one line per criterion in the terminal report

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion")


@pytest.fixture
def note(request):
    """Attach a short observed-value line to the current test's criterion summary."""
    return lambda text: request.node.user_properties.append(("note", text))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or not (rep.when == "call" or rep.failed):
        return
    num, title = mark.args
    entry = _criteria.setdefault(num, {"title": title, "ok": True, "notes": []})
    entry["ok"] &= not rep.failed
    entry["notes"] += [v for k, v in item.user_properties if k == "note" and v not in entry["notes"]]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_criteria):
        e = _criteria[num]
        tr.write_line(f"criterion {num}: {'PASS' if e['ok'] else 'FAIL'}  {e['title']}")
        for n in e["notes"]:
            tr.write_line(f"    {n}")
