import numpy as np
import pytest

# criterion number -> {"title", "outcomes": [(name, outcome, detail)]}
_ACCEPTANCE = {}


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow replication studies")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by a test")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        number, title = mark.args
        detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
        entry = _ACCEPTANCE.setdefault(number, {"title": title, "outcomes": []})
        entry["outcomes"].append((item.name, rep.outcome, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        entry = _ACCEPTANCE[number]
        ran = [o for o in entry["outcomes"] if o[1] != "skipped"]
        ok = bool(ran) and all(o[1] == "passed" for o in ran)
        skipped = [o[0] for o in entry["outcomes"] if o[1] == "skipped"]
        details = " | ".join(o[2] for o in entry["outcomes"] if o[2])
        note = f" (skipped: {', '.join(skipped)})" if skipped else ""
        tr.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {entry['title']}{note}: {details}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
