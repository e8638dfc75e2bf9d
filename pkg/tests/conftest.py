import json
import sys
import time
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "oracle"))

_criteria: dict[int, dict] = {}


@pytest.fixture(scope="session")
def golden():
    return json.loads((ROOT / "oracle" / "golden.json").read_text())


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_call(item):
    t0 = time.perf_counter()
    yield
    item.user_properties.append(("elapsed", time.perf_counter() - t0))


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    entry = _criteria.setdefault(props["criterion"], {"title": props["title"], "ok": True, "secs": 0.0,
                                                     "detail": ""})
    entry["ok"] = entry["ok"] and report.passed
    entry["secs"] += props.get("elapsed", 0.0)
    if props.get("detail"):
        entry["detail"] = props["detail"]


@pytest.fixture(autouse=True)
def _criterion_props(request):
    m = request.node.get_closest_marker("criterion")
    if m is not None:
        request.node.user_properties.append(("criterion", m.args[0]))
        request.node.user_properties.append(("title", m.args[1]))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        e = _criteria[n]
        status = "PASS" if e["ok"] else "FAIL"
        extra = f"  {e['detail']}" if e["detail"] else ""
        terminalreporter.write_line(f"criterion {n:2d} [PRIMARY] {status}  {e['title']}  ({e['secs']:.1f}s){extra}")
