import numpy as np
import pytest

from rgboost import SampleSpace


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def two_points():
    return SampleSpace.uniform(2)


# ---------------------------------------------------------------------------
# acceptance reporting: one PASS/FAIL line per @pytest.mark.criterion test

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    details = [v for k, v in item.user_properties if k == "detail"]
    if call.excinfo is not None:
        msg = str(call.excinfo.value).strip()
        if msg:
            details.append(msg.splitlines()[0])
    _CRITERIA[number] = (title, call.excinfo is None, "; ".join(details))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok, detail = _CRITERIA[number]
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
