from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from conezeta import data_path, load_fan, load_lattice, make_field
from conezeta.shintani import decompose_quadratic

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SQRT5 = [-1, -1, 1]    # x^2 - x - 1
CUBIC = [-1, -2, 1, 1]  # x^3 + x^2 - 2x - 1


@pytest.fixture(scope="session")
def qfield():
    return make_field(SQRT5)


@pytest.fixture(scope="session")
def cfield():
    return make_field(CUBIC)


@pytest.fixture(scope="session")
def qlat():
    return load_lattice(data_path("sqrt5.json"))


@pytest.fixture(scope="session")
def clat():
    return load_lattice(data_path("cubic.json"))


@pytest.fixture(scope="session")
def qfan(qlat):
    return decompose_quadratic(qlat)


@pytest.fixture(scope="session")
def cfan(clat):
    return load_fan(clat, data_path("cubic_fan.json"))


small_fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)


def elements(field, nonzero=False):
    n = field.degree
    s = st.lists(small_fractions, min_size=n, max_size=n).map(field.element)
    if nonzero:
        s = s.filter(lambda x: not x.is_zero())
    return s


def rational_vectors(n, lo=-30, hi=30):
    return st.lists(st.integers(lo, hi), min_size=n, max_size=n).map(lambda v: tuple(Fraction(c) for c in v))


# acceptance reporting: one line per criterion, derived from the real test outcomes

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or not (rep.when == "call" or rep.failed or rep.skipped):
        return
    n, title = mark.args
    ok = rep.passed and rep.when == "call"
    prev = _CRITERIA.get(n, (title, True))
    _CRITERIA[n] = (title, prev[1] and ok)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, ok = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}")
