from pathlib import Path

import pytest
from hypothesis import strategies as st

from himu import MmuTable, load_database, read_table
from himu.model import from_rows

DATA = Path(__file__).resolve().parents[1] / "data" / "running_example"

# Derived HUIs of the ten-transaction example, keyed by item labels.
TABLE5 = {
    "b": 108,
    "d": 126,
    "ad": 90,
    "bc": 79,
    "bd": 126,
    "cd": 83,
    "de": 96,
    "acd": 76,
    "bde": 93,
    "cde": 55,
    "bcde": 50,
}


def load_example():
    profit = read_table((DATA / "profits.txt").read_text())
    db = load_database((DATA / "transactions.txt").read_text(), "quantity", profit)
    mmu = MmuTable.from_labels(db, read_table((DATA / "mmu.txt").read_text()))
    return db, mmu


@pytest.fixture(scope="session")
def example():
    return load_example()


@pytest.fixture(scope="session")
def example_db(example):
    return example[0]


@pytest.fixture(scope="session")
def example_mmu(example):
    return example[1]


def by_label(db, huis: dict) -> dict[str, int]:
    """frozenset-of-ids keyed results -> sorted label strings."""
    return {"".join(sorted(db.labels[i] for i in k)): v for k, v in huis.items()}


@st.composite
def instances(draw, max_items=8, max_transactions=15):
    """Small random (database, MMU table) pairs."""
    m = draw(st.integers(1, max_items))
    labels = [f"x{k}" for k in range(m)]
    profit = {x: draw(st.integers(1, 10)) for x in labels}
    rows = draw(
        st.lists(
            st.dictionaries(st.sampled_from(labels), st.integers(1, 5), min_size=1),
            min_size=1,
            max_size=max_transactions,
        )
    )
    db = from_rows(rows, profit)
    total = sum(db.transaction_utilities)
    mu = {i: draw(st.integers(1, max(1, total))) for i in range(db.m)}
    return db, MmuTable(mu)


# -- acceptance summary -----------------------------------------------------

_criteria: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    crit = getattr(report, "criterion", None)
    if crit is None:
        return
    number, text = crit
    entry = _criteria.setdefault(number, [text, True])
    entry[1] = entry[1] and report.passed


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = tuple(marker.args)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        text, ok = _criteria[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {text}")
