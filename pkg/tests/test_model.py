import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from himu import (
    LoadError,
    MmuTable,
    build_total_order,
    item_utility,
    itemset_utility,
    load_database,
    miu,
    transaction_utility,
    twu_scan,
)
from himu.model import (
    AbsentItemError,
    dump_quantity,
    dump_spmf,
    parse_fixed,
    read_table,
    twu_of,
)

from conftest import instances

PROFIT = {"a": 6, "b": 12, "c": 1, "d": 9, "e": 3}


def ids(db, labels):
    return db.ids(labels)


def test_example_shape(example_db):
    assert example_db.n == 10
    assert example_db.m == 5
    assert example_db.labels == ("a", "c", "d", "e", "b")  # first appearance


def test_item_utility(example_db):
    b, c = ids(example_db, "bc")
    assert item_utility(example_db, b, 3) == 36
    assert item_utility(example_db, c, 3) == 5
    # q = 1 gives the unit profit
    a = example_db.item_id("a")
    assert item_utility(example_db, a, 1) == 6


def test_item_utility_absent(example_db):
    with pytest.raises(AbsentItemError):
        item_utility(example_db, example_db.item_id("a"), 3)


@pytest.mark.parametrize(
    "itemset, expected",
    [("bc", 79), ("ad", 90), ("b", 108), ("a", 48), ("ab", 0), ("abcde", 0)],
)
def test_itemset_utility(example_db, itemset, expected):
    assert itemset_utility(example_db, ids(example_db, itemset)) == expected


def test_transaction_utilities(example_db):
    # T3 is 3*12 + 5*1 = 41
    expected = [35, 27, 41, 24, 45, 42, 50, 15, 23, 23]
    assert [transaction_utility(example_db, t) for t in range(1, 11)] == expected
    with pytest.raises(KeyError):
        transaction_utility(example_db, 11)


def test_twu(example_db):
    twu = twu_scan(example_db)
    assert {example_db.labels[i]: v for i, v in twu.items()} == {"a": 124, "b": 178, "c": 211, "d": 269, "e": 169}


def test_twu_degenerate():
    db = load_database("a:1 b:2\n", "quantity", {"a": 3, "b": 4})
    assert twu_scan(db) == {0: 11, 1: 11}


def test_miu(example_db, example_mmu):
    assert miu(example_mmu, ids(example_db, "ace")) == 53
    assert miu(example_mmu, ids(example_db, "a")) == 56
    assert miu(example_mmu, ids(example_db, "ad")) == 50
    assert example_mmu.lmu() == 50
    with pytest.raises(ValueError):
        miu(example_mmu, ())


def test_total_order(example_db, example_mmu):
    order = build_total_order(example_mmu, range(example_db.m))
    assert "".join(example_db.labels[i] for i in order.items) == "dcabe"


def test_total_order_ties():
    mmu = MmuTable({0: 5, 1: 5, 2: 5})
    assert build_total_order(mmu, [2, 0, 1]).items == (0, 1, 2)
    assert build_total_order(MmuTable({0: 5, 1: 3}), [0, 1]).items == (1, 0)


# -- loading ----------------------------------------------------------------


def test_empty_input():
    db = load_database("", "quantity", {})
    assert db.n == 0 and db.m == 0
    db = load_database(b"", "spmf-utility")
    assert db.n == 0


def test_comments_and_blank_lines():
    db = load_database("# header\n\na:1  # trailing\n\nb:2\n", "quantity", {"a": 1, "b": 1})
    assert db.n == 2
    assert [t.tid for t in db.transactions] == [1, 2]


def test_empty_spmf_transaction_is_skipped():
    db = load_database("a b:3:1 2\n:0:\n", "spmf-utility")
    assert db.n == 1
    assert db.skipped_empty == 1


def test_duplicate_item_rejected():
    with pytest.raises(LoadError, match=r"duplicate item 'a' in transaction 2"):
        load_database("b:1\na:1 a:2\n", "quantity", {"a": 1, "b": 1})


@pytest.mark.parametrize("line", ["a:0", "a:-1", "a:x", "a1"])
def test_bad_quantity(line):
    with pytest.raises(LoadError):
        load_database(line, "quantity", {"a": 1})


def test_unknown_profit():
    with pytest.raises(LoadError, match="no profit"):
        load_database("a:1 z:1", "quantity", {"a": 1})


def test_quantity_needs_profits():
    with pytest.raises(ValueError):
        load_database("a:1", "quantity")


def test_spmf():
    db = load_database("a b c:10:2 3 5\nb c:4:1 3\n", "spmf-utility")
    a, b, c = db.ids("abc")
    assert db.profit is None
    assert item_utility(db, c, 1) == 5
    assert itemset_utility(db, (b, c)) == 12
    assert twu_scan(db) == {a: 10, b: 14, c: 14}


@pytest.mark.parametrize(
    "line, message",
    [
        ("a b:10:2 3", "transaction utility"),
        ("a b:5:2", "items but"),
        ("a b:5:5 0", "non-positive"),
        ("a a:2:1 1", "duplicate"),
        ("a b 5", "items:TU:utilities"),
    ],
)
def test_spmf_errors(line, message):
    with pytest.raises(LoadError, match=message):
        load_database(line, "spmf-utility", name="x.txt")


def test_error_names_line():
    with pytest.raises(LoadError, match=r"^db.txt:3: "):
        load_database("a:1\nb:1\nc:1\n", "quantity", {"a": 1, "b": 1}, name="db.txt")


def test_fixed_point():
    assert parse_fixed("1.25", 100) == 125
    assert parse_fixed("3", 100) == 300
    with pytest.raises(ValueError):
        parse_fixed("1.255", 100)
    db = load_database("a b:1.5:0.5 1.00\n", "spmf-utility", scale=100)
    assert db.transactions[0].utilities == (50, 100)
    assert db.format_utility(150) == "1.5"


def test_read_table():
    assert read_table("a 6\nb 12 # note\n") == {"a": 6, "b": 12}
    with pytest.raises(LoadError):
        read_table("a 0\n")
    with pytest.raises(LoadError):
        read_table("a 1\na 2\n")
    with pytest.raises(LoadError):
        read_table("a 1 2\n")


def test_mmu_table():
    with pytest.raises(ValueError):
        MmuTable({0: 0})
    db = load_database("a:1 b:1", "quantity", {"a": 1, "b": 1})
    with pytest.raises(LoadError):
        MmuTable.from_labels(db, {"a": 3})
    mmu = MmuTable.from_labels(db, {"a": 3, "b": 4, "unused": 1})
    assert mmu.to_labels(db) == {"a": 3, "b": 4}
    with pytest.raises(KeyError):
        mmu[7]


# -- properties -------------------------------------------------------------


def test_quantity_round_trip(example_db):
    text, profits = dump_quantity(example_db)
    again = load_database(text, "quantity", read_table(profits))
    assert again == example_db


@given(instances())
@settings(max_examples=60, deadline=None)
def test_round_trips(inst):
    db, _ = inst
    text, profits = dump_quantity(db)
    assert load_database(text, "quantity", read_table(profits)) == db
    spmf = load_database(dump_spmf(db), "spmf-utility")
    assert [t.utilities for t in spmf.transactions] == [t.utilities for t in db.transactions]
    assert spmf.labels == db.labels


@given(instances(max_items=6))
@settings(max_examples=60, deadline=None)
def test_utility_bounds(inst):
    db, mmu = inst
    items = range(db.m)
    for k in range(1, db.m + 1):
        for x in itertools.combinations(items, k):
            twu = twu_of(db, x)
            assert itemset_utility(db, x) <= twu
            for y in items:
                if y not in x:
                    assert twu_of(db, x + (y,)) <= twu
                    assert miu(mmu, x + (y,)) <= miu(mmu, x)


@given(instances())
@settings(max_examples=60, deadline=None)
def test_twu_bookkeeping(inst):
    db, _ = inst
    twu = twu_scan(db)
    assert sum(twu.values()) == sum(t.tu * len(t.items) for t in db.transactions)
    for t, tu in zip(db.transactions, db.transaction_utilities):
        assert tu == sum(item_utility(db, i, t.tid) for i in t.items)


@given(st.lists(st.integers(1, 100), min_size=1, max_size=10))
def test_lmu_is_minimum(values):
    mmu = MmuTable(dict(enumerate(values)))
    assert mmu.lmu() == min(values)
