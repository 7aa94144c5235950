import pytest

from himu import MmuTable, brute_force, load_database
from himu.oracle import TooManyItems, promising_only, uniform_huis

from conftest import TABLE5, by_label


def test_running_example(example):
    db, mmu = example
    res = brute_force(db, mmu)
    assert by_label(db, res.huis) == TABLE5
    htwuis = by_label(db, res.htwuis)
    assert htwuis["bcde"] == 50
    assert by_label(db, res.huis)["bcde"] == 50


def test_non_monotone_htwuis(example):
    # bcde reaches its MIU on TWU while its subset bce does not
    db, mmu = example
    htwuis = by_label(db, brute_force(db, mmu).htwuis)
    assert "bcde" in htwuis and "bce" not in htwuis
    witnesses = [x for x in htwuis for k in range(len(x)) if x[:k] + x[k + 1 :] and x[:k] + x[k + 1 :] not in htwuis]
    assert witnesses


def test_huis_within_htwuis(example):
    db, mmu = example
    res = promising_only(brute_force(db, mmu), db, mmu)
    assert res.huis.keys() <= res.htwuis.keys()
    assert all(res.htwuis[k] >= v for k, v in res.huis.items())


def test_empty_database():
    db = load_database("", "quantity", {})
    res = brute_force(db, MmuTable({}))
    assert res.huis == {} and res.htwuis == {}


def test_item_limit():
    line = " ".join(f"i{k}:1" for k in range(6))
    db = load_database(line, "quantity", {f"i{k}": 1 for k in range(6)})
    with pytest.raises(TooManyItems):
        brute_force(db, MmuTable({k: 1 for k in range(6)}), max_items=5)
    with pytest.raises(TooManyItems):
        uniform_huis(db, 1, max_items=5)


def test_uniform_huis():
    db = load_database("a:1 b:1\na:2\n", "quantity", {"a": 1, "b": 5})
    assert by_label(db, uniform_huis(db, 3)) == {"a": 3, "b": 5, "ab": 6}
    assert by_label(db, uniform_huis(db, 6)) == {"ab": 6}
