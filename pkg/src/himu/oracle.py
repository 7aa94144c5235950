"""Exhaustive reference miner for small databases.

Enumerates every non-empty subset of the items with a binary counter and
scans the transactions horizontally.  It deliberately shares nothing with
the utility-list machinery it is used to check.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import MmuTable, QuantDatabase

DEFAULT_MAX_ITEMS = 20


class TooManyItems(ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    huis: dict[frozenset[int], int]
    htwuis: dict[frozenset[int], int]
    # Every non-empty subset's (utility, twu, miu), keyed by bitmask.
    table: dict[int, tuple[int, int, int]]


def _rows(db: QuantDatabase) -> list[tuple[int, dict[int, int], int]]:
    rows = []
    for t in db.transactions:
        mask = 0
        util = {}
        for i, u in zip(t.items, t.utilities):
            mask |= 1 << i
            util[i] = u
        rows.append((mask, util, sum(t.utilities)))
    return rows


def _members(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def _check_size(db: QuantDatabase, max_items: int) -> None:
    if db.m > max_items:
        raise TooManyItems(f"{db.m} items exceeds the oracle limit of {max_items}")


def brute_force(db: QuantDatabase, mmu: MmuTable, max_items: int = DEFAULT_MAX_ITEMS) -> OracleResult:
    _check_size(db, max_items)
    rows = _rows(db)
    mu = [mmu[i] for i in range(db.m)]
    table = {}
    huis = {}
    htwuis = {}
    for mask in range(1, 1 << db.m):
        members = _members(mask)
        utility = twu = 0
        for tmask, util, tu in rows:
            if tmask & mask == mask:
                utility += sum(util[i] for i in members)
                twu += tu
        threshold = min(mu[i] for i in members)
        table[mask] = (utility, twu, threshold)
        key = frozenset(members)
        if utility >= threshold:
            huis[key] = utility
        if twu >= threshold:
            htwuis[key] = twu
    return OracleResult(huis, htwuis, table)


def uniform_huis(db: QuantDatabase, minutil: int, max_items: int = DEFAULT_MAX_ITEMS) -> dict[frozenset[int], int]:
    """Classic single-threshold high-utility itemsets: {X : u(X) >= minutil}."""
    _check_size(db, max_items)
    rows = _rows(db)
    out = {}
    for mask in range(1, 1 << db.m):
        members = _members(mask)
        utility = sum(sum(util[i] for i in members) for tmask, util, _ in rows if tmask & mask == mask)
        if utility >= minutil:
            out[frozenset(members)] = utility
    return out


def promising_only(result: OracleResult, db: QuantDatabase, mmu: MmuTable) -> OracleResult:
    """Restrict to itemsets made of items whose TWU reaches the LMU."""
    lmu = mmu.lmu()
    keep = {i for i in range(db.m) if result.table[1 << i][1] >= lmu}

    def ok(x):
        return x <= keep

    return OracleResult(
        {k: v for k, v in result.huis.items() if ok(k)},
        {k: v for k, v in result.htwuis.items() if ok(k)},
        result.table,
    )
