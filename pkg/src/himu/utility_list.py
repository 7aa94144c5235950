"""Vertical utility-lists and their joins.

A list for itemset X holds one ``(tid, iu, ru)`` entry per transaction that
contains X: ``iu`` is u(X, T) and ``ru`` the utility of the promising items
ranked after X's last item in T.  Entries are kept in three parallel lists,
which is considerably faster in CPython than a list of small objects.
"""

from __future__ import annotations

from bisect import bisect_left
from typing import Iterator, NamedTuple

from .model import MmuTable, QuantDatabase, TotalOrder, build_total_order, twu_scan

# Switch from a linear merge to binary-search probing when one side is this
# many times longer than the other.
GALLOP_RATIO = 16


class UtilityListEntry(NamedTuple):
    tid: int
    iu: int
    ru: int


class InvariantError(AssertionError):
    pass


class UtilityList:
    __slots__ = ("itemset", "tids", "ius", "rus", "iu", "ru")

    def __init__(self, itemset: tuple[int, ...], tids=None, ius=None, rus=None):
        self.itemset = itemset
        self.tids: list[int] = tids if tids is not None else []
        self.ius: list[int] = ius if ius is not None else []
        self.rus: list[int] = rus if rus is not None else []
        self.iu = sum(self.ius)
        self.ru = sum(self.rus)

    @property
    def last(self) -> int:
        return self.itemset[-1]

    @property
    def entries(self) -> list[UtilityListEntry]:
        return [UtilityListEntry(*e) for e in zip(self.tids, self.ius, self.rus)]

    def __iter__(self) -> Iterator[UtilityListEntry]:
        return map(UtilityListEntry._make, zip(self.tids, self.ius, self.rus))

    def __len__(self) -> int:
        return len(self.tids)

    def __bool__(self) -> bool:
        return bool(self.tids)

    def __eq__(self, other):
        if not isinstance(other, UtilityList):
            return NotImplemented
        return (self.itemset, self.tids, self.ius, self.rus) == (other.itemset, other.tids, other.ius, other.rus)

    def __repr__(self):
        return f"UtilityList({self.itemset}, IU={self.iu}, RU={self.ru}, n={len(self.tids)})"

    def dump(self) -> str:
        """One ``tid,iu,ru`` triple per line."""
        return "".join(f"{t},{i},{r}\n" for t, i, r in zip(self.tids, self.ius, self.rus))

    def check(self) -> None:
        tids = self.tids
        if any(a >= b for a, b in zip(tids, tids[1:])):
            raise InvariantError(f"tids of {self.itemset} are not strictly increasing")
        if not (len(tids) == len(self.ius) == len(self.rus)):
            raise InvariantError("ragged utility-list")


def build_initial_lists(db: QuantDatabase, mmu: MmuTable) -> tuple[TotalOrder, list[UtilityList], dict[int, int]]:
    """Filter items by TWU >= LMU, order the survivors and build their lists.

    Returns the order, the lists (in order) and the item TWUs.
    """
    if not mmu.covers(db):
        raise ValueError("MMU table does not cover every database item")
    twu = twu_scan(db)
    if db.m == 0:
        return build_total_order(mmu, ()), [], twu
    lmu = mmu.lmu()
    order = build_total_order(mmu, (i for i, w in twu.items() if w >= lmu))
    rank = order.rank
    lists = {i: UtilityList((i,)) for i in order.items}

    for t in db.transactions:
        kept = sorted(
            ((rank[i], i, u) for i, u in zip(t.items, t.utilities) if i in rank),
            reverse=True,
        )
        ru = 0
        for _, i, u in kept:
            ul = lists[i]
            ul.tids.append(t.tid)
            ul.ius.append(u)
            ul.rus.append(ru)
            ru += u

    out = []
    for i in order.items:
        ul = lists[i]
        ul.iu = sum(ul.ius)
        ul.ru = sum(ul.rus)
        out.append(ul)
    return order, out, twu


def _prefix_iu(prefix: UtilityList, pos: int, tid: int) -> tuple[int, int]:
    """Advance ``pos`` in ``prefix`` to ``tid``; return (iu, new pos)."""
    tids = prefix.tids
    n = len(tids)
    while pos < n and tids[pos] < tid:
        pos += 1
    if pos == n or tids[pos] != tid:
        raise InvariantError(f"tid {tid} missing from prefix list {prefix.itemset}")
    return prefix.ius[pos], pos


def join(prefix: UtilityList | None, px: UtilityList, py: UtilityList) -> UtilityList:
    """Utility-list of P+x+y from those of P+x and P+y (and P when non-empty)."""
    if __debug__:
        px.check()
        py.check()
    itemset = px.itemset + (py.last,)
    xt, yt = px.tids, py.tids
    tids, ius, rus = [], [], []
    use_prefix = prefix is not None and len(prefix.itemset) > 0
    pp = 0
    if len(yt) > GALLOP_RATIO * len(xt) or len(xt) > GALLOP_RATIO * len(yt):
        matches = _gallop(xt, yt)
    else:
        matches = _merge(xt, yt)
    for i, j in matches:
        tid = xt[i]
        iu = px.ius[i] + py.ius[j]
        if use_prefix:
            piu, pp = _prefix_iu(prefix, pp, tid)
            iu -= piu
        tids.append(tid)
        ius.append(iu)
        rus.append(py.rus[j])
    return UtilityList(itemset, tids, ius, rus)


def _merge(xt: list[int], yt: list[int]) -> Iterator[tuple[int, int]]:
    i = j = 0
    nx, ny = len(xt), len(yt)
    while i < nx and j < ny:
        a, b = xt[i], yt[j]
        if a == b:
            yield i, j
            i += 1
            j += 1
        elif a < b:
            i += 1
        else:
            j += 1


def _gallop(xt: list[int], yt: list[int]) -> Iterator[tuple[int, int]]:
    # Probe the longer side for each element of the shorter one.
    swap = len(xt) > len(yt)
    short, long_ = (yt, xt) if swap else (xt, yt)
    lo = 0
    n = len(long_)
    for k, tid in enumerate(short):
        lo = bisect_left(long_, tid, lo)
        if lo == n:
            break
        if long_[lo] == tid:
            yield (lo, k) if swap else (k, lo)


def join_laprune(
    prefix: UtilityList | None, px: UtilityList, py: UtilityList, miu_px: int
) -> UtilityList | None:
    """As :func:`join`, but gives up (returns None) once the remaining
    utility bound of P+x restricted to tids shared with P+y drops below
    ``miu_px``."""
    if __debug__:
        px.check()
        py.check()
    itemset = px.itemset + (py.last,)
    bound = px.iu + px.ru
    xt, yt = px.tids, py.tids
    xiu, xru = px.ius, px.rus
    yiu, yru = py.ius, py.rus
    ny = len(yt)
    use_prefix = prefix is not None and len(prefix.itemset) > 0
    tids, ius, rus = [], [], []
    j = pp = 0
    for i, tid in enumerate(xt):
        while j < ny and yt[j] < tid:
            j += 1
        if j < ny and yt[j] == tid:
            iu = xiu[i] + yiu[j]
            if use_prefix:
                piu, pp = _prefix_iu(prefix, pp, tid)
                iu -= piu
            tids.append(tid)
            ius.append(iu)
            rus.append(yru[j])
            j += 1
        else:
            bound -= xiu[i] + xru[i]
            if bound < miu_px:
                return None
    return UtilityList(itemset, tids, ius, rus)
