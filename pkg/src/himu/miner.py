"""Depth-first search of the MIU ordered set-enumeration tree.

Four variants share one search routine:

* ``himu``: utility-list joins with the IU + RU subtree bound only.
* ``eucp``: additionally skips joins whose last-item pair has a co-occurrence
  TWU below the node's MIU.
* ``lap``: joins abort early (LA-Prune) when the node's bound restricted to
  shared transactions falls below its MIU.
* ``elp``: both.

Because items are ordered by ascending mu, the MIU of every node equals the
mu of its first item, and so is constant along a subtree.  That is what makes
the IU + RU bound and both early-pruning checks safe.
"""

from __future__ import annotations

import json
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable

from .model import MmuTable, QuantDatabase, TotalOrder, format_fixed
from .utility_list import UtilityList, build_initial_lists, join, join_laprune

VARIANTS = ("himu", "eucp", "lap", "elp")
_EUCP = frozenset({"eucp", "elp"})
_LAP = frozenset({"lap", "elp"})

# Rough per-entry footprint of a utility-list in CPython: three list slots
# plus the (mostly small, cached or shared) int objects they point to.
ENTRY_BYTES = 3 * 8 + 2 * 28


class Eucs:
    """Sparse TWU table of co-occurring item pairs."""

    __slots__ = ("pairs",)

    def __init__(self, pairs: dict[tuple[int, int], int] | None = None):
        self.pairs = pairs if pairs is not None else {}

    @staticmethod
    def key(x: int, y: int) -> tuple[int, int]:
        return (x, y) if x < y else (y, x)

    def get(self, x: int, y: int) -> int:
        """TWU of {x, y}; pairs that never co-occur give 0."""
        return self.pairs.get((x, y) if x < y else (y, x), 0)

    def __len__(self) -> int:
        return len(self.pairs)

    def __contains__(self, pair) -> bool:
        return self.key(*pair) in self.pairs


def build_eucs(db: QuantDatabase, promising: Iterable[int]) -> Eucs:
    keep = set(promising)
    pairs: dict[tuple[int, int], int] = {}
    for t, tu in zip(db.transactions, db.transaction_utilities):
        items = sorted(i for i in t.items if i in keep)
        for k, x in enumerate(items):
            for y in items[k + 1 :]:
                pairs[(x, y)] = pairs.get((x, y), 0) + tu
    return Eucs(pairs)


@dataclass
class MiningStats:
    visited_nodes: int = 0
    join_calls: int = 0
    laprune_aborts: int = 0
    eucp_skips: int = 0
    cdc_prunes: int = 0
    # Approximate: peak number of live utility-list entries times ENTRY_BYTES.
    peak_memory_estimate: int = 0


@dataclass(frozen=True)
class Hui:
    itemset: tuple[int, ...]
    utility: int
    miu: int


@dataclass
class MiningResult:
    huis: list[Hui]
    stats: MiningStats
    variant: str
    lmu: int | None
    order: TotalOrder
    mine_time_ms: float = 0.0
    labels: tuple[str, ...] = field(default=(), repr=False)
    scale: int = 1

    def as_dict(self) -> dict[frozenset[int], int]:
        return {frozenset(h.itemset): h.utility for h in self.huis}

    def to_text(self) -> str:
        return format_huis(self.huis, self.labels, self.scale)

    def report(self) -> dict:
        return {
            "variant": self.variant,
            "lmu": self.lmu,
            "order": [self.labels[i] for i in self.order.items],
            "hui_count": len(self.huis),
            "stats": asdict(self.stats),
            "mine_time_ms": self.mine_time_ms,
        }

    def to_json(self) -> str:
        return json.dumps(self.report(), indent=2)


def format_huis(huis: Iterable[Hui], labels, scale: int = 1) -> str:
    """``a b c #UTIL: u #MIU: m`` lines; items listed in mining order."""
    out = []
    for h in huis:
        items = " ".join(labels[i] for i in h.itemset)
        out.append(f"{items} #UTIL: {format_fixed(h.utility, scale)} #MIU: {format_fixed(h.miu, scale)}\n")
    return "".join(out)


# Called as trace(parent, child) for every utility-list the search builds;
# ``parent`` is None for the first-level lists.
Trace = Callable[[UtilityList | None, UtilityList], None]


class _Search:
    def __init__(self, mmu: MmuTable, eucs: Eucs | None, lap: bool, trace: Trace | None):
        self.mu = mmu.mu
        self.eucs = eucs
        self.lap = lap
        self.trace = trace
        self.stats = MiningStats()
        self.huis: list[Hui] = []
        self.live = 0

    def run(self, prefix: UtilityList | None, exts: list[UtilityList]) -> None:
        stats = self.stats
        eucs = self.eucs
        trace = self.trace
        live = sum(len(x) for x in exts)
        self.live += live
        if self.live * ENTRY_BYTES > stats.peak_memory_estimate:
            stats.peak_memory_estimate = self.live * ENTRY_BYTES

        for k, xa in enumerate(exts):
            stats.visited_nodes += 1
            threshold = self.mu[xa.itemset[0]]
            if xa.iu >= threshold:
                self.huis.append(Hui(xa.itemset, xa.iu, threshold))
            if xa.iu + xa.ru < threshold:
                stats.cdc_prunes += 1
                continue
            a = xa.last
            children = []
            for xb in exts[k + 1 :]:
                if eucs is not None and eucs.get(a, xb.last) < threshold:
                    stats.eucp_skips += 1
                    continue
                stats.join_calls += 1
                if self.lap:
                    xab = join_laprune(prefix, xa, xb, threshold)
                    if xab is None:
                        stats.laprune_aborts += 1
                        continue
                else:
                    xab = join(prefix, xa, xb)
                if xab:
                    if trace is not None:
                        trace(xa, xab)
                    children.append(xab)
            if children:
                self.run(xa, children)

        self.live -= live


def mine(
    db: QuantDatabase,
    mmu: MmuTable,
    variant: str = "himu",
    trace: Trace | None = None,
) -> MiningResult:
    """Return every itemset X with u(X) >= MIU(X), in order-lexicographic order."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; choose from {', '.join(VARIANTS)}")
    if not mmu.covers(db):
        raise ValueError("MMU table does not cover every database item")
    start = time.perf_counter()
    order, lists, _ = build_initial_lists(db, mmu)
    eucs = build_eucs(db, order.items) if variant in _EUCP else None
    search = _Search(mmu, eucs, variant in _LAP, trace)
    if trace is not None:
        for ul in lists:
            trace(None, ul)

    # The tree is at most |I*| deep.
    limit = sys.getrecursionlimit()
    if len(lists) + 100 > limit:
        sys.setrecursionlimit(len(lists) + 100)
    search.run(None, [ul for ul in lists if ul])

    rank = order.rank
    huis = sorted(search.huis, key=lambda h: [rank[i] for i in h.itemset])
    elapsed = (time.perf_counter() - start) * 1000
    return MiningResult(
        huis=huis,
        stats=search.stats,
        variant=variant,
        lmu=mmu.lmu() if len(mmu) else None,
        order=order,
        mine_time_ms=elapsed,
        labels=db.labels,
        scale=db.scale,
    )
