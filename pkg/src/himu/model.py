"""Quantitative transaction databases, profit and threshold tables.

Utilities are fixed-point integers: every external number is multiplied by
``scale`` on load and must land on an integer.  With the default scale of 1
the text files hold plain integers.
"""

from __future__ import annotations

import io
import logging
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from typing import Iterable, Mapping, TextIO

log = logging.getLogger(__name__)

QUANTITY = "quantity"
SPMF = "spmf-utility"
FORMATS = (QUANTITY, SPMF)


class LoadError(ValueError):
    """Malformed or inconsistent input data."""

    def __init__(self, message: str, source: str | None = None, line: int | None = None):
        where = ""
        if source is not None:
            where = source if line is None else f"{source}:{line}"
        elif line is not None:
            where = f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)
        self.source = source
        self.line = line


class AbsentItemError(KeyError):
    pass


def parse_fixed(token: str, scale: int = 1) -> int:
    """Convert a decimal token to a fixed-point integer at ``scale``."""
    try:
        value = Decimal(token) * scale
    except InvalidOperation:
        raise ValueError(f"not a number: {token!r}") from None
    if value != value.to_integral_value():
        raise ValueError(f"{token!r} is not representable at scale {scale}")
    return int(value)


def format_fixed(value: int, scale: int = 1) -> str:
    if scale == 1:
        return str(value)
    return str(Decimal(value) / Decimal(scale))


@dataclass(frozen=True)
class Transaction:
    tid: int
    items: tuple[int, ...]
    quantities: tuple[int, ...]
    utilities: tuple[int, ...]

    @property
    def tu(self) -> int:
        return sum(self.utilities)

    def utility_of(self, item: int) -> int:
        try:
            return self.utilities[self.items.index(item)]
        except ValueError:
            raise AbsentItemError(f"item {item} not in transaction {self.tid}") from None


@dataclass(frozen=True)
class QuantDatabase:
    """Immutable quantitative database.

    ``labels[i]`` is the external token of internal item ``i``; ids follow
    first appearance in the input.  ``profit`` is ``None`` for databases read
    in spmf-utility form, where per-occurrence utilities are stored directly.
    """

    labels: tuple[str, ...]
    transactions: tuple[Transaction, ...]
    profit: tuple[int, ...] | None = None
    scale: int = 1
    skipped_empty: int = 0
    _ids: dict[str, int] = field(init=False, repr=False, compare=False)
    _by_tid: dict[int, Transaction] = field(init=False, repr=False, compare=False)
    _tu: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        ids = {label: i for i, label in enumerate(self.labels)}
        if len(ids) != len(self.labels):
            raise LoadError("duplicate item label")
        by_tid = {}
        for t in self.transactions:
            if t.tid in by_tid:
                raise LoadError(f"duplicate tid {t.tid}")
            by_tid[t.tid] = t
        object.__setattr__(self, "_ids", ids)
        object.__setattr__(self, "_by_tid", by_tid)
        object.__setattr__(self, "_tu", tuple(t.tu for t in self.transactions))

    @property
    def n(self) -> int:
        return len(self.transactions)

    @property
    def m(self) -> int:
        return len(self.labels)

    @property
    def transaction_utilities(self) -> tuple[int, ...]:
        """tu of each transaction, cached at construction, in storage order."""
        return self._tu

    def item_id(self, label: str) -> int:
        try:
            return self._ids[label]
        except KeyError:
            raise AbsentItemError(f"unknown item {label!r}") from None

    def ids(self, labels: Iterable[str]) -> tuple[int, ...]:
        return tuple(self.item_id(x) for x in labels)

    def label(self, item: int) -> str:
        return self.labels[item]

    def transaction(self, tid: int) -> Transaction:
        try:
            return self._by_tid[tid]
        except KeyError:
            raise KeyError(f"unknown tid {tid}") from None

    def format_utility(self, value: int) -> str:
        return format_fixed(value, self.scale)


# -- utility arithmetic -----------------------------------------------------


def item_utility(db: QuantDatabase, item: int, tid: int) -> int:
    """u(i, T): quantity times unit profit, or the stored occurrence utility."""
    t = db.transaction(tid)
    if db.profit is None:
        return t.utility_of(item)
    try:
        q = t.quantities[t.items.index(item)]
    except ValueError:
        raise AbsentItemError(f"item {item} not in transaction {tid}") from None
    return q * db.profit[item]


def itemset_utility(db: QuantDatabase, itemset: Iterable[int]) -> int:
    """u(X) summed over the transactions containing every item of X."""
    want = set(itemset)
    if not want:
        raise ValueError("itemset must be non-empty")
    total = 0
    for t in db.transactions:
        if want.issubset(t.items):
            total += sum(u for i, u in zip(t.items, t.utilities) if i in want)
    return total


def transaction_utility(db: QuantDatabase, tid: int) -> int:
    return db.transaction(tid).tu


def twu_scan(db: QuantDatabase) -> dict[int, int]:
    """Transaction-weighted utility of every item, in one pass."""
    twu = dict.fromkeys(range(db.m), 0)
    for t, tu in zip(db.transactions, db.transaction_utilities):
        for i in t.items:
            twu[i] += tu
    return twu


def twu_of(db: QuantDatabase, itemset: Iterable[int]) -> int:
    want = set(itemset)
    return sum(tu for t, tu in zip(db.transactions, db.transaction_utilities) if want.issubset(t.items))


# -- thresholds and ordering ------------------------------------------------


@dataclass(frozen=True)
class MmuTable:
    """Per-item minimum utility thresholds, keyed by internal item id."""

    mu: Mapping[int, int]

    def __post_init__(self):
        bad = [i for i, v in self.mu.items() if v <= 0]
        if bad:
            raise ValueError(f"minimum utilities must be positive (items {bad})")
        object.__setattr__(self, "mu", dict(self.mu))

    def __getitem__(self, item: int) -> int:
        try:
            return self.mu[item]
        except KeyError:
            raise AbsentItemError(f"item {item} has no minimum utility") from None

    def __len__(self) -> int:
        return len(self.mu)

    def lmu(self) -> int:
        if not self.mu:
            raise ValueError("empty MMU table has no LMU")
        return min(self.mu.values())

    def covers(self, db: QuantDatabase) -> bool:
        return all(i in self.mu for i in range(db.m))

    @classmethod
    def from_labels(cls, db: QuantDatabase, table: Mapping[str, int]) -> "MmuTable":
        """Map a label-keyed table onto ``db``; labels absent from ``db`` are ignored."""
        mu = {}
        for label, value in table.items():
            if label in db._ids:
                mu[db._ids[label]] = value
        missing = [db.labels[i] for i in range(db.m) if i not in mu]
        if missing:
            raise LoadError(f"no minimum utility for items {missing}")
        return cls(mu)

    def to_labels(self, db: QuantDatabase) -> dict[str, int]:
        return {db.labels[i]: v for i, v in sorted(self.mu.items())}


def miu(mmu: MmuTable, itemset: Iterable[int]) -> int:
    """Smallest minimum utility among the items of a non-empty itemset."""
    values = [mmu[i] for i in itemset]
    if not values:
        raise ValueError("itemset must be non-empty")
    return min(values)


@dataclass(frozen=True)
class TotalOrder:
    items: tuple[int, ...]
    rank: dict[int, int]

    def __len__(self) -> int:
        return len(self.items)

    def __contains__(self, item: int) -> bool:
        return item in self.rank

    def sort(self, itemset: Iterable[int]) -> tuple[int, ...]:
        return tuple(sorted(itemset, key=self.rank.__getitem__))


def build_total_order(mmu: MmuTable, items: Iterable[int]) -> TotalOrder:
    """Ascending mu, ties broken by ascending item id."""
    seq = tuple(sorted(set(items), key=lambda i: (mmu[i], i)))
    return TotalOrder(seq, {item: r for r, item in enumerate(seq)})


# -- reading ----------------------------------------------------------------


def _lines(source: TextIO | str | bytes) -> Iterable[tuple[int, str]]:
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if isinstance(source, str):
        source = io.StringIO(source)
    for lineno, raw in enumerate(source, 1):
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        line = raw.split("#", 1)[0].strip()
        yield lineno, line


def read_table(source, scale: int = 1, name: str | None = None) -> dict[str, int]:
    """Read ``label value`` lines (profit or MMU files)."""
    table: dict[str, int] = {}
    for lineno, line in _lines(source):
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise LoadError(f"expected 'label value', got {line!r}", name, lineno)
        label, token = parts
        if label in table:
            raise LoadError(f"duplicate entry for {label!r}", name, lineno)
        try:
            value = parse_fixed(token, scale)
        except ValueError as exc:
            raise LoadError(str(exc), name, lineno) from None
        if value <= 0:
            raise LoadError(f"value for {label!r} must be positive", name, lineno)
        table[label] = value
    return table


def _spmf_line(line: str, scale: int, name, lineno) -> tuple[list[str], list[int]]:
    parts = line.split(":")
    if len(parts) != 3:
        raise LoadError("expected 'items:TU:utilities'", name, lineno)
    labels = parts[0].split()
    try:
        tu = parse_fixed(parts[1].strip(), scale)
        utils = [parse_fixed(tok, scale) for tok in parts[2].split()]
    except ValueError as exc:
        raise LoadError(str(exc), name, lineno) from None
    if len(labels) != len(utils):
        raise LoadError(f"{len(labels)} items but {len(utils)} utilities", name, lineno)
    if sum(utils) != tu:
        raise LoadError(f"transaction utility {parts[1].strip()} != sum of item utilities", name, lineno)
    return labels, utils


def _quantity_line(line: str, name, lineno) -> tuple[list[str], list[int]]:
    labels, qty = [], []
    for tok in line.split():
        label, sep, q = tok.rpartition(":")
        if not sep or not label:
            raise LoadError(f"expected 'label:qty', got {tok!r}", name, lineno)
        try:
            qty.append(int(q))
        except ValueError:
            raise LoadError(f"quantity {q!r} is not an integer", name, lineno) from None
        labels.append(label)
    return labels, qty


def load_database(
    source,
    format: str = QUANTITY,
    profit: Mapping[str, int] | None = None,
    scale: int = 1,
    name: str | None = None,
) -> QuantDatabase:
    """Parse a transaction file.

    ``profit`` maps labels to fixed-point unit profits and is required for the
    quantity format.  Tids are assigned 1, 2, ... to non-empty transactions in
    input order; empty lines are skipped and counted.
    """
    if format not in FORMATS:
        raise ValueError(f"unknown format {format!r}")
    if format == QUANTITY and profit is None:
        raise ValueError("the quantity format needs a profit table")

    ids: dict[str, int] = {}
    transactions = []
    skipped = 0
    for lineno, line in _lines(source):
        if not line:
            continue
        if format == SPMF:
            labels, values = _spmf_line(line, scale, name, lineno)
        else:
            labels, values = _quantity_line(line, name, lineno)
        if not labels:
            skipped += 1
            continue
        tid = len(transactions) + 1
        seen = set()
        for label in labels:
            if label in seen:
                raise LoadError(f"duplicate item {label!r} in transaction {tid}", name, lineno)
            seen.add(label)
        for label, v in zip(labels, values):
            if v <= 0:
                what = "utility" if format == SPMF else "quantity"
                raise LoadError(f"non-positive {what} for {label!r} in transaction {tid}", name, lineno)
        if format == QUANTITY:
            missing = [x for x in labels if x not in profit]
            if missing:
                raise LoadError(f"no profit for items {missing}", name, lineno)
            quantities = tuple(values)
            utilities = tuple(q * profit[x] for x, q in zip(labels, values))
        else:
            quantities = (1,) * len(values)
            utilities = tuple(values)
        items = tuple(ids.setdefault(x, len(ids)) for x in labels)
        transactions.append(Transaction(tid, items, quantities, utilities))

    if skipped:
        log.warning("skipped %d empty transactions", skipped)
    labels_seq = tuple(sorted(ids, key=ids.__getitem__))
    pr = None
    if format == QUANTITY:
        pr = tuple(profit[x] for x in labels_seq)
    return QuantDatabase(labels_seq, tuple(transactions), pr, scale, skipped)


def from_rows(
    rows: Iterable[Mapping[str, int]],
    profit: Mapping[str, int],
    scale: int = 1,
) -> QuantDatabase:
    """Build a quantity-mode database from ``{label: qty}`` rows."""
    text = "\n".join(" ".join(f"{k}:{q}" for k, q in row.items()) for row in rows)
    return load_database(text, QUANTITY, profit, scale)


# -- writing ----------------------------------------------------------------


def dump_quantity(db: QuantDatabase) -> tuple[str, str]:
    """Return (transactions text, profit text) in the quantity format."""
    if db.profit is None:
        raise ValueError("database has no profit table (spmf-utility input)")
    lines = [" ".join(f"{db.labels[i]}:{q}" for i, q in zip(t.items, t.quantities)) for t in db.transactions]
    prof = [f"{label} {format_fixed(p, db.scale)}" for label, p in zip(db.labels, db.profit)]
    return "\n".join(lines) + "\n", "\n".join(prof) + "\n"


def dump_spmf(db: QuantDatabase) -> str:
    lines = []
    for t in db.transactions:
        items = " ".join(db.labels[i] for i in t.items)
        utils = " ".join(format_fixed(u, db.scale) for u in t.utilities)
        lines.append(f"{items}:{format_fixed(t.tu, db.scale)}:{utils}")
    return "\n".join(lines) + "\n"


def dump_table(table: Mapping[str, int], scale: int = 1) -> str:
    return "".join(f"{label} {format_fixed(v, scale)}\n" for label, v in table.items())
