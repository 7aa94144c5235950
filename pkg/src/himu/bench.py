"""Variant runs, oracle fuzzing and scalability series."""

from __future__ import annotations

import csv
import io
import json
import logging
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from .miner import VARIANTS, MiningResult, mine
from .mmugen import MmuGenConfig, assign_mu_for
from .model import MmuTable, QuantDatabase, from_rows, load_database, read_table
from .oracle import brute_force

log = logging.getLogger(__name__)

REPORT_SCHEMA_VERSION = 1
CSV_COLUMNS = (
    "variant",
    "rep",
    "hui_count",
    "visited_nodes",
    "join_calls",
    "eucp_skips",
    "laprune_aborts",
    "cdc_prunes",
    "load_time_ms",
    "wall_time_ms",
    "peak_memory_estimate",
)
# Fields that legitimately change from run to run.
VOLATILE = ("load_time_ms", "wall_time_ms", "peak_memory_estimate")


@dataclass
class Report:
    rows: list[dict] = field(default_factory=list)
    env: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow({k: row[k] for k in CSV_COLUMNS})
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {"schema_version": REPORT_SCHEMA_VERSION, "env": self.env, "rows": self.rows}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def stable(self) -> dict:
        """The report minus timing and memory fields."""
        rows = [{k: v for k, v in r.items() if k not in VOLATILE} for r in self.rows]
        return {"env": self.env, "rows": rows}


def _row(result: MiningResult, rep: int, load_ms: float) -> dict:
    s = result.stats
    return {
        "variant": result.variant,
        "rep": rep,
        "hui_count": len(result.huis),
        "visited_nodes": s.visited_nodes,
        "join_calls": s.join_calls,
        "eucp_skips": s.eucp_skips,
        "laprune_aborts": s.laprune_aborts,
        "cdc_prunes": s.cdc_prunes,
        "load_time_ms": round(load_ms, 3),
        "wall_time_ms": round(result.mine_time_ms, 3),
        "peak_memory_estimate": s.peak_memory_estimate,
    }


def check_variants(results: dict[str, MiningResult]) -> list[str]:
    """Cross-variant invariants; returns human-readable violations."""
    problems = []
    names = [v for v in VARIANTS if v in results]
    if not names:
        return problems
    ref = names[0]
    ref_text = results[ref].to_text()
    for v in names[1:]:
        if results[v].to_text() != ref_text:
            problems.append(f"{v} output differs from {ref}")
    for v in names:
        s = results[v].stats
        if v in ("himu", "lap") and s.eucp_skips:
            problems.append(f"{v} reported {s.eucp_skips} EUCS skips")
        if v in ("himu", "eucp") and s.laprune_aborts:
            problems.append(f"{v} reported {s.laprune_aborts} LA-Prune aborts")
    visited = [(v, results[v].stats.visited_nodes) for v in names]
    for (v1, n1), (v2, n2) in zip(visited, visited[1:]):
        if n1 < n2:
            problems.append(f"visited({v1})={n1} < visited({v2})={n2}")
    return problems


def run_variants(
    db: QuantDatabase,
    mmu: MmuTable,
    variants=VARIANTS,
    reps: int = 1,
    load_ms: float = 0.0,
    env: dict | None = None,
) -> tuple[Report, dict[str, MiningResult], list[str]]:
    """Mine once per (rep, variant); report rows are ordered rep-major."""
    if reps < 1:
        raise ValueError("reps must be >= 1")
    if not variants:
        raise ValueError("at least one variant is required")
    report = Report(env=dict(env or {}))
    report.env.setdefault("lmu", mmu.lmu() if len(mmu) else None)
    results: dict[str, MiningResult] = {}
    problems: list[str] = []
    for rep in range(reps):
        for v in variants:
            res = mine(db, mmu, v)
            report.rows.append(_row(res, rep, load_ms))
            if v in results:
                prev = results[v]
                if (prev.to_text(), asdict(prev.stats) | {"peak_memory_estimate": 0}) != (
                    res.to_text(),
                    asdict(res.stats) | {"peak_memory_estimate": 0},
                ):
                    problems.append(f"{v} is not deterministic across repetitions")
            results[v] = res
    problems += check_variants(results)
    return report, results, problems


# -- random instances -------------------------------------------------------


def random_instance(
    rng: random.Random,
    max_items: int = 10,
    max_transactions: int = 25,
    max_qty: int = 5,
    max_profit: int = 10,
) -> tuple[QuantDatabase, MmuTable]:
    m = rng.randint(1, max_items)
    n = rng.randint(1, max_transactions)
    labels = [f"i{k}" for k in range(m)]
    profit = {x: rng.randint(1, max_profit) for x in labels}
    # Mix dense and sparse instances so every pruning path gets exercised.
    width = rng.randint(1, m)
    rows = []
    for _ in range(n):
        items = rng.sample(labels, rng.randint(1, width))
        rows.append({x: rng.randint(1, max_qty) for x in items})
    db = from_rows(rows, profit)
    total = sum(db.transaction_utilities)
    lo = max(1, total // rng.choice((4, 16, 64)))
    hi = max(lo, total // rng.choice((1, 2, 4)))
    mmu = MmuTable({i: rng.randint(lo, hi) for i in range(db.m)})
    return db, mmu


@dataclass
class FuzzSummary:
    count: int
    passed: int
    failures: list[tuple[int, str]]

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def first_failing_seed(self) -> int | None:
        return min(s for s, _ in self.failures) if self.failures else None


def _mutant(result: MiningResult) -> MiningResult:
    # Self-check of the harness: silently lose one pattern.
    if result.huis:
        result.huis = result.huis[:-1]
    return result


def check_instance(seed: int, max_items: int = 10, max_transactions: int = 25, mutate: bool = False) -> str | None:
    """Mine one seeded instance with every variant; None when all agree with the oracle."""
    db, mmu = random_instance(random.Random(seed), max_items, max_transactions)
    expected = brute_force(db, mmu).huis
    results = {}
    for v in VARIANTS:
        res = mine(db, mmu, v)
        if mutate:
            res = _mutant(res)
        results[v] = res
        got = res.as_dict()
        if got != expected:
            missing = sorted(map(sorted, expected.keys() - got.keys()))
            extra = sorted(map(sorted, got.keys() - expected.keys()))
            return f"{v}: oracle mismatch (missing {missing}, extra {extra})"
        for h in res.huis:
            if h.utility < h.miu:
                return f"{v}: {h.itemset} below its MIU"
    problems = check_variants(results)
    return "; ".join(problems) if problems else None


def _fuzz_chunk(args) -> list[tuple[int, str]]:
    seeds, max_items, max_transactions, mutate = args
    out = []
    for s in seeds:
        msg = check_instance(s, max_items, max_transactions, mutate)
        if msg:
            out.append((s, msg))
    return out


def fuzz(
    count: int,
    seed: int = 0,
    max_items: int = 10,
    max_transactions: int = 25,
    workers: int = 1,
    mutate: bool = False,
) -> FuzzSummary:
    """Instance k uses seed ``seed + k``."""
    if max_items > 20:
        raise ValueError("max_items beyond the oracle limit")
    seeds = list(range(seed, seed + count))
    if workers > 1 and count:
        chunks = [seeds[k::workers] for k in range(workers)]
        with ProcessPoolExecutor(workers) as pool:
            parts = pool.map(_fuzz_chunk, [(c, max_items, max_transactions, mutate) for c in chunks])
            failures = sorted(f for part in parts for f in part)
    else:
        failures = _fuzz_chunk((seeds, max_items, max_transactions, mutate))
    return FuzzSummary(count, count - len(failures), failures)


# -- synthetic scalability data ---------------------------------------------


def synthetic_rows(
    n_items: int, avg_len: int, n_transactions: int, seed: int, max_qty: int = 5, max_profit: int = 1000
) -> tuple[list[dict[str, int]], dict[str, int]]:
    """Uniform toy generator (not IBM Quest): lengths uniform on
    [1, 2*avg_len - 1], items drawn without replacement, quantities in
    [1, max_qty], profits in [1, max_profit]."""
    rng = random.Random(seed)
    labels = [str(k) for k in range(1, n_items + 1)]
    profit = {x: rng.randint(1, max_profit) for x in labels}
    top = min(n_items, 2 * avg_len - 1)
    rows = []
    for _ in range(n_transactions):
        items = rng.sample(labels, rng.randint(1, top))
        rows.append({x: rng.randint(1, max_qty) for x in items})
    return rows, profit


def scale_series(
    n_items: int,
    avg_len: int,
    sizes: list[int],
    seed: int,
    cfg: MmuGenConfig,
    variants=VARIANTS,
) -> list[tuple[int, Report, list[str]]]:
    """One report per size.  Smaller databases are prefixes of the largest,
    so with a fixed threshold configuration every count can only grow."""
    if n_items <= 0 or avg_len <= 0 or not sizes or min(sizes) <= 0:
        raise ValueError("generator parameters must be positive")
    rows, profit = synthetic_rows(n_items, avg_len, max(sizes), seed)
    out = []
    for size in sizes:
        t0 = time.perf_counter()
        db = from_rows(rows[:size], profit)
        load_ms = (time.perf_counter() - t0) * 1000
        # Profits of items that never occur in the prefix are simply unused.
        mmu = assign_mu_for(db, cfg)
        env = {
            "transactions": size,
            "items": n_items,
            "avg_len": avg_len,
            "seed": seed,
            "glmu": cfg.glmu,
            "beta": str(cfg.beta) if cfg.beta_range is None else None,
            "beta_range": list(cfg.beta_range) if cfg.beta_range else None,
        }
        report, _, problems = run_variants(db, mmu, variants, 1, load_ms, env)
        out.append((size, report, problems))
    return out


def scale_problems(series: list[tuple[int, Report, list[str]]]) -> list[str]:
    """Visited-node counts must not shrink as the database grows."""
    problems = []
    for (s1, r1, _), (s2, r2, _) in zip(series, series[1:]):
        v1 = {r["variant"]: r["visited_nodes"] for r in r1.rows}
        v2 = {r["variant"]: r["visited_nodes"] for r in r2.rows}
        for v in v1:
            if v in v2 and v2[v] < v1[v]:
                problems.append(f"{v}: visited nodes fell from {v1[v]} at {s1} to {v2[v]} at {s2}")
    for size, _, p in series:
        problems += [f"size {size}: {msg}" for msg in p]
    return problems


def load_inputs(path: str, fmt: str, profits: str | None, scale: int = 1) -> QuantDatabase:
    profit = None
    if profits is not None:
        with open(profits, encoding="utf-8") as fh:
            profit = read_table(fh, scale, profits)
    with open(path, encoding="utf-8") as fh:
        return load_database(fh, fmt, profit, scale, path)
