"""``himu`` command line: mine, fuzz, scale, gen-mmu, oracle.

Exit codes: 0 ok, 1 usage, 2 parse/validation error, 3 invariant violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from fractions import Fraction

from . import bench
from .miner import VARIANTS, Hui, format_huis
from .mmugen import MmuGenConfig, assign_mu, assign_mu_for
from .model import FORMATS, SPMF, LoadError, MmuTable, build_total_order, dump_table, parse_fixed, read_table
from .oracle import TooManyItems, brute_force

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_INVARIANT = 0, 1, 2, 3

log = logging.getLogger("himu")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _beta_range(text: str) -> tuple[float, float]:
    lo, sep, hi = text.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError("expected lo:hi")
    try:
        return float(lo), float(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}") from None


def _variants(text: str) -> list[str]:
    if text == "all":
        return list(VARIANTS)
    names = [v.strip() for v in text.split(",") if v.strip()]
    bad = [v for v in names if v not in VARIANTS]
    if bad or not names:
        raise argparse.ArgumentTypeError(f"unknown variants {bad}; choose from {','.join(VARIANTS)}")
    return names


def _sizes(text: str) -> list[int]:
    try:
        sizes = [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from None
    if not sizes or min(sizes) <= 0:
        raise argparse.ArgumentTypeError("sizes must be positive")
    return sizes


def _format(text: str) -> str:
    return SPMF if text in ("spmf", SPMF) else text


def _add_input(p):
    p.add_argument("--input", required=True, help="transaction file")
    p.add_argument("--format", type=_format, default="quantity", choices=FORMATS)
    p.add_argument("--profits", help="profit table (quantity format)")
    p.add_argument("--scale", type=int, default=1, help="fixed-point scale for utilities")


def _add_thresholds(p):
    p.add_argument("--mmu", help="MMU table file (label mu per line)")
    p.add_argument("--glmu", help="global least minimum utility")
    p.add_argument("--beta", default="0", help="fixed threshold multiplier")
    p.add_argument("--beta-range", type=_beta_range, help="per-item multiplier range lo:hi")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="himu", description="Mine high-utility itemsets under per-item minimum utility thresholds.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("mine", help="mine HUIs with one or more variants")
    _add_input(p)
    _add_thresholds(p)
    p.add_argument("--variants", type=_variants, default=list(VARIANTS))
    p.add_argument("--out", help="write the HUI list here")
    p.add_argument("--report", help="report path stem; writes STEM.csv and STEM.json")
    p.add_argument("--reps", type=int, default=1)

    p = sub.add_parser("oracle", help="exhaustive enumeration (small databases)")
    _add_input(p)
    _add_thresholds(p)
    p.add_argument("--max-items", type=int, default=20)
    p.add_argument("--out", help="write the HUI list here")

    p = sub.add_parser("gen-mmu", help="derive an MMU table from unit profits")
    p.add_argument("--profits", required=True)
    p.add_argument("--scale", type=int, default=1)
    p.add_argument("--glmu", required=True)
    p.add_argument("--beta", default="0")
    p.add_argument("--beta-range", type=_beta_range)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output file (default stdout)")

    p = sub.add_parser("fuzz", help="compare every variant against the oracle on random instances")
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-items", type=int, default=10)
    p.add_argument("--max-transactions", type=int, default=25)
    p.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    p.add_argument("--mutate", action="store_true", help="corrupt the miner to self-check the harness")

    p = sub.add_parser("scale", help="run every variant on growing synthetic databases")
    p.add_argument("--items", type=int, default=100)
    p.add_argument("--avg-len", type=int, default=5)
    p.add_argument("--sizes", type=_sizes, default=[1000, 2000, 4000, 8000])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--glmu", default="20000")
    p.add_argument("--beta", default="10")
    p.add_argument("--beta-range", type=_beta_range)
    p.add_argument("--variants", type=_variants, default=list(VARIANTS))
    p.add_argument("--report", help="report path stem; writes STEM.csv and STEM.json")
    return parser


def _gen_config(args, scale: int) -> MmuGenConfig:
    try:
        glmu = parse_fixed(args.glmu, scale)
        beta = Fraction(args.beta)
        return MmuGenConfig(glmu, beta, args.beta_range, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _thresholds(args, db) -> tuple[MmuTable, dict]:
    if args.mmu:
        with open(args.mmu, encoding="utf-8") as fh:
            table = read_table(fh, args.scale, args.mmu)
        return MmuTable.from_labels(db, table), {"mmu": args.mmu}
    if args.glmu is None:
        raise UsageError("give either --mmu or --glmu")
    cfg = _gen_config(args, args.scale)
    env = {"glmu": args.glmu, "beta": args.beta, "beta_range": args.beta_range, "seed": args.seed}
    try:
        return assign_mu_for(db, cfg), env
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _load(args):
    if args.format == "quantity" and not args.profits:
        raise UsageError("--profits is required for the quantity format")
    t0 = time.perf_counter()
    db = bench.load_inputs(args.input, args.format, args.profits, args.scale)
    return db, (time.perf_counter() - t0) * 1000


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _write_report(stem: str | None, report: bench.Report) -> None:
    if stem:
        _write(stem + ".csv", report.to_csv())
        _write(stem + ".json", report.to_json())


def cmd_mine(args) -> int:
    if args.reps < 1:
        raise UsageError("--reps must be >= 1")
    db, load_ms = _load(args)
    mmu, env = _thresholds(args, db)
    env.update(input=args.input, format=args.format)
    report, results, problems = bench.run_variants(db, mmu, args.variants, args.reps, load_ms, env)
    first = results[args.variants[0]]
    if args.out:
        _write(args.out, first.to_text())
    _write_report(args.report, report)
    for row in report.rows:
        log.info("%s rep %d: %d HUIs, %d nodes, %.1f ms", row["variant"], row["rep"], row["hui_count"],
                 row["visited_nodes"], row["wall_time_ms"])
    if not args.out:
        sys.stdout.write(first.to_text())
    for msg in problems:
        print(f"invariant violation: {msg}", file=sys.stderr)
    return EXIT_INVARIANT if problems else EXIT_OK


def cmd_oracle(args) -> int:
    db, _ = _load(args)
    mmu, _ = _thresholds(args, db)
    res = brute_force(db, mmu, args.max_items)
    order = build_total_order(mmu, range(db.m))
    huis = [Hui(order.sort(x), u, min(mmu[i] for i in x)) for x, u in res.huis.items()]
    huis.sort(key=lambda h: [order.rank[i] for i in h.itemset])
    _write(args.out, format_huis(huis, db.labels, db.scale))
    return EXIT_OK


def cmd_gen_mmu(args) -> int:
    with open(args.profits, encoding="utf-8") as fh:
        profit = read_table(fh, args.scale, args.profits)
    table = assign_mu(profit, _gen_config(args, args.scale))
    _write(args.out, dump_table(table, args.scale))
    return EXIT_OK


def cmd_fuzz(args) -> int:
    if args.count < 0 or args.max_items < 1 or args.max_transactions < 1:
        raise UsageError("count must be >= 0 and size bounds >= 1")
    t0 = time.perf_counter()
    try:
        summary = bench.fuzz(args.count, args.seed, args.max_items, args.max_transactions, args.workers, args.mutate)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    elapsed = time.perf_counter() - t0
    print(f"{summary.passed}/{summary.count} instances passed in {elapsed:.1f} s")
    if not summary.ok:
        for seed, msg in summary.failures[:10]:
            print(f"seed {seed}: {msg}")
        print(f"first failing seed: {summary.first_failing_seed}")
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_scale(args) -> int:
    cfg = _gen_config(args, 1)
    try:
        series = bench.scale_series(args.items, args.avg_len, args.sizes, args.seed, cfg, args.variants)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    problems = bench.scale_problems(series)
    for size, report, _ in series:
        for row in report.rows:
            print(f"{size}\t{row['variant']}\t{row['hui_count']}\t{row['visited_nodes']}\t{row['wall_time_ms']:.1f} ms")
    if args.report:
        header = "transactions," + ",".join(bench.CSV_COLUMNS) + "\n"
        lines = [header]
        for size, report, _ in series:
            lines += [f"{size},{line}\n" for line in report.to_csv().splitlines()[1:]]
        _write(args.report + ".csv", "".join(lines))
        doc = {
            "schema_version": bench.REPORT_SCHEMA_VERSION,
            "series": [{"transactions": size, **report.to_dict()} for size, report, _ in series],
        }
        _write(args.report + ".json", json.dumps(doc, indent=2))
    for msg in problems:
        print(f"invariant violation: {msg}", file=sys.stderr)
    return EXIT_INVARIANT if problems else EXIT_OK


COMMANDS = {
    "mine": cmd_mine,
    "oracle": cmd_oracle,
    "gen-mmu": cmd_gen_mmu,
    "fuzz": cmd_fuzz,
    "scale": cmd_scale,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"himu: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (LoadError, TooManyItems, OSError) as exc:
        print(f"himu: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
