"""Automatic per-item thresholds: mu(i) = max(beta_i * pr(i), GLMU)."""

from __future__ import annotations

import random
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from typing import Mapping

from .model import MmuTable, QuantDatabase


@dataclass(frozen=True)
class MmuGenConfig:
    """``beta`` is used when ``beta_range`` is None, otherwise each item draws
    its own multiplier uniformly from the closed range using ``seed``."""

    glmu: int
    beta: Fraction | float | int = 0
    beta_range: tuple[float, float] | None = None
    seed: int = 0

    def __post_init__(self):
        if self.glmu <= 0:
            raise ValueError("glmu must be positive")
        if self.beta_range is None:
            if self.beta < 0:
                raise ValueError("beta must be non-negative")
        else:
            lo, hi = self.beta_range
            if lo < 0 or lo > hi:
                raise ValueError(f"bad beta range {lo}:{hi}")


def _round_half_up(x: Fraction) -> int:
    return int((Decimal(x.numerator) / Decimal(x.denominator)).quantize(Decimal(1), rounding=ROUND_HALF_UP))


def assign_mu(profit: Mapping[str, int], cfg: MmuGenConfig) -> dict[str, int]:
    """Label-keyed thresholds for every item in ``profit``.

    Items are visited in sorted label order so the draw sequence, and hence
    the table, depends only on the profit table and the config.
    """
    if not profit:
        raise ValueError("profit table is empty")
    rng = random.Random(cfg.seed)
    out = {}
    for label in sorted(profit):
        if cfg.beta_range is None:
            beta = Fraction(cfg.beta)
        else:
            beta = Fraction(rng.uniform(*cfg.beta_range))
        out[label] = max(_round_half_up(beta * profit[label]), cfg.glmu)
    return out


def assign_mu_for(db: QuantDatabase, cfg: MmuGenConfig) -> MmuTable:
    """Same as :func:`assign_mu` but bound to a quantity-mode database."""
    if db.profit is None:
        raise ValueError("database has no unit profits (spmf-utility input)")
    table = assign_mu(dict(zip(db.labels, db.profit)), cfg)
    return MmuTable.from_labels(db, table)
