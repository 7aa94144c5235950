"""High-utility itemset mining with per-item minimum utility thresholds."""

from .miner import VARIANTS, Eucs, Hui, MiningResult, MiningStats, build_eucs, mine
from .mmugen import MmuGenConfig, assign_mu, assign_mu_for
from .model import (
    LoadError,
    MmuTable,
    QuantDatabase,
    TotalOrder,
    Transaction,
    build_total_order,
    item_utility,
    itemset_utility,
    load_database,
    miu,
    read_table,
    transaction_utility,
    twu_scan,
)
from .oracle import OracleResult, brute_force
from .utility_list import UtilityList, UtilityListEntry, build_initial_lists, join, join_laprune

__version__ = "0.1.0"
