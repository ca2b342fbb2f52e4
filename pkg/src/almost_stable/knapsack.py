"""Exact pseudo-polynomial solver for two-dimensional knapsack."""

from __future__ import annotations

import os
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .errors import BudgetOverflow, InvalidParameters

DEFAULT_MAX_CELLS = 10**9
MAX_CELLS_ENV = "ALMOST_STABLE_MAX_CELLS"


def max_cells() -> int:
    raw = os.environ.get(MAX_CELLS_ENV)
    if raw is None:
        return DEFAULT_MAX_CELLS
    try:
        return int(raw)
    except ValueError:
        raise InvalidParameters(f"{MAX_CELLS_ENV} must be an integer, got {raw!r}") from None


@dataclass(frozen=True)
class KnapsackInstance:
    """Items are ``(cost1, cost2, profit)`` triples."""

    items: tuple[tuple[int, int, int], ...]
    c1: int
    c2: int
    p: int

    def __post_init__(self):
        items = tuple(tuple(int(v) for v in it) for it in self.items)
        object.__setattr__(self, "items", items)
        for it in items:
            if len(it) != 3 or min(it) < 0:
                raise InvalidParameters(f"item {it} must be three non-negative integers")
        if min(self.c1, self.c2, self.p) < 0:
            raise InvalidParameters("budgets and target must be non-negative")

    @classmethod
    def of(cls, items: Sequence[Sequence[int]], c1: int, c2: int, p: int) -> KnapsackInstance:
        return cls(tuple(tuple(it) for it in items), c1, c2, p)


def profit_tables(instance: KnapsackInstance, cell_cap: int | None = None) -> list[np.ndarray]:
    """Suffix tables: ``tables[i][x, y]`` is the best profit of items ``i..``
    within budgets ``(x, y)``."""
    cap = max_cells() if cell_cap is None else cell_cap
    cells = (instance.c1 + 1) * (instance.c2 + 1)
    if cells > cap:
        raise BudgetOverflow(f"table needs {cells} cells, cap is {cap}")
    cur = np.zeros((instance.c1 + 1, instance.c2 + 1), dtype=np.int64)
    tables = [cur]
    for a, b, p in reversed(instance.items):
        nxt = cur.copy()
        if a <= instance.c1 and b <= instance.c2:
            shifted = cur[: instance.c1 + 1 - a, : instance.c2 + 1 - b] + p
            np.maximum(nxt[a:, b:], shifted, out=nxt[a:, b:])
        tables.append(nxt)
        cur = nxt
    tables.reverse()
    return tables


def solve_2dkp(instance: KnapsackInstance, cell_cap: int | None = None) -> tuple[int, ...] | None:
    """Return 1-based indices of a feasible item set, or None.

    Reconstruction walks the items in input order and takes an item whenever
    the target is still reachable with it.
    """
    tables = profit_tables(instance, cell_cap)
    x, y, need = instance.c1, instance.c2, instance.p
    if tables[0][x, y] < need:
        return None
    chosen = []
    for i, (a, b, p) in enumerate(instance.items):
        if a <= x and b <= y and p + tables[i + 1][x - a, y - b] >= need:
            chosen.append(i + 1)
            x, y, need = x - a, y - b, need - p
    return tuple(chosen)
