"""Exact solvers for the rectangular linear assignment problem.

Given an m x n cost matrix with m >= n (rows: available measurements at one
date, columns: objects), pick one row per column, no row twice, minimizing
the total cost. ``solve`` runs a shortest-augmenting-path Kuhn-Munkres over
the n columns directly, so no square padding is needed; ``brute_force_solve``
enumerates every injective map and serves as the test oracle.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

__all__ = ["CostMatrix", "Assignment", "solve", "brute_force_solve"]

BRUTE_FORCE_MAX_ROWS = 9


@dataclass(frozen=True)
class CostMatrix:
    """Dense m x n grid of finite, nonnegative costs with m >= n >= 1."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=float, copy=True)
        if entries.ndim != 2:
            raise ValueError(f"cost matrix must be 2-D, got shape {entries.shape}")
        m, n = entries.shape
        if n < 1:
            raise ValueError("cost matrix needs at least one column")
        if m < n:
            raise ValueError(
                f"cost matrix needs at least as many rows as columns, got {m}x{n}"
            )
        bad = ~np.isfinite(entries) | (entries < 0.0)
        if bad.any():
            k, i = (int(v) for v in np.argwhere(bad)[0])
            raise ValueError(
                f"cost matrix entry ({k}, {i}) must be finite and >= 0, "
                f"got {entries[k, i]}"
            )
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True)
class Assignment:
    """An injective object -> measurement-row map and its total cost.

    ``row_of[i]`` is the measurement row assigned to object ``i``;
    ``total_cost`` is the ordered sum of the selected entries over ``i``.
    """

    row_of: tuple[int, ...]
    total_cost: float

    def __post_init__(self) -> None:
        if len(set(self.row_of)) != len(self.row_of):
            raise ValueError(f"assignment is not injective: {self.row_of}")
        if not (math.isfinite(self.total_cost) and self.total_cost >= 0.0):
            raise ValueError(f"total cost must be finite and >= 0, got {self.total_cost}")


def _as_cost_matrix(costs) -> CostMatrix:
    return costs if isinstance(costs, CostMatrix) else CostMatrix(np.asarray(costs))


def _ordered_total(rows: list[list[float]], row_of) -> float:
    # Summation order over the object index is part of the contract; both
    # solvers go through here so their totals are comparable bit-for-bit.
    total = 0.0
    for i, k in enumerate(row_of):
        total += rows[k][i]
    return total


def solve_lists(cost_by_object: list[list[float]], m: int, n: int) -> list[int]:
    """Shortest-augmenting-path Kuhn-Munkres core over plain Python lists.

    ``cost_by_object[i][k]`` is the cost of giving measurement row ``k`` to
    object ``i``. Returns ``row_of`` (length n). Objects are introduced in
    ascending index order and row scans ascend with strict improvement, which
    fixes the tie-break deterministically.
    """
    inf = math.inf
    # Dual potentials: u over objects (1-based, u[0] is the virtual start),
    # v over rows (index m is the virtual start row).
    u = [0.0] * (n + 1)
    v = [0.0] * (m + 1)
    matched_object = [0] * (m + 1)  # 1-based object matched to each row
    way = [0] * (m + 1)

    for obj in range(1, n + 1):
        matched_object[m] = obj
        j0 = m
        minv = [inf] * (m + 1)
        used = [False] * (m + 1)
        while True:
            used[j0] = True
            i0 = matched_object[j0]
            cost_i0 = cost_by_object[i0 - 1]
            u_i0 = u[i0]
            delta = inf
            j1 = -1
            for j in range(m):
                if used[j]:
                    continue
                cur = cost_i0[j] - u_i0 - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(m + 1):
                if used[j]:
                    u[matched_object[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if matched_object[j0] == 0:
                break
        while j0 != m:
            j1 = way[j0]
            matched_object[j0] = matched_object[j1]
            j0 = j1

    row_of = [-1] * n
    for k in range(m):
        if matched_object[k] > 0:
            row_of[matched_object[k] - 1] = k
    return row_of


def solve(costs) -> Assignment:
    """Solve the rectangular assignment problem exactly.

    Accepts a :class:`CostMatrix` or anything array-like that passes its
    validation. The returned assignment attains the global minimum; among
    multiple optima the deterministic scan order (ascending object index,
    ascending measurement index) picks one, and only the total cost is
    contractual.
    """
    cm = _as_cost_matrix(costs)
    rows = cm.entries.tolist()
    cost_by_object = cm.entries.T.tolist()
    row_of = solve_lists(cost_by_object, cm.m, cm.n)
    return Assignment(tuple(row_of), _ordered_total(rows, row_of))


def brute_force_solve(costs) -> Assignment:
    """Exhaustively enumerate injective maps; the oracle for ``solve``.

    Guarded to m <= 9 rows (9!/(9-n)! maps at worst). Ties resolve to the
    lexicographically first optimal map, which for the all-equal matrix is
    the identity.
    """
    cm = _as_cost_matrix(costs)
    if cm.m > BRUTE_FORCE_MAX_ROWS:
        raise ValueError(
            f"brute force limited to {BRUTE_FORCE_MAX_ROWS} rows, got {cm.m}"
        )
    rows = cm.entries.tolist()
    best_map: tuple[int, ...] | None = None
    best_cost = math.inf
    for perm in itertools.permutations(range(cm.m), cm.n):
        total = _ordered_total(rows, perm)
        if total < best_cost:
            best_cost = total
            best_map = perm
    assert best_map is not None
    return Assignment(best_map, best_cost)
