import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as hst

from swarmtraj.assignment import (
    Assignment,
    CostMatrix,
    brute_force_solve,
    solve,
)


def random_matrix(rng, m_low=2, m_high=7):
    m = int(rng.integers(m_low, m_high + 1))
    n = int(rng.integers(1, m + 1))
    return rng.uniform(0.0, 10.0, (m, n))


class TestCostMatrix:
    def test_shape_and_views(self):
        cm = CostMatrix([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]])
        assert (cm.m, cm.n) == (3, 2)
        with pytest.raises(ValueError):
            cm.entries[0, 0] = 9.0  # frozen contents

    def test_rejects_more_columns_than_rows(self):
        with pytest.raises(ValueError, match="at least as many rows"):
            CostMatrix([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])

    @pytest.mark.parametrize("bad", [math.nan, -1.0, math.inf])
    def test_rejects_bad_entries_with_index(self, bad):
        with pytest.raises(ValueError, match=r"\(1, 0\)"):
            CostMatrix([[1.0, 2.0], [bad, 3.0], [4.0, 5.0]])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            CostMatrix(np.empty((3, 0)))


class TestAssignmentType:
    def test_rejects_duplicate_rows(self):
        with pytest.raises(ValueError, match="injective"):
            Assignment((0, 0), 1.0)


class TestSolve:
    def test_zero_diagonal(self):
        a = solve([[0.0, 1.0], [1.0, 0.0]])
        assert a.row_of == (0, 1)
        assert a.total_cost == 0.0

    def test_rectangular_3x2_matches_enumeration(self):
        costs = [[4.0, 1.0], [2.0, 0.0], [3.0, 2.0]]
        # Oracle: all 6 injective maps, ordered-sum totals.
        best = min(
            sum(costs[k][i] for i, k in enumerate(perm))
            for perm in [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]
        )
        assert best == 3.0
        a = solve(costs)
        assert a.total_cost == 3.0
        assert brute_force_solve(costs).total_cost == 3.0

    def test_all_equal_identity_tiebreak(self):
        a = solve(np.full((4, 4), 2.5))
        assert a.row_of == (0, 1, 2, 3)
        assert a.total_cost == 4 * 2.5

    def test_single_cell(self):
        a = solve([[7.25]])
        assert a.row_of == (0,)
        assert a.total_cost == 7.25

    def test_oracle_equivalence_200_random(self):
        rng = np.random.default_rng(20240611)
        for _ in range(200):
            mat = random_matrix(rng)
            assert solve(mat).total_cost == brute_force_solve(mat).total_cost

    def test_injectivity_random(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            mat = rng.uniform(0.0, 5.0, (int(rng.integers(3, 10)), 3))
            a = solve(mat)
            assert len(set(a.row_of)) == 3

    def test_column_shift_leaves_argmin(self):
        rng = np.random.default_rng(11)
        for _ in range(30):
            mat = rng.uniform(0.0, 10.0, (6, 4))
            base = solve(mat)
            shifted = mat.copy()
            shifted[:, 2] += 3.7
            assert solve(shifted).row_of == base.row_of

    def test_scaling(self):
        rng = np.random.default_rng(13)
        for _ in range(30):
            mat = rng.uniform(0.1, 10.0, (5, 3))
            lam = float(rng.uniform(0.5, 4.0))
            base = solve(mat)
            scaled = solve(mat * lam)
            assert scaled.row_of == base.row_of
            assert scaled.total_cost == pytest.approx(lam * base.total_cost,
                                                      rel=1e-12)

    def test_deterministic_output(self):
        rng = np.random.default_rng(3)
        mat = rng.uniform(0.0, 1.0, (7, 5))
        first = solve(mat)
        for _ in range(5):
            again = solve(mat)
            assert again.row_of == first.row_of
            assert again.total_cost == first.total_cost


class TestBruteForce:
    def test_guard(self):
        with pytest.raises(ValueError, match="9"):
            brute_force_solve(np.zeros((10, 2)))

    def test_degenerate_tie(self):
        a = brute_force_solve([[0.0, 0.0], [0.0, 0.0]])
        assert a.row_of == (0, 1)
        assert a.total_cost == 0.0


@settings(max_examples=60, deadline=None)
@given(hst.data())
def test_property_oracle_equivalence(data):
    m = data.draw(hst.integers(min_value=1, max_value=6))
    n = data.draw(hst.integers(min_value=1, max_value=m))
    flat = data.draw(hst.lists(
        hst.floats(min_value=0.0, max_value=100.0, allow_nan=False),
        min_size=m * n, max_size=m * n))
    mat = np.array(flat).reshape(m, n)
    exact = solve(mat)
    oracle = brute_force_solve(mat)
    assert exact.total_cost == oracle.total_cost
    assert len(set(exact.row_of)) == n
