import itertools

import numpy as np
import pytest

from predcut.errors import DimensionError
from predcut.lp import (AbsSumLp, INFEASIBLE, LpGroup, OPTIMAL, check_feasibility,
                        solve)


# ---------------------------------------------------------------------------
# Independent oracle (written before the solver wiring): enumerate every
# vertex of the linearized polytope (slack variable per |form|) by solving
# all square subsystems of active constraints, keep the feasible ones, and
# take the best objective among them. The LP optimum is attained at one.
# ---------------------------------------------------------------------------

def _linearize(lp):
    n = lp.n
    K = sum(g.coeffs.shape[0] for g in lp.groups)
    dim = n + K
    rows, rhs = [], []
    off = n
    for g in lp.groups:
        k = g.coeffs.shape[0]
        for t in range(k):
            r = np.zeros(dim)
            r[:n] = g.coeffs[t]
            r[off + t] = -1.0
            rows.append(r)
            rhs.append(-g.offsets[t])
            r = np.zeros(dim)
            r[:n] = -g.coeffs[t]
            r[off + t] = -1.0
            rows.append(r)
            rhs.append(g.offsets[t])
        r = np.zeros(dim)
        r[off:off + k] = 1.0
        rows.append(r)
        rhs.append(g.budget)
        off += k
    for v in range(dim):
        hi = np.zeros(dim)
        hi[v] = 1.0
        rows.append(hi)
        rhs.append(1.0 if v < n else max(gr.budget for gr in lp.groups))
        lo = np.zeros(dim)
        lo[v] = -1.0
        rows.append(lo)
        rhs.append(1.0 if v < n else 0.0)
    return np.array(rows), np.array(rhs), dim


def brute_force_lp(lp):
    """(best objective, argmin x) by exhaustive vertex enumeration."""
    A, b, dim = _linearize(lp)
    c = np.concatenate([lp.objective, np.zeros(dim - lp.n)])
    best_val, best_x = np.inf, None
    for rows in itertools.combinations(range(len(A)), dim):
        M = A[list(rows)]
        if abs(np.linalg.det(M)) < 1e-10:
            continue
        v = np.linalg.solve(M, b[list(rows)])
        if np.all(A @ v <= b + 1e-8):
            val = c @ v
            if val < best_val - 1e-12:
                best_val, best_x = val, v[:lp.n]
    return best_val, best_x


def random_abs_sum_lp(rng, n=3, forms=2):
    c = rng.normal(size=n)
    coeffs = rng.normal(size=(forms, n))
    offsets = rng.normal(size=forms)
    budget = float(rng.uniform(0.5, 3.0))
    return AbsSumLp(objective=c, groups=[LpGroup(coeffs, offsets, budget)])


def test_interval_geometry_example():
    lp = AbsSumLp(objective=np.array([1.0]),
                  groups=[LpGroup(np.array([[1.0]]), np.array([-1.0]), 0.5)])
    sol = solve(lp)
    assert sol.status == OPTIMAL
    assert sol.x[0] == pytest.approx(0.5, abs=1e-7)
    assert sol.objective_value == pytest.approx(0.5, abs=1e-6)


def test_zero_objective_feasible():
    lp = AbsSumLp(objective=np.zeros(2),
                  groups=[LpGroup(np.eye(2), np.zeros(2), 5.0)])
    sol = solve(lp)
    assert sol.status == OPTIMAL
    assert sol.objective_value == 0.0


def test_matches_vertex_enumeration_oracle():
    rng = np.random.default_rng(31)
    for _ in range(12):
        lp = random_abs_sum_lp(rng, n=3, forms=2)
        oracle_val, _ = brute_force_lp(lp)
        sol = solve(lp)
        if oracle_val is np.inf:
            assert sol.status == INFEASIBLE
        else:
            assert sol.status == OPTIMAL
            assert sol.objective_value == pytest.approx(
                oracle_val, abs=1e-6 * (1 + abs(oracle_val)))


def test_matches_oracle_five_variables():
    rng = np.random.default_rng(32)
    lp = random_abs_sum_lp(rng, n=5, forms=2)
    oracle_val, _ = brute_force_lp(lp)
    sol = solve(lp)
    assert sol.status == OPTIMAL
    assert sol.objective_value == pytest.approx(oracle_val, abs=1e-6 * (1 + abs(oracle_val)))


def test_infeasible_detected():
    # |x - 3| <= 0.5 cannot hold on [-1, 1]
    lp = AbsSumLp(objective=np.array([1.0]),
                  groups=[LpGroup(np.array([[1.0]]), np.array([-3.0]), 0.5)])
    assert solve(lp).status == INFEASIBLE


def test_zero_budget_forces_equalities():
    # |x1 + x2 - 1| <= 0 and |x1 - x2| <= 0  ->  x = (0.5, 0.5)
    lp = AbsSumLp(objective=np.array([1.0, 0.0]),
                  groups=[LpGroup(np.array([[1.0, 1.0], [1.0, -1.0]]),
                                  np.array([-1.0, 0.0]), 0.0)])
    sol = solve(lp)
    assert sol.status == OPTIMAL
    assert sol.x == pytest.approx([0.5, 0.5], abs=1e-7)


def test_feasibility_certificate():
    rng = np.random.default_rng(33)
    for _ in range(20):
        lp = random_abs_sum_lp(rng, n=4, forms=3)
        sol = solve(lp)
        if sol.status == OPTIMAL:
            assert np.max(np.abs(sol.x)) <= 1.0 + 1e-9
            assert check_feasibility(lp, sol.x) <= 1e-7


def test_weak_duality_against_random_feasible_points():
    rng = np.random.default_rng(34)
    checked = 0
    while checked < 10:
        lp = random_abs_sum_lp(rng, n=4, forms=2)
        sol = solve(lp)
        if sol.status != OPTIMAL:
            continue
        scale = 1 + abs(sol.objective_value)
        found = 0
        for _ in range(200):
            x = rng.uniform(-1, 1, size=4)
            if check_feasibility(lp, x) <= 0:
                found += 1
                assert lp.objective @ x >= sol.objective_value - 1e-6 * scale
        if found:
            checked += 1


def test_scaling_invariance_of_argmin():
    # power-of-two scalings keep the normalized input bit-identical
    rng = np.random.default_rng(35)
    for _ in range(10):
        lp = random_abs_sum_lp(rng, n=4, forms=3)
        base = solve(lp)
        if base.status != OPTIMAL:
            continue
        for lam in (2.0, 0.25, 1024.0):
            scaled = AbsSumLp(objective=lam * lp.objective, groups=lp.groups)
            got = solve(scaled)
            assert np.array_equal(got.x, base.x)


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        AbsSumLp(objective=np.zeros(3),
                 groups=[LpGroup(np.zeros((1, 2)), np.zeros(1), 1.0)])
