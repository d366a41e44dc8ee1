"""Wide-graph solver driven by noisy predictions.

Pipeline: estimate each wide vertex's neighborhood imbalance from the
prediction through the prefix-truncated adjacency, solve the box LP
    min <r_hat, x>  s.t.  ||r_hat - Ax||_1 <= (eps' + 2 eta) W,
then round the fractional solution, either by keeping the best of
O(1/eta) independent randomized roundings or by one deterministic
coordinate (pipage) pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .graph import (CutAssignment, Graph, cut_value, delta_prefix_weight,
                    truncated_adjacency, _values_of)
from .lp import AbsSumLp, LpGroup, LpSolution, solve as lp_solve
from .predictions import NoisyPrediction
from .sdp import SdpConfig, hyperplane_round, solve_sdp
from .seeds import derive

REPEAT = "repeat"
PIPAGE = "pipage"


@dataclass(frozen=True)
class ImbalanceEstimate:
    """Estimated neighborhood imbalances, zero on narrow vertices."""

    r_hat: np.ndarray
    delta: int
    epsilon: float
    eta: float
    wide_mask: np.ndarray

    @property
    def wide_set(self):
        return np.nonzero(self.wide_mask)[0]


def rounding_trials(eta: float) -> int:
    """Number of independent roundings matching the 0.99 success analysis."""
    if not (0.0 < eta):
        raise ParameterError(f"eta must be positive, got {eta}")
    return math.ceil(math.log(100.0) / math.log1p(eta / 2.0))


def estimate_imbalance(g: Graph, y: NoisyPrediction, delta: int, eta: float) -> ImbalanceEstimate:
    """r_hat_i = (A~ Y)_i / (2 eps) on wide vertices, 0 on narrow ones.

    The wide/narrow marking uses the eta the caller carries, which here may
    go up to 1 (unlike the graph-level classification contract).
    """
    if not (0.0 < eta < 1.0):
        raise ParameterError(f"eta must lie in (0, 1), got {eta}")
    if delta < 1:
        raise ParameterError(f"delta must be >= 1, got {delta}")
    wide = np.array([
        delta_prefix_weight(g, i, delta) <= eta * g.weighted_degrees[i] + 1e-12
        for i in range(g.n)
    ])
    At = truncated_adjacency(g, delta)
    r_hat = (At @ y.y) / (2.0 * y.epsilon)
    r_hat[~wide] = 0.0
    return ImbalanceEstimate(r_hat=r_hat, delta=int(delta), epsilon=y.epsilon,
                             eta=float(eta), wide_mask=wide)


def build_wide_lp(g: Graph, est: ImbalanceEstimate, eps_prime: float, eta: float) -> AbsSumLp:
    """LP whose single group bounds sum_i |r_hat_i - (Ax)_i| by (eps'+2 eta) W."""
    budget = (eps_prime + 2.0 * eta) * g.total_weight
    group = LpGroup(coeffs=-g.adjacency, offsets=est.r_hat, budget=budget)
    return AbsSumLp(objective=est.r_hat, groups=[group])


def randomized_round_best(g: Graph, x_hat, eta: float, seed) -> CutAssignment:
    """Best of T independent roundings with Pr[X_i = +1] = (1 + x_hat_i)/2.

    "Best" minimizes <X, AX>, i.e. maximizes the cut. Deterministic given
    the seed; ties keep the earliest rounding.
    """
    vals = _values_of(x_hat, g.n)
    T = rounding_trials(eta)
    rng = np.random.default_rng(seed)
    U = rng.random((T, g.n))
    X = np.where(U < (1.0 + vals) / 2.0, 1.0, -1.0)
    quad = np.einsum("ti,ti->t", X @ g.adjacency, X)
    best = int(np.argmin(quad))
    return CutAssignment(values=X[best])


def pipage_round(g: Graph, x_hat) -> CutAssignment:
    """Deterministic coordinate rounding that never decreases the objective.

    <x, Ax> is affine in each coordinate (zero diagonal), so each fractional
    x_i moves to the endpoint minimizing it; ties go to +1 and coordinates
    already at +-1 stay put.
    """
    x = _values_of(x_hat, g.n).copy()
    A = g.adjacency
    for i in range(g.n):
        if x[i] == 1.0 or x[i] == -1.0:
            continue
        x[i] = -1.0 if A[i] @ x > 0 else 1.0
    return CutAssignment(values=x)


def solve_wide(g: Graph, y: NoisyPrediction, delta: int, eta: float, eps_prime: float,
               rounding: str = REPEAT, seed=0) -> CutAssignment:
    """Full wide-graph pipeline; falls back to the better of the raw
    prediction and a GW rounding if the LP comes back infeasible."""
    if rounding not in (REPEAT, PIPAGE):
        raise ParameterError(f"unknown rounding mode {rounding!r}")
    est = estimate_imbalance(g, y, delta, eta)
    lp = build_wide_lp(g, est, eps_prime, eta)
    sol: LpSolution = lp_solve(lp)
    if not sol.optimal:
        pred_cut = CutAssignment(values=y.y.copy())
        sdp_sol = solve_sdp(g, SdpConfig(seed=derive(seed, 1)))
        gw_best = max(
            (hyperplane_round(sdp_sol, derive(seed, 2, r)) for r in range(20)),
            key=lambda c: cut_value(g, c),
        )
        return max((pred_cut, gw_best), key=lambda c: cut_value(g, c))
    x_hat = np.clip(sol.x, -1.0, 1.0)
    if rounding == PIPAGE:
        return pipage_round(g, x_hat)
    return randomized_round_best(g, x_hat, eta, seed)
