"""Dispatching solver for noisy predictions.

Classifies the graph at delta = ceil(c_delta / (eps eps')^2), runs the
wide or narrow specialist accordingly, always also runs plain GW rounding
and the raw prediction as candidate cuts, and returns the best. The
portfolio can only improve on any single branch.
"""

from __future__ import annotations

import math

import numpy as np

from .graph import CutAssignment, Graph, classify, cut_value
from .narrow import solve_narrow
from .predictions import NoisyPrediction
from .sdp import SdpConfig, hyperplane_round, solve_sdp
from .seeds import derive
from .wide import REPEAT, solve_wide

BRANCH_PRIORITY = ("wide", "narrow", "gw", "prediction")


def choose_delta(epsilon: float, eps_prime: float, c_delta: float = 1.0) -> int:
    """delta = ceil(c_delta / (eps * eps')^2); c_delta tunes the hidden constant."""
    return max(1, math.ceil(c_delta / (epsilon * eps_prime) ** 2))


def solve_noisy(g: Graph, y: NoisyPrediction, eta: float = 0.05, eps_prime: float = 0.05,
                c_delta: float = 1.0, seed=0, rounding: str = REPEAT,
                narrow_restarts: int = 20, gw_roundings: int = 20):
    """Best cut over {dispatched specialist, GW, raw prediction}.

    Returns (cut, tag) where tag names the winning branch; ties resolve by
    the fixed priority wide > narrow > gw > prediction.
    """
    delta = choose_delta(y.epsilon, eps_prime, c_delta)
    report = classify(g, delta, eta)
    candidates = {}
    if report.is_wide:
        candidates["wide"] = solve_wide(g, y, delta, eta, eps_prime,
                                        rounding=rounding, seed=derive(seed, 0))
    else:
        candidates["narrow"] = solve_narrow(g, delta, eta, seed=derive(seed, 1),
                                            restarts=narrow_restarts)
    sdp_sol = solve_sdp(g, SdpConfig(seed=derive(seed, 2)))
    candidates["gw"] = max(
        (hyperplane_round(sdp_sol, derive(seed, 3, r)) for r in range(gw_roundings)),
        key=lambda c: cut_value(g, c),
    )
    candidates["prediction"] = CutAssignment(values=y.y.copy())

    best_tag = None
    best_val = -np.inf
    for tag in BRANCH_PRIORITY:
        if tag in candidates:
            val = cut_value(g, candidates[tag])
            if val > best_val:
                best_val = val
                best_tag = tag
    return candidates[best_tag], best_tag
