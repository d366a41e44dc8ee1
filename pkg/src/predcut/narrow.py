"""Narrow-graph solver: triangle SDP, hyperplane rounding, local flips.

After rounding against a Gaussian direction g, vertices whose vectors lie
in the thin band |<v_i, g>| <= delta_band are re-examined: splitting the
other vertices into same-side (B), other-side (C) and band (D) neighbors,
every band vertex with w(B) > w(C) + w(D) is flipped simultaneously, which
can only increase the cut. Predictions are not used on this path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolationError, ParameterError
from .graph import CutAssignment, Graph, cut_value, _values_of
from .sdp import SdpConfig, SdpSolution, round_by_direction, solve_sdp
from .seeds import derive


@dataclass(frozen=True)
class FlipReport:
    """Band membership, per-vertex partition weights, and the realized gain."""

    delta_band: float
    in_band: np.ndarray        # bool per vertex: i in F
    flipped: np.ndarray        # bool per vertex: i in F'
    same_side_weight: np.ndarray    # w(B_i)
    other_side_weight: np.ndarray   # w(C_i)
    band_weight: np.ndarray         # w(D_i)
    gain: float

    @property
    def band_set(self):
        return np.nonzero(self.in_band)[0]

    @property
    def flipped_set(self):
        return np.nonzero(self.flipped)[0]


def fkl_band_width(delta: float, eta: float, scale: float = 1.0) -> float:
    """Band half-width 1 / (C d sqrt(log d)) with d = delta / eta^2.

    d is clamped up to 3 so the formula stays defined; `scale` is the
    tunable constant C.
    """
    if delta <= 0:
        raise ParameterError(f"delta must be positive, got {delta}")
    if not (0.0 < eta <= 1.0):
        raise ParameterError(f"eta must lie in (0, 1], got {eta}")
    if scale <= 0:
        raise ParameterError(f"scale must be positive, got {scale}")
    d = max(delta / (eta * eta), 3.0)
    return 1.0 / (scale * d * math.sqrt(math.log(d)))


def flip_step(g: Graph, x_hat, sol: SdpSolution, gvec, delta_band: float):
    """Flip the profitable band vertices; returns (new cut, FlipReport).

    x_hat must be the sign rounding of sol against the same direction gvec.
    """
    x = _values_of(x_hat, g.n, integral=True)
    gvec = np.asarray(gvec, dtype=np.float64)
    proj = sol.vertex_vectors @ gvec
    expected = np.where(proj > 0, 1.0, -1.0)
    if not np.array_equal(expected, x):
        raise ContractViolationError("assignment is not the rounding of the given direction")
    in_band = np.abs(proj) <= delta_band

    A = g.adjacency
    out = ~in_band
    plus_out = A @ (out & (x > 0)).astype(np.float64)
    minus_out = A @ (out & (x < 0)).astype(np.float64)
    band_w = A @ in_band.astype(np.float64)
    same = np.where(x > 0, plus_out, minus_out)
    other = np.where(x > 0, minus_out, plus_out)
    # A has zero diagonal, so j = i never contributes to any of the three

    flipped = in_band & (same > other + band_w)
    new_x = np.where(flipped, -x, x)
    before = cut_value(g, x)
    after = cut_value(g, new_x)
    report = FlipReport(
        delta_band=float(delta_band),
        in_band=in_band,
        flipped=flipped,
        same_side_weight=same,
        other_side_weight=other,
        band_weight=band_w,
        gain=after - before,
    )
    return CutAssignment(values=new_x), report


def solve_narrow(g: Graph, delta: float, eta: float, seed=0, restarts: int = 20,
                 band_scale: float = 1.0, sdp_seed=None) -> CutAssignment:
    """Triangle SDP once, then best cut over rounding + flip restarts."""
    if restarts < 1:
        raise ParameterError(f"restarts must be >= 1, got {restarts}")
    band = fkl_band_width(delta, eta, band_scale)
    sol = solve_sdp(g, SdpConfig(triangle=True, seed=sdp_seed if sdp_seed is not None else derive(seed, 0)))
    best = None
    best_val = -np.inf
    for r in range(restarts):
        rng = np.random.default_rng(derive(seed, 1, r))
        gvec = rng.standard_normal(sol.dim)
        x_hat = round_by_direction(sol, gvec)
        flipped, _ = flip_step(g, x_hat, sol, gvec, band)
        val = cut_value(g, flipped)
        if val > best_val:
            best_val = val
            best = flipped
    return best
