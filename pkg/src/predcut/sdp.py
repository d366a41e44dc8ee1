"""Low-rank MaxCut semidefinite solver and rounding schemes.

The relaxation max sum_{i<j} w_ij (1 - <v_i, v_j>)/2 over unit vectors is
optimized on a rank-k factorization with k = ceil(sqrt(2n)) + 1, which is
past the Burer-Monteiro rank threshold, by block-coordinate ascent: with
all other rows fixed the optimal v_i is -u/||u|| for u = sum_j w_ij v_j.

Three optional constraint families:
  * fixed labels pin v_i = +-v_0 structurally (v_0 = e_1, never updated),
  * a lower bound tau on the weight-contribution of an edge subset,
    enforced by bisecting a Lagrange multiplier added to those edges,
  * the odd-cycle triangle inequalities
        s (<v_j, v_k> + <v_i, v_k>) <= 1 + <v_i, v_j>,  s in {-1, +1},
    over distinct triples, enforced by a squared-hinge penalty whose
    weight doubles until the worst violation is at most 1e-3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from .errors import DimensionError, ParameterError, ParseError
from .graph import CutAssignment, Graph

TRIANGLE_TOL = 1e-3
SUBSET_TOL_FRAC = 1e-4
ZERO_PERP_TOL = 1e-9


@dataclass(frozen=True)
class SdpConfig:
    """Options for solve_sdp; defaults give the plain GW relaxation."""

    fixed_labels: dict = field(default_factory=dict)   # vertex -> +-1
    subset_constraint: tuple = None                     # (edge index array, tau)
    triangle: bool = False
    tolerance: float = 1e-8     # convergence threshold, relative to W
    max_iters: int = 1500       # coordinate-ascent sweep cap
    seed: int = 0               # deterministic initialization


@dataclass(frozen=True)
class SdpSolution:
    """Unit vectors v_0, v_1, ..., v_n (rows) with Gram access."""

    dim: int
    vectors: np.ndarray          # (n + 1, dim); row 0 is v_0
    objective_value: float
    feasibility_report: dict
    feasible_at_tau: bool = True

    @property
    def n(self):
        return self.vectors.shape[0] - 1

    @property
    def v0(self):
        return self.vectors[0]

    @property
    def vertex_vectors(self):
        return self.vectors[1:]

    def mu(self):
        """Inner products <v_0, v_i> for the n vertices."""
        return self.vertex_vectors @ self.v0


def _edge_contribution(g: Graph, V, edge_idx=None):
    """sum over edges of w (1 - <v_i, v_j>)/2 from vertex rows V."""
    i, j, w = g.edge_i, g.edge_j, g.edge_w
    if edge_idx is not None:
        i, j, w = i[edge_idx], j[edge_idx], w[edge_idx]
    if len(w) == 0:
        return 0.0
    dots = np.einsum("ek,ek->e", V[i], V[j])
    return float(np.sum(w * (1.0 - dots)) / 2.0)


def _coordinate_ascent(A, V, free, tol_abs, max_sweeps):
    """Block-coordinate ascent on the factorized relaxation, in place.

    A is the (possibly multiplier-adjusted) weight matrix over vertices;
    V holds vertex rows only. Sweeps stop when an entire pass improves the
    objective by less than tol_abs.
    """
    if not len(free):
        return
    prev = None
    quiet = 0
    for _ in range(max_sweeps):
        for i in free:
            u = A[i] @ V
            nrm = np.linalg.norm(u)
            if nrm > 1e-300:
                V[i] = -u / nrm
        obj = -0.5 * float(np.einsum("ik,ik->", V, A @ V))  # affine part dropped
        # two consecutive low-gain sweeps guard the geometric tail of the gap
        if prev is not None and obj - prev < tol_abs:
            quiet += 1
            if quiet >= 2:
                break
        else:
            quiet = 0
        prev = obj


def _triangle_terms(V, need_grad, chunk=24):
    """Penalty value, worst violation, and dPenalty/dGram for the triangle family.

    Returns (sum of squared violations, max violation, dG) with the caller
    applying the penalty weight. dG is None unless need_grad.
    """
    n = V.shape[0]
    G = V @ V.T
    idx = np.arange(n)
    pen = 0.0
    maxv = 0.0
    dG = np.zeros((n, n)) if need_grad else None
    for i0 in range(0, n, chunk):
        i1 = min(i0 + chunk, n)
        Gi = G[i0:i1]                                   # (c, n): G[i, :]
        S = G[None, :, :] + Gi[:, None, :]              # S[i,j,k] = G[j,k] + G[i,k]
        Dij = Gi[:, :, None]                            # G[i, j]
        ii = idx[i0:i1][:, None, None]
        jj = idx[None, :, None]
        kk = idx[None, None, :]
        distinct = (ii != jj) & (jj != kk) & (ii != kk)
        t1 = np.maximum(S - Dij - 1.0, 0.0)
        t2 = np.maximum(-S - Dij - 1.0, 0.0)
        t1 *= distinct
        t2 *= distinct
        pen += float(np.sum(t1 * t1) + np.sum(t2 * t2))
        if t1.size:
            maxv = max(maxv, float(t1.max()), float(t2.max()))
        if need_grad:
            M = 2.0 * (t1 - t2)
            P = 2.0 * (t1 + t2)
            dG += M.sum(axis=0)                          # d/dG[j,k]
            dG[i0:i1] += M.sum(axis=1)                   # d/dG[i,k]
            dG[i0:i1] -= P.sum(axis=2)                   # d/dG[i,j]
    return pen, maxv, dG


def _salted(seed, *salts):
    if isinstance(seed, (list, tuple)):
        return list(seed) + list(salts)
    return [int(seed), *salts]


def _one_opt(A, x):
    """Flip single labels while the cut improves (gain of flipping i is x_i s_i)."""
    x = x.copy()
    s = A @ x
    for _ in range(20 * len(x)):
        gains = x * s
        i = int(np.argmax(gains))
        if gains[i] <= 1e-12:
            break
        x[i] = -x[i]
        s += 2.0 * x[i] * A[:, i]
    return x


def _penalty_continuation(A_eff, V, free_mask, scale, bail_below=None, g=None):
    """Doubling penalty rounds until the worst violation is at most 1e-3.

    Optionally bails out once the true objective has sunk clearly below
    `bail_below` (the run has collapsed and will be restarted elsewhere).
    """
    n = V.shape[0]
    rho = max(1.0, scale / max(n, 1))
    _, maxv, _ = _triangle_terms(V, need_grad=False)
    rounds = 0
    alpha = None
    while maxv > TRIANGLE_TOL and rounds < 50:
        # continuation: rough ascent while far from feasible, tight near it
        close = maxv <= 4 * TRIANGLE_TOL
        alpha = _penalized_ascent(A_eff, V, free_mask, rho,
                                  iters=300 if close else 40,
                                  tol_abs=(1e-9 if close else 1e-7) * scale,
                                  alpha=alpha)
        _, maxv, _ = _triangle_terms(V, need_grad=False)
        rho *= 2.0
        rounds += 1
        if bail_below is not None and rounds % 4 == 0:
            if _edge_contribution(g, V) < 0.9 * bail_below:
                break
    return maxv


def _penalized_ascent(A, V, free_mask, rho, iters, tol_abs, alpha=None):
    """Projected gradient ascent on objective minus rho * triangle penalty.

    Stops at stationarity (three consecutive near-zero gains); returns the
    last accepted step size so the next penalty round can resume from it.
    """
    pen, _, _ = _triangle_terms(V, need_grad=False)
    base = -0.5 * float(np.einsum("ik,ik->", V, A @ V))
    f = base - rho * pen
    if alpha is None:
        alpha = 1.0 / max(1.0, float(np.abs(A).sum(axis=1).max()))
    quiet = 0
    for _ in range(iters):
        _, _, dG = _triangle_terms(V, need_grad=True)
        grad = -A @ V - rho * ((dG + dG.T) @ V)
        # project onto the tangent space of the product of spheres
        grad -= (np.einsum("ik,ik->i", grad, V))[:, None] * V
        grad[~free_mask] = 0.0
        gnorm = float(np.max(np.linalg.norm(grad, axis=1)))
        if gnorm < 1e-9:
            break
        improved = False
        for _ in range(30):
            W_new = V + alpha * grad
            W_new /= np.linalg.norm(W_new, axis=1, keepdims=True)
            W_new[~free_mask] = V[~free_mask]
            pen_new, _, _ = _triangle_terms(W_new, need_grad=False)
            base_new = -0.5 * float(np.einsum("ik,ik->", W_new, A @ W_new))
            f_new = base_new - rho * pen_new
            if f_new > f:
                gain = f_new - f
                V[:] = W_new
                f = f_new
                alpha *= 1.3
                improved = True
                quiet = quiet + 1 if gain < tol_abs else 0
                break
            alpha *= 0.5
        if not improved or quiet >= 3:
            break
    return alpha


def solve_sdp(g: Graph, cfg: SdpConfig = None) -> SdpSolution:
    """Solve the (optionally constrained) MaxCut relaxation for g."""
    cfg = cfg or SdpConfig()
    n = g.n
    if n < 1:
        raise ParameterError("graph must have at least one vertex")
    W = g.total_weight
    scale = max(W, 1.0)

    pins = {}
    for v, s in cfg.fixed_labels.items():
        v = int(v)
        if not (0 <= v < n):
            raise ParameterError(f"pinned vertex {v} out of range")
        if s not in (1, -1, 1.0, -1.0):
            raise ParameterError(f"pin for vertex {v} must be +-1, got {s}")
        if v in pins and pins[v] != float(s):
            raise ParameterError(f"vertex {v} pinned to both signs")
        pins[v] = float(s)

    subset_idx = tau = None
    if cfg.subset_constraint is not None:
        subset_idx, tau = cfg.subset_constraint
        subset_idx = np.asarray(subset_idx, dtype=np.intp)
        tau = float(tau)
        if tau < 0:
            raise ParameterError(f"tau must be >= 0, got {tau}")
        if tau > W:
            raise ParameterError(f"tau={tau} exceeds total weight {W}: trivially infeasible")

    k = math.ceil(math.sqrt(2 * n)) + 1
    rng = np.random.default_rng(cfg.seed)
    V = rng.standard_normal((n, k))
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    v0 = np.zeros(k)
    v0[0] = 1.0
    for v, s in pins.items():
        V[v] = s * v0

    free = np.array([i for i in range(n) if i not in pins], dtype=np.intp)
    free_mask = np.ones(n, dtype=bool)
    free_mask[list(pins)] = False
    A = g.adjacency
    tol_abs = cfg.tolerance * scale

    lam = 0.0
    feasible_at_tau = True
    if subset_idx is None or len(subset_idx) == 0:
        if subset_idx is not None:
            # empty subset contributes 0; only tau == 0 is satisfiable
            feasible_at_tau = tau <= SUBSET_TOL_FRAC * scale
        _coordinate_ascent(A, V, free, tol_abs, cfg.max_iters)
    else:
        A_sub = np.zeros_like(A)
        ei, ej, ew = g.edge_i[subset_idx], g.edge_j[subset_idx], g.edge_w[subset_idx]
        A_sub[ei, ej] = ew
        A_sub[ej, ei] = ew
        sub_tol = SUBSET_TOL_FRAC * scale

        def run(l):
            _coordinate_ascent(A + l * A_sub, V, free, tol_abs, cfg.max_iters)
            return _edge_contribution(g, V, subset_idx)

        s_val = run(0.0)
        if s_val < tau - sub_tol:
            lo, hi = 0.0, 1.0
            found = False
            best_V = V.copy()
            best_s = s_val
            while hi <= 2.0 ** 20:
                s_val = run(hi)
                if s_val > best_s:
                    best_s, best_V = s_val, V.copy()
                if s_val >= tau - sub_tol:
                    found = True
                    break
                lo = hi
                hi *= 2.0
            if not found:
                feasible_at_tau = False
                V = best_V
                lam = lo
            else:
                # shrink toward the smallest multiplier that still meets tau
                lam = hi
                sat_V = V.copy()
                for _ in range(30):
                    if hi - lo <= 1e-3 * max(hi, 1.0):
                        break
                    mid = 0.5 * (lo + hi)
                    s_val = run(mid)
                    if s_val >= tau - sub_tol:
                        hi, lam, sat_V = mid, mid, V.copy()
                    else:
                        lo = mid
                V = sat_V

    max_triangle = None
    if cfg.triangle:
        A_eff = A if lam == 0.0 else A + lam * _subset_matrix(g, subset_idx)
        # relaxation-sanity floor: any integral cut embeds as an exactly
        # feasible point of this relaxation, so the stage must never return
        # less than the best cut it can find. Tiny instances enumerate the
        # exact cut; larger ones take locally-optimized roundings.
        floor_x = None
        floor_val = -np.inf
        if not pins and n <= 20:
            from .exact import exact_maxcut
            floor_val, floor_cut = exact_maxcut(g)
            floor_x = floor_cut.values
        else:
            for r in range(20):
                rng_r = np.random.default_rng(_salted(cfg.seed, 90, r))
                proj = V @ rng_r.standard_normal(k)
                x = _one_opt(A, np.where(proj > 0, 1.0, -1.0))
                val = 0.25 * (W - float(x @ A @ x))
                if val > floor_val:
                    floor_val, floor_x = val, x
        maxv = _penalty_continuation(A_eff, V, free_mask, scale,
                                     bail_below=floor_val, g=g)
        obj_now = _edge_contribution(g, V)
        # second run from a barely-perturbed embedding of the floor cut,
        # which starts near-feasible at the floor objective and climbs;
        # keep whichever feasible run scores higher
        blend = 0.02
        rng_b = np.random.default_rng(_salted(cfg.seed, 91))
        V_b = ((1 - blend) * floor_x[:, None] * v0[None, :]
               + blend * rng_b.standard_normal((n, k)))
        V_b /= np.linalg.norm(V_b, axis=1, keepdims=True)
        for v, s in pins.items():
            V_b[v] = s * v0
        maxv_b = _penalty_continuation(A_eff, V_b, free_mask, scale)
        if maxv_b <= TRIANGLE_TOL and (maxv > TRIANGLE_TOL
                                       or _edge_contribution(g, V_b) > obj_now):
            V[:] = V_b
            maxv = maxv_b
        # hard floor: fall back to the floor cut's own embedding (exactly
        # feasible, objective floor_val) if both ascents landed under it
        if not pins and (_edge_contribution(g, V) < floor_val or maxv > TRIANGLE_TOL):
            V_f = floor_x[:, None] * v0[None, :]
            if _edge_contribution(g, V_f) >= _edge_contribution(g, V) or maxv > TRIANGLE_TOL:
                V[:] = V_f
                _, maxv, _ = _triangle_terms(V, need_grad=False)
        max_triangle = maxv

    full = np.vstack([v0, V])
    report = {"unit_norm": float(np.max(np.abs(np.linalg.norm(full, axis=1) - 1.0)))}
    if pins:
        report["pins"] = float(max(np.linalg.norm(V[v] - s * v0) for v, s in pins.items()))
    if subset_idx is not None:
        achieved = _edge_contribution(g, V, subset_idx)
        report["subset"] = float(max(0.0, tau - achieved))
    if cfg.triangle:
        report["triangle"] = float(max_triangle)
    objective = _edge_contribution(g, V)
    return SdpSolution(
        dim=k,
        vectors=full,
        objective_value=objective,
        feasibility_report=report,
        feasible_at_tau=feasible_at_tau,
    )


def _subset_matrix(g, subset_idx):
    M = np.zeros((g.n, g.n))
    ei, ej, ew = g.edge_i[subset_idx], g.edge_j[subset_idx], g.edge_w[subset_idx]
    M[ei, ej] = ew
    M[ej, ei] = ew
    return M


def round_by_direction(sol: SdpSolution, gvec) -> CutAssignment:
    """Sign rounding against an explicit direction: x_i = 1 iff <v_i, g> > 0."""
    proj = sol.vertex_vectors @ np.asarray(gvec, dtype=np.float64)
    return CutAssignment(values=np.where(proj > 0, 1.0, -1.0))


def hyperplane_round(sol: SdpSolution, seed) -> CutAssignment:
    """Goemans-Williamson rounding with a seeded Gaussian direction."""
    rng = np.random.default_rng(seed)
    return round_by_direction(sol, rng.standard_normal(sol.dim))


def rt_round(sol: SdpSolution, seed) -> CutAssignment:
    """Marginal-preserving threshold rounding.

    Decompose v_i = mu_i v_0 + w_i with w_i perpendicular to v_0, draw a
    standard Gaussian g orthogonal to v_0, and set x_i = +1 iff
    <g, w_i/||w_i||> <= Phi^{-1}(mu_i/2 + 1/2). Then Pr[x_i = +1] is
    exactly mu_i/2 + 1/2; vertices pinned to +-v_0 come out deterministic.
    """
    rng = np.random.default_rng(seed)
    v0 = sol.v0
    Vv = sol.vertex_vectors
    mu = Vv @ v0
    W_perp = Vv - mu[:, None] * v0[None, :]
    norms = np.linalg.norm(W_perp, axis=1)
    safe = norms > ZERO_PERP_TOL
    wbar = np.zeros_like(W_perp)
    wbar[safe] = W_perp[safe] / norms[safe, None]
    gvec = rng.standard_normal(sol.dim)
    gvec = gvec - float(gvec @ v0) * v0
    xi = wbar @ gvec
    with np.errstate(invalid="ignore"):
        t = norm.ppf(np.clip(mu, -1.0, 1.0) / 2.0 + 0.5)
    return CutAssignment(values=np.where(xi <= t, 1.0, -1.0))


def sdp_objective(g: Graph, sol: SdpSolution) -> float:
    """Recompute the objective from the Gram inner products."""
    if sol.vectors.shape[0] != g.n + 1:
        raise DimensionError("solution size does not match the graph")
    return _edge_contribution(g, sol.vertex_vectors)


def save_solution(sol: SdpSolution) -> str:
    """Flat text dump of k and the (n+1) x k vector table."""
    lines = [f"{sol.dim} {sol.n}"]
    for row in sol.vectors:
        lines.append(" ".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def load_solution(text: str) -> SdpSolution:
    lines = [l for l in text.splitlines() if l.strip()]
    if not lines:
        raise ParseError("empty input", line=1)
    try:
        k, n = (int(t) for t in lines[0].split())
    except ValueError:
        raise ParseError("expected header 'k n'", line=1)
    if len(lines) - 1 != n + 1:
        raise ParseError(f"expected {n + 1} vector rows", line=1)
    rows = []
    for ln, line in enumerate(lines[1:], start=2):
        vals = [float(t) for t in line.split()]
        if len(vals) != k:
            raise ParseError(f"expected {k} coordinates", line=ln)
        rows.append(vals)
    V = np.asarray(rows)
    report = {"unit_norm": float(np.max(np.abs(np.linalg.norm(V, axis=1) - 1.0)))}
    return SdpSolution(dim=k, vectors=V, objective_value=float("nan"),
                       feasibility_report=report)
