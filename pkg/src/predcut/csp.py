"""Binary CSP instances with predicate Fourier expansions.

A constraint (w, c, alpha) asks P(c_1 x_{alpha(1)}, c_2 x_{alpha(2)}) = 1
for a 0/1 predicate P on {-1,+1}^2; val(x) is the weight-normalized
satisfied mass. P expands exactly as the degree-2 multilinear polynomial
    P(z1, z2) = f0 + f1 z1 + f2 z2 + f12 z1 z2
with coefficients that are multiples of 1/4.

Every raw constraint is stored in both orientations (anchored at each
endpoint, full weight, coefficients transposed for the swapped copy), so
the instance weight W doubles the raw total, per-literal constraint sets
S_i cover every occurrence, and val is unchanged, including for
asymmetric predicates. MaxCut encodings then satisfy
csp_value * W = 2 * cut_value exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError, ParameterError, ParseError
from .graph import CutAssignment, Graph, WEIGHT_TOL, WIDE, NARROW, _values_of
from .lp import AbsSumLp, LpGroup, solve as lp_solve
from .predictions import NoisyPrediction, scaled_prediction
from .wide import rounding_trials

# evaluation order of the four truth-table entries in compact forms
TABLE_ORDER = ((1, 1), (1, -1), (-1, 1), (-1, -1))


@dataclass(frozen=True)
class Predicate:
    """0/1 predicate on {-1,+1}^2 plus its exact Fourier expansion."""

    table: dict
    f0: float
    f1: float
    f2: float
    f12: float

    def value(self, z1: int, z2: int) -> int:
        return self.table[(int(z1), int(z2))]

    def value_fourier(self, z1: float, z2: float) -> float:
        return self.f0 + self.f1 * z1 + self.f2 * z2 + self.f12 * z1 * z2

    @property
    def fourier(self):
        return (self.f0, self.f1, self.f2, self.f12)


def fourier_expand(truth_table) -> Predicate:
    """Predicate with coefficients f(S) = (1/4) sum_z P(z) chi_S(z).

    truth_table is a dict over {-1,+1}^2 pairs or a 4-sequence in the order
    (+1,+1), (+1,-1), (-1,+1), (-1,-1).
    """
    if isinstance(truth_table, dict):
        table = {(int(a), int(b)): int(v) for (a, b), v in truth_table.items()}
    else:
        vals = list(truth_table)
        if len(vals) != 4:
            raise DomainError("truth table needs exactly 4 entries")
        table = {z: int(v) for z, v in zip(TABLE_ORDER, vals)}
    if set(table) != set(TABLE_ORDER):
        raise DomainError("truth table must cover all four +-1 input pairs")
    if any(v not in (0, 1) for v in table.values()):
        raise DomainError("predicate values must be 0 or 1")
    f0 = sum(table[z] for z in TABLE_ORDER) / 4.0
    f1 = sum(table[z] * z[0] for z in TABLE_ORDER) / 4.0
    f2 = sum(table[z] * z[1] for z in TABLE_ORDER) / 4.0
    f12 = sum(table[z] * z[0] * z[1] for z in TABLE_ORDER) / 4.0
    return Predicate(table=table, f0=f0, f1=f1, f2=f2, f12=f12)


def predicate_from_bits(bits: str) -> Predicate:
    """Predicate from 4 bits ordered as TABLE_ORDER, e.g. "0110" is CUT."""
    if len(bits) != 4 or any(b not in "01" for b in bits):
        raise DomainError(f"predicate bits must be 4 chars of 0/1, got {bits!r}")
    return fourier_expand([int(b) for b in bits])


CUT_PREDICATE = fourier_expand([0, 1, 1, 0])


@dataclass(frozen=True)
class LiteralClassReport:
    """Wide/narrow classification of literals and the instance."""

    delta: int
    eta: float
    wide_mask: np.ndarray
    wide_weight: float
    narrow_weight: float
    instance_class: str

    @property
    def is_wide(self):
        return self.instance_class == WIDE


class CspInstance:
    """Weighted multiset of signed binary constraints over one predicate.

    `constraints` holds the raw (w, (c1, c2), (i, j)) triplets; internally
    each one is stored twice, anchored at either endpoint, with folded
    coefficients a = (f0, f1*c1, f2*c2, f12*c1*c2) and the linear slots
    swapped for the re-anchored copy.
    """

    def __init__(self, n, predicate: Predicate, constraints):
        if n < 1:
            raise ParameterError(f"need at least one variable, got n={n}")
        self.n = int(n)
        self.predicate = predicate
        raw = []
        for (w, c, alpha) in constraints:
            w = float(w)
            c1, c2 = int(c[0]), int(c[1])
            i, j = int(alpha[0]), int(alpha[1])
            if w < 0:
                raise DomainError(f"negative constraint weight {w}")
            if c1 not in (-1, 1) or c2 not in (-1, 1):
                raise DomainError(f"negation pattern must be +-1 pairs, got {c}")
            if not (0 <= i < n and 0 <= j < n):
                raise DomainError(f"scope out of range: ({i}, {j})")
            raw.append((w, (c1, c2), (i, j)))
        self.constraints = raw

        m = len(raw)
        anchor = np.empty(2 * m, dtype=np.intp)
        other = np.empty(2 * m, dtype=np.intp)
        w_arr = np.empty(2 * m)
        coeffs = np.empty((2 * m, 4))  # columns a0, a_anchor, a_other, a_pair
        f0, f1, f2, f12 = predicate.fourier
        for t, (w, (c1, c2), (i, j)) in enumerate(raw):
            a0, a1, a2, a12 = f0, f1 * c1, f2 * c2, f12 * c1 * c2
            anchor[2 * t], other[2 * t] = i, j
            coeffs[2 * t] = (a0, a1, a2, a12)
            anchor[2 * t + 1], other[2 * t + 1] = j, i
            coeffs[2 * t + 1] = (a0, a2, a1, a12)
            w_arr[2 * t] = w_arr[2 * t + 1] = w
        self.anchor = anchor
        self.other = other
        self.weights = w_arr
        self.coeffs = coeffs
        self.total_weight = float(w_arr.sum())
        self._by_literal = None

    @property
    def num_constraints(self):
        return len(self.constraints)

    def stored_for(self, i):
        """Indices into the oriented arrays of S_i (entries anchored at i)."""
        if self._by_literal is None:
            order = [[] for _ in range(self.n)]
            for t, a in enumerate(self.anchor):
                order[a].append(t)
            self._by_literal = [np.array(ix, dtype=np.intp) for ix in order]
        return self._by_literal[i]

    def literal_weight(self, i):
        return float(self.weights[self.stored_for(i)].sum())

    def polynomial(self):
        """(const, lin, quad) with val(x) * W = const + <lin, x> + <x, quad x>."""
        const = 0.0
        lin = np.zeros(self.n)
        quad = np.zeros((self.n, self.n))
        w, a, o = self.weights, self.anchor, self.other
        a0, a1, a2, a12 = self.coeffs.T
        selfpair = a == o
        const = float(np.sum(w * a0) + np.sum(w[selfpair] * a12[selfpair]))
        np.add.at(lin, a, w * a1)
        np.add.at(lin, o, w * a2)
        np.add.at(quad, (a[~selfpair], o[~selfpair]), (w * a12)[~selfpair])
        return const, lin, quad


def csp_value(inst: CspInstance, x) -> float:
    """Normalized satisfied weight via the Fourier expansion."""
    vals = _values_of(x, inst.n)
    if inst.total_weight == 0:
        return 0.0
    xa, xo = vals[inst.anchor], vals[inst.other]
    a0, a1, a2, a12 = inst.coeffs.T
    per = a0 + a1 * xa + a2 * xo + a12 * xa * xo
    return float(np.sum(inst.weights * per) / inst.total_weight)


def csp_value_table(inst: CspInstance, x) -> float:
    """Normalized satisfied weight by direct truth-table evaluation."""
    vals = _values_of(x, inst.n)
    total = sum(w for (w, _, _) in inst.constraints)
    if total == 0:
        return 0.0
    sat = 0.0
    for (w, (c1, c2), (i, j)) in inst.constraints:
        sat += w * inst.predicate.value(int(c1 * vals[i]), int(c2 * vals[j]))
    return sat / total


def maxcut_as_csp(g: Graph) -> CspInstance:
    """CUT-predicate encoding: one constraint pair per edge, full weight.

    Satisfies csp_value(inst, x) * W_inst = 2 * cut_value(g, x).
    """
    constraints = [(w, (1, 1), (i, j)) for (i, j, w) in g.edges]
    return CspInstance(g.n, CUT_PREDICATE, constraints)


def classify_literals(inst: CspInstance, delta: int, eta: float) -> LiteralClassReport:
    """Wide/narrow split of literals by their delta heaviest constraints."""
    if not (0.0 < eta < 0.5):
        raise ParameterError(f"eta must lie in (0, 1/2), got {eta}")
    if delta < 1:
        raise ParameterError(f"delta must be >= 1, got {delta}")
    wide = np.empty(inst.n, dtype=bool)
    for i in range(inst.n):
        ws = inst.weights[inst.stored_for(i)]
        Wi = float(ws.sum())
        prefix = float(np.sort(ws)[::-1][: int(delta)].sum())
        wide[i] = prefix <= eta * Wi + WEIGHT_TOL
    weights_per = np.array([inst.literal_weight(i) for i in range(inst.n)])
    wide_weight = float(weights_per[wide].sum())
    narrow_weight = float(weights_per[~wide].sum())
    cls = WIDE if wide_weight >= (1.0 - eta) * inst.total_weight - WEIGHT_TOL else NARROW
    return LiteralClassReport(delta=int(delta), eta=float(eta), wide_mask=wide,
                              wide_weight=wide_weight, narrow_weight=narrow_weight,
                              instance_class=cls)


def _prefix_suffix(inst: CspInstance, i, delta):
    """Stored-entry indices of the delta-prefix and delta-suffix of S_i.

    The prefix takes the delta heaviest entries, breaking weight ties by
    storage order for determinism.
    """
    idx = inst.stored_for(i)
    ws = inst.weights[idx]
    order = np.argsort(-ws, kind="stable")
    k = min(int(delta), len(idx))
    return idx[order[:k]], idx[order[k:]]


def build_csp_lp(inst: CspInstance, z, delta: int, eta: float, eps_prime: float,
                 C: float = 4.0) -> AbsSumLp:
    """LP over the box whose objective freezes the partner variables at Z.

    The anchored occurrence keeps its own variable x_i while the partner is
    replaced by the rescaled prediction; the single constraint group bounds
    the total absolute deviation mass by C (eps' + 2 eta) W.
    """
    if C <= 0:
        raise ParameterError(f"C must be positive, got {C}")
    z = np.asarray(z, dtype=np.float64)
    if z.shape != (inst.n,):
        raise DimensionError("scaled prediction length mismatch")
    report = classify_literals(inst, delta, eta)
    n = inst.n
    w, other = inst.weights, inst.other
    a0, a1, a2, a12 = inst.coeffs.T

    objective = np.zeros(n)
    forms_g = []
    forms_h = []
    for i in range(n):
        prefix, suffix = _prefix_suffix(inst, i, delta)
        if report.wide_mask[i]:
            if len(suffix):
                # objective: terms affine in x_i with the partner frozen at Z
                objective[i] += float(np.sum(w[suffix] * (a1[suffix] + a12[suffix] * z[other[suffix]])))
                # deviation form: sum w (a2 + a12)(x_partner - Z_partner)
                gvec = np.zeros(n)
                kappa = w[suffix] * (a2[suffix] + a12[suffix])
                np.add.at(gvec, other[suffix], kappa)
                forms_g.append(gvec)
                forms_h.append(-float(np.sum(kappa * z[other[suffix]])))
            if len(prefix):
                gvec = np.zeros(n)
                np.add.at(gvec, other[prefix], w[prefix] * (a2[prefix] + a12[prefix]))
                forms_g.append(gvec)
                forms_h.append(float(np.sum(w[prefix] * (a0[prefix] + a1[prefix]))))
        else:
            idx = inst.stored_for(i)
            if len(idx):
                gvec = np.zeros(n)
                np.add.at(gvec, other[idx], w[idx] * (a2[idx] + a12[idx]))
                forms_g.append(gvec)
                forms_h.append(float(np.sum(w[idx] * (a0[idx] + a1[idx]))))

    budget = C * (eps_prime + 2.0 * eta) * inst.total_weight
    groups = []
    if forms_g:
        groups.append(LpGroup(coeffs=np.vstack(forms_g), offsets=np.array(forms_h),
                              budget=budget))
    # AbsSumLp minimizes, the algorithm maximizes
    return AbsSumLp(objective=-objective, groups=groups)


def solve_csp_wide(inst: CspInstance, y: NoisyPrediction, delta: int, eta: float,
                   eps_prime: float, C: float = 4.0, seed=0) -> CutAssignment:
    """LP plus best-of randomized roundings; the prediction itself is the
    fallback assignment when the LP is infeasible."""
    if len(y) != inst.n:
        raise DimensionError("prediction length does not match the instance")
    z = scaled_prediction(y)
    lp = build_csp_lp(inst, z, delta, eta, eps_prime, C)
    sol = lp_solve(lp)
    if not sol.optimal:
        return CutAssignment(values=y.y.copy())
    x_hat = np.clip(sol.x, -1.0, 1.0)
    T = rounding_trials(eta)
    rng = np.random.default_rng(seed)
    U = rng.random((T, inst.n))
    X = np.where(U < (1.0 + x_hat) / 2.0, 1.0, -1.0)
    best = max(range(T), key=lambda t: (csp_value(inst, X[t]), -t))
    return CutAssignment(values=X[best])


def save_csp(inst: CspInstance, normalized: bool = False) -> str:
    """Header "n k W_norm_flag", then raw lines "w c1 c2 i j"."""
    lines = [f"{inst.n} {inst.num_constraints} {1 if normalized else 0}"]
    for (w, (c1, c2), (i, j)) in inst.constraints:
        lines.append(f"{w!r} {c1:+d} {c2:+d} {i} {j}")
    return "\n".join(lines) + "\n"


def load_csp(text: str, predicate: Predicate) -> CspInstance:
    """Parse the CSP file format; flag 1 rescales raw weights to sum to 1."""
    lines = [l.strip() for l in text.splitlines() if l.strip() and not l.startswith("#")]
    if not lines:
        raise ParseError("empty input", line=1)
    head = lines[0].split()
    if len(head) != 3:
        raise ParseError("expected header 'n k W_norm_flag'", line=1)
    try:
        n, k, flag = int(head[0]), int(head[1]), int(head[2])
    except ValueError:
        raise ParseError("header fields must be integers", line=1)
    if flag not in (0, 1):
        raise ParseError(f"W_norm_flag must be 0 or 1, got {flag}", line=1)
    if len(lines) - 1 != k:
        raise ParseError(f"header promised {k} constraints, found {len(lines) - 1}", line=1)
    constraints = []
    for ln, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if len(parts) != 5:
            raise ParseError("expected 'w c1 c2 i j'", line=ln)
        try:
            w = float(parts[0])
            c1, c2 = int(parts[1]), int(parts[2])
            i, j = int(parts[3]), int(parts[4])
        except ValueError:
            raise ParseError("bad field types", line=ln)
        constraints.append((w, (c1, c2), (i, j)))
    if flag == 1:
        total = sum(c[0] for c in constraints)
        if total > 0:
            constraints = [(w / total, c, a) for (w, c, a) in constraints]
    return CspInstance(n, predicate, constraints)
