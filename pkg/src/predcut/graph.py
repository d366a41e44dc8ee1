"""Weighted graphs, cut objectives, and heavy-edge prefix machinery.

A graph on n vertices is a symmetric nonnegative weighted adjacency matrix
with zero diagonal. W_i is the weighted degree of vertex i and
W = sum_i W_i, so W counts each edge weight twice (once per endpoint).
The cut value of x in {-1,+1}^n is (1/4) <x, Lx> = (1/4) (W - <x, Ax>)
with L = D - A.

The "delta-prefix" of a vertex is its delta heaviest incident edges
(ties broken toward the lower neighbor index); a vertex is wide when the
prefix carries at most an eta fraction of its weighted degree, and a graph
is wide when wide vertices carry at least a 1-eta fraction of W.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError, ParameterError, ParseError

# absolute tolerance for weight comparisons where exactness matters
WEIGHT_TOL = 1e-12
# slack allowed when validating box membership of fractional assignments
BOX_TOL = 1e-9

WIDE = "wide"
NARROW = "narrow"


class Graph:
    """Immutable undirected weighted graph.

    Edges are (i, j, w) with i < j and w >= 0; no self-loops, no duplicates.
    `planted` optionally stores the ground-truth assignment a generator
    built the graph around.
    """

    def __init__(self, n, edges, planted=None):
        if n < 1:
            raise ParameterError(f"need at least one vertex, got n={n}")
        self.n = int(n)
        canon = []
        seen = set()
        for (i, j, w) in edges:
            i, j, w = int(i), int(j), float(w)
            if i == j:
                raise DomainError(f"self-loop at vertex {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise DomainError(f"vertex id out of range: ({i}, {j})")
            if w < 0:
                raise DomainError(f"negative weight {w} on edge ({i}, {j})")
            if i > j:
                i, j = j, i
            if (i, j) in seen:
                raise DomainError(f"duplicate edge ({i}, {j})")
            seen.add((i, j))
            canon.append((i, j, w))
        canon.sort()
        self.edges = canon
        self.edge_i = np.array([e[0] for e in canon], dtype=np.intp)
        self.edge_j = np.array([e[1] for e in canon], dtype=np.intp)
        self.edge_w = np.array([e[2] for e in canon], dtype=np.float64)

        A = np.zeros((self.n, self.n))
        A[self.edge_i, self.edge_j] = self.edge_w
        A[self.edge_j, self.edge_i] = self.edge_w
        self.adjacency = A
        self.adjacency.setflags(write=False)
        self.weighted_degrees = A.sum(axis=1)
        self.total_weight = float(self.weighted_degrees.sum())

        if planted is not None:
            planted = np.asarray(planted, dtype=np.float64)
            if planted.shape != (self.n,):
                raise DimensionError("planted assignment length mismatch")
        self.planted = planted

        # per-vertex incident edges sorted by (-weight, neighbor index),
        # with prefix-weight cumsums; built lazily on first prefix query
        self._sorted_incident = None

    @property
    def num_edges(self):
        return len(self.edges)

    @property
    def laplacian(self):
        return np.diag(self.weighted_degrees) - self.adjacency

    def neighbors(self, i):
        """Pairs (j, w) of neighbors of i with positive-weight edges."""
        self._check_vertex(i)
        row = self.adjacency[i]
        js = np.nonzero(row)[0]
        return [(int(j), float(row[j])) for j in js]

    def _check_vertex(self, i):
        if not (0 <= i < self.n):
            raise DomainError(f"invalid vertex id {i}")

    def _incident(self, i):
        if self._sorted_incident is None:
            self._sorted_incident = [None] * self.n
        if self._sorted_incident[i] is None:
            row = self.adjacency[i]
            js = np.nonzero(row)[0]
            order = np.lexsort((js, -row[js]))
            js = js[order]
            ws = row[js]
            self._sorted_incident[i] = (js, ws, np.concatenate(([0.0], np.cumsum(ws))))
        return self._sorted_incident[i]


@dataclass(frozen=True)
class CutAssignment:
    """A cut: +-1 labels when integral, [-1,1] labels when fractional."""

    values: np.ndarray
    integral: bool = True

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", vals)
        if self.integral:
            if not np.all(np.abs(vals) == 1.0):
                raise DomainError("integral assignment entries must be exactly +-1")
        else:
            if np.any(np.abs(vals) > 1.0 + BOX_TOL):
                raise DomainError("fractional assignment entries must lie in [-1, 1]")

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class WideNarrowReport:
    """Per-vertex wide/narrow classification and the resulting graph class."""

    delta: int
    eta: float
    wide_mask: np.ndarray  # bool per vertex, True = wide
    wide_weight: float     # summed weighted degree of wide vertices
    narrow_weight: float
    graph_class: str       # WIDE or NARROW

    @property
    def is_wide(self):
        return self.graph_class == WIDE

    def vertex_class(self, i):
        return WIDE if self.wide_mask[i] else NARROW


def _values_of(x, n=None, integral=None):
    """Accept a CutAssignment or a raw array; return float64 values."""
    if isinstance(x, CutAssignment):
        if integral is True and not x.integral:
            raise DomainError("expected an integral assignment")
        vals = x.values
    else:
        vals = np.asarray(x, dtype=np.float64)
    if n is not None and vals.shape != (n,):
        raise DimensionError(f"assignment length {vals.shape} != vertex count {n}")
    return vals


def cut_value(g: Graph, x) -> float:
    """Total weight of edges crossing the cut x in {-1,+1}^n.

    Equals (1/4) <x, Lx>.
    """
    vals = _values_of(x, g.n, integral=True)
    if not np.all(np.abs(vals) == 1.0):
        raise DomainError("cut_value needs an integral +-1 assignment")
    crossing = vals[g.edge_i] != vals[g.edge_j]
    return float(g.edge_w[crossing].sum())


def frac_objective(g: Graph, x) -> float:
    """Continuous cut objective (1/4) (W - <x, Ax>) on the box [-1,1]^n.

    Agrees with cut_value on integral inputs.
    """
    vals = _values_of(x, g.n)
    if np.any(np.abs(vals) > 1.0 + BOX_TOL):
        raise DomainError("fractional assignment entries must lie in [-1, 1]")
    return 0.25 * (g.total_weight - float(vals @ (g.adjacency @ vals)))


def delta_prefix_weight(g: Graph, i: int, delta: int) -> float:
    """Sum of the delta largest incident edge weights of vertex i.

    Ties between equal weights prefer the lower neighbor index. Returns W_i
    when delta is at least the degree.
    """
    g._check_vertex(i)
    if delta < 0:
        raise ParameterError(f"delta must be >= 0, got {delta}")
    _, _, cum = g._incident(i)
    k = min(int(delta), len(cum) - 1)
    return float(cum[k])


def classify(g: Graph, delta: int, eta: float) -> WideNarrowReport:
    """Split vertices into delta-wide and delta-narrow and classify the graph.

    Vertex i is wide iff its delta-prefix weight is at most eta * W_i
    (zero-degree vertices are vacuously wide); the graph is wide iff wide
    vertices carry at least (1 - eta) of the total degree weight W.
    """
    if not (0.0 < eta < 0.5):
        raise ParameterError(f"eta must lie in (0, 1/2), got {eta}")
    if delta < 1:
        raise ParameterError(f"delta must be >= 1, got {delta}")
    wide = np.empty(g.n, dtype=bool)
    for i in range(g.n):
        wide[i] = delta_prefix_weight(g, i, delta) <= eta * g.weighted_degrees[i] + WEIGHT_TOL
    wide_weight = float(g.weighted_degrees[wide].sum())
    narrow_weight = float(g.weighted_degrees[~wide].sum())
    graph_class = WIDE if wide_weight >= (1.0 - eta) * g.total_weight - WEIGHT_TOL else NARROW
    return WideNarrowReport(
        delta=int(delta),
        eta=float(eta),
        wide_mask=wide,
        wide_weight=wide_weight,
        narrow_weight=narrow_weight,
        graph_class=graph_class,
    )


def truncated_adjacency(g: Graph, delta: int) -> np.ndarray:
    """Adjacency with each row's delta-prefix entries zeroed.

    Row i keeps only the delta-suffix of vertex i, so the result is
    generally not symmetric; every surviving entry in row i is at most
    W_i / delta.
    """
    if delta < 0:
        raise ParameterError(f"delta must be >= 0, got {delta}")
    At = np.array(g.adjacency, copy=True)
    if delta == 0:
        return At
    for i in range(g.n):
        js, _, _ = g._incident(i)
        At[i, js[: int(delta)]] = 0.0
    return At


def gen_erdos_renyi(n, p, weight_law="unit", seed=0, q_cross=None, q_within=None,
                    ground_truth=None) -> Graph:
    """Random graph generator, deterministic given the seed.

    weight_law "unit" or "uniform": G(n, p) edges with weight 1 or weight
    drawn uniformly from (0, 1]. weight_law "planted": ignores p and places
    each cut pair with probability q_cross and each within-side pair with
    probability q_within (unit weights) around a balanced ground truth,
    which is stored on the returned graph for later comparison.
    """
    if n < 1:
        raise ParameterError(f"need at least one vertex, got n={n}")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    if weight_law in ("unit", "uniform"):
        if not (0.0 <= p <= 1.0):
            raise ParameterError(f"edge probability must be in [0, 1], got {p}")
        present = rng.random(len(iu)) < p
        if weight_law == "unit":
            w = np.ones(int(present.sum()))
        else:
            w = 1.0 - rng.random(int(present.sum()))  # uniform on (0, 1]
        edges = list(zip(iu[present].tolist(), ju[present].tolist(), w.tolist()))
        return Graph(n, edges)
    if weight_law == "planted":
        for name, q in (("q_cross", q_cross), ("q_within", q_within)):
            if q is None or not (0.0 <= q <= 1.0):
                raise ParameterError(f"{name} must be a probability, got {q}")
        if ground_truth is None:
            truth = np.ones(n)
            truth[rng.permutation(n)[: n // 2]] = -1.0
        else:
            truth = _values_of(ground_truth, n)
            if not np.all(np.abs(truth) == 1.0):
                raise DomainError("ground truth must be a +-1 assignment")
        cross = truth[iu] != truth[ju]
        prob = np.where(cross, q_cross, q_within)
        present = rng.random(len(iu)) < prob
        edges = [(int(i), int(j), 1.0) for i, j in zip(iu[present], ju[present])]
        return Graph(n, edges, planted=truth)
    raise ParameterError(f"unknown weight law {weight_law!r}")


def load_edge_list(text: str) -> Graph:
    """Parse the edge-list format: "n m" header, then m lines "i j w".

    Vertex ids are 0-indexed with i < j; lines starting with '#' are
    ignored. Malformed input raises ParseError with the line number.
    """
    header = None
    edges = []
    seen = set()
    n = m = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if header is None:
            if len(parts) != 2:
                raise ParseError("expected header 'n m'", line=lineno)
            try:
                n, m = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError("header fields must be integers", line=lineno)
            if n < 1 or m < 0:
                raise ParseError("need n >= 1 and m >= 0", line=lineno)
            header = lineno
            continue
        if len(parts) != 3:
            raise ParseError("expected 'i j w'", line=lineno)
        try:
            i, j, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise ParseError("edge fields must be 'int int float'", line=lineno)
        if i == j:
            raise ParseError(f"self-loop at vertex {i}", line=lineno)
        if not (i < j):
            raise ParseError(f"edges require i < j, got ({i}, {j})", line=lineno)
        if j >= n:
            raise ParseError(f"vertex id {j} out of range for n={n}", line=lineno)
        if w < 0:
            raise ParseError(f"negative weight {w}", line=lineno)
        if (i, j) in seen:
            raise ParseError(f"duplicate edge ({i}, {j})", line=lineno)
        seen.add((i, j))
        edges.append((i, j, w))
    if header is None:
        raise ParseError("empty input", line=1)
    if len(edges) != m:
        raise ParseError(f"header promised {m} edges, found {len(edges)}", line=header)
    return Graph(n, edges)


def save_edge_list(g: Graph) -> str:
    """Serialize to the edge-list format; load(save(g)) reproduces g."""
    lines = [f"{g.n} {g.num_edges}"]
    for (i, j, w) in g.edges:
        lines.append(f"{i} {j} {w!r}")
    return "\n".join(lines) + "\n"
