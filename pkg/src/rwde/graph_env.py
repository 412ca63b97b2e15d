"""Finite weighted digraphs, Dirichlet environments, and exact linear algebra.

Edges are stored as parallel arrays (tails, heads, weights); parallel edges
are allowed and kept distinct.  An Environment attaches one transition
probability per edge, normalized over the outgoing edges of each tail vertex.
Reversal conventions: the dual graph reverses every edge In Place, so edge i
of the dual is the reversal of edge i of the primal and carries its weight.

Linear systems are solved dense (LU with partial pivoting) up to
DENSE_SOLVE_LIMIT vertices and with a sparse direct factorization above.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .errors import ParameterDomainError, StructuralError, UsageError
from .sampling import _as_generator

DENSE_SOLVE_LIMIT = 5000


@dataclass
class WeightedDigraph:
    """Finite directed multigraph with positive per-edge weights."""

    n_vertices: int
    tails: np.ndarray
    heads: np.ndarray
    weights: np.ndarray
    _out_order: np.ndarray = field(init=False, repr=False)
    _out_start: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.tails = np.asarray(self.tails, dtype=np.int64)
        self.heads = np.asarray(self.heads, dtype=np.int64)
        self.weights = np.asarray(self.weights, dtype=float)
        if not (len(self.tails) == len(self.heads) == len(self.weights)):
            raise UsageError("tails, heads, weights must have equal length")
        if np.any(self.weights <= 0):
            raise ParameterDomainError("edge weights must be strictly positive")
        if len(self.tails) and (self.tails.min() < 0 or self.tails.max() >= self.n_vertices
                                or self.heads.min() < 0 or self.heads.max() >= self.n_vertices):
            raise UsageError("edge endpoint out of range")
        order = np.argsort(self.tails, kind="stable")
        counts = np.bincount(self.tails, minlength=self.n_vertices)
        if np.any(counts == 0):
            raise StructuralError("every vertex needs out-degree >= 1")
        self._out_order = order
        self._out_start = np.concatenate([[0], np.cumsum(counts)])

    @property
    def n_edges(self) -> int:
        return len(self.tails)

    def out_edges(self, x: int) -> np.ndarray:
        """Edge indices with tail x, in stable storage order."""
        return self._out_order[self._out_start[x]:self._out_start[x + 1]]

    def vertex_out_weights(self) -> np.ndarray:
        """alpha_x = sum of weights of edges exiting x."""
        return np.bincount(self.tails, weights=self.weights, minlength=self.n_vertices)

    def reversed_graph(self) -> "WeightedDigraph":
        """Dual graph: edge i becomes its reversal, keeping its weight."""
        return WeightedDigraph(self.n_vertices, self.heads.copy(), self.tails.copy(),
                               self.weights.copy())

    def is_strongly_connected(self) -> bool:
        return _reaches_all(self.n_vertices, self.tails, self.heads) and \
            _reaches_all(self.n_vertices, self.heads, self.tails)

    def to_text(self) -> str:
        lines = [f"vertices={self.n_vertices} edges={self.n_edges}"]
        for t, h, w in zip(self.tails, self.heads, self.weights):
            lines.append(f"{t} {h} {float(w)!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "WeightedDigraph":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        header = dict(part.split("=") for part in lines[0].split())
        n, m = int(header["vertices"]), int(header["edges"])
        rows = [ln.split() for ln in lines[1:m + 1]]
        if len(rows) != m:
            raise UsageError("edge count does not match header")
        tails = [int(r[0]) for r in rows]
        heads = [int(r[1]) for r in rows]
        weights = [float(r[2]) for r in rows]
        return cls(n, np.array(tails), np.array(heads), np.array(weights))


def _reaches_all(n: int, tails: np.ndarray, heads: np.ndarray) -> bool:
    adj: list[list[int]] = [[] for _ in range(n)]
    for t, h in zip(tails, heads):
        adj[t].append(h)
    seen = np.zeros(n, dtype=bool)
    stack = [0]
    seen[0] = True
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if not seen[w]:
                seen[w] = True
                stack.append(w)
    return bool(seen.all())


@dataclass
class Environment:
    """Per-edge transition probabilities on a WeightedDigraph."""

    graph: WeightedDigraph
    probs: np.ndarray

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=float)
        if self.probs.shape != (self.graph.n_edges,):
            raise UsageError("need one probability per edge")
        if np.any(self.probs <= 0) or np.any(self.probs > 1):
            raise ParameterDomainError("probabilities must lie in (0, 1]")
        sums = np.bincount(self.graph.tails, weights=self.probs,
                           minlength=self.graph.n_vertices)
        if np.max(np.abs(sums - 1.0)) > 1e-9:
            raise ParameterDomainError("outgoing probabilities must sum to 1 per vertex")

    def transition_matrix(self) -> np.ndarray:
        """Dense row-stochastic matrix; parallel edges accumulate."""
        g = self.graph
        p = np.zeros((g.n_vertices, g.n_vertices))
        np.add.at(p, (g.tails, g.heads), self.probs)
        return p

    def to_text(self) -> str:
        g = self.graph
        lines = [f"vertices={g.n_vertices} edges={g.n_edges}"]
        for t, h, w in zip(g.tails, g.heads, self.probs):
            lines.append(f"{t} {h} {float(w)!r}")
        return "\n".join(lines) + "\n"


def divergence(graph: WeightedDigraph, values) -> np.ndarray:
    """div(theta)(x) = outgoing sum minus incoming sum; totals zero."""
    v = np.asarray(values, dtype=float)
    if v.shape != (graph.n_edges,):
        raise UsageError("need one value per edge")
    out = np.bincount(graph.tails, weights=v, minlength=graph.n_vertices)
    inc = np.bincount(graph.heads, weights=v, minlength=graph.n_vertices)
    return out - inc


def sample_environment(graph: WeightedDigraph, rng) -> Environment:
    """Independent Dirichlet((alpha_e)_{tail=x}) transition vector per vertex."""
    gen = _as_generator(rng)
    gammas = gen.gamma(graph.weights)
    # guard against zero draws for tiny shapes at float underflow
    while np.any(gammas == 0.0):
        idx = gammas == 0.0
        gammas[idx] = gen.gamma(graph.weights[idx])
    sums = np.bincount(graph.tails, weights=gammas, minlength=graph.n_vertices)
    return Environment(graph, gammas / sums[graph.tails])


def invariant_measure(env: Environment, residual_tol: float = 1e-10) -> np.ndarray:
    """Unique invariant probability of the quenched chain (strongly connected)."""
    g = env.graph
    if not g.is_strongly_connected():
        raise StructuralError("invariant measure needs a strongly connected graph")
    p = env.transition_matrix()
    a = p.T - np.eye(g.n_vertices)
    a[-1, :] = 1.0
    b = np.zeros(g.n_vertices)
    b[-1] = 1.0
    pi = scipy.linalg.solve(a, b)
    residual = np.max(np.abs(pi @ p - pi))
    if residual > residual_tol or np.any(pi <= 0):
        raise StructuralError(f"invariant-measure solve failed (residual {residual:.3e})")
    return pi


def reverse_environment(env: Environment) -> Environment:
    """Time-reversed environment on the dual graph.

    Edge i of the dual is the reversal (y, x) of edge i = (x, y) and gets
    probability pi(x) omega_i / pi(y).
    """
    pi = invariant_measure(env)
    g = env.graph
    rev = g.reversed_graph()
    probs = pi[g.tails] * env.probs / pi[g.heads]
    return Environment(rev, probs)


def reversed_weights(graph: WeightedDigraph) -> WeightedDigraph:
    return graph.reversed_graph()


def cycle_weight(env: Environment, vertices: Sequence[int]) -> float:
    """Product of step probabilities along a closed vertex sequence.

    Parallel edges are aggregated; the cycle is given as (x_0, ..., x_n = x_0).
    """
    seq = list(vertices)
    if seq[0] != seq[-1]:
        raise UsageError("cycle must return to its start")
    g = env.graph
    total = 1.0
    for a, b in zip(seq[:-1], seq[1:]):
        edges = [e for e in g.out_edges(a) if g.heads[e] == b]
        if not edges:
            raise UsageError(f"({a}, {b}) is not an edge")
        total *= float(np.sum(env.probs[edges]))
    return total


# ---------------------------------------------------------------------------
# Linear solves
# ---------------------------------------------------------------------------

def _solve_interior(env: Environment, interior: np.ndarray, rhs: np.ndarray,
                    residual_tol: float = 1e-10) -> np.ndarray:
    """Solve (I - Q) h = rhs on the given interior vertex set.

    Strongly drifted chains make these systems normwise ill-conditioned while
    the LU solution stays componentwise accurate, so the generic conditioning
    alarm is silenced and the actual residual is enforced instead.
    """
    import warnings

    g = env.graph
    n_int = interior.size
    pos = -np.ones(g.n_vertices, dtype=np.int64)
    pos[interior] = np.arange(n_int)
    mask = (pos[g.tails] >= 0) & (pos[g.heads] >= 0)
    rows = pos[g.tails[mask]]
    cols = pos[g.heads[mask]]
    vals = env.probs[mask]
    if n_int <= DENSE_SOLVE_LIMIT:
        m = np.eye(n_int)
        np.subtract.at(m, (rows, cols), vals)
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
                h = scipy.linalg.solve(m, rhs)
        except scipy.linalg.LinAlgError as exc:
            raise StructuralError("singular absorption system") from exc
        residual = np.max(np.abs(m @ h - rhs))
    else:
        q = scipy.sparse.coo_matrix((vals, (rows, cols)), shape=(n_int, n_int)).tocsc()
        m = scipy.sparse.identity(n_int, format="csc") - q
        h = scipy.sparse.linalg.spsolve(m, rhs)
        residual = np.max(np.abs(m @ h - rhs))
    scale = max(1.0, float(np.max(np.abs(rhs))))
    if not np.isfinite(residual) or residual > residual_tol * scale:
        raise StructuralError(
            f"interior solve residual {residual:.3e} exceeds tolerance")
    return h


def absorption_probability(env: Environment, start: int, target_a: Iterable[int],
                           target_b: Iterable[int], residual_tol: float = 1e-10) -> float:
    """Exact P_start(hit A before B) by a harmonic linear solve."""
    g = env.graph
    set_a = np.asarray(sorted(set(target_a)), dtype=np.int64)
    set_b = np.asarray(sorted(set(target_b)), dtype=np.int64)
    if np.intersect1d(set_a, set_b).size:
        raise UsageError("target sets must be disjoint")
    if start in set_a:
        return 1.0
    if start in set_b:
        return 0.0
    absorbed = np.concatenate([set_a, set_b])
    interior = np.setdiff1d(np.arange(g.n_vertices), absorbed)
    pos = -np.ones(g.n_vertices, dtype=np.int64)
    pos[interior] = np.arange(interior.size)
    in_a = np.zeros(g.n_vertices, dtype=bool)
    in_a[set_a] = True
    # rhs: one-step probability of stepping straight into A
    mask = (pos[g.tails] >= 0) & in_a[g.heads]
    rhs = np.bincount(pos[g.tails[mask]], weights=env.probs[mask], minlength=interior.size)
    h = _solve_interior(env, interior, rhs)
    value = float(h[pos[start]])
    if not -residual_tol <= value <= 1 + residual_tol:
        raise StructuralError("absorption solve left [0, 1]; unreachable targets?")
    return min(max(value, 0.0), 1.0)


def return_via_edge_probability(env: Environment, x: int, edge: tuple[int, int]) -> float:
    """Exact P_x(the first return to x is through the entering edge (y, x)).

    The vertex x is split into x_out (keeps the outgoing edges) and x_in
    (absorbing, keeps the incoming ones), turning the path event into an
    entry-edge-resolved absorption probability.
    """
    y, x2 = edge
    if x2 != x:
        raise UsageError("edge must point into x")
    g = env.graph
    if not np.any((g.tails == y) & (g.heads == x)):
        raise StructuralError(f"({y}, {x}) is not an edge")
    if not g.is_strongly_connected():
        raise StructuralError("return probability needs strong connectivity")
    # interior = all vertices except x; start mass redistributed from x_out
    interior = np.setdiff1d(np.arange(g.n_vertices), [x])
    pos = -np.ones(g.n_vertices, dtype=np.int64)
    pos[interior] = np.arange(interior.size)
    # f(v) = P_v(first entry to x is via tail y); rhs only at v = y
    mask = (pos[g.tails] >= 0) & (g.heads == x) & (g.tails == y)
    rhs = np.bincount(pos[g.tails[mask]], weights=env.probs[mask], minlength=interior.size)
    f = _solve_interior(env, interior, rhs)
    total = 0.0
    for e in g.out_edges(x):
        h = g.heads[e]
        if h == x:
            total += env.probs[e] if x == y else 0.0  # self-loop counts iff it is the edge
        else:
            total += env.probs[e] * f[pos[h]]
    return float(min(max(total, 0.0), 1.0))


def green_function_finite(env: Environment, subset: Iterable[int], x: int) -> float:
    """Expected visits to x before leaving `subset` (fundamental matrix entry)."""
    g = env.graph
    a = np.asarray(sorted(set(subset)), dtype=np.int64)
    if x not in set(a.tolist()):
        raise UsageError("x must belong to the subset")
    inside = np.zeros(g.n_vertices, dtype=bool)
    inside[a] = True
    exit_mass = np.bincount(g.tails[~inside[g.heads]],
                            weights=env.probs[~inside[g.heads]],
                            minlength=g.n_vertices)
    if not np.any(exit_mass[a] > 0):
        raise StructuralError("subset has no exit edges")
    pos = -np.ones(g.n_vertices, dtype=np.int64)
    pos[a] = np.arange(a.size)
    rhs = np.zeros(a.size)
    rhs[pos[x]] = 1.0
    # column x of (I - Q)^(-1); entry at x is the expected number of visits
    mask = inside[g.tails] & inside[g.heads]
    rows = pos[g.tails[mask]]
    cols = pos[g.heads[mask]]
    m = np.eye(a.size)
    np.subtract.at(m, (rows, cols), env.probs[mask])
    try:
        col = scipy.linalg.solve(m, rhs)
    except scipy.linalg.LinAlgError as exc:
        raise StructuralError("walk cannot leave the subset") from exc
    return float(col[pos[x]])


def expected_hitting_time(env: Environment, start: int, targets: Iterable[int]) -> float:
    """E_start[time to reach the target set], by the standard linear system."""
    g = env.graph
    t = np.asarray(sorted(set(targets)), dtype=np.int64)
    if start in set(t.tolist()):
        return 0.0
    interior = np.setdiff1d(np.arange(g.n_vertices), t)
    pos = -np.ones(g.n_vertices, dtype=np.int64)
    pos[interior] = np.arange(interior.size)
    rhs = np.ones(interior.size)
    h = _solve_interior(env, interior, rhs)
    return float(h[pos[start]])


# ---------------------------------------------------------------------------
# Matrix-tree machinery and the occupation-measure density
# ---------------------------------------------------------------------------

def matrix_tree_minor(graph: WeightedDigraph, z, x0: int) -> float:
    """Sum over spanning trees directed toward x0 of the product of z_e.

    Evaluated as the principal minor (row and column x0 removed) of the matrix
    with diagonal z_x and off-diagonal entries -z_(x,y).  Self-loop
    contributions cancel between the diagonal and the off-diagonal term.
    """
    zv = np.asarray(z, dtype=float)
    if zv.shape != (graph.n_edges,):
        raise UsageError("need one value per edge")
    if np.any(zv <= 0):
        raise ParameterDomainError("tree weights must be positive")
    n = graph.n_vertices
    lap = np.zeros((n, n))
    np.subtract.at(lap, (graph.tails, graph.heads), zv)
    z_x = np.bincount(graph.tails, weights=zv, minlength=n)
    lap[np.arange(n), np.arange(n)] += z_x
    minor = np.delete(np.delete(lap, x0, axis=0), x0, axis=1)
    sign, logdet = np.linalg.slogdet(minor)
    if sign <= 0:
        raise StructuralError("tree-sum minor is not positive; graph not connected?")
    return float(np.exp(logdet))


def occupation_density(graph: WeightedDigraph, alpha, z, x0: int = 0,
                       div_tol: float = 1e-9) -> float:
    """Density of the normalized edge-occupation measure at the point z.

    z must be positive with zero divergence (the chart normalization z_e0 = 1
    is the caller's choice of scale).  Value: gamma prefactor times
    prod z_e^(alpha_e - 1) / prod z_x^(alpha_x) times the spanning-tree sum
    toward x0; on divergence-free z the tree sum does not depend on x0.
    """
    from scipy.special import gammaln

    a = np.asarray(alpha, dtype=float)
    zv = np.asarray(z, dtype=float)
    if np.any(zv <= 0):
        raise ParameterDomainError("z must be strictly positive")
    div = divergence(graph, zv)
    if np.max(np.abs(div)) > div_tol:
        raise ParameterDomainError("z must have zero divergence")
    a_x = np.bincount(graph.tails, weights=a, minlength=graph.n_vertices)
    z_x = np.bincount(graph.tails, weights=zv, minlength=graph.n_vertices)
    log_pref = float(np.sum(gammaln(a_x)) - np.sum(gammaln(a)))
    log_core = float(np.sum((a - 1.0) * np.log(zv)) - np.sum(a_x * np.log(z_x)))
    tree = matrix_tree_minor(graph, zv, x0)
    return float(np.exp(log_pref + log_core) * tree)


def spanning_tree_chart(graph: WeightedDigraph, e0: int):
    """Coordinate chart on {z > 0 : div z = 0, z_e0 = 1}.

    Picks a spanning tree T of the undirected support with e0 outside T and
    returns (free_edges, complete) where free_edges indexes the coordinates
    (the edges outside T and e0) and complete(values) fills in the remaining
    edges by solving the divergence constraints.
    """
    m = graph.n_edges
    n = graph.n_vertices
    # greedy undirected spanning tree avoiding e0
    parent = list(range(n))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    tree_edges = []
    for e in list(range(m)):
        if e == e0 or graph.tails[e] == graph.heads[e]:
            continue
        ra, rb = find(graph.tails[e]), find(graph.heads[e])
        if ra != rb:
            parent[ra] = rb
            tree_edges.append(e)
    if len(tree_edges) != n - 1:
        raise StructuralError("support graph (minus e0) is not connected")
    basis = np.array(sorted(tree_edges + [e0]), dtype=np.int64)
    free = np.setdiff1d(np.arange(m), basis)
    # linear system: divergence rows (drop one, they sum to zero) + z_e0 = 1
    inc = np.zeros((n, m))
    np.add.at(inc, (graph.tails, np.arange(m)), 1.0)
    np.add.at(inc, (graph.heads, np.arange(m)), -1.0)
    a = np.zeros((n, m))
    a[:n - 1] = inc[:n - 1]
    a[n - 1, e0] = 1.0
    a_basis = a[:, basis]
    a_free = a[:, free]

    def complete(free_values) -> np.ndarray:
        fv = np.asarray(free_values, dtype=float)
        rhs = np.zeros(n)
        rhs[n - 1] = 1.0
        rhs = rhs - a_free @ fv
        z_basis = scipy.linalg.solve(a_basis, rhs)
        z = np.empty(m)
        z[basis] = z_basis
        z[free] = fv
        return z

    return free, complete


# ---------------------------------------------------------------------------
# Graph builders
# ---------------------------------------------------------------------------

def _direction_vectors(d: int) -> list[tuple[int, ...]]:
    dirs = []
    for i in range(d):
        v = [0] * d
        v[i] = 1
        dirs.append(tuple(v))
    for i in range(d):
        v = [0] * d
        v[i] = -1
        dirs.append(tuple(v))
    return dirs


def build_torus(d: int, n: int, alphas) -> WeightedDigraph:
    """(Z/nZ)^d with translation-invariant weights alphas[0..2d-1]."""
    a = np.asarray(alphas, dtype=float)
    if d < 1 or n < 1:
        raise UsageError("need d >= 1 and n >= 1")
    if a.shape != (2 * d,):
        raise UsageError(f"need 2d = {2 * d} weights")
    coords = np.indices((n,) * d).reshape(d, -1).T
    idx = {tuple(c): i for i, c in enumerate(coords)}
    tails, heads, weights = [], [], []
    for i, vec in enumerate(_direction_vectors(d)):
        for c in coords:
            tails.append(idx[tuple(c)])
            heads.append(idx[tuple((c + vec) % n)])
            weights.append(a[i])
    return WeightedDigraph(n ** d, np.array(tails), np.array(heads), np.array(weights))


def torus_vertex(d: int, n: int, coords) -> int:
    """Index of a torus vertex in build_torus ordering."""
    c = np.mod(np.asarray(coords, dtype=np.int64), n)
    i = 0
    for v in c:
        i = i * n + int(v)
    return i


def build_ball(d: int, n: int, alphas=None, special_edge_weight: float = 1.0):
    """Lattice ball B(0, n) plus a boundary vertex and the special edge to 0.

    Edges crossing the sphere are rerouted to/from the boundary vertex with
    their lattice weights; the special edge (boundary, 0) has the given
    weight, so div(alpha) = weight * (delta_boundary - delta_0).
    Returns (graph, index_of(coords)->vertex, boundary_vertex).
    """
    if alphas is None:
        alphas = np.ones(2 * d)
    a = np.asarray(alphas, dtype=float)
    if a.shape != (2 * d,):
        raise UsageError(f"need 2d = {2 * d} weights")
    if n < 1:
        raise UsageError("radius must be >= 1")
    pts = [tuple(int(v) for v in c)
           for c in np.indices((2 * n + 1,) * d).reshape(d, -1).T - n
           if int(np.dot(c, c)) <= n * n]
    idx = {c: i for i, c in enumerate(pts)}
    boundary = len(pts)
    tails, heads, weights = [], [], []
    for i, vec in enumerate(_direction_vectors(d)):
        for c in pts:
            dest = tuple(np.add(c, vec))
            tails.append(idx[c])
            heads.append(idx.get(dest, boundary))
            weights.append(a[i])
            if dest not in idx:
                # matching entering edge from the boundary vertex
                j = (i + d) % (2 * d)
                tails.append(boundary)
                heads.append(idx[c])
                weights.append(a[j])
    tails.append(boundary)
    heads.append(idx[(0,) * d])
    weights.append(special_edge_weight)
    graph = WeightedDigraph(boundary + 1, np.array(tails), np.array(heads),
                            np.array(weights))
    return graph, idx, boundary


def build_cylinder(n: int, length: int, alphas):
    """Horizontal cylinder of circumference n and length `length` (2-D weights).

    Columns 0..length-1 of n vertices with vertical wrap; exit vertices L and
    R catch the leftmost/rightmost horizontal edges, and a long edge (R, L)
    of weight n * (alpha_1 - alpha_3) makes the weight divergence-free
    (requires alpha_1 > alpha_3).
    Returns (graph, vertex(row, col), left_vertex, right_vertex).
    """
    a1, a2, a3, a4 = map(float, alphas)
    if a1 <= a3:
        raise ParameterDomainError("cylinder needs alpha_1 > alpha_3 for the long edge")
    if n < 1 or length < 1:
        raise UsageError("need n >= 1 and length >= 1")

    def vtx(row: int, col: int) -> int:
        return col * n + (row % n)

    left = n * length
    right = n * length + 1
    tails, heads, weights = [], [], []
    for col in range(length):
        for row in range(n):
            v = vtx(row, col)
            tails.append(v)
            heads.append(vtx(row, col + 1) if col + 1 < length else right)
            weights.append(a1)
            tails.append(v)
            heads.append(vtx(row, col - 1) if col - 1 >= 0 else left)
            weights.append(a3)
            tails.append(v); heads.append(vtx(row + 1, col)); weights.append(a2)
            tails.append(v); heads.append(vtx(row - 1, col)); weights.append(a4)
    for row in range(n):
        tails.append(left); heads.append(vtx(row, 0)); weights.append(a1)
        tails.append(right); heads.append(vtx(row, length - 1)); weights.append(a3)
    tails.append(right); heads.append(left); weights.append(n * (a1 - a3))
    graph = WeightedDigraph(n * length + 2, np.array(tails), np.array(heads),
                            np.array(weights))
    return graph, vtx, left, right


def build_segment(length: int, alpha: float = 1.0, beta: float = 1.0) -> WeightedDigraph:
    """Path 0..length with right-edge weight alpha and left-edge weight beta."""
    if length < 1:
        raise UsageError("length must be >= 1")
    tails, heads, weights = [], [], []
    for i in range(length):
        tails.append(i); heads.append(i + 1); weights.append(alpha)
        tails.append(i + 1); heads.append(i); weights.append(beta)
    return WeightedDigraph(length + 1, np.array(tails), np.array(heads),
                           np.array(weights))
