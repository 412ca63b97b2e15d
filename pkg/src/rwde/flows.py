"""Electrical-network computations and max-flow / min-cut.

Resistances and Thomson-optimal unit flows are computed on undirected
unit-conductance networks by grounding the boundary and solving the interior
Laplacian; the current flow is the L2-minimal unit flow, and its energy is the
effective resistance.  Orientation: the undirected minimizer theta~ is split
by sign, assigning |theta~(e)| to the edge oriented along the current and 0
to the reverse, which keeps 0 <= theta <= 1 for unit flows.

Max-flow works directly on directed multigraphs with real capacities
(augmenting-path/Dinic search with a 1e-12 augmentation cutoff); the returned
cut is read off the final residual reachability.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .errors import StructuralError, UsageError


@dataclass
class FlowAssignment:
    """Nonnegative flow on directed edges with prescribed divergence."""

    n_vertices: int
    tails: np.ndarray
    heads: np.ndarray
    theta: np.ndarray
    strength: float
    source: int
    sinks: np.ndarray

    def divergence(self) -> np.ndarray:
        out = np.bincount(self.tails, weights=self.theta, minlength=self.n_vertices)
        inc = np.bincount(self.heads, weights=self.theta, minlength=self.n_vertices)
        return out - inc

    def energy(self) -> float:
        """Squared L2 norm of the flow."""
        return float(np.sum(self.theta ** 2))

    def to_csv(self) -> str:
        lines = ["tail,head,theta"]
        for t, h, v in zip(self.tails, self.heads, self.theta):
            lines.append(f"{t},{h},{v:.12g}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Laplacian solves on undirected unit-conductance networks
# ---------------------------------------------------------------------------

def _grounded_potentials(n_vertices: int, edges: np.ndarray, x: int,
                         boundary) -> np.ndarray:
    """Potentials for unit current injected at x, boundary grounded at 0."""
    bset = np.asarray(sorted(set(boundary)), dtype=np.int64)
    if x in set(bset.tolist()):
        raise UsageError("x must not lie on the grounded boundary")
    keep = np.ones(n_vertices, dtype=bool)
    keep[bset] = False
    interior = np.nonzero(keep)[0]
    pos = -np.ones(n_vertices, dtype=np.int64)
    pos[interior] = np.arange(interior.size)
    u, w = edges[:, 0], edges[:, 1]
    n_int = interior.size
    deg = np.zeros(n_vertices)
    np.add.at(deg, u, 1.0)
    np.add.at(deg, w, 1.0)
    both = keep[u] & keep[w]
    rows = np.concatenate([pos[u[both]], pos[w[both]], np.arange(n_int)])
    cols = np.concatenate([pos[w[both]], pos[u[both]], np.arange(n_int)])
    vals = np.concatenate([-np.ones(both.sum()), -np.ones(both.sum()), deg[interior]])
    rhs = np.zeros(n_int)
    rhs[pos[x]] = 1.0
    if n_int <= 2000:
        lap = np.zeros((n_int, n_int))
        np.add.at(lap, (rows, cols), vals)
        v_int = scipy.linalg.solve(lap, rhs, assume_a="pos")
    else:
        lap = scipy.sparse.coo_matrix((vals, (rows, cols)), shape=(n_int, n_int)).tocsc()
        v_int = scipy.sparse.linalg.spsolve(lap, rhs)
    v = np.zeros(n_vertices)
    v[interior] = v_int
    return v


def effective_resistance(n_vertices: int, edges, x: int, boundary) -> float:
    """Resistance between x and the grounded boundary set, unit conductances."""
    e = np.asarray(edges, dtype=np.int64)
    v = _grounded_potentials(n_vertices, e, x, boundary)
    r = float(v[x])
    if not np.isfinite(r) or r <= 0:
        raise StructuralError("resistance solve failed; network disconnected?")
    return r


def thomson_unit_flow(n_vertices: int, edges, x: int, boundary) -> FlowAssignment:
    """Unit-strength flow of minimal L2 norm from x to the boundary set.

    The flow is the unit current; its energy equals the effective resistance
    and no edge carries more than 1.
    """
    e = np.asarray(edges, dtype=np.int64)
    v = _grounded_potentials(n_vertices, e, x, boundary)
    diff = v[e[:, 0]] - v[e[:, 1]]
    tails = np.where(diff >= 0, e[:, 0], e[:, 1])
    heads = np.where(diff >= 0, e[:, 1], e[:, 0])
    theta = np.abs(diff)
    bset = np.asarray(sorted(set(boundary)), dtype=np.int64)
    return FlowAssignment(n_vertices, tails, heads, theta, 1.0, x, bset)


def lattice_ball_network(d: int, n: int):
    """Undirected unit-conductance network on B(0, n) with a ground supernode.

    Each lattice edge crossing the sphere becomes one edge to the supernode
    (parallel edges kept, so the boundary conductance is exact).
    Returns (n_vertices, edges, index, ground).
    """
    if d < 1 or n < 1:
        raise UsageError("need d >= 1 and n >= 1")
    pts = [tuple(int(v) for v in c)
           for c in np.indices((2 * n + 1,) * d).reshape(d, -1).T - n
           if int(np.dot(c, c)) <= n * n]
    idx = {c: i for i, c in enumerate(pts)}
    ground = len(pts)
    edges = []
    for c in pts:
        for axis in range(d):
            dest = list(c)
            dest[axis] += 1
            dest = tuple(dest)
            edges.append((idx[c], idx.get(dest, ground)))
            back = list(c)
            back[axis] -= 1
            if tuple(back) not in idx:
                edges.append((idx[c], ground))
    return ground + 1, np.asarray(edges, dtype=np.int64), idx, ground


def torus_network(d: int, n: int):
    """Undirected unit-conductance torus (Z/nZ)^d; returns (n_vertices, edges)."""
    coords = np.indices((n,) * d).reshape(d, -1).T
    idx = {tuple(c): i for i, c in enumerate(coords)}
    edges = []
    for c in coords:
        for axis in range(d):
            dest = list(c)
            dest[axis] = (dest[axis] + 1) % n
            if n == 1:
                continue
            edges.append((idx[tuple(c)], idx[tuple(dest)]))
    if n == 2:
        # +1 and -1 wrap to the same neighbor; keep a single edge
        edges = list({tuple(sorted(e)) for e in edges})
    return n ** d, np.asarray(edges, dtype=np.int64).reshape(-1, 2)


def averaged_flow(d: int, n: int) -> FlowAssignment:
    """Average over torus targets y of the Thomson unit flows 0 -> y.

    div(theta) = (1/n^d) sum_y (delta_0 - delta_y); 0 <= theta <= 1, and the
    energy stays bounded in n for d >= 3.
    """
    n_vertices, edges = torus_network(d, n)
    if n_vertices == 1 or edges.size == 0:
        return FlowAssignment(1, np.empty(0, np.int64), np.empty(0, np.int64),
                              np.empty(0), 0.0, 0, np.array([0]))
    deg = np.zeros(n_vertices)
    np.add.at(deg, edges[:, 0], 1.0)
    np.add.at(deg, edges[:, 1], 1.0)
    lap = np.zeros((n_vertices, n_vertices))
    np.add.at(lap, (edges[:, 0], edges[:, 1]), -1.0)
    np.add.at(lap, (edges[:, 1], edges[:, 0]), -1.0)
    lap[np.arange(n_vertices), np.arange(n_vertices)] += deg
    # ground vertex 0: solve for potentials of flows 0 -> y, all y, in one pass
    lred = lap[1:, 1:]
    rhs = -np.eye(n_vertices)[1:, 1:]  # column y: injection -delta_y, +1 absorbed at ground
    v = np.zeros((n_vertices, n_vertices - 1))
    v[1:, :] = scipy.linalg.solve(lred, rhs, assume_a="pos")
    diff = v[edges[:, 0], :] - v[edges[:, 1], :]  # flow on e for each target y
    pos_part = np.maximum(diff, 0.0).sum(axis=1) / n_vertices
    neg_part = np.maximum(-diff, 0.0).sum(axis=1) / n_vertices
    tails = np.concatenate([edges[:, 0], edges[:, 1]])
    heads = np.concatenate([edges[:, 1], edges[:, 0]])
    theta = np.concatenate([pos_part, neg_part])
    keep = theta > 0
    return FlowAssignment(n_vertices, tails[keep], heads[keep], theta[keep],
                          (n_vertices - 1) / n_vertices, 0, np.arange(1, n_vertices))


# ---------------------------------------------------------------------------
# Max-flow / min-cut with real capacities
# ---------------------------------------------------------------------------

@dataclass
class CutSet:
    """Edge subset meeting every directed source->sink path, with its capacity."""

    edges: np.ndarray
    capacity: float


AUGMENT_CUTOFF = 1e-12


def max_flow_min_cut(n_vertices: int, tails, heads, capacities, s: int, t: int):
    """Maximum s->t flow and a minimum cut on a directed multigraph.

    Real capacities; augmentation stops below AUGMENT_CUTOFF, which also
    serves as the residual threshold when reading off the cut.  Returns
    (FlowAssignment, CutSet); an unreachable sink yields strength 0.
    """
    tl = np.asarray(tails, dtype=np.int64)
    hd = np.asarray(heads, dtype=np.int64)
    cap = np.asarray(capacities, dtype=float)
    if s == t:
        raise UsageError("source and sink must differ")
    if np.any(cap < 0):
        raise UsageError("capacities must be nonnegative")
    m = tl.size
    # arc list with paired reverse arcs: arc 2i is edge i, arc 2i+1 its residual
    arc_to = np.empty(2 * m, dtype=np.int64)
    arc_cap = np.zeros(2 * m)
    arc_to[0::2] = hd
    arc_to[1::2] = tl
    arc_cap[0::2] = cap
    head_list: list[list[int]] = [[] for _ in range(n_vertices)]
    for i in range(m):
        head_list[tl[i]].append(2 * i)
        head_list[hd[i]].append(2 * i + 1)

    arc_from = np.empty(2 * m, dtype=np.int64)
    arc_from[0::2] = tl
    arc_from[1::2] = hd

    total = 0.0
    level = np.empty(n_vertices, dtype=np.int64)
    while True:
        # BFS level graph on residual arcs
        level.fill(-1)
        level[s] = 0
        queue = [s]
        for v in queue:
            for a in head_list[v]:
                w = arc_to[a]
                if arc_cap[a] > AUGMENT_CUTOFF and level[w] < 0:
                    level[w] = level[v] + 1
                    queue.append(w)
        if level[t] < 0:
            break
        it = [0] * n_vertices
        # iterative blocking flow: walk forward along admissible arcs,
        # retreat on dead ends, augment when the sink is reached
        path: list[int] = []
        v = s
        while True:
            if v == t:
                bottleneck = min(arc_cap[a] for a in path)
                for a in path:
                    arc_cap[a] -= bottleneck
                    arc_cap[a ^ 1] += bottleneck
                total += bottleneck
                # retreat to the tail of the first saturated arc
                i = 0
                while i < len(path) and arc_cap[path[i]] > AUGMENT_CUTOFF:
                    i += 1
                del path[i:]
                v = int(arc_to[path[-1]]) if path else s
                continue
            advanced = False
            while it[v] < len(head_list[v]):
                a = head_list[v][it[v]]
                w = arc_to[a]
                if arc_cap[a] > AUGMENT_CUTOFF and level[w] == level[v] + 1:
                    path.append(a)
                    v = w
                    advanced = True
                    break
                it[v] += 1
            if not advanced:
                if v == s:
                    break
                level[v] = -1
                v = int(arc_from[path.pop()])

    reach = np.zeros(n_vertices, dtype=bool)
    reach[s] = True
    queue = [s]
    for v in queue:
        for a in head_list[v]:
            w = arc_to[a]
            if arc_cap[a] > AUGMENT_CUTOFF and not reach[w]:
                reach[w] = True
                queue.append(w)
    cut_edges = np.nonzero(reach[tl] & ~reach[hd] & (cap > 0))[0]
    cut = CutSet(cut_edges, float(cap[cut_edges].sum()))
    flow_vals = cap - arc_cap[0::2]
    flow = FlowAssignment(n_vertices, tl, hd, np.maximum(flow_vals, 0.0),
                          float(total), s, np.array([t]))
    return flow, cut


def resistance_table_csv(ns, resistances) -> str:
    lines = ["N,R_N"]
    for n, r in zip(ns, resistances):
        lines.append(f"{n},{r:.12g}")
    return "\n".join(lines) + "\n"
