"""Walk engines and lattice parameters.

Quenched walks run either on a finite-graph Environment or on a lazy
LatticeEnvironment over Z^d whose site vectors are derived deterministically
from (seed, replica, coordinates); large ensembles go through the compiled
kernels.  Also here: the annealed reinforced walk, the accelerated
continuous-time chain, regeneration-time extraction, and the kappa / kappa^box
/ d_alpha parameter calculators.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse

from . import kernels
from .errors import ParameterDomainError, ResourceLimitError, UsageError
from .graph_env import Environment
from .rng import RngHandle
from .sampling import _as_generator

DEFAULT_STEP_GUARD = 10 ** 9
PATH_ENUM_GUARD = 10 ** 6


# ---------------------------------------------------------------------------
# Lattice weights and derived parameters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LatticeWeights:
    """Translation-invariant weights (e_1..e_d, -e_1..-e_d) on Z^d."""

    d: int
    alphas: tuple

    def __post_init__(self):
        if self.d < 1:
            raise ParameterDomainError("dimension must be >= 1")
        if len(self.alphas) != 2 * self.d or any(a <= 0 for a in self.alphas):
            raise ParameterDomainError("need 2d positive weights")

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.alphas, dtype=float)


def d_alpha(weights: LatticeWeights) -> np.ndarray:
    """Sum of alpha_i e_i; the annealed one-step drift is d_alpha / sum(alpha)."""
    a = weights.array
    d = weights.d
    return a[:d] - a[d:]


def kappa(weights: LatticeWeights) -> float:
    """Total weight exiting the strongest two-vertex trap:
    2 sum_i alpha_i - max_i (alpha_i + alpha_{i+d})."""
    a = weights.array
    d = weights.d
    pair = a[:d] + a[d:]
    return float(2.0 * a.sum() - pair.max())


def kappa_lambda_box(weights: LatticeWeights, r: int) -> float:
    """Exit weight of the strongest trap containing 0 and reaching the
    boundary of a box of radius r:
    min_i0 ( alpha_i0 + alpha_{i0+d} + (r+1) sum_{i != i0} (alpha_i + alpha_{i+d}) ).

    For d = 1 the complementary sum is empty and the value degenerates to
    alpha_1 + alpha_2 independently of r.  At r = 1 the value equals kappa.
    """
    if r < 0:
        raise ParameterDomainError("box radius must be >= 0")
    a = weights.array
    d = weights.d
    pair = a[:d] + a[d:]
    total = pair.sum()
    return float(np.min(pair + (r + 1) * (total - pair)))


# ---------------------------------------------------------------------------
# Lazy lattice environment
# ---------------------------------------------------------------------------

class LatticeEnvironment:
    """Cached per-site Dirichlet environment on Z^d.

    Site vectors depend only on (seed, replica, coordinates), so revisiting a
    site reproduces the identical transition vector regardless of visit order,
    and distinct sites are independent in law.
    """

    def __init__(self, weights: LatticeWeights, seed: int, replica: int = 0):
        self.weights = weights
        self.seed = int(seed)
        self.replica = int(replica)
        self._cache: dict[tuple, np.ndarray] = {}

    @classmethod
    def from_rng(cls, weights: LatticeWeights, rng: RngHandle) -> "LatticeEnvironment":
        return cls(weights, int(rng.state64(1)[0]), replica=rng.stream)

    def site_probs(self, coords) -> np.ndarray:
        key = tuple(int(c) for c in coords)
        if len(key) != self.weights.d:
            raise UsageError(f"expected {self.weights.d} coordinates")
        probs = self._cache.get(key)
        if probs is None:
            probs = kernels.site_probs(self.seed, self.replica,
                                       np.asarray(key, dtype=np.int64),
                                       self.weights.array)
            self._cache[key] = probs
        return probs

    def step_distribution(self, coords) -> tuple[np.ndarray, np.ndarray]:
        """(neighbor displacement vectors, probabilities) at a site."""
        d = self.weights.d
        probs = self.site_probs(coords)
        moves = np.vstack([np.eye(d, dtype=np.int64), -np.eye(d, dtype=np.int64)])
        return moves, probs


# ---------------------------------------------------------------------------
# Records and stopping rules
# ---------------------------------------------------------------------------

@dataclass
class WalkRecord:
    """Trajectory summary: positions at checkpoint times plus named events."""

    times: np.ndarray
    positions: np.ndarray
    final_time: float
    events: dict = field(default_factory=dict)
    path: np.ndarray | None = None
    timed_out: bool = False
    continuous: bool = False

    def __post_init__(self):
        self.times = np.asarray(self.times)
        self.positions = np.asarray(self.positions)
        if np.any(np.diff(self.times) <= 0):
            raise UsageError("checkpoint times must be strictly increasing")


@dataclass(frozen=True)
class FixedHorizon:
    steps: int


@dataclass(frozen=True)
class HitVertices:
    vertices: frozenset
    max_steps: int = DEFAULT_STEP_GUARD


@dataclass(frozen=True)
class ExitBox:
    radius: int
    max_steps: int = DEFAULT_STEP_GUARD


def _norm_checkpoints(stop, checkpoints):
    if checkpoints is not None:
        cps = np.asarray(checkpoints, dtype=np.int64)
        if cps.size == 0 or np.any(np.diff(cps) <= 0):
            raise UsageError("checkpoints must be nonempty and increasing")
        return cps
    if isinstance(stop, FixedHorizon):
        return np.array([stop.steps], dtype=np.int64)
    return None


def quenched_walk(env, start, stop, rng, record_path: bool = False,
                  checkpoints=None) -> WalkRecord:
    """Markov chain driven by per-site transition probabilities.

    `env` is a finite-graph Environment (start = vertex index) or a
    LatticeEnvironment (start = coordinate tuple).  `stop` is FixedHorizon,
    HitVertices, or ExitBox; hitting rules carry a step guard, and exceeding
    it yields a record flagged timed_out instead of a silent loop.
    """
    gen = _as_generator(rng)
    cps = _norm_checkpoints(stop, checkpoints)
    if isinstance(env, Environment):
        return _walk_finite(env, int(start), stop, gen, record_path, cps)
    if isinstance(env, LatticeEnvironment):
        return _walk_lattice(env, tuple(start), stop, gen, record_path, cps)
    raise UsageError(f"unsupported environment type {type(env)!r}")


def _walk_finite(env: Environment, start, stop, gen, record_path, cps) -> WalkRecord:
    g = env.graph
    cum = {}
    for x in range(g.n_vertices):
        edges = g.out_edges(x)
        c = np.cumsum(env.probs[edges])
        c[-1] = 1.0
        cum[x] = (edges, c)
    horizon, stop_set, max_steps = _stop_params(stop)
    pos = start
    path = [pos] if record_path else None
    rec_t, rec_x = [], []
    hit_time = None
    step = 0
    while True:
        if cps is not None and step in cps:
            rec_t.append(step)
            rec_x.append(pos)
        if horizon is not None and step >= horizon:
            break
        if stop_set is not None and step > 0 and pos in stop_set:
            hit_time = step
            break
        if step >= max_steps:
            return _record(rec_t, rec_x, step, pos, path, timed_out=True)
        edges, c = cum[pos]
        e = edges[np.searchsorted(c, gen.random(), side="right")]
        pos = int(g.heads[e])
        step += 1
        if record_path:
            path.append(pos)
    rec = _record(rec_t, rec_x, step, pos, path)
    if stop_set is not None:
        rec.events["hit_time"] = hit_time
    return rec


def _walk_lattice(env: LatticeEnvironment, start, stop, gen, record_path, cps) -> WalkRecord:
    d = env.weights.d
    horizon, stop_set, max_steps = _stop_params(stop)
    radius = stop.radius if isinstance(stop, ExitBox) else None
    pos = np.asarray(start, dtype=np.int64)
    path = [pos.copy()] if record_path else None
    rec_t, rec_x = [], []
    event = None
    step = 0
    while True:
        if cps is not None and step in cps:
            rec_t.append(step)
            rec_x.append(pos.copy())
        if horizon is not None and step >= horizon:
            break
        if stop_set is not None and step > 0 and tuple(pos) in stop_set:
            event = step
            break
        if radius is not None and np.max(np.abs(pos - np.asarray(start))) > radius:
            event = step
            break
        if step >= max_steps:
            return _record(rec_t, rec_x, step, pos.copy(), path, timed_out=True)
        probs = env.site_probs(pos)
        k = int(np.searchsorted(np.cumsum(probs), gen.random(), side="right"))
        k = min(k, 2 * d - 1)
        pos[k % d] += 1 if k < d else -1
        step += 1
        if record_path:
            path.append(pos.copy())
    rec = _record(rec_t, rec_x, step, pos.copy(), path)
    if stop_set is not None or radius is not None:
        rec.events["hit_time"] = event
    return rec


def _stop_params(stop):
    if isinstance(stop, FixedHorizon):
        return stop.steps, None, DEFAULT_STEP_GUARD
    if isinstance(stop, HitVertices):
        return None, stop.vertices, stop.max_steps
    if isinstance(stop, ExitBox):
        return None, None, stop.max_steps
    raise UsageError(f"unknown stopping rule {stop!r}")


def _record(rec_t, rec_x, final_time, final_pos, path, timed_out=False) -> WalkRecord:
    if not rec_t or rec_t[-1] != final_time:
        rec_t = list(rec_t) + [final_time]
        rec_x = list(rec_x) + [final_pos]
    positions = np.asarray(rec_x)
    return WalkRecord(np.asarray(rec_t), positions, final_time,
                      path=None if path is None else np.asarray(path),
                      timed_out=timed_out)


# ---------------------------------------------------------------------------
# Ensemble helpers through the compiled kernels
# ---------------------------------------------------------------------------

def ensemble_checkpoints(weights: LatticeWeights, rng: RngHandle, checkpoints,
                         n_replicas: int, replica_lo: int = 0) -> np.ndarray:
    """Quenched positions at checkpoint times for independent (env, walk) pairs.

    Returns int64 array of shape (n_replicas, n_checkpoints, d).  Replica r
    uses streams derived from (rng, replica_lo + r), so partial ranges run in
    parallel reproduce the full-run values.
    """
    env_seed, step_seed = map(int, rng.state64(2))
    cps = np.asarray(checkpoints, dtype=np.int64)
    d = weights.d
    if d == 1:
        a, b = weights.alphas
        out = kernels.walk1d_checkpoints(a, b, env_seed, step_seed,
                                         replica_lo, n_replicas, cps)
        return out[:, :, None]
    if d in (2, 3):
        return kernels.lattice_checkpoints(weights.array, env_seed, step_seed,
                                           replica_lo, n_replicas, cps)
    # arbitrary d: slow generic path
    out = np.empty((n_replicas, cps.size, d), dtype=np.int64)
    for r in range(n_replicas):
        env = LatticeEnvironment(weights, env_seed, replica=replica_lo + r)
        rec = quenched_walk(env, (0,) * d, FixedHorizon(int(cps[-1])),
                            RngHandle(step_seed, replica_lo + r), checkpoints=cps)
        out[r] = rec.positions
    return out


def path_1d(weights: LatticeWeights, rng: RngHandle, n_steps: int,
            replica: int = 0) -> np.ndarray:
    """Full trajectory of one 1-D replica (positions, length n_steps + 1)."""
    if weights.d != 1:
        raise UsageError("path_1d needs d = 1 weights")
    env_seed, step_seed = map(int, rng.state64(2))
    a, b = weights.alphas
    return kernels.walk1d_path(a, b, env_seed, step_seed, replica, n_steps)


# ---------------------------------------------------------------------------
# Reinforced walk
# ---------------------------------------------------------------------------

def reinforced_walk(graph_or_weights, start, horizon: int, rng) -> WalkRecord:
    """Directed-edge linearly reinforced walk: edge e is crossed with
    probability proportional to its current weight, then its weight gains 1."""
    gen = _as_generator(rng)
    if horizon < 0:
        raise UsageError("horizon must be nonnegative")
    if isinstance(graph_or_weights, LatticeWeights):
        return _reinforced_lattice(graph_or_weights, tuple(start), horizon, gen)
    g = graph_or_weights
    counts = g.weights.astype(float).copy()
    pos = int(start)
    path = [pos]
    for _ in range(horizon):
        edges = g.out_edges(pos)
        w = counts[edges]
        e = edges[_draw_index(w, gen)]
        counts[e] += 1.0
        pos = int(g.heads[e])
        path.append(pos)
    path = np.asarray(path)
    return WalkRecord(np.arange(horizon + 1), path, horizon, path=path)


def _reinforced_lattice(weights: LatticeWeights, start, horizon, gen) -> WalkRecord:
    d = weights.d
    base = weights.array
    extra: dict[tuple, np.ndarray] = {}
    pos = np.asarray(start, dtype=np.int64)
    path = [pos.copy()]
    for _ in range(horizon):
        key = tuple(pos)
        w = base + extra.get(key, 0.0)
        k = _draw_index(w, gen)
        bump = extra.setdefault(key, np.zeros(2 * d))
        bump[k] += 1.0
        pos[k % d] += 1 if k < d else -1
        path.append(pos.copy())
    path = np.asarray(path)
    return WalkRecord(np.arange(horizon + 1), path, horizon, path=path)


def _draw_index(weights: np.ndarray, gen) -> int:
    c = np.cumsum(weights)
    u = gen.random() * c[-1]
    return min(int(np.searchsorted(c, u, side="right")), weights.size - 1)


# ---------------------------------------------------------------------------
# Regeneration times
# ---------------------------------------------------------------------------

@dataclass
class RegenerationSummary:
    """Renewal structure of one trajectory in a fixed direction."""

    direction: np.ndarray
    times: np.ndarray
    displacements: np.ndarray
    censored: int

    @property
    def count(self) -> int:
        return len(self.times)


def regeneration_times(record: WalkRecord, direction) -> RegenerationSummary:
    """Times at which the projection sets a strict record never undercut later.

    Works on the observed horizon only: the final candidate cannot be
    confirmed by the missing future and is dropped (reported in `censored`).
    """
    if record.path is None:
        raise UsageError("regeneration extraction needs the full path")
    ell = np.atleast_1d(np.asarray(direction, dtype=float))
    path = record.path if record.path.ndim == 2 else record.path[:, None]
    proj = path @ ell
    n = proj.size
    run_max = np.empty(n)
    run_max[0] = -np.inf
    np.maximum.accumulate(proj[:-1], out=run_max[1:])
    suffix_min = np.minimum.accumulate(proj[::-1])[::-1]
    is_regen = (proj > run_max) & (proj <= suffix_min)
    t = np.nonzero(is_regen)[0]
    censored = 0
    if t.size:
        t = t[:-1]
        censored = 1
    t = t[t > 0]
    disp = np.diff(proj[t]) if t.size > 1 else np.empty(0)
    return RegenerationSummary(ell, t.astype(np.int64), disp, censored)


# ---------------------------------------------------------------------------
# Accelerated chain
# ---------------------------------------------------------------------------

class _BoxPaths:
    """Precomputed simple-path structure for the acceleration factor.

    Enumerates, once per (d, r), every simple directed path from the box
    center stopped just after exiting the box, as index arrays into the box
    sites and direction labels.
    """

    _memo: dict[tuple[int, int], "_BoxPaths"] = {}

    def __init__(self, d: int, r: int, guard: int = PATH_ENUM_GUARD):
        self.d, self.r = d, r
        side = 2 * r + 1
        offsets = [tuple(int(v) for v in c)
                   for c in np.indices((side,) * d).reshape(d, -1).T - r]
        self.offsets = offsets
        index = {c: i for i, c in enumerate(offsets)}
        moves = [tuple(v) for v in np.vstack([np.eye(d, dtype=int),
                                              -np.eye(d, dtype=int)])]
        paths: list[list[tuple[int, int]]] = []
        # iterative DFS over (site, direction) prefixes
        stack = [((0,) * d, frozenset({(0,) * d}), [])]
        while stack:
            site, visited, prefix = stack.pop()
            for k, mv in enumerate(moves):
                nxt = tuple(site[j] + mv[j] for j in range(d))
                step = prefix + [(index[site], k)]
                if nxt not in index:
                    paths.append(step)
                    if len(paths) > guard:
                        raise ResourceLimitError(
                            f"simple-path enumeration exceeded {guard} paths")
                elif nxt not in visited:
                    stack.append((nxt, visited | {nxt}, step))
        self.n_paths = len(paths)
        lens = np.array([len(p) for p in paths])
        flat = np.concatenate([np.asarray(p, dtype=np.int64) for p in paths])
        cols = flat[:, 0] * 2 * d + flat[:, 1]
        rows = np.repeat(np.arange(self.n_paths), lens)
        # path log-weights are one sparse matvec against the flattened log table
        self._counts = scipy.sparse.coo_matrix(
            (np.ones(cols.size), (rows, cols)),
            shape=(self.n_paths, len(offsets) * 2 * d)).tocsr()

    @classmethod
    def get(cls, d: int, r: int) -> "_BoxPaths":
        key = (d, r)
        if key not in cls._memo:
            cls._memo[key] = cls(d, r)
        return cls._memo[key]

    def weight_sum(self, omega_table: np.ndarray) -> float:
        """Sum over paths of the product of step probabilities.

        omega_table[i, k] = probability of direction k at box site i.
        """
        logw = self._counts @ np.log(omega_table.ravel())
        return float(np.exp(logw).sum())


def gamma_factor(env: LatticeEnvironment, x, r: int) -> float:
    """Acceleration factor 1 / sum of simple-path exit probabilities from x.

    Always >= 1: the summed paths are disjoint sub-events of the exit event.
    """
    if r < 0:
        raise ParameterDomainError("box radius must be >= 0")
    if r == 0:
        return 1.0
    d = env.weights.d
    box = _BoxPaths.get(d, r)
    x0 = np.asarray(tuple(x), dtype=np.int64)
    table = np.empty((len(box.offsets), 2 * d))
    for i, off in enumerate(box.offsets):
        table[i] = env.site_probs(x0 + np.asarray(off, dtype=np.int64))
    total = box.weight_sum(table)
    return 1.0 / total


def accelerated_walk(env: LatticeEnvironment, r: int, start, horizon: float,
                     rng, checkpoint_times=None) -> WalkRecord:
    """Continuous-time chain jumping from x at rate gamma(x), target law omega(x, .).

    Holding times are exact exponentials; positions are recorded at the given
    continuous checkpoint times (default: the final time only).
    """
    gen = _as_generator(rng)
    d = env.weights.d
    if checkpoint_times is None:
        checkpoint_times = [horizon]
    cts = np.asarray(checkpoint_times, dtype=float)
    gamma_cache: dict[tuple, float] = {}
    pos = np.asarray(tuple(start), dtype=np.int64)
    t = 0.0
    jumps = 0
    out = np.empty((cts.size, d), dtype=np.int64)
    icp = 0
    while icp < cts.size:
        key = tuple(pos)
        g = gamma_cache.get(key)
        if g is None:
            g = gamma_factor(env, key, r)
            gamma_cache[key] = g
        t_next = t + gen.exponential(1.0 / g)
        while icp < cts.size and cts[icp] < t_next:
            out[icp] = pos
            icp += 1
        probs = env.site_probs(key)
        k = min(int(np.searchsorted(np.cumsum(probs), gen.random(), side="right")),
                2 * d - 1)
        pos[k % d] += 1 if k < d else -1
        t = t_next
        jumps += 1
    rec = WalkRecord(cts, out, float(cts[-1]), continuous=True)
    rec.events["jumps"] = jumps - 1  # final jump happens after the horizon
    return rec


# ---------------------------------------------------------------------------
# Displacement exponent
# ---------------------------------------------------------------------------

@dataclass
class ExponentFit:
    slope: float
    horizons: np.ndarray
    medians: np.ndarray
    excluded: int


def displacement_exponent(positions: np.ndarray, horizons, direction) -> ExponentFit:
    """Least-squares slope of median log displacement against log horizon.

    `positions` has shape (n_replicas, n_horizons, d); replicas with a
    nonpositive projection at some horizon are excluded there and counted.
    Medians resist the heavy tails of sub-ballistic regimes.
    """
    ell = np.atleast_1d(np.asarray(direction, dtype=float))
    hs = np.asarray(horizons, dtype=float)
    proj = positions @ ell
    if proj.shape[1] != hs.size:
        raise UsageError("horizon grid does not match recorded checkpoints")
    medians = np.empty(hs.size)
    excluded = 0
    for j in range(hs.size):
        col = proj[:, j]
        good = col > 0
        excluded += int((~good).sum())
        if not np.any(good):
            raise UsageError(f"no positive displacements at horizon {hs[j]}")
        medians[j] = np.median(col[good])
    slope = float(np.polyfit(np.log(hs), np.log(medians), 1)[0])
    return ExponentFit(slope, hs, medians, excluded)


# ---------------------------------------------------------------------------
# CSV serialization
# ---------------------------------------------------------------------------

def walk_records_to_csv(records: list[WalkRecord]) -> str:
    """Columns: replica, time, x_1..x_d."""
    if not records:
        raise UsageError("no records")
    pos0 = np.atleast_2d(records[0].positions)
    d = pos0.shape[1] if pos0.ndim == 2 else 1
    buf = io.StringIO()
    buf.write("replica,time," + ",".join(f"x_{i + 1}" for i in range(d)) + "\n")
    for rep, rec in enumerate(records):
        pos = rec.positions.reshape(len(rec.times), -1)
        for t, x in zip(rec.times, pos):
            coords = ",".join(str(int(v)) for v in x)
            tval = f"{t:.6f}" if rec.continuous else str(int(t))
            buf.write(f"{rep},{tval},{coords}\n")
    return buf.getvalue()


def regenerations_to_csv(summaries: list[RegenerationSummary]) -> str:
    """Columns: replica, k, tau_k, displacement (blank for the first time)."""
    buf = io.StringIO()
    buf.write("replica,k,tau_k,displacement\n")
    for rep, summ in enumerate(summaries):
        for k, tau in enumerate(summ.times):
            disp = "" if k == 0 else f"{summ.displacements[k - 1]:.1f}"
            buf.write(f"{rep},{k + 1},{int(tau)},{disp}\n")
    return buf.getvalue()


def checkpoint_grid(lo: float, hi: float, count: int) -> np.ndarray:
    """Geometric integer grid of walk horizons."""
    if count < 2 or lo <= 0 or hi <= lo:
        raise UsageError("need hi > lo > 0 and count >= 2")
    g = np.unique(np.round(np.geomspace(lo, hi, count)).astype(np.int64))
    return g
