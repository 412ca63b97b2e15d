"""Pure-Python fallback for the compiled walk kernels.

Implements the same (seed, replica, coordinates) -> site vector derivation as
``_kernels.pyx``, bit-exactly, using the generators from :mod:`rwde.rng`.  It
exists so the package works without a C compiler and as a reference
implementation for the parity tests and the kernel benchmark; expect it to be
two to three orders of magnitude slower on large horizons.
"""
from __future__ import annotations

import math

import numpy as np

from .rng import Xoshiro256PP, mix64, site_key

_GUARD = 1048575


def _upos(st: Xoshiro256PP) -> float:
    u = st.uniform()
    while u <= 0.0:
        u = st.uniform()
    return u


def _normal1(st: Xoshiro256PP) -> float:
    while True:
        u = 2.0 * st.uniform() - 1.0
        v = 2.0 * st.uniform() - 1.0
        s = u * u + v * v
        if 0.0 < s < 1.0:
            return u * math.sqrt(-2.0 * math.log(s) / s)


def _gamma_sample(st: Xoshiro256PP, shape: float) -> float:
    boost = 1.0
    if shape < 1.0:
        boost = _upos(st) ** (1.0 / shape)
        shape += 1.0
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    while True:
        x = _normal1(st)
        v = 1.0 + c * x
        if v <= 0.0:
            continue
        v = v * v * v
        u = _upos(st)
        if u < 1.0 - 0.0331 * x * x * x * x:
            return boost * d * v
        if math.log(u) < 0.5 * x * x + d * (1.0 - v + math.log(v)):
            return boost * d * v


def _dirichlet_site(seed: int, alphas) -> np.ndarray:
    st = Xoshiro256PP(seed)
    draws = np.array([_gamma_sample(st, a) for a in alphas])
    return draws / draws.sum()


def site_probs(env_seed: int, replica: int, coords, alphas) -> np.ndarray:
    root = mix64(env_seed, replica)
    skey = site_key(tuple(int(c) for c in coords))
    return _dirichlet_site(mix64(root, skey), np.asarray(alphas, dtype=float))


def gamma_variates(seed: int, shapes) -> np.ndarray:
    st = Xoshiro256PP(seed)
    return np.array([_gamma_sample(st, s) for s in np.asarray(shapes, dtype=float)])


def _beta_from_seed(seed: int, a: float, b: float) -> float:
    st = Xoshiro256PP(seed)
    x = _gamma_sample(st, a)
    y = _gamma_sample(st, b)
    return x / (x + y)


def walk1d_checkpoints(alpha, beta, env_seed, step_seed, replica_lo, n_replicas,
                       checkpoints) -> np.ndarray:
    cps = np.asarray(checkpoints, dtype=np.int64)
    n_steps = int(cps[-1])
    out = np.empty((n_replicas, len(cps)), dtype=np.int64)
    for r in range(n_replicas):
        env_root = mix64(env_seed, replica_lo + r)
        step_st = Xoshiro256PP(mix64(step_seed, replica_lo + r))
        omega: dict[int, float] = {}
        pos = 0
        icp = 0
        if cps[0] == 0:
            out[r, 0] = 0
            icp = 1
        for step in range(1, n_steps + 1):
            w = omega.get(pos)
            if w is None:
                w = _beta_from_seed(mix64(env_root, site_key((pos,))), alpha, beta)
                omega[pos] = w
            pos += 1 if step_st.uniform() < w else -1
            if icp < len(cps) and step == cps[icp]:
                out[r, icp] = pos
                icp += 1
    return out


def walk1d_path(alpha, beta, env_seed, step_seed, replica, n_steps) -> np.ndarray:
    path = np.empty(n_steps + 1, dtype=np.int32)
    env_root = mix64(env_seed, replica)
    step_st = Xoshiro256PP(mix64(step_seed, replica))
    omega: dict[int, float] = {}
    pos = 0
    path[0] = 0
    for step in range(1, n_steps + 1):
        w = omega.get(pos)
        if w is None:
            w = _beta_from_seed(mix64(env_root, site_key((pos,))), alpha, beta)
            omega[pos] = w
        pos += 1 if step_st.uniform() < w else -1
        path[step] = pos
    return path


def lattice_checkpoints(alphas, env_seed, step_seed, replica_lo, n_replicas,
                        checkpoints) -> np.ndarray:
    a = np.asarray(alphas, dtype=float)
    twod = len(a)
    d = twod // 2
    cps = np.asarray(checkpoints, dtype=np.int64)
    n_steps = int(cps[-1])
    out = np.empty((n_replicas, len(cps), d), dtype=np.int64)
    for r in range(n_replicas):
        env_root = mix64(env_seed, replica_lo + r)
        step_st = Xoshiro256PP(mix64(step_seed, replica_lo + r))
        cum: dict[tuple, np.ndarray] = {}
        x = [0] * d
        icp = 0
        if cps[0] == 0:
            out[r, 0] = 0
            icp = 1
        for step in range(1, n_steps + 1):
            key = tuple(x)
            row = cum.get(key)
            if row is None:
                probs = _dirichlet_site(mix64(env_root, site_key(key)), a)
                row = np.cumsum(probs)
                row[-1] = 1.0
                cum[key] = row
            direction = int(np.searchsorted(row, step_st.uniform(), side="right"))
            if direction < d:
                x[direction] += 1
            else:
                x[direction - d] -= 1
            if abs(x[direction % d]) > _GUARD:
                raise OverflowError("walk left the packable coordinate range")
            if icp < len(cps) and step == cps[icp]:
                out[r, icp] = x
                icp += 1
    return out


def lattice_escape_trials(alphas, env_seed, step_seed, radius, n_trials,
                          max_steps) -> tuple[int, int, int]:
    a = np.asarray(alphas, dtype=float)
    d = len(a) // 2
    if d != 2:
        raise ValueError("escape trials are implemented for d = 2")
    r2 = radius * radius
    hits = rets = touts = 0
    for trial in range(n_trials):
        env_root = mix64(env_seed, trial)
        step_st = Xoshiro256PP(mix64(step_seed, trial))
        cum: dict[tuple, np.ndarray] = {}
        x = [0, 0]
        step = 0
        while True:
            step += 1
            if step > max_steps:
                touts += 1
                break
            key = tuple(x)
            row = cum.get(key)
            if row is None:
                probs = _dirichlet_site(mix64(env_root, site_key(key)), a)
                row = np.cumsum(probs)
                row[-1] = 1.0
                cum[key] = row
            direction = int(np.searchsorted(row, step_st.uniform(), side="right"))
            if direction < d:
                x[direction] += 1
            else:
                x[direction - d] -= 1
            if x[0] * x[0] + x[1] * x[1] >= r2:
                hits += 1
                break
            if x[0] == 0 and x[1] == 0:
                rets += 1
                break
    return hits, rets, touts
