# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: lazy-environment walk simulation on Z and Z^d.

Site transition vectors are derived deterministically from
(environment seed, replica, coordinates) through a splitmix64 hash chain and a
per-site xoshiro256++ stream, so revisiting a site always reproduces the same
vector regardless of visit order.  The pure-Python fallback in
``_kernels_fallback.py`` implements the identical arithmetic.
"""

import numpy as np

cimport numpy as cnp
from cython.operator cimport dereference as deref
from libc.math cimport log, pow, sqrt
from libcpp.unordered_map cimport unordered_map

cnp.import_array()

ctypedef unsigned long long u64

cdef u64 GOLDEN = 0x9E3779B97F4A7C15ULL
cdef u64 SITE_KEY_INIT = 0x51ED2701A7B4E2F3ULL


# ---------------------------------------------------------------------------
# splitmix64 / xoshiro256++
# ---------------------------------------------------------------------------

cdef inline u64 sm64(u64 x) noexcept nogil:
    cdef u64 z = x + GOLDEN
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline u64 mix64(u64 a, u64 b) noexcept nogil:
    return sm64(a ^ sm64(b))


cdef inline u64 zigzag(long long c) noexcept nogil:
    if c >= 0:
        return (<u64> c) << 1
    return ((<u64> (-c)) << 1) - 1


cdef struct Xo:
    u64 s0
    u64 s1
    u64 s2
    u64 s3


cdef inline void xo_seed(Xo* st, u64 seed) noexcept nogil:
    cdef u64 x = seed
    x += GOLDEN; st.s0 = sm64(x - GOLDEN)
    x += GOLDEN; st.s1 = sm64(x - GOLDEN)
    x += GOLDEN; st.s2 = sm64(x - GOLDEN)
    x += GOLDEN; st.s3 = sm64(x - GOLDEN)


cdef inline u64 rotl(u64 x, int k) noexcept nogil:
    return (x << k) | (x >> (64 - k))


cdef inline u64 xo_next(Xo* st) noexcept nogil:
    cdef u64 result = rotl(st.s0 + st.s3, 23) + st.s0
    cdef u64 t = st.s1 << 17
    st.s2 ^= st.s0
    st.s3 ^= st.s1
    st.s1 ^= st.s2
    st.s0 ^= st.s3
    st.s2 ^= t
    st.s3 = rotl(st.s3, 45)
    return result


cdef inline double u01(Xo* st) noexcept nogil:
    return (xo_next(st) >> 11) * (1.0 / 9007199254740992.0)


cdef inline double upos(Xo* st) noexcept nogil:
    cdef double u = u01(st)
    while u <= 0.0:
        u = u01(st)
    return u


cdef inline double normal1(Xo* st) noexcept nogil:
    # Marsaglia polar method, one variate per call
    cdef double u, v, s
    while True:
        u = 2.0 * u01(st) - 1.0
        v = 2.0 * u01(st) - 1.0
        s = u * u + v * v
        if 0.0 < s < 1.0:
            return u * sqrt(-2.0 * log(s) / s)


cdef double gamma_sample(Xo* st, double shape) noexcept nogil:
    # Marsaglia-Tsang; shape < 1 boosted through Gamma(shape + 1) * U^(1/shape)
    cdef double d, c, x, v, u, boost
    boost = 1.0
    if shape < 1.0:
        boost = pow(upos(st), 1.0 / shape)
        shape += 1.0
    d = shape - 1.0 / 3.0
    c = 1.0 / sqrt(9.0 * d)
    while True:
        x = normal1(st)
        v = 1.0 + c * x
        if v <= 0.0:
            continue
        v = v * v * v
        u = upos(st)
        if u < 1.0 - 0.0331 * x * x * x * x:
            return boost * d * v
        if log(u) < 0.5 * x * x + d * (1.0 - v + log(v)):
            return boost * d * v


cdef inline double beta_sample(Xo* st, double a, double b) noexcept nogil:
    cdef double x = gamma_sample(st, a)
    cdef double y = gamma_sample(st, b)
    return x / (x + y)


cdef inline u64 coords_key(long long* coords, int d) noexcept nogil:
    cdef u64 key = SITE_KEY_INIT
    cdef int i
    for i in range(d):
        key = mix64(key, zigzag(coords[i]))
    return key


cdef void dirichlet_site(u64 site_seed, double* alphas, int k, double* out) noexcept nogil:
    cdef Xo st
    cdef int i
    cdef double total = 0.0
    xo_seed(&st, site_seed)
    for i in range(k):
        out[i] = gamma_sample(&st, alphas[i])
        total += out[i]
    for i in range(k):
        out[i] /= total


# ---------------------------------------------------------------------------
# Python-visible sampling helpers
# ---------------------------------------------------------------------------

def site_probs(u64 env_seed, u64 replica, coords, alphas):
    """Transition vector of one lattice site, derived from (seed, replica, x)."""
    cdef cnp.ndarray[double, ndim=1] a = np.ascontiguousarray(alphas, dtype=np.float64)
    cdef cnp.ndarray[long long, ndim=1] c = np.ascontiguousarray(coords, dtype=np.int64)
    cdef int k = a.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(k, dtype=np.float64)
    cdef u64 root = mix64(env_seed, replica)
    cdef u64 skey = coords_key(<long long*> c.data, c.shape[0])
    dirichlet_site(mix64(root, skey), <double*> a.data, k, <double*> out.data)
    return out


def gamma_variates(u64 seed, shapes):
    """Gamma(shape, 1) draws from one xoshiro stream; parity/benchmark helper."""
    cdef cnp.ndarray[double, ndim=1] sh = np.ascontiguousarray(shapes, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] out = np.empty(sh.shape[0], dtype=np.float64)
    cdef Xo st
    cdef Py_ssize_t i
    xo_seed(&st, seed)
    for i in range(sh.shape[0]):
        out[i] = gamma_sample(&st, sh[i])
    return out


# ---------------------------------------------------------------------------
# 1D walk kernels
# ---------------------------------------------------------------------------

def walk1d_checkpoints(double alpha, double beta, u64 env_seed, u64 step_seed,
                       long replica_lo, long n_replicas, checkpoints):
    """Quenched walks on Z with per-replica lazy Beta(alpha, beta) environments.

    Returns int64 positions of shape (n_replicas, len(checkpoints)); checkpoint
    times must be increasing and at most the final entry, which sets the horizon.
    """
    cdef cnp.ndarray[long long, ndim=1] cps = np.ascontiguousarray(checkpoints, dtype=np.int64)
    cdef long n_cp = cps.shape[0]
    if n_cp == 0:
        raise ValueError("need at least one checkpoint")
    cdef long long n_steps = cps[n_cp - 1]
    cdef cnp.ndarray[long long, ndim=2] out = np.empty((n_replicas, n_cp), dtype=np.int64)
    cdef long long size = 2 * n_steps + 3
    cdef cnp.ndarray[double, ndim=1] omega = np.empty(size, dtype=np.float64)
    cdef cnp.ndarray[int, ndim=1] epoch = np.zeros(size, dtype=np.int32)
    cdef double* om = <double*> omega.data
    cdef int* ep = <int*> epoch.data
    cdef long long off = n_steps + 1
    cdef Xo step_st
    cdef u64 env_root, skey
    cdef long long pos, step, idx
    cdef long r, icp
    cdef int stamp
    cdef long long coord[1]

    with nogil:
        for r in range(n_replicas):
            env_root = mix64(env_seed, <u64> (replica_lo + r))
            xo_seed(&step_st, mix64(step_seed, <u64> (replica_lo + r)))
            stamp = <int> (r + 1)
            pos = 0
            icp = 0
            if cps[0] == 0:
                out[r, 0] = 0
                icp = 1
            for step in range(1, n_steps + 1):
                idx = pos + off
                if ep[idx] != stamp:
                    coord[0] = pos
                    skey = coords_key(coord, 1)
                    om[idx] = beta_from_seed(mix64(env_root, skey), alpha, beta)
                    ep[idx] = stamp
                if u01(&step_st) < om[idx]:
                    pos += 1
                else:
                    pos -= 1
                if icp < n_cp and step == cps[icp]:
                    out[r, icp] = pos
                    icp += 1
    return out


cdef double beta_from_seed(u64 site_seed, double a, double b) noexcept nogil:
    cdef Xo st
    xo_seed(&st, site_seed)
    return beta_sample(&st, a, b)


def walk1d_path(double alpha, double beta, u64 env_seed, u64 step_seed,
                long replica, long long n_steps):
    """Full trajectory of a single 1D replica (int32 positions, length n+1)."""
    cdef cnp.ndarray[int, ndim=1] path = np.empty(n_steps + 1, dtype=np.int32)
    cdef long long size = 2 * n_steps + 3
    cdef cnp.ndarray[double, ndim=1] omega = np.empty(size, dtype=np.float64)
    cdef cnp.ndarray[char, ndim=1] seen = np.zeros(size, dtype=np.int8)
    cdef double* om = <double*> omega.data
    cdef char* sn = <char*> seen.data
    cdef long long off = n_steps + 1
    cdef Xo step_st
    cdef u64 env_root, skey
    cdef long long pos = 0, step, idx
    cdef long long coord[1]

    env_root = mix64(env_seed, <u64> replica)
    xo_seed(&step_st, mix64(step_seed, <u64> replica))
    path[0] = 0
    for step in range(1, n_steps + 1):
        idx = pos + off
        if not sn[idx]:
            coord[0] = pos
            skey = coords_key(coord, 1)
            om[idx] = beta_from_seed(mix64(env_root, skey), alpha, beta)
            sn[idx] = 1
        if u01(&step_st) < om[idx]:
            pos += 1
        else:
            pos -= 1
        path[step] = <int> pos
    return path


# ---------------------------------------------------------------------------
# Lattice walk kernels (d = 2 or 3; d = 1 is walk1d, higher d uses the fallback)
# ---------------------------------------------------------------------------

cdef long long COORD_GUARD = 1048575  # |coordinate| must stay below 2^20 for key packing

cdef inline u64 pack_coords(long long* x, int d) noexcept nogil:
    cdef u64 key = 0
    cdef int i
    for i in range(d):
        key = (key << 21) | (zigzag(x[i]) & 0x1FFFFFULL)
    return key


cdef inline int lookup_site(unordered_map[u64, int]* cache, double[:, ::1] table,
                            int* count, long long* x, int d, int twod,
                            u64 env_root, double* alphas) noexcept nogil:
    """Row of site x in the cumulative-probability table; samples on first visit."""
    cdef u64 pkey = pack_coords(x, d)
    cdef unordered_map[u64, int].iterator it = cache.find(pkey)
    cdef int row, i
    cdef double acc
    if it != cache.end():
        return deref(it).second
    row = count[0]
    dirichlet_site(mix64(env_root, coords_key(x, d)), alphas, twod, &table[row, 0])
    acc = 0.0
    for i in range(twod):
        acc += table[row, i]
        table[row, i] = acc
    table[row, twod - 1] = 1.0
    deref(cache)[pkey] = row
    count[0] += 1
    return row


cdef inline int draw_direction(double[:, ::1] table, int row, int twod, double u) noexcept nogil:
    cdef int i
    for i in range(twod - 1):
        if u < table[row, i]:
            return i
    return twod - 1


def lattice_checkpoints(alphas, u64 env_seed, u64 step_seed,
                        long replica_lo, long n_replicas, checkpoints):
    """Quenched walks on Z^d (d = 2 or 3) with lazy per-site Dirichlet vectors.

    Directions are ordered (e_1..e_d, -e_1..-e_d) to match the weight layout.
    Returns int64 positions of shape (n_replicas, len(checkpoints), d).
    """
    cdef cnp.ndarray[double, ndim=1] a = np.ascontiguousarray(alphas, dtype=np.float64)
    cdef int twod = a.shape[0]
    cdef int d = twod // 2
    if twod % 2 or d < 2 or d > 3:
        raise ValueError("lattice kernel supports d in {2, 3}")
    cdef cnp.ndarray[long long, ndim=1] cps = np.ascontiguousarray(checkpoints, dtype=np.int64)
    cdef long n_cp = cps.shape[0]
    cdef long long n_steps = cps[n_cp - 1]
    cdef cnp.ndarray[long long, ndim=3] out = np.empty((n_replicas, n_cp, d), dtype=np.int64)
    table_np = np.empty((n_steps + 2, twod), dtype=np.float64)
    cdef double[:, ::1] table = table_np
    cdef unordered_map[u64, int] cache
    cdef int count
    cdef Xo step_st
    cdef u64 env_root
    cdef long long x[3]
    cdef long long step
    cdef long r, icp
    cdef int row, direction, i
    cdef bint overflow = False

    with nogil:
        for r in range(n_replicas):
            cache.clear()
            count = 0
            env_root = mix64(env_seed, <u64> (replica_lo + r))
            xo_seed(&step_st, mix64(step_seed, <u64> (replica_lo + r)))
            for i in range(d):
                x[i] = 0
            icp = 0
            if cps[0] == 0:
                for i in range(d):
                    out[r, 0, i] = 0
                icp = 1
            for step in range(1, n_steps + 1):
                row = lookup_site(&cache, table, &count, x, d, twod, env_root, &a[0])
                direction = draw_direction(table, row, twod, u01(&step_st))
                if direction < d:
                    x[direction] += 1
                else:
                    x[direction - d] -= 1
                if x[direction % d] > COORD_GUARD or x[direction % d] < -COORD_GUARD:
                    overflow = True
                    break
                if icp < n_cp and step == cps[icp]:
                    for i in range(d):
                        out[r, icp, i] = x[i]
                    icp += 1
            if overflow:
                break
    if overflow:
        raise OverflowError("walk left the packable coordinate range")
    return out


def lattice_escape_trials(alphas, u64 env_seed, u64 step_seed, double radius,
                          long n_trials, long long max_steps):
    """Annealed trials on Z^2: does |X| reach `radius` before returning to 0?

    Fresh environment per trial.  Returns (hits, returns, timeouts).
    """
    cdef cnp.ndarray[double, ndim=1] a = np.ascontiguousarray(alphas, dtype=np.float64)
    cdef int twod = a.shape[0]
    cdef int d = twod // 2
    if d != 2:
        raise ValueError("escape trials are implemented for d = 2")
    cdef double r2 = radius * radius
    cdef long need = <long> (3.5 * (radius + 2) * (radius + 2)) + 16
    table_np = np.empty((need, twod), dtype=np.float64)
    cdef double[:, ::1] table = table_np
    cdef unordered_map[u64, int] cache
    cdef int count
    cdef Xo step_st
    cdef u64 env_root
    cdef long long x[3]
    cdef long long step
    cdef long trial, hits = 0, rets = 0, touts = 0
    cdef int row, direction

    for trial in range(n_trials):
        cache.clear()
        count = 0
        env_root = mix64(env_seed, <u64> trial)
        xo_seed(&step_st, mix64(step_seed, <u64> trial))
        x[0] = 0
        x[1] = 0
        step = 0
        while True:
            step += 1
            if step > max_steps:
                touts += 1
                break
            row = lookup_site(&cache, table, &count, x, d, twod, env_root, &a[0])
            direction = draw_direction(table, row, twod, u01(&step_st))
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
