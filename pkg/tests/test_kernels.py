"""Compiled-extension kernels against the pure-Python reference."""
import math

import numpy as np
import pytest

from rwde import kernels
from rwde import sampling as sp
from rwde.rng import RngHandle, Xoshiro256PP, mix64, site_key

from test_sampling import gamma_cdf_by_quadrature

compiled = pytest.importorskip("rwde._kernels")
fallback = kernels.get_backend("python")


def test_backend_is_compiled():
    assert kernels.BACKEND == "compiled"


def test_site_probs_bit_parity():
    alphas = np.array([1.0, 2.0, 1.0, 0.5])
    for coords in [(0, 0), (17, -3), (-250, 4), (1024, 1024)]:
        a = compiled.site_probs(987, 3, np.asarray(coords), alphas)
        b = fallback.site_probs(987, 3, np.asarray(coords), alphas)
        assert np.array_equal(a, b)
        assert a.sum() == pytest.approx(1.0, abs=1e-12)


def test_gamma_variates_bit_parity():
    shapes = np.concatenate([np.full(50, 0.3), np.full(50, 2.5)])
    assert np.array_equal(compiled.gamma_variates(5, shapes),
                          fallback.gamma_variates(5, shapes))


def test_walk1d_bit_parity():
    cps = np.array([10, 100, 2000])
    a = compiled.walk1d_checkpoints(3.0, 1.0, 11, 22, 0, 5, cps)
    b = fallback.walk1d_checkpoints(3.0, 1.0, 11, 22, 0, 5, cps)
    assert np.array_equal(a, b)
    pa = compiled.walk1d_path(1.5, 1.0, 11, 22, 2, 500)
    pb = fallback.walk1d_path(1.5, 1.0, 11, 22, 2, 500)
    assert np.array_equal(pa, pb)


def test_lattice_bit_parity():
    alphas = np.array([2.0, 1.0, 1.0, 1.0])
    a = compiled.lattice_checkpoints(alphas, 7, 8, 0, 3, np.array([50, 400]))
    b = fallback.lattice_checkpoints(alphas, 7, 8, 0, 3, np.array([50, 400]))
    assert np.array_equal(a, b)
    ea = compiled.lattice_escape_trials(np.ones(4), 1, 2, 6.0, 150, 10 ** 6)
    eb = fallback.lattice_escape_trials(np.ones(4), 1, 2, 6.0, 150, 10 ** 6)
    assert ea == eb


def test_kernel_gamma_sampler_distribution():
    # the hand-rolled rejection sampler against the quadrature CDF oracle
    n = 10 ** 5
    for shape, seed in ((0.3, 101), (2.5, 62)):
        x = compiled.gamma_variates(seed, np.full(n, shape))
        grid = np.concatenate([[0.0], np.geomspace(1e-12, x.max() * 1.01, 600)])
        table = gamma_cdf_by_quadrature(shape)(grid)
        stat = sp.ks_statistic(x, lambda t: np.interp(t, grid, table))
        assert stat < sp.ks_threshold(n)


def test_site_vector_visit_order_independence():
    alphas = np.array([1.0, 1.0, 1.0, 1.0])
    v1 = compiled.site_probs(50, 1, np.array([3, 4]), alphas)
    # walking first does not change the site vector derivation
    compiled.lattice_checkpoints(alphas, 50, 51, 0, 1, np.array([200]))
    v2 = compiled.site_probs(50, 1, np.array([3, 4]), alphas)
    assert np.array_equal(v1, v2)


def test_replica_streams_differ():
    # compare whole trajectories; single endpoints can collide by chance
    a = compiled.walk1d_path(3.0, 1.0, 11, 22, 0, 400)
    b = compiled.walk1d_path(3.0, 1.0, 11, 22, 1, 400)
    assert not np.array_equal(a, b)


def test_replica_offset_consistency():
    cps = np.array([500])
    whole = compiled.walk1d_checkpoints(3.0, 1.0, 9, 10, 0, 6, cps)
    tail = compiled.walk1d_checkpoints(3.0, 1.0, 9, 10, 3, 3, cps)
    assert np.array_equal(whole[3:], tail)


def test_python_xoshiro_reference():
    # the Python generator mirrors the sequence the kernels derive seeds from
    st = Xoshiro256PP(mix64(987, site_key((4, -2))))
    vals = [st.uniform() for _ in range(4)]
    assert all(0.0 <= v < 1.0 for v in vals)
    st2 = Xoshiro256PP(mix64(987, site_key((4, -2))))
    assert vals == [st2.uniform() for _ in range(4)]
    assert Xoshiro256PP(1).uniform() != Xoshiro256PP(2).uniform()


def test_escape_trials_guard_counts():
    hits, rets, touts = compiled.lattice_escape_trials(
        np.ones(4), 3, 4, 40.0, 50, 30)
    assert hits + rets + touts == 50
    assert touts > 0  # 30 steps cannot reach radius 40
