"""Deterministic random-number plumbing.

Every randomized operation in the package takes an explicit :class:`RngHandle`
identified by a 64-bit base seed and a stream index.  Parallel replicas use
distinct stream indices, so results do not depend on execution order or on the
number of workers.

The compiled walk kernels use a small counter-seeded xoshiro256++ generator so
that lattice sites can be (re)sampled deterministically from their coordinates
alone.  The pure-Python mirror of that generator lives here; it is bit-exact
with the C version and is used by the fallback kernels and by parity tests.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngHandle:
    """Opaque deterministic pseudo-random stream: (seed, stream) -> Generator.

    Identical (seed, stream) pairs reproduce identical sample sequences.
    """

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        return np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=(self.stream,)))
        )

    def substream(self, index: int) -> "RngHandle":
        """Derive a child stream; used to hand one stream per replica."""
        return RngHandle(self.seed, self.stream * 0x10000 + index + 1)

    def state64(self, count: int = 2) -> np.ndarray:
        """Derive `count` independent 64-bit words for kernel seeding."""
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        return ss.generate_state(count, dtype=np.uint64)


def splitmix64(x: int) -> int:
    """One splitmix64 output step; x is the (already advanced) state."""
    x &= _MASK64
    z = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def mix64(a: int, b: int) -> int:
    """Combine two 64-bit words into one, order sensitive."""
    return splitmix64((a ^ splitmix64(b)) & _MASK64)


def site_key(coords: tuple[int, ...]) -> int:
    """Fold signed lattice coordinates into a 64-bit key."""
    key = 0x51ED2701A7B4E2F3
    for c in coords:
        # zigzag-encode so negative coordinates hash distinctly
        z = (c << 1) if c >= 0 else ((-c) << 1) - 1
        key = mix64(key, z & _MASK64)
    return key


class Xoshiro256PP:
    """Pure-Python xoshiro256++, bit-compatible with the compiled kernels."""

    __slots__ = ("s",)

    def __init__(self, seed: int):
        self.s = _seed_state(seed)

    def next64(self) -> int:
        s = self.s
        result = (_rotl(( s[0] + s[3]) & _MASK64, 23) + s[0]) & _MASK64
        t = (s[1] << 17) & _MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def uniform(self) -> float:
        """Uniform in [0, 1) with 53 random bits."""
        return (self.next64() >> 11) * (1.0 / 9007199254740992.0)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


def _seed_state(seed: int) -> list[int]:
    state = []
    x = seed & _MASK64
    for _ in range(4):
        x = (x + 0x9E3779B97F4A7C15) & _MASK64
        z = x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        state.append(z ^ (z >> 31))
    return state
