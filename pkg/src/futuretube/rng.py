"""Deterministic random streams for seeded experiments.

Every sample of every suite draws from its own small generator derived
from (seed, label, sample index), so draws are independent of evaluation
order and identical configurations reproduce identical values bit for bit.

The generator is PCG-XSH-RR 64/32 with the standard constants:

    multiplier  6364136223846793005
    advance     state' = state * multiplier + increment   (mod 2**64)
    output      rotr32(uint32(((state >> 18) ^ state) >> 27), state >> 59)

Stream keys are derived with splitmix64 (constants 0x9E3779B97F4A7C15,
0xBF58476D1CE4E5B9, 0x94D049BB133111EB) and FNV-1a 64 for label hashing.
Doubles take the top 53 bits of a 64-bit draw; normals use Box-Muller on
consecutive uniform pairs, with the sine mate buffered.
"""

import math

import numpy as np

_MASK64 = (1 << 64) - 1
_MULT = 6364136223846793005

_SM_GAMMA = 0x9E3779B97F4A7C15
_SM_M1 = 0xBF58476D1CE4E5B9
_SM_M2 = 0x94D049BB133111EB


def splitmix64(x):
    x = (x + _SM_GAMMA) & _MASK64
    x = ((x ^ (x >> 30)) * _SM_M1) & _MASK64
    x = ((x ^ (x >> 27)) * _SM_M2) & _MASK64
    return x ^ (x >> 31)


def fnv1a64(data):
    h = 0xCBF29CE484222325
    for b in data:
        h = ((h ^ b) * 0x100000001B3) & _MASK64
    return h


class Stream:
    """One PCG32 stream plus float and normal helpers."""

    def __init__(self, state, inc):
        self._state = state & _MASK64
        self._inc = (inc | 1) & _MASK64
        self._spare = None

    def next_u32(self):
        old = self._state
        self._state = (old * _MULT + self._inc) & _MASK64
        xorshifted = (((old >> 18) ^ old) >> 27) & 0xFFFFFFFF
        rot = old >> 59
        return ((xorshifted >> rot) | (xorshifted << ((32 - rot) & 31))) & 0xFFFFFFFF

    def next_u64(self):
        hi = self.next_u32()
        return ((hi << 32) | self.next_u32()) & _MASK64

    def uniform(self):
        """Uniform double in [0, 1) using 53 bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def normal(self):
        if self._spare is not None:
            z = self._spare
            self._spare = None
            return z
        u1 = self.uniform()
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(1.0 - u1))
        t = 2.0 * math.pi * u2
        self._spare = r * math.sin(t)
        return r * math.cos(t)

    def normals(self, n):
        return np.array([self.normal() for _ in range(n)])

    def complex_normals(self, n):
        """n complex draws, real and imaginary parts each standard normal."""
        a = self.normals(2 * n)
        return a[0::2] + 1j * a[1::2]

    def matrix(self):
        """Random complex 2x2 with standard-normal entry parts."""
        return self.complex_normals(4).reshape(2, 2)


def stream_for(seed, label, index):
    """Derive the stream for sample `index` of the suite named `label`."""
    k = splitmix64((int(seed) & _MASK64) ^ fnv1a64(str(label).encode("utf-8")))
    k = splitmix64(k ^ (int(index) & _MASK64))
    state = splitmix64(k)
    inc = splitmix64(k ^ _SM_GAMMA) | 1
    return Stream(state, inc)
