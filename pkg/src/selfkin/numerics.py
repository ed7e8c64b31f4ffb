"""Dense vector/matrix helpers, activations, and a deterministic seeded RNG.

All model math is float64. The RNG is splitmix64 run in counter mode, which is
portable across languages and trivially vectorizable: the k-th draw (1-indexed)
from seed ``s`` is

    z = (s + k * 0x9E3779B97F4A7C15) mod 2**64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2**64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) mod 2**64
    output_k = z ^ (z >> 31)

Doubles in [0, 1) take the top 53 bits: u = (output >> 11) * 2**-53.
Normals come from Box-Muller pairs, bounded ints from 64-bit rejection
sampling, shuffles from a backward Fisher-Yates pass. Identical seeds give
bit-identical streams.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import SelfKinError

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_U01 = 2.0 ** -53


class Rng:
    """splitmix64 counter-mode generator; single-owner, one stream per task."""

    def __init__(self, seed: int):
        self.seed = seed & _MASK64
        self._count = 0

    def u64(self) -> int:
        self._count += 1
        z = (self.seed + self._count * _GAMMA) & _MASK64
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def u64_array(self, size: int) -> np.ndarray:
        ks = np.arange(self._count + 1, self._count + size + 1, dtype=np.uint64)
        self._count += size
        z = np.uint64(self.seed) + ks * np.uint64(_GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        return z ^ (z >> np.uint64(31))

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        return lo + (hi - lo) * ((self.u64() >> 11) * _U01)

    def uniform_array(self, size: int, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
        u = (self.u64_array(size) >> np.uint64(11)).astype(np.float64) * _U01
        return lo + (hi - lo) * u

    def normal_array(self, size: int, sigma: float = 1.0) -> np.ndarray:
        # Box-Muller on (0,1] pairs; u1 shifted off zero so log() is finite.
        npairs = (size + 1) // 2
        u1 = ((self.u64_array(npairs) >> np.uint64(11)) + np.uint64(1)).astype(np.float64) * _U01
        u2 = (self.u64_array(npairs) >> np.uint64(11)).astype(np.float64) * _U01
        r = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * math.pi * u2
        out = np.empty(2 * npairs)
        out[0::2] = r * np.cos(theta)
        out[1::2] = r * np.sin(theta)
        return sigma * out[:size]

    def randint_below(self, n: int) -> int:
        # Rejection sampling keeps the distribution exactly uniform.
        limit = (2 ** 64 // n) * n
        while True:
            v = self.u64()
            if v < limit:
                return v % n

    def shuffle(self, arr: np.ndarray) -> None:
        for i in range(len(arr) - 1, 0, -1):
            j = self.randint_below(i + 1)
            arr[i], arr[j] = arr[j], arr[i]


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def softmax2(z1: float, z2: float) -> tuple[float, float]:
    """Two-way softmax with max-subtraction for overflow safety."""
    m = z1 if z1 > z2 else z2
    e1 = math.exp(z1 - m)
    e2 = math.exp(z2 - m)
    s = e1 + e2
    return e1 / s, e2 / s


def mean(x: np.ndarray) -> float:
    if len(x) == 0:
        raise SelfKinError("empty-vector", "mean of empty vector")
    return float(np.mean(x))


def matvec(w: np.ndarray, x: np.ndarray) -> np.ndarray:
    if w.ndim != 2 or w.shape[1] != x.shape[0]:
        raise SelfKinError("shape-mismatch", f"matvec {w.shape} x {x.shape}")
    return w @ x


def dot(x: np.ndarray, y: np.ndarray) -> float:
    if x.shape != y.shape:
        raise SelfKinError("shape-mismatch", f"dot {x.shape} vs {y.shape}")
    return float(np.dot(x, y))


def axpy(a: float, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if x.shape != y.shape:
        raise SelfKinError("shape-mismatch", f"axpy {x.shape} vs {y.shape}")
    return a * x + y


def hadamard(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if x.shape != y.shape:
        raise SelfKinError("shape-mismatch", f"hadamard {x.shape} vs {y.shape}")
    return x * y


def l1_norm(x: np.ndarray) -> float:
    return float(np.sum(np.abs(x)))


def l2_norm_sq(x: np.ndarray) -> float:
    return float(np.sum(x * x))
