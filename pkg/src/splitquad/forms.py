"""The split quadratic form F0(x, y) = x.y and lattice scaling data.

Vectors are flat arrays of length 2*d1 with the (x, y) split fixed at
index d1.  The gradient of F0 is the coordinate swap (x, y) -> (y, x),
so |grad F0(z)| = |z|; this norm is the density of the surface measure
used by the singular integral.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ArgumentError


@dataclass(frozen=True)
class QuadraticFormF0:
    """The form x.y on R^(2*d1)."""

    d1: int

    def __post_init__(self):
        if self.d1 < 1:
            raise ArgumentError(f"d1 must be a positive integer, got {self.d1}")

    @property
    def d(self) -> int:
        return 2 * self.d1

    def _check(self, z) -> np.ndarray:
        z = np.asarray(z)
        if z.shape[-1] != self.d:
            raise ArgumentError(f"vector length {z.shape[-1]} != d = {self.d}")
        return z

    def eval(self, z) -> float:
        """F0(z) = sum_i x_i * y_i.  Exact for integer input."""
        z = self._check(z)
        x, y = z[..., : self.d1], z[..., self.d1 :]
        vals = (x * y).sum(axis=-1)
        if z.dtype == object or np.issubdtype(z.dtype, np.integer) or z.ndim > 1:
            return vals
        return float(vals)

    def eval_exact(self, z) -> int:
        """Integer-arithmetic path; rejects non-integral entries."""
        z = self._check(np.asarray(z, dtype=object))
        vals = [int(v) for v in z]
        if any(v != w for v, w in zip(vals, z)):
            raise ArgumentError("eval_exact needs integer entries")
        return sum(vals[i] * vals[self.d1 + i] for i in range(self.d1))

    def grad(self, z) -> np.ndarray:
        """grad F0(z) = (y, x)."""
        z = self._check(z)
        return np.concatenate([z[..., self.d1 :], z[..., : self.d1]], axis=-1)


@dataclass(frozen=True)
class LatticeSpec:
    """Lattice period 1/L and quadric level m, with t = m*L^2 integral.

    Floating L cannot certify integrality of m*L^2, so the constructor
    accepts exact rationals (int, Fraction, or float that is exactly
    representable) and rejects any (L, m) pair with non-integer m*L^2.
    """

    L: float
    m: float

    def __post_init__(self):
        if not self.L >= 1:
            raise ArgumentError(f"L must be >= 1, got {self.L}")
        t = Fraction(self.L) ** 2 * Fraction(self.m)
        if t.denominator != 1:
            raise ArgumentError(f"m*L^2 = {t} is not an integer")

    @property
    def t(self) -> int:
        return int(Fraction(self.L) ** 2 * Fraction(self.m))
