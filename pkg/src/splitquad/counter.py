"""Exact enumeration of the weighted lattice count N_L(w; F0, m).

N_L sums w(z) over z in the scaled lattice (1/L) Z^d lying on the
quadric x.y = m.  The hot loop works in integer coordinates u = L z,
where the constraint reads u_x . u_y = t with t = m L^2 (an integer by
the LatticeSpec contract).  For each admissible u_x the solution set in
u_y is a coset of the rank-(d1-1) hyperplane lattice {y : u_x . y = 0},
produced by unimodular column reduction of u_x and enumerated inside
the truncation ball through the Gram-inverse bounding box of the coset.

Truncation: all |u| <= R L with R = decay_radius(w, eps', d-2); the
reported tail_estimate combines the empirical |value(R) - value(0.8 R)|
difference with the analytic envelope sup |w| |z|^{d-2} <= eps'.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from math import fsum, gcd

import numpy as np

from .errors import ArgumentError, CapabilityError
from .forms import LatticeSpec
from .weights import WeightFunction

DEFAULT_BUDGET = 5 * 10 ** 8


@dataclass
class CountResult:
    value: float
    lattice_points_visited: int
    truncation_radius: float        # in z-units
    tail_estimate: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ArgumentError("count value must be finite")
        if self.tail_estimate < 0:
            raise ArgumentError("tail_estimate must be >= 0")


@dataclass
class HyperplaneLatticeSolution:
    """Integer solutions of x . y = t: particular + Z-span of basis."""

    particular: np.ndarray
    basis: list

    def __post_init__(self):
        self.particular = np.asarray(self.particular, dtype=np.int64)
        self.basis = [np.asarray(b, dtype=np.int64) for b in self.basis]


def _column_reduce(x: np.ndarray):
    """Unimodular U with x @ U = (g, 0, ..., 0), g = gcd(x) > 0."""
    d = len(x)
    U = np.eye(d, dtype=object)
    v = [int(c) for c in x]
    for i in range(1, d):
        if v[i] == 0:
            continue
        g, a, b = _extgcd(v[0], v[i])
        q0, qi = v[0] // g, v[i] // g
        c0 = a * U[:, 0] + b * U[:, i]
        ci = -qi * U[:, 0] + q0 * U[:, i]
        U[:, 0], U[:, i] = c0, ci
        v[0], v[i] = g, 0
    if v[0] < 0:
        U[:, 0] = -U[:, 0]
        v[0] = -v[0]
    return U, v[0]


def _extgcd(a: int, b: int):
    """(g, s, t) with s a + t b = g = gcd(a, b) >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _reduce_basis(basis: np.ndarray) -> np.ndarray:
    """Pairwise Lagrange-style length reduction (no full LLL machinery)."""
    B = basis.astype(np.int64).copy()
    k = len(B)
    for _ in range(8):
        changed = False
        order = np.argsort([int(b @ b) for b in B])
        B = B[order]
        for i in range(k):
            for j in range(k):
                if i == j or not B[j] @ B[j]:
                    continue
                q = int(round(int(B[i] @ B[j]) / int(B[j] @ B[j])))
                if q:
                    B[i] -= q * B[j]
                    changed = True
        if not changed:
            break
    return B


def solve_hyperplane_lattice(x, t: int) -> HyperplaneLatticeSolution | None:
    """Solve x . y = t over Z^{d1}; None when gcd(x) does not divide t."""
    x = np.asarray(x, dtype=np.int64)
    if x.ndim != 1 or not np.any(x):
        raise ArgumentError("x must be a nonzero integer vector")
    t = int(t)
    U, g = _column_reduce(x)
    if t % g:
        return None
    particular = np.array([int(c) * (t // g) for c in U[:, 0]], dtype=np.int64)
    if len(x) == 1:
        return HyperplaneLatticeSolution(particular, [])
    kernel = U[:, 1:].T.astype(np.int64)
    return HyperplaneLatticeSolution(particular, list(_reduce_basis(kernel)))


def _ball_points(d: int, radius: float) -> np.ndarray:
    """All integer vectors of length d with |v| <= radius, lexicographic."""
    n = int(math.floor(radius))
    axes = [np.arange(-n, n + 1)] * d
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    return grid[np.sum(grid * grid, axis=1) <= radius * radius]


def _fiber_points(sol: HyperplaneLatticeSolution, rho: float) -> np.ndarray:
    """Coset points y = particular + B n with |y| <= rho."""
    p = sol.particular.astype(float)
    if not sol.basis:
        y = sol.particular[None, :]
        return y if p @ p <= rho * rho else y[:0]
    B = np.stack(sol.basis).astype(float)          # (k, d1) rows
    G = B @ B.T
    Ginv = np.linalg.inv(G)
    center = -Ginv @ (B @ p)
    half = rho * np.sqrt(np.diag(Ginv))
    ranges = [np.arange(math.ceil(c - h), math.floor(c + h) + 1)
              for c, h in zip(center, half)]
    if any(len(r) == 0 for r in ranges):
        return sol.particular[None, :][:0]
    N = np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1).reshape(-1, len(B))
    Y = sol.particular[None, :] + N.astype(np.int64) @ np.stack(sol.basis)
    return Y[np.sum(Y * Y, axis=1) <= rho * rho]


def enumerate_N_L(w: WeightFunction, spec: LatticeSpec, eps: float,
                  budget: int = DEFAULT_BUDGET) -> CountResult:
    """Sum w(u/L) over integer solutions of u_x . u_y = t in the ball |u| <= R L."""
    if not eps > 0:
        raise ArgumentError("eps must be positive")
    d = w.dim
    d1 = d // 2
    L, t = float(spec.L), spec.t
    eps_prime = eps / max(1.0, L ** (d - 2))
    R = w.decay_radius(eps_prime, d - 2)
    Ru = R * L
    Ru_inner = 0.8 * Ru

    visited = 0
    totals, totals_inner = [], []

    def check_budget(extra: int):
        nonlocal visited
        visited += extra
        if visited > budget:
            frac = max(1e-9, (budget / visited))
            l_max = max(1, int(L * frac ** (1.0 / (d - 2))))
            raise CapabilityError(
                f"visit budget {budget} exceeded; largest feasible L about {l_max}")

    # u_x = 0 stratum: present exactly when t = 0, contributing w(0, u_y/L)
    if t == 0:
        Y0 = _ball_points(d1, Ru)
        check_budget(len(Y0))
        Z = np.concatenate([np.zeros_like(Y0), Y0], axis=1) / L
        vals = w.eval_array(Z)
        totals.append(float(np.sum(vals)))
        inner = np.sum(Y0 * Y0, axis=1) <= Ru_inner ** 2
        totals_inner.append(float(np.sum(vals[inner])))

    for ux in _ball_points(d1, Ru):
        if not np.any(ux):
            continue
        g = 0
        for c in ux:
            g = gcd(g, int(c))
        if t % g:
            continue
        sx = int(ux @ ux)
        rho2 = Ru * Ru - sx
        if rho2 < 0:
            continue
        sol = solve_hyperplane_lattice(ux, t)
        Y = _fiber_points(sol, math.sqrt(rho2))
        if not len(Y):
            continue
        check_budget(len(Y))
        Z = np.concatenate([np.broadcast_to(ux, Y.shape), Y], axis=1) / L
        vals = w.eval_array(Z)
        totals.append(float(np.sum(vals)))
        inner2 = Ru_inner ** 2 - sx
        if inner2 >= 0:
            mask = np.sum(Y * Y, axis=1) <= inner2
            totals_inner.append(float(np.sum(vals[mask])))

    value = fsum(totals)
    tail = abs(value - fsum(totals_inner)) + eps_prime * max(1, visited)
    return CountResult(value, visited, R, tail)


def brute_force_N_L(w: WeightFunction, spec: LatticeSpec, box_radius: int) -> float:
    """Literal scan over the |u|_inf <= box_radius box (test oracle)."""
    d1 = w.dim // 2
    B = int(box_radius)
    side = 2 * B + 1
    if side ** d1 * side ** d1 > 10 ** 9:
        raise CapabilityError("brute-force box too large")
    t, L = spec.t, float(spec.L)
    axes = [np.arange(-B, B + 1)] * d1
    Ygrid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d1)
    totals = []
    for ux in product(range(-B, B + 1), repeat=d1):
        ux = np.array(ux, dtype=np.int64)
        mask = Ygrid @ ux == t
        if not np.any(mask):
            continue
        Y = Ygrid[mask]
        Z = np.concatenate([np.broadcast_to(ux, Y.shape), Y], axis=1) / L
        totals.append(float(np.sum(w.eval_array(Z))))
    return fsum(totals)
