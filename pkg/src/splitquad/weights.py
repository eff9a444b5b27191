"""Weight function families: evaluation, derivatives, decay and norm metadata.

Four closed families are supported (no arbitrary callables):

* ``GaussianIsotropic(a)``      w(z) = exp(-a*pi*|z|^2)
* ``ShiftedGaussian(a, shift)`` the same translated by ``shift``
* ``ProductBump(scale)``        product of 1-d bumps w0(z_i/scale), compact support
* ``AppendixExample``           F(|x|^2) g(|y|^2) with smooth bumps F, g and
                                0 not in supp g

Each family carries a regularity exponent gamma (certified analytically,
not numerically: Gaussians by their explicit Fourier transform, bump
products by repeated integration by parts), a decay radius solver and a
certified over-estimate of the norm

    ||w||_{n1,n2} = sup_z max_{|alpha|<=n1} |d^alpha w(z)| <z>^{n2},

where <z> = max(1, |z|).  Analytic partial derivatives are provided up
to order 2; orders 3-4 fall back to central finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, CapabilityError

_FD_EPS = np.finfo(float).eps ** (1.0 / 3.0)


def bracket(z) -> float:
    """Japanese bracket <z> = max(1, |z|)."""
    return max(1.0, float(np.linalg.norm(z)))


def bump_w0(x):
    """The C0-infinity bump exp(1/(x^2-1)) on (-1, 1), 0 outside."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    xi = x[inside]
    out[inside] = np.exp(1.0 / (xi * xi - 1.0))
    return out if out.ndim else float(out)

def bump_w0_d1(x):
    """First derivative of bump_w0."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    xi = x[inside]
    u = xi * xi - 1.0
    out[inside] = np.exp(1.0 / u) * (-2.0 * xi / (u * u))
    return out if out.ndim else float(out)

def bump_w0_d2(x):
    """Second derivative of bump_w0."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    xi = x[inside]
    u = xi * xi - 1.0
    w = np.exp(1.0 / u)
    out[inside] = w * ((6.0 * xi * xi + 2.0) / u ** 3 + (2.0 * xi / (u * u)) ** 2)
    return out if out.ndim else float(out)


def _grid_sup(f, lo: float, hi: float, n: int = 4001, rounds: int = 6) -> float:
    """Grid supremum with dyadic refinement around the running argmax."""
    best = 0.0
    a, b = lo, hi
    for _ in range(rounds):
        xs = np.linspace(a, b, n)
        vals = np.abs(f(xs))
        k = int(np.argmax(vals))
        best = max(best, float(vals[k]))
        step = (b - a) / (n - 1)
        a, b = max(lo, xs[k] - 2 * step), min(hi, xs[k] + 2 * step)
    return best


class WeightFunction:
    """Base class; subclasses implement the family-specific pieces."""

    dim: int
    gamma: float = 1.0        # regularity exponent of eq-style decay metadata
    is_biradial = False       # w depends on (|x|, |y|) only
    support_radius: float | None = None   # None = unbounded support

    # -- evaluation ---------------------------------------------------------

    def eval(self, z) -> float:
        z = np.asarray(z, dtype=float)
        if z.shape != (self.dim,):
            raise ArgumentError(f"vector length {z.shape} != dim {self.dim}")
        return float(self.eval_array(z[None, :])[0])

    def eval_array(self, Z: np.ndarray) -> np.ndarray:
        """Vectorized evaluation on an (N, dim) array."""
        raise NotImplementedError

    def eval_biradial(self, rx, ry):
        raise CapabilityError(f"{type(self).__name__} is not biradial")

    # -- derivatives --------------------------------------------------------

    def eval_partial(self, z, multi_index) -> float:
        z = np.asarray(z, dtype=float)
        if z.shape != (self.dim,):
            raise ArgumentError(f"vector length {z.shape} != dim {self.dim}")
        alpha = tuple(int(a) for a in multi_index)
        if len(alpha) != self.dim or any(a < 0 for a in alpha):
            raise ArgumentError(f"bad multi-index {multi_index}")
        order = sum(alpha)
        if order == 0:
            return self.eval(z)
        if order <= 2:
            return self._partial_analytic(z, alpha)
        if order <= 4:
            return self.eval_partial_fd(z, alpha)
        raise CapabilityError(f"derivative order {order} > 4 not supported")

    def _partial_analytic(self, z, alpha) -> float:
        raise NotImplementedError

    def eval_partial_fd(self, z, multi_index) -> float:
        """Central-difference path, usable at any order <= 4 (testing oracle)."""
        alpha = tuple(int(a) for a in multi_index)
        i = next(k for k, a in enumerate(alpha) if a > 0)
        rest = tuple(a - 1 if k == i else a for k, a in enumerate(alpha))
        h = _FD_EPS * max(1.0, float(np.linalg.norm(z)))
        zp, zm = np.array(z, dtype=float), np.array(z, dtype=float)
        zp[i] += h
        zm[i] -= h
        if sum(rest) == 0:
            return (self.eval(zp) - self.eval(zm)) / (2 * h)
        return (self.eval_partial_fd(zp, rest) - self.eval_partial_fd(zm, rest)) / (2 * h)

    # -- decay and norms ----------------------------------------------------

    def decay_radius(self, eps: float, n: int = 0) -> float:
        """R with sup_{|z| >= R} |w(z)| |z|^n <= eps."""
        if not eps > 0:
            raise ArgumentError("eps must be positive")
        if self.support_radius is not None:
            return self.support_radius
        return self._decay_radius_unbounded(float(eps), int(n))

    def _decay_radius_unbounded(self, eps: float, n: int) -> float:
        raise NotImplementedError

    def norm_bound(self, n1: int, n2: float) -> float:
        """Certified upper bound for ||w||_{n1,n2}; never below the supremum."""
        if n1 < 0 or n1 > 2:
            raise ArgumentError("norm_bound supports n1 <= 2 only")
        if n2 < 0:
            raise ArgumentError("n2 must be >= 0")
        return self._norm_bound(int(n1), float(n2))

    def _norm_bound(self, n1: int, n2: float) -> float:
        raise NotImplementedError

    def rescaled(self, L: float) -> "WeightFunction":
        """The weight z -> w(z/L) as a member of the same family."""
        raise CapabilityError(f"{type(self).__name__} has no in-family rescaling")

    def spec_string(self) -> str:
        raise NotImplementedError


@dataclass
class GaussianWeight(WeightFunction):
    """exp(-a*pi*|z - shift|^2); isotropic when shift = 0."""

    a: float
    dim: int
    shift: np.ndarray | None = None
    gamma: float = field(default=2.0, init=False)

    def __post_init__(self):
        if not self.a > 0:
            raise ArgumentError("Gaussian scale a must be > 0")
        if self.shift is not None:
            self.shift = np.asarray(self.shift, dtype=float)
            if self.shift.shape != (self.dim,):
                raise ArgumentError("shift length != dim")
            if not np.any(self.shift):
                self.shift = None

    @property
    def is_biradial(self):
        return self.shift is None

    @property
    def _c(self) -> float:
        return 0.0 if self.shift is None else float(np.linalg.norm(self.shift))

    def eval_array(self, Z):
        U = Z if self.shift is None else Z - self.shift
        return np.exp(-self.a * math.pi * np.sum(U * U, axis=-1))

    def eval_biradial(self, rx, ry):
        if self.shift is not None:
            raise CapabilityError("shifted Gaussian is not biradial")
        rx, ry = np.asarray(rx, dtype=float), np.asarray(ry, dtype=float)
        return np.exp(-self.a * math.pi * (rx * rx + ry * ry))

    def _partial_analytic(self, z, alpha):
        u = z if self.shift is None else z - self.shift
        w = float(self.eval_array(np.asarray(z, float)[None, :])[0])
        c = 2.0 * self.a * math.pi
        idx = [k for k, a in enumerate(alpha) for _ in range(a)]
        if len(idx) == 1:
            return -c * u[idx[0]] * w
        i, j = idx
        return (c * c * u[i] * u[j] - (c if i == j else 0.0)) * w

    def _decay_radius_unbounded(self, eps, n):
        a, c = self.a, self._c
        # envelope in u = |z - shift|: e^{-a pi u^2} (u + c)^n, monotone past its peak
        def env(u):
            return math.exp(-a * math.pi * u * u) * (u + c) ** n
        peak = math.sqrt(n / (2 * a * math.pi)) if n else 0.0
        hi = max(peak, 1.0)
        while env(hi) > eps:
            hi *= 2.0
        lo = peak
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if env(mid) > eps:
                lo = mid
            else:
                hi = mid
        return hi + c

    def _norm_bound(self, n1, n2):
        a, c = self.a, self._c
        ap = a * math.pi

        # order 0: exact maximization of e^{-ap u^2} max(1, u+c)^{n2} over u >= 0
        bound = 1.0  # u = 0 gives w = 1 and bracket 1
        if n2 > 0:
            r = (-c + math.sqrt(c * c + 2 * n2 / ap)) / 2.0
            bound = max(bound, math.exp(-ap * r * r) * max(1.0, r + c) ** n2)
        hi = math.sqrt((80.0 + 4.0 * n2) / ap) + c + 5.0
        if n1 >= 1:
            env1 = lambda u: 2 * ap * u * np.exp(-ap * u * u) * np.maximum(1.0, u + c) ** n2
            bound = max(bound, 1.05 * _grid_sup(env1, 0.0, hi))
        if n1 >= 2:
            env2 = lambda u: (2 * ap + (2 * ap * u) ** 2) * np.exp(-ap * u * u) \
                * np.maximum(1.0, u + c) ** n2
            bound = max(bound, 1.05 * _grid_sup(env2, 0.0, hi))
        return bound

    def rescaled(self, L):
        shift = None if self.shift is None else L * self.shift
        return GaussianWeight(self.a / L ** 2, self.dim, shift)

    def spec_string(self):
        if self.shift is None:
            return f"gaussian:a={self.a!r}"
        coords = ",".join(repr(float(s)) for s in self.shift)
        return f"gaussian:a={self.a!r}:shift={coords}"


@dataclass
class ProductBump(WeightFunction):
    """Product of 1-d bumps: w(z) = prod_i w0(z_i / scale); support |z_i| < scale."""

    scale: float
    dim: int

    def __post_init__(self):
        if not self.scale > 0:
            raise ArgumentError("scale must be > 0")
        self.support_radius = self.scale * math.sqrt(self.dim)

    def eval_array(self, Z):
        return np.prod(bump_w0(np.asarray(Z, float) / self.scale), axis=-1)

    def _partial_analytic(self, z, alpha):
        s = self.scale
        out = 1.0
        for k, a in enumerate(alpha):
            f = (bump_w0, bump_w0_d1, bump_w0_d2)[a]
            out *= f(z[k] / s) / s ** a
        return float(out)

    def _norm_bound(self, n1, n2):
        s = self.scale
        A = [_grid_sup(f, -1.0, 1.0) / s ** k
             for k, f in enumerate((bump_w0, bump_w0_d1, bump_w0_d2))]
        br = max(1.0, self.support_radius) ** n2
        best = A[0] ** self.dim
        if n1 >= 1:
            best = max(best, A[1] * A[0] ** (self.dim - 1))
        if n1 >= 2:
            best = max(best, A[2] * A[0] ** (self.dim - 1),
                       A[1] ** 2 * A[0] ** (self.dim - 2))
        return 1.05 * best * br

    def rescaled(self, L):
        return ProductBump(self.scale * L, self.dim)

    def spec_string(self):
        return f"bump:scale={self.scale!r}"


def _F_profile(s):
    """Radial-x profile: smooth bump in s = |x|^2, supported on (-1/2, 1/2)."""
    return bump_w0(2.0 * np.asarray(s, float))

def _F_d1(s):
    return 2.0 * bump_w0_d1(2.0 * np.asarray(s, float))

def _F_d2(s):
    return 4.0 * bump_w0_d2(2.0 * np.asarray(s, float))

def _g_profile(s):
    """Radial-y profile in s = |y|^2, supported on (1/4, 1/2): 0 not in supp g."""
    return bump_w0(8.0 * np.asarray(s, float) - 3.0)

def _g_d1(s):
    return 8.0 * bump_w0_d1(8.0 * np.asarray(s, float) - 3.0)

def _g_d2(s):
    return 64.0 * bump_w0_d2(8.0 * np.asarray(s, float) - 3.0)


@dataclass
class AppendixExample(WeightFunction):
    """F(|x|^2) g(|y|^2) with F, g smooth bumps supported in [-1/2, 1/2].

    The default profile keeps 0 out of supp g; the fiber integral of g'
    then telescopes to -pi g(0) = 0 at the apex and the level-set
    integral I(t) stays smooth through t = 0.  The ``generic`` variant
    takes g = F (so g(0) > 0), the cancellation is lost, and the
    (d1-1)-st derivative of I picks up a log(1/|t|) singularity at 0.
    """

    dim: int
    generic: bool = False
    is_biradial = True
    G_SUPPORT_LOWER = 0.25   # default g(s) = 0 for s <= 1/4

    def __post_init__(self):
        if self.dim % 2:
            raise ArgumentError("dim must be even")
        self.support_radius = 1.0
        self._g = (_F_profile, _F_d1, _F_d2) if self.generic \
            else (_g_profile, _g_d1, _g_d2)

    @property
    def d1(self):
        return self.dim // 2

    def eval_array(self, Z):
        Z = np.asarray(Z, float)
        x, y = Z[..., : self.d1], Z[..., self.d1 :]
        return _F_profile(np.sum(x * x, axis=-1)) * self._g[0](np.sum(y * y, axis=-1))

    def eval_biradial(self, rx, ry):
        rx, ry = np.asarray(rx, float), np.asarray(ry, float)
        return _F_profile(rx * rx) * self._g[0](ry * ry)

    def _partial_analytic(self, z, alpha):
        d1 = self.d1
        x, y = z[:d1], z[d1:]
        sx, sy = float(x @ x), float(y @ y)
        F, F1, F2 = _F_profile(sx), _F_d1(sx), _F_d2(sx)
        g, g1, g2 = (f(sy) for f in self._g)
        idx = [k for k, a in enumerate(alpha) for _ in range(a)]
        def d_one(k):
            if k < d1:
                return F1 * 2 * x[k] * g
            return F * g1 * 2 * y[k - d1]
        if len(idx) == 1:
            return float(d_one(idx[0]))
        i, j = idx
        if i < d1 and j < d1:
            val = (F2 * 4 * x[i] * x[j] + (2 * F1 if i == j else 0.0)) * g
        elif i >= d1 and j >= d1:
            val = F * (g2 * 4 * y[i - d1] * y[j - d1] + (2 * g1 if i == j else 0.0))
        else:
            xi = x[min(i, j)]
            yj = y[max(i, j) - d1]
            val = F1 * 2 * xi * g1 * 2 * yj
        return float(val)

    def _norm_bound(self, n1, n2):
        supF = [_grid_sup(f, -0.6, 0.6) for f in (_F_profile, _F_d1, _F_d2)]
        supg = [_grid_sup(f, 0.0, 0.6) for f in self._g]
        r = math.sqrt(0.5)   # |x|, |y| <= sqrt(1/2) on the support; <z> = 1
        best = supF[0] * supg[0]
        if n1 >= 1:
            best = max(best, 2 * r * supF[1] * supg[0], 2 * r * supF[0] * supg[1])
        if n1 >= 2:
            best = max(best,
                       (4 * r * r * supF[2] + 2 * supF[1]) * supg[0],
                       supF[0] * (4 * r * r * supg[2] + 2 * supg[1]),
                       4 * r * r * supF[1] * supg[1])
        return 1.05 * best

    def spec_string(self):
        return "appendix-example:variant=generic" if self.generic else "appendix-example"


def parse_weight(spec: str, dim: int) -> WeightFunction:
    """Parse the CLI weight grammar.

    ``gaussian:a=<float>``, ``gaussian:a=<float>:shift=<v1,...,vd>``,
    ``bump:scale=<float>``, ``appendix-example[:variant=paper|generic]``.
    """
    parts = spec.strip().split(":")
    head = parts[0]
    kv = {}
    for p in parts[1:]:
        if "=" not in p:
            raise ArgumentError(f"bad weight spec fragment {p!r}")
        k, v = p.split("=", 1)
        kv[k] = v
    try:
        if head == "gaussian":
            a = float(kv.pop("a"))
            shift = None
            if "shift" in kv:
                shift = np.array([float(s) for s in kv.pop("shift").split(",")])
            if kv:
                raise ArgumentError(f"unknown keys {sorted(kv)} in weight spec")
            return GaussianWeight(a, dim, shift)
        if head == "bump":
            scale = float(kv.pop("scale"))
            if kv:
                raise ArgumentError(f"unknown keys {sorted(kv)} in weight spec")
            return ProductBump(scale, dim)
        if head == "appendix-example":
            variant = kv.pop("variant", "paper")
            if kv:
                raise ArgumentError(f"unknown keys {sorted(kv)} in weight spec")
            if variant not in ("paper", "generic"):
                raise ArgumentError(f"unknown appendix-example variant {variant!r}")
            return AppendixExample(dim, generic=(variant == "generic"))
    except KeyError as e:
        raise ArgumentError(f"weight spec {spec!r} missing key {e}") from None
    raise ArgumentError(f"unknown weight family {head!r}")
