import math
from itertools import product

import numpy as np
import pytest

from splitquad import counter as ct
from splitquad.errors import ArgumentError, CapabilityError
from splitquad.exp_sums import remark5_sigma_p
from splitquad.forms import LatticeSpec
from splitquad.weights import GaussianWeight, ProductBump

RNG = np.random.default_rng(7)


def test_solve_axis_vector():
    sol = ct.solve_hyperplane_lattice([2, 0, 0], 4)
    assert int(np.dot(sol.particular, [2, 0, 0])) == 4
    assert len(sol.basis) == 2
    for b in sol.basis:
        assert int(np.dot(b, [2, 0, 0])) == 0


def test_solve_obstruction():
    assert ct.solve_hyperplane_lattice([2, 0, 0], 3) is None
    assert ct.solve_hyperplane_lattice([6, 10], 7) is None
    assert ct.solve_hyperplane_lattice([6, 10], 8) is not None


def test_solve_argument_checks():
    with pytest.raises(ArgumentError):
        ct.solve_hyperplane_lattice([0, 0, 0], 1)


def test_solve_random_vectors():
    for _ in range(50):
        x = RNG.integers(-9, 10, size=3)
        if not np.any(x):
            continue
        t = int(RNG.integers(-20, 21))
        sol = ct.solve_hyperplane_lattice(x, t)
        g = math.gcd(math.gcd(int(x[0]), int(x[1])), int(x[2]))
        if t % g:
            assert sol is None
            continue
        assert int(np.dot(sol.particular, x)) == t
        for b in sol.basis:
            assert int(np.dot(b, x)) == 0


def test_solution_covers_all_points_in_box():
    # every integer solution of x . y = t in a box must lie in the coset
    x = np.array([1, 2, 2])
    t = 3
    sol = ct.solve_hyperplane_lattice(x, t)
    B = np.stack(sol.basis)
    Binv = np.linalg.pinv(B.astype(float))
    found = 0
    for y in product(range(-6, 7), repeat=3):
        y = np.array(y)
        if int(y @ x) != t:
            continue
        found += 1
        coeffs = (y - sol.particular).astype(float) @ Binv
        rounded = np.round(coeffs).astype(np.int64)
        assert np.array_equal(sol.particular + rounded @ B, y)
    assert found > 50


def test_kernel_covolume():
    # covolume of the kernel lattice of x . y = 0 is |x| / gcd(x)
    x = np.array([3, -5, 7])
    sol = ct.solve_hyperplane_lattice(x, 0)
    B = np.stack(sol.basis).astype(float)
    assert np.linalg.det(B @ B.T) == pytest.approx(float(x @ x), rel=1e-12)
    x2 = np.array([2, 4, 6])
    B2 = np.stack(ct.solve_hyperplane_lattice(x2, 0).basis).astype(float)
    assert np.linalg.det(B2 @ B2.T) == pytest.approx(float(x2 @ x2) / 4, rel=1e-12)


def test_theta_value_unit_lattice():
    # N_1 for the isotropic Gaussian at m = 0 against a literal grid sum;
    # terms beyond |z|_inf = 3 are below exp(-16 pi) and cannot matter
    w = GaussianWeight(1.0, 6)
    res = ct.enumerate_N_L(w, LatticeSpec(L=1, m=0), eps=1e-9)
    ax = np.arange(-3, 4)
    X = np.stack(np.meshgrid(ax, ax, ax, indexing="ij"), axis=-1).reshape(-1, 3)
    ex = np.exp(-math.pi * np.sum(X * X, axis=1))
    match = (X @ X.T) == 0
    oracle = float(ex @ match @ ex)
    assert res.value == pytest.approx(oracle, abs=1e-6)
    assert res.tail_estimate < 1e-4


def test_theta_value_d1_one():
    # d1 = 1: solutions of x * y = 0 in Z^2 are the two axes, so the count
    # is 2 * Theta - 1 with Theta = sum exp(-pi n^2)
    w = GaussianWeight(1.0, 2)
    res = ct.enumerate_N_L(w, LatticeSpec(L=1, m=0), eps=1e-9)
    theta = sum(math.exp(-math.pi * n * n) for n in range(-8, 9))
    assert res.value == pytest.approx(2 * theta - 1, abs=1e-6)
    assert res.value == pytest.approx(1.1728697, abs=1e-6)


def test_enumerate_matches_brute_force():
    cases = [
        (GaussianWeight(1.0, 6), LatticeSpec(L=2, m=0)),
        (GaussianWeight(1.0, 6), LatticeSpec(L=2, m=1)),
        (ProductBump(1.0, 4), LatticeSpec(L=3, m=0)),
    ]
    for w, spec in cases:
        res = ct.enumerate_N_L(w, spec, eps=1e-10)
        box = int(math.ceil(res.truncation_radius * spec.L)) + 1
        ref = ct.brute_force_N_L(w, spec, box)
        assert res.value == pytest.approx(ref, abs=1e-8 + res.tail_estimate)


def test_scaling_identity():
    # summing w(u/L) over u_x . u_y = m L^2 equals the unit-lattice count of
    # the rescaled weight at the integer level m L^2
    w = GaussianWeight(1.0, 6)
    a = ct.enumerate_N_L(w, LatticeSpec(L=2, m=1), eps=1e-10)
    b = ct.enumerate_N_L(w.rescaled(2.0), LatticeSpec(L=1, m=4), eps=1e-10)
    assert a.value == pytest.approx(b.value,
                                    abs=a.tail_estimate + b.tail_estimate + 1e-12)


def test_determinism():
    w = GaussianWeight(1.0, 6)
    r1 = ct.enumerate_N_L(w, LatticeSpec(L=2, m=0), eps=1e-8)
    r2 = ct.enumerate_N_L(w, LatticeSpec(L=2, m=0), eps=1e-8)
    assert r1.value == r2.value
    assert r1.lattice_points_visited == r2.lattice_points_visited
    assert r1.tail_estimate == r2.tail_estimate


def test_tail_shrinks_with_eps():
    w = GaussianWeight(1.0, 6)
    loose = ct.enumerate_N_L(w, LatticeSpec(L=2, m=0), eps=1e-4)
    tight = ct.enumerate_N_L(w, LatticeSpec(L=2, m=0), eps=1e-10)
    assert tight.truncation_radius >= loose.truncation_radius
    assert abs(tight.value - loose.value) <= loose.tail_estimate + 1e-12


def test_budget_capability():
    w = GaussianWeight(1.0, 6)
    with pytest.raises(CapabilityError) as exc:
        ct.enumerate_N_L(w, LatticeSpec(L=8, m=0), eps=1e-10, budget=10 ** 4)
    assert "feasible L" in str(exc.value)


def test_eps_argument_check():
    w = GaussianWeight(1.0, 6)
    with pytest.raises(ArgumentError):
        ct.enumerate_N_L(w, LatticeSpec(L=2, m=0), eps=0.0)


@pytest.mark.parametrize("p,d1", [(2, 2), (3, 2), (2, 3), (3, 3)])
def test_residue_count_matches_density_product(p, d1):
    # |{z mod p : x . y = 0 mod p}| = p^(2 d1 - 1) * sigma_p closed form
    count = 0
    for z in product(range(p), repeat=2 * d1):
        if sum(z[i] * z[d1 + i] for i in range(d1)) % p == 0:
            count += 1
    expected = p ** (2 * d1 - 1) * remark5_sigma_p(p, d1)
    assert count == expected
