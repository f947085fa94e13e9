from __future__ import annotations

import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from latticefock.exact_scalar import ExactScalar, ZERO
from latticefock.greens import (ASYMPTOTIC_CONSTANT, ball_domain, build_domain, circle_points,
                                dirichlet_green, grad_green, harmonic_measure, neumann_green,
                                potential, potential_float, potential_oracle)
from latticefock.grid import GridPoint, LatticeFunction, deebar, dee_bullet

INV_PI = ExactScalar([(-1, 1, 0)])
coords = st.tuples(st.integers(-8, 8), st.integers(-8, 8))


def test_potential_small_values():
    assert potential(0, 0) == ZERO
    assert potential(1, 0) == Fraction(-1, 4)
    assert potential(1, 1) == -INV_PI


@pytest.mark.parametrize("x,y", [(1, 1), (2, 0), (2, 1), (3, 2), (5, 0), (4, 4), (7, 3), (10, 1)])
def test_potential_against_fourier_oracle(x, y):
    assert potential_float(x, y) == pytest.approx(potential_oracle(x, y), abs=1e-10)


def test_potential_far_field():
    # -(1/2pi) log|u| + C
    for x, y in ((60, 0), (40, 30)):
        r = math.hypot(x, y)
        assert potential_float(x, y) == pytest.approx(-math.log(r) / (2 * math.pi) + ASYMPTOTIC_CONSTANT,
                                                      abs=1e-4)


@given(coords)
def test_potential_is_harmonic_off_origin(u):
    x, y = u
    lap = potential(x + 1, y) + potential(x - 1, y) + potential(x, y + 1) + potential(x, y - 1) \
        - potential(x, y) * 4
    assert lap == (-1 if (x, y) == (0, 0) else 0)


@given(coords)
def test_potential_symmetries(u):
    x, y = u
    assert potential(x, y) == potential(-y, x) == potential(x, -y)


@given(coords, coords)
def test_grad_green_symmetry(u, v):
    assert grad_green(u, v) == grad_green(v, u)
    assert grad_green((0, 0), v) == ZERO


def test_grad_green_example():
    assert grad_green((1, 0), (0, 1)) == -INV_PI + Fraction(1, 2)


def test_domain_sizes():
    b1 = ball_domain(1)
    assert b1.interior == [(0, 0)]
    assert len(circle_points(1)) == 4
    assert len(build_domain("square", 8).vertices) == 81
    assert build_domain("disk", 16)._connected(build_domain("disk", 16).interior)
    with pytest.raises(ValueError):
        build_domain("square", 2)


def test_dirichlet_boundary_and_dense_oracle():
    d = ball_domain(2)
    for b in d.boundary:
        assert dirichlet_green(d, (0, 0), b) == 0
    g = dirichlet_green(d, (0, 0), (0, 0))
    assert isinstance(g, Fraction)
    idx = {p: i for i, p in enumerate(d.interior)}
    A = np.zeros((len(idx), len(idx)))
    for p, i in idx.items():
        A[i, i] = 4
        for q in d.adj[p]:
            if q in idx:
                A[i, idx[q]] = -1
    dense = np.linalg.inv(A)
    for p in d.interior:
        for q in d.interior:
            assert float(dirichlet_green(d, p, q)) == pytest.approx(dense[idx[p], idx[q]], abs=1e-12)


def test_dirichlet_symmetry():
    rng = random.Random(3)
    d = build_domain("disk", 12)
    for _ in range(20):
        p, q = rng.choice(d.interior), rng.choice(d.interior)
        assert dirichlet_green(d, p, q) == pytest.approx(dirichlet_green(d, q, p), abs=1e-12)


def test_neumann_properties():
    d = ball_domain(3)
    w = (1, 0)
    col = d.neumann_column(w)
    assert sum(col.values()) == 0
    for p in d.interior:
        assert d.neumann_laplacian(col, p) == (-1 if p == w else 0)
    # differences in the second argument do not depend on the boundary mass
    b = next(iter(sorted(d.boundary)))
    for z in d.vertices:
        u = neumann_green(d, z, (1, 0)) - neumann_green(d, z, (0, 1))
        v = neumann_green(d, z, (1, 0), {b: Fraction(1)}) - neumann_green(d, z, (0, 1), {b: Fraction(1)})
        assert u == v


def test_neumann_float_mode_mass_independence():
    d = build_domain("disk", 10)
    b = sorted(d.boundary)[0]
    z, w1, w2 = (0, 0), (2, 1), (-3, 0)
    u = neumann_green(d, z, w1) - neumann_green(d, z, w2)
    v = neumann_green(d, z, w1, {b: 1.0}) - neumann_green(d, z, w2, {b: 1.0})
    assert u == pytest.approx(v, abs=1e-12)


@pytest.mark.parametrize("r", [1, 2, 3, 5])
def test_harmonic_measures(r):
    circ, interior, H = harmonic_measure(r)
    for v in interior:
        assert sum(H[b][v] for b in circ) == 1
        assert all(H[b][v] >= 0 for b in circ)
    if r == 1:
        assert all(H[b][(0, 0)] == Fraction(1, 4) for b in circ)


def test_current_correlation_is_discrete_holomorphic():
    d = ball_domain(4)
    a, b = (1, 0), (-1, 1)
    ga, gb = d.dirichlet_column(a), d.dirichlet_column(b)
    f = LatticeFunction(lambda p: ExactScalar.gaussian(ga.get((p.qx // 4, p.qy // 4), 0)
                                                       - gb.get((p.qx // 4, p.qy // 4), 0)))
    j = LatticeFunction(lambda m: dee_bullet(f, m))
    for p in d.interior:
        if p in (a, b) or any(q in d.boundary for q in d.adj[p]):
            continue
        assert deebar(j, GridPoint.primal(*p)) == ZERO
        assert deebar(j, GridPoint(4 * p[0] + 2, 4 * p[1] + 2)) == ZERO
