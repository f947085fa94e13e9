from __future__ import annotations

import cmath
import math
import random
from fractions import Fraction

import pytest

from latticefock import cft
from latticefock.fock_algebra import ANTI, HOLO, creation_word

DISK = cft.domain("disk")
J = creation_word([1])
JB = creation_word([], [1])
T = creation_word([1, 1]) * Fraction(1, 2)


def _wirtinger(f, z, conj=False, h=1e-4):
    dx = (f(z + h) - f(z - h)) / (2 * h)
    dy = (f(z + 1j * h) - f(z - 1j * h)) / (2 * h)
    return 0.5 * (dx + 1j * dy) if conj else 0.5 * (dx - 1j * dy)


def _mixed(dom, bc, z, w, cz=False, cw=False):
    g = lambda a, b: cft.green(dom, bc, a, b)
    return _wirtinger(lambda a: _wirtinger(lambda b: g(a, b), w, cw), z, cz)


# ---- Green's functions --------------------------------------------------------

def test_dirichlet_vanishes_at_boundary():
    w = 0.2 - 0.1j
    for t in (0.0, 1.0, 2.5, 4.0):
        z = (1 - 1e-6) * cmath.exp(1j * t)
        assert abs(cft.green(DISK, "D", z, w)) < 1e-6


def test_green_symmetry():
    rng = random.Random(2)
    for name in ("disk", "half_plane", "square"):
        dom = cft.domain(name)
        for _ in range(5):
            if name == "disk":
                z, w = (cmath.rect(rng.uniform(0, 0.9), rng.uniform(0, 6)) for _ in range(2))
            elif name == "half_plane":
                z, w = (complex(rng.uniform(-2, 2), rng.uniform(0.1, 2)) for _ in range(2))
            else:
                z, w = (complex(rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)) for _ in range(2))
            for bc in ("D", "N"):
                assert cft.green(dom, bc, z, w) == pytest.approx(cft.green(dom, bc, w, z), abs=1e-13)


def test_neumann_minus_dirichlet():
    z, w = 0.3 + 0.2j, -0.5 + 0.1j
    diff = cft.green(DISK, "N", z, w) - cft.green(DISK, "D", z, w)
    assert diff == pytest.approx(-math.log(abs(1 - z * w.conjugate())) / math.pi, abs=1e-14)


def test_square_map_boundary_behaviour():
    sq = cft.domain("square")
    assert abs(sq.to_disk(0.5 + 0.5j)[0]) < 1e-12
    for z in (0.5 + 1e-7j, 1e-7 + 0.3j, 0.999999 + 0.7j):
        assert abs(sq.to_disk(z)[0]) == pytest.approx(1.0, abs=1e-5)
    z = 0.3 + 0.6j
    h = 1e-6
    num = (sq.to_disk(z + h)[0] - sq.to_disk(z - h)[0]) / (2 * h)
    assert sq.to_disk(z)[1] == pytest.approx(num, rel=1e-6)


# ---- current kernels ----------------------------------------------------------

def test_disk_current_example():
    assert cft.current_two_point(DISK, "D", "JJ", 0.3, -0.4) == pytest.approx(1 / 0.49, rel=1e-14)
    for z, w in ((0.3, -0.4), (0.1 + 0.5j, -0.2 - 0.3j)):
        d = cft.current_two_point(DISK, "D", "JJb", z, w)
        n = cft.current_two_point(DISK, "N", "JJb", z, w)
        assert abs(d + n) < 1e-14
        assert abs(cft.current_two_point(DISK, "D", "JJ", z, w)
                   - cft.current_two_point(DISK, "N", "JJ", z, w)) < 1e-12


@pytest.mark.parametrize("name,z,w", [
    ("disk", 0.3, -0.4), ("disk", 0.2 + 0.4j, -0.1 - 0.5j),
    ("half_plane", 0.3 + 0.8j, -0.5 + 1.5j), ("square", 0.3 + 0.4j, 0.7 + 0.6j),
])
@pytest.mark.parametrize("bc", ["D", "N"])
def test_kernels_against_green_derivatives(name, z, w, bc):
    dom = cft.domain(name)
    jj = -4 * math.pi * _mixed(dom, bc, z, w)
    jjb = 4 * math.pi * _mixed(dom, bc, z, w, cw=True)
    jbjb = -4 * math.pi * _mixed(dom, bc, z, w, cz=True, cw=True)
    assert cft.current_two_point(dom, bc, "JJ", z, w) == pytest.approx(jj, rel=1e-5, abs=1e-6)
    assert cft.current_two_point(dom, bc, "JJb", z, w) == pytest.approx(jjb, rel=1e-5, abs=1e-6)
    assert cft.current_two_point(dom, bc, "JbJb", z, w) == pytest.approx(jbjb, rel=1e-5, abs=1e-6)


def test_pairings_count():
    assert len(cft.pairings(range(4))) == 3
    assert len(cft.pairings(range(6))) == 15
    assert cft.pairings(range(3)) == []


def test_current_kernel_reductions():
    z, w = 0.2 + 0.1j, -0.3 + 0.2j
    assert cft.current_kernel(DISK, "D", [z, w], []) == pytest.approx(
        cft.current_two_point(DISK, "D", "JJ", z, w))
    assert cft.current_kernel(DISK, "N", [z], [w]) == pytest.approx(
        cft.current_two_point(DISK, "N", "JJb", z, w))
    assert cft.current_kernel(DISK, "D", [z], []) == 0


def test_four_current_kernel_explicit_pairings():
    dom = cft.domain("half_plane")
    a, b, c, d = 0.2 + 1j, -0.4 + 0.6j, 1.0 + 1.3j, 0.1 + 2.0j
    k = lambda kind, x, y: cft.current_two_point(dom, "N", kind, x, y)
    # J(a) J(b) Jbar(c) Jbar(d)
    want = (k("JJ", a, b) * k("JbJb", c, d) + k("JJb", a, c) * k("JJb", b, d)
            + k("JJb", a, d) * k("JJb", b, c))
    assert cft.current_kernel(dom, "N", [a, b], [c, d]) == pytest.approx(want, rel=1e-13)


# ---- quadrature -----------------------------------------------------------------

def test_identity_field():
    one = creation_word()
    assert cft.cft_correlation(DISK, "D", [(one, 0.1)]) == pytest.approx(1.0)
    with_id = cft.cft_correlation(DISK, "D", [(J, 0.3), (one, 0.0), (J, -0.4)])
    alone = cft.cft_correlation(DISK, "D", [(J, 0.3), (J, -0.4)])
    assert with_id == pytest.approx(alone, rel=1e-10)


@pytest.mark.parametrize("bc", ["D", "N"])
def test_current_two_point(bc):
    z, w = 0.3 + 0.1j, -0.4
    got = cft.cft_correlation(DISK, bc, [(J, z), (J, w)])
    assert abs(got - cft.current_two_point(DISK, bc, "JJ", z, w)) <= 1e-9
    got = cft.cft_correlation(DISK, bc, [(J, z), (JB, w)])
    assert abs(got - cft.current_two_point(DISK, bc, "JJb", z, w)) <= 1e-9


def test_stress_tensor_two_point():
    z, w = 0.3, -0.4
    got = cft.cft_correlation(DISK, "D", [(T, z), (T, w)])
    assert abs(got - 0.5 * (z - w) ** -4) <= 1e-8


def test_quadratic_primary_two_point_is_wick():
    z, w = 0.3, -0.4
    v = creation_word([1], [1])
    got = cft.cft_correlation(DISK, "D", [(v, z), (v, w)])
    k = lambda kind, a, b: cft.current_two_point(DISK, "D", kind, a, b)
    want = (k("JJ", z, w) * k("JbJb", z, w) + k("JJb", z, w) * k("JJb", w, z).conjugate()
            + k("JJb", z, z) * k("JJb", w, w))
    assert abs(got - want) <= 1e-9


CASES = [
    ("D", [(creation_word([1], [1]), 0.3), (creation_word([1], [1]), -0.4)]),
    ("N", [(creation_word([2]), 0.1 + 0.2j), (creation_word([1, 1]), -0.3), (J, 0.4 - 0.2j)]),
    ("D", [(J, 0.2), (J, -0.1 + 0.3j), (JB, -0.3 - 0.2j), (JB, 0.5j)]),
]


@pytest.mark.parametrize("bc,ins", CASES)
def test_quadrature_stability(bc, ins):
    a = cft.cft_correlation(DISK, bc, ins, M=64)
    b = cft.cft_correlation(DISK, bc, ins, M=128)
    assert abs(a - b) <= 1e-10


@pytest.mark.parametrize("bc,ins", CASES)
def test_radius_schedule_independence(bc, ins):
    a = cft.cft_correlation(DISK, bc, ins)
    b = cft.cft_correlation(DISK, bc, ins, radii=(0.5, 0.9))
    c = cft.cft_correlation(DISK, bc, ins, R=0.05, radii=(0.3, 1.0))
    assert abs(a - b) <= 1e-10 and abs(a - c) <= 1e-10


@pytest.mark.parametrize("bc,ins", CASES)
def test_permutation_symmetry(bc, ins):
    a = cft.cft_correlation(DISK, bc, ins)
    b = cft.cft_correlation(DISK, bc, ins[::-1])
    assert abs(a - b) <= 1e-10


def test_bruteforce_agrees_with_factorized_quadrature():
    ins = [(creation_word([1], [1]), 0.3), (creation_word([1, 1]), -0.4 + 0.1j)]
    for M in (6, 10):
        a = cft.cft_correlation(DISK, "N", ins, M=M)
        b = cft.cft_correlation_bruteforce(DISK, "N", ins, M=M)
        assert abs(a - b) <= 1e-12 * max(1.0, abs(a))


def test_four_current_correlation_matches_kernel():
    pts = [0.2, -0.1 + 0.3j, -0.3 - 0.2j, 0.5j]
    ins = [(J, pts[0]), (J, pts[1]), (JB, pts[2]), (JB, pts[3])]
    got = cft.cft_correlation(DISK, "D", ins)
    assert abs(got - cft.current_kernel(DISK, "D", pts[:2], pts[2:])) <= 1e-8


@pytest.mark.parametrize("k,ch", [(-1, HOLO), (1, HOLO), (0, HOLO), (-2, ANTI), (1, ANTI)])
def test_ope_consistency(k, ch):
    ins = [(creation_word([1], [1]), 0.3), (J, -0.4), (JB, 0.1 + 0.4j)]
    assert cft.ope_consistency(DISK, "D", ins, 0, k, ch) <= 1e-8


def test_insertion_validation():
    with pytest.raises(ValueError):
        cft.cft_correlation(DISK, "D", [(J, 1.2), (J, 0.0)])
    with pytest.raises(ValueError):
        cft.cft_correlation(DISK, "D", [(J, 0.1), (J, 0.1)])
    with pytest.raises(ValueError):
        cft.domain("annulus")


# ---- double derivatives --------------------------------------------------------

@pytest.mark.parametrize("bc", ["D", "N"])
@pytest.mark.parametrize("mu,nu", [(1, 1), (1j, 1), (1, -1j), (1j, 1j)])
def test_green_double_derivative_against_finite_differences(bc, mu, nu):
    z, w = 0.3 + 0.1j, -0.4 + 0.2j
    h = 1e-4
    g = lambda a, b: cft.green(DISK, bc, a, b)
    d = lambda a: (g(a, w + h * nu) - g(a, w - h * nu)) / (2 * h)
    num = (d(z + h * mu) - d(z - h * mu)) / (2 * h)
    assert cft.green_double_derivative(DISK, bc, z, w, mu, nu) == pytest.approx(num, rel=1e-6, abs=1e-7)


def test_neumann_rotated_dirichlet_identity():
    for z, w in ((0.3, -0.4), (0.2 + 0.3j, -0.3 - 0.1j)):
        for mu, nu in ((1, 1), (1j, 1), (1, 1j)):
            lhs = -cft.green_double_derivative(DISK, "D", z, w, -1j * mu, -1j * nu)
            rhs = cft.green_double_derivative(DISK, "N", z, w, mu, nu)
            assert abs(lhs - rhs) <= 1e-10
