"""Lattice Green's functions.

The full-plane potential kernel is computed exactly (values a + b/pi) by a
diagonal-offset recurrence; finite domains carry Dirichlet and Neumann
Laplacians with exact (Fraction) or double-precision solvers.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy import integrate

from ._linalg import SparseSPDFactor
from .exact_scalar import ExactScalar

__all__ = [
    "potential", "potential_pair", "potential_oracle", "ASYMPTOTIC_CONSTANT",
    "grad_green", "DiscreteDomain", "build_domain", "ball_domain",
    "circle_points", "dirichlet_green", "neumann_green", "harmonic_measure",
    "EXACT_INTERIOR_LIMIT", "POTENTIAL_BOUND",
]

POTENTIAL_BOUND = 200
EXACT_INTERIOR_LIMIT = 200

EULER_GAMMA = 0.57721566490153286060651209
# G(u) = -(1/2pi) log|u| + C + o(1)
ASYMPTOTIC_CONSTANT = -(EULER_GAMMA + 1.5 * math.log(2.0)) / (2 * math.pi)


# ---- potential kernel ----------------------------------------------

class _PotentialTable:
    """Octant table 0 <= y <= x <= size of (a, b) with G = a + b/pi."""

    def __init__(self):
        self.size = 0
        self.vals: dict = {(0, 0): (Fraction(0), Fraction(0))}

    def ensure(self, m: int) -> None:
        if m <= self.size:
            return
        m = min(max(m, 2 * self.size, 8), POTENTIAL_BOUND + 1)
        v = {}
        # diagonal: G(n, n) = -(1/pi) sum_{k<=n} 1/(2k-1)
        s = Fraction(0)
        v[(0, 0)] = (Fraction(0), Fraction(0))
        for n in range(1, m + 1):
            s += Fraction(1, 2 * n - 1)
            v[(n, n)] = (Fraction(0), -s)
        # offset one, from harmonicity on the diagonal
        v[(1, 0)] = (Fraction(-1, 4), Fraction(0))
        for n in range(1, m):
            a1, b1 = v[(n, n)]
            a0, b0 = v[(n, n - 1)]
            v[(n + 1, n)] = (2 * a1 - a0, 2 * b1 - b0)

        def get(x, y):
            x, y = abs(x), abs(y)
            if y > x:
                x, y = y, x
            return v[(x, y)]

        # offset d+1 from harmonicity along offset d
        for d in range(1, m):
            for y in range(0, m - d):
                x = y + d
                if x + 1 > m:
                    break
                a, b = get(x, y)
                p = get(x - 1, y)
                q = get(x, y + 1)
                r = get(x, y - 1)
                v[(x + 1, y)] = (4 * a - p[0] - q[0] - r[0], 4 * b - p[1] - q[1] - r[1])
        self.vals = v
        self.size = m

    def pair(self, x: int, y: int) -> tuple:
        x, y = abs(x), abs(y)
        if y > x:
            x, y = y, x
        if x > POTENTIAL_BOUND:
            raise ValueError(f"potential kernel bound {POTENTIAL_BOUND} exceeded at ({x}, {y})")
        self.ensure(x + 1)
        return self.vals[(x, y)]


_TABLE = _PotentialTable()


def potential_pair(x: int, y: int) -> tuple:
    """(a, b) with G(x + iy) = a + b/pi."""
    return _TABLE.pair(x, y)


@lru_cache(maxsize=None)
def potential(x: int, y: int) -> ExactScalar:
    """Exact full-plane Green's function G with Laplacian -delta_0 and G(0) = 0."""
    a, b = _TABLE.pair(x, y)
    return ExactScalar([(0, a, 0), (-1, b, 0)])


def potential_float(x: int, y: int) -> float:
    a, b = _TABLE.pair(x, y)
    # a and b are individually huge for large |u|; combine in exact arithmetic
    if max(abs(a), abs(b)) < 1e6:
        return float(a) + float(b) / math.pi
    return _mp_eval(a, b)


def _mp_eval(a: Fraction, b: Fraction) -> float:
    import mpmath

    bits = max(a.numerator.bit_length(), b.numerator.bit_length()) + 80
    with mpmath.workprec(bits):
        return float(mpmath.mpf(a.numerator) / a.denominator
                     + mpmath.mpf(b.numerator) / b.denominator / mpmath.pi)


def potential_oracle(x: int, y: int) -> float:
    """Independent Fourier-integral evaluation of G (one angle done in closed form)."""
    x, y = abs(x), abs(y)
    if x > y:
        x, y = y, x  # larger index in the decaying factor

    def f(t):
        a = 4.0 - 2.0 * math.cos(t)
        s = math.sqrt(a * a - 4.0)
        if s == 0.0:
            return -y / 2.0
        tt = (a - s) / 2.0
        return (math.cos(x * t) * tt ** y - 1.0) / s

    val, _ = integrate.quad(f, 0.0, math.pi, limit=400, epsabs=1e-14, epsrel=1e-13,
                            points=[1e-3, 1e-2, 1e-1])
    return val / math.pi


def grad_green(u: tuple, v: tuple) -> ExactScalar:
    """G(u - v) - G(u) - G(v) for primal points given as integer pairs."""
    return (potential(u[0] - v[0], u[1] - v[1]) - potential(u[0], u[1])
            - potential(v[0], v[1]))


# ---- finite domains ---------------------------------------------------

_NBRS = ((1, 0), (-1, 0), (0, 1), (0, -1))


class DiscreteDomain:
    """Finite subgraph of the unit grid; physical positions are delta * vertex."""

    def __init__(self, name: str, vertices: Iterable, boundary: Iterable,
                 edges: Optional[Iterable] = None, delta: float = 1.0,
                 exact: Optional[bool] = None, mesh_n: Optional[int] = None):
        self.name = name
        self.delta = delta
        self.mesh_n = mesh_n
        self.vertices = sorted(set(map(tuple, vertices)), key=lambda p: (p[1], p[0]))
        self.vset = set(self.vertices)
        self.boundary = set(map(tuple, boundary))
        if not self.boundary <= self.vset:
            raise ValueError("boundary must be a subset of the vertices")
        self.interior = [p for p in self.vertices if p not in self.boundary]
        self.iset = set(self.interior)
        if edges is None:
            edges = [(p, (p[0] + dx, p[1] + dy)) for p in self.vertices
                     for dx, dy in _NBRS if (p[0] + dx, p[1] + dy) in self.vset]
        self.adj: dict = {p: set() for p in self.vertices}
        for a, b in edges:
            a, b = tuple(a), tuple(b)
            if abs(a[0] - b[0]) + abs(a[1] - b[1]) != 1:
                raise ValueError(f"{a}-{b} is not a grid edge")
            self.adj[a].add(b)
            self.adj[b].add(a)
        for p in self.interior:
            if len(self.adj[p]) != 4:
                raise ValueError(f"interior vertex {p} lacks a neighbor in the domain")
        if not self.interior:
            raise ValueError("degenerate domain: empty interior")
        if not self._connected(self.interior):
            raise ValueError("interior is not connected")
        self.exact = (len(self.interior) <= EXACT_INTERIOR_LIMIT) if exact is None else exact
        self._dfactor = None
        self._nfactor = None
        self._dcols: dict = {}
        self._ncols: dict = {}

    def _connected(self, pts) -> bool:
        pts = set(pts)
        start = next(iter(pts))
        seen = {start}
        stack = [start]
        while stack:
            p = stack.pop()
            for dx, dy in _NBRS:
                q = (p[0] + dx, p[1] + dy)
                if q in pts and q not in seen:
                    seen.add(q)
                    stack.append(q)
        return seen == pts

    def position(self, p) -> complex:
        return complex(p[0] * self.delta, p[1] * self.delta)

    def __contains__(self, p) -> bool:
        return tuple(p) in self.vset

    def nearest_vertex(self, z: complex) -> tuple:
        """Closest vertex to a physical point, ties toward smaller coordinates."""
        x = math.ceil(z.real / self.delta - 0.5)
        y = math.ceil(z.imag / self.delta - 0.5)
        if (x, y) not in self.vset:
            raise ValueError(f"{z} snaps to {(x, y)}, which is outside the domain")
        return (x, y)

    # -- Laplacians -----------------------------------------------------
    def dirichlet_laplacian(self, f: dict, p) -> object:
        return sum((f.get(q, 0) for q in self.adj[p] if q in self.iset), 0) - 4 * f.get(p, 0)

    def neumann_laplacian(self, f: dict, p) -> object:
        return sum((f.get(q, 0) - f.get(p, 0) for q in self.adj[p]), 0)

    # -- Dirichlet --------------------------------------------------------
    def _dirichlet_factor(self):
        if self._dfactor is None:
            idx = {p: i for i, p in enumerate(self.interior)}
            self._didx = idx
            n = len(idx)
            if self.exact:
                rows = {}
                for p, i in idx.items():
                    r = {i: Fraction(4)}
                    for q in self.adj[p]:
                        if q in idx:
                            r[idx[q]] = Fraction(-1)
                    rows[i] = r
                self._dfactor = SparseSPDFactor(rows, n)
            else:
                ii, jj, vv = [], [], []
                for p, i in idx.items():
                    ii.append(i); jj.append(i); vv.append(4.0)
                    for q in self.adj[p]:
                        if q in idx:
                            ii.append(i); jj.append(idx[q]); vv.append(-1.0)
                mat = sp.csc_matrix((vv, (ii, jj)), shape=(n, n))
                self._dfactor = spla.factorized(mat)
        return self._dfactor

    def dirichlet_column(self, w) -> dict:
        """u -> G^D(u, w) on interior vertices (absent keys are zero)."""
        w = tuple(w)
        col = self._dcols.get(w)
        if col is not None:
            return col
        if w not in self.iset:
            col = {}
        else:
            fac = self._dirichlet_factor()
            i = self._didx[w]
            if self.exact:
                x = fac.solve({i: Fraction(1)})
            else:
                rhs = np.zeros(len(self._didx))
                rhs[i] = 1.0
                x = fac(rhs)
            col = {p: x[j] for p, j in self._didx.items()}
        self._dcols[w] = col
        return col

    # -- Neumann ----------------------------------------------------------
    def _neumann_factor(self):
        if self._nfactor is None:
            ground = self.vertices[0]
            rest = [p for p in self.vertices if p != ground]
            idx = {p: i for i, p in enumerate(rest)}
            self._nground, self._nidx = ground, idx
            n = len(idx)
            if self.exact:
                rows = {}
                for p, i in idx.items():
                    r = {i: Fraction(len(self.adj[p]))}
                    for q in self.adj[p]:
                        if q in idx:
                            r[idx[q]] = Fraction(-1)
                    rows[i] = r
                self._nfactor = SparseSPDFactor(rows, n)
            else:
                ii, jj, vv = [], [], []
                for p, i in idx.items():
                    ii.append(i); jj.append(i); vv.append(float(len(self.adj[p])))
                    for q in self.adj[p]:
                        if q in idx:
                            ii.append(i); jj.append(idx[q]); vv.append(-1.0)
                mat = sp.csc_matrix((vv, (ii, jj)), shape=(n, n))
                self._nfactor = spla.factorized(mat)
        return self._nfactor

    def neumann_column(self, w, mass: Optional[dict] = None) -> dict:
        """z -> G^N(z, w) = (Lambda^N)^{-1}(b - delta_w), zero average.

        ``mass`` is the boundary probability mass b (default uniform).
        """
        w = tuple(w)
        key = (w, None if mass is None else tuple(sorted(mass.items())))
        col = self._ncols.get(key)
        if col is not None:
            return col
        if w not in self.vset:
            raise ValueError(f"{w} not in domain")
        fac = self._neumann_factor()
        idx = self._nidx
        one = Fraction(1) if self.exact else 1.0
        if mass is None:
            nb = len(self.boundary)
            mass = {p: one / nb for p in self.boundary}
        # (-Lambda^N) f = delta_w - b
        rhs_d: dict = {}
        for p, m in mass.items():
            rhs_d[p] = rhs_d.get(p, 0) - m
        rhs_d[w] = rhs_d.get(w, 0) + one
        if self.exact:
            x = fac.solve({idx[p]: v for p, v in rhs_d.items() if p in idx})
            zero = Fraction(0)
        else:
            rhs = np.zeros(len(idx))
            for p, v in rhs_d.items():
                if p in idx:
                    rhs[idx[p]] += v
            x = fac(rhs)
            zero = 0.0
        vals = {self._nground: zero}
        for p, i in idx.items():
            vals[p] = x[i]
        mean = sum(vals.values(), zero) / len(vals)
        col = {p: v - mean for p, v in vals.items()}
        self._ncols[key] = col
        return col


def dirichlet_green(d: DiscreteDomain, z, w):
    z = tuple(z)
    if z not in d.vset or tuple(w) not in d.vset:
        raise ValueError("points must lie in the domain")
    return d.dirichlet_column(w).get(z, Fraction(0) if d.exact else 0.0)


def neumann_green(d: DiscreteDomain, z, w, mass: Optional[dict] = None):
    z = tuple(z)
    if z not in d.vset:
        raise ValueError("points must lie in the domain")
    return d.neumann_column(w, mass)[z]


# ---- domain families --------------------------------------------------

def circle_points(r: int) -> list:
    """{|x| + |y| = r}, counterclockwise from (r, 0)."""
    if r < 1:
        raise ValueError("radius must be positive")
    pts = []
    for k in range(r):
        pts.append((r - k, k))
    for k in range(r):
        pts.append((-k, r - k))
    for k in range(r):
        pts.append((-r + k, -k))
    for k in range(r):
        pts.append((k, -r + k))
    return pts


def ball_domain(r: int) -> DiscreteDomain:
    """Interior {|u|_1 < r}, boundary C(r) plus the outer staircase corners."""
    if r < 1:
        raise ValueError("radius must be positive")
    inner = [(x, y) for x in range(-r, r + 1) for y in range(-r, r + 1) if abs(x) + abs(y) < r]
    circ = circle_points(r)
    corners = [(x, y) for x in range(-r - 1, r + 2) for y in range(-r - 1, r + 2)
               if abs(x) + abs(y) == r + 1 and x and y]
    verts = inner + circ + corners
    vs = set(verts)
    edges = []
    for p in verts:
        for dx, dy in ((1, 0), (0, 1)):
            q = (p[0] + dx, p[1] + dy)
            if q in vs:
                edges.append((p, q))
    return DiscreteDomain(f"ball({r})", verts, circ + corners, edges, delta=1.0, exact=True)


def _polyomino_domain(name: str, squares: set, delta: float, mesh_n: int) -> DiscreteDomain:
    verts, edges = set(), set()
    for (i, j) in squares:
        c = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)]
        verts.update(c)
        for a, b in zip(c, c[1:] + c[:1]):
            edges.add((min(a, b), max(a, b)))
    inner = set()
    for (x, y) in verts:
        if all(s in squares for s in ((x, y), (x - 1, y), (x - 1, y - 1), (x, y - 1))):
            inner.add((x, y))
    boundary = verts - inner
    return DiscreteDomain(name, verts, boundary, edges, delta=delta, mesh_n=mesh_n)


def build_domain(family: str, mesh_n: int = 0) -> DiscreteDomain:
    family = family.strip().lower()
    if family.startswith("ball"):
        r = int(family[family.index("(") + 1: family.index(")")]) if "(" in family else mesh_n
        return ball_domain(r)
    if mesh_n < 4:
        raise ValueError("mesh_n must be at least 4")
    delta = 1.0 / mesh_n
    if family == "square":
        squares = {(i, j) for i in range(mesh_n) for j in range(mesh_n)}
        return _polyomino_domain(f"square({mesh_n})", squares, delta, mesh_n)
    if family == "disk":
        n2 = mesh_n * mesh_n
        squares = set()
        for i in range(-mesh_n, mesh_n):
            for j in range(-mesh_n, mesh_n):
                if all(a * a + b * b <= n2 for a, b in
                       ((i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1))):
                    squares.add((i, j))
        return _polyomino_domain(f"disk({mesh_n})", squares, delta, mesh_n)
    raise ValueError(f"unknown domain family {family!r}")


_HM_CACHE: dict = {}


def harmonic_measure(r: int) -> tuple:
    """Exact harmonic measures of Lambda(r).

    Returns (circle, interior, H) with H[b][v] a Fraction for b in C(r) and
    v in the interior; H_b(v) is the Neumann Laplacian of G^D(., v) at b.
    """
    if r > 8:
        raise ValueError("exact harmonic measures are limited to r <= 8")
    if r in _HM_CACHE:
        return _HM_CACHE[r]
    d = ball_domain(r)
    circ = circle_points(r)
    fac = d._dirichlet_factor()
    idx = d._didx
    H = {}
    for b in circ:
        rhs = {idx[q]: Fraction(1) for q in d.adj[b] if q in idx}
        x = fac.solve(rhs)
        H[b] = {p: x[i] for p, i in idx.items()}
    out = (circ, list(d.interior), H)
    _HM_CACHE[r] = out
    return out
