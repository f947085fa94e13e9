"""Continuum free boson: Green's functions, current kernels and correlations.

Correlations of Fock fields are computed by trapezoid quadrature on nested
circles around each insertion.  Because the current kernel is a sum over
pairings of two-point kernels, the discretized nested contour sum factorizes
over pairs; cft_correlation uses that factorization and
cft_correlation_bruteforce evaluates the full kernel on the product grid.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import mpmath
import numpy as np

from .fock_algebra import ANTI, HOLO, heisenberg_apply

__all__ = [
    "ContinuumDomain", "domain", "green", "current_two_point", "current_kernel",
    "pairings", "cft_correlation", "cft_correlation_bruteforce", "ope_consistency",
    "green_double_derivative", "QUADRATURE_NODES",
]

QUADRATURE_NODES = 64


# ---- domains -----------------------------------------------------------------

def _sc_map():
    # w -> s * z maps the disk onto the square with half side s
    f = lambda w: w * mpmath.hyp2f1(0.25, 0.5, 1.25, -w ** 4)
    s = float(mpmath.re(f(mpmath.exp(0.25j * mpmath.pi))))
    return f, s


@lru_cache(maxsize=4096)
def _square_to_disk(x: float, y: float) -> tuple:
    f, s = _SC
    z = complex(2 * x - 1, 2 * y - 1) * s  # [0,1]^2 -> [-s,s]^2
    w0 = complex(2 * x - 1, 2 * y - 1) * 0.7
    w = complex(mpmath.findroot(lambda w: f(w) - z, w0, tol=1e-28))
    dw = 2 * s * complex(mpmath.sqrt(1 + mpmath.mpc(w) ** 4))  # dw/dz for z in [0,1]^2
    return w, dw


_SC = _sc_map()


@dataclass(frozen=True)
class ContinuumDomain:
    """A simply connected domain with a conformal map onto the unit disk."""

    tag: str

    def to_disk(self, z: complex) -> tuple:
        """(phi(z), phi'(z))."""
        if self.tag == "unit_disk":
            return z, 1.0 + 0j
        if self.tag == "half_plane":
            return (z - 1j) / (z + 1j), 2j / (z + 1j) ** 2
        if self.tag == "square":
            return _square_to_disk(float(z.real), float(z.imag))
        raise ValueError(f"unknown domain {self.tag!r}")

    def contains(self, z: complex) -> bool:
        return self.boundary_distance(z) > 0

    def boundary_distance(self, z: complex) -> float:
        if self.tag == "unit_disk":
            return 1.0 - abs(z)
        if self.tag == "half_plane":
            return z.imag
        if self.tag == "square":
            return min(z.real, 1 - z.real, z.imag, 1 - z.imag)
        raise ValueError(f"unknown domain {self.tag!r}")


def domain(name: str) -> ContinuumDomain:
    name = name.strip().lower()
    alias = {"disk": "unit_disk", "unit_disk": "unit_disk", "half_plane": "half_plane",
             "halfplane": "half_plane", "square": "square"}
    if name not in alias:
        raise ValueError(f"unknown continuum domain {name!r}")
    return ContinuumDomain(alias[name])


def _bc(bc: str) -> str:
    b = bc.strip().upper()[:1]
    if b not in ("D", "N"):
        raise ValueError(f"unsupported boundary condition {bc!r}")
    return b


# ---- Green's functions and kernels ------------------------------------------------

def _disk_green(bc: str, z: complex, w: complex) -> float:
    if z == w:
        raise ValueError("coincident points")
    if bc == "D":
        return -math.log(abs((z - w) / (1 - z * w.conjugate()))) / (2 * math.pi)
    return -math.log(abs((z - w) * (1 - z * w.conjugate()))) / (2 * math.pi)


def green(dom: ContinuumDomain, bc: str, z: complex, w: complex) -> float:
    z, w = complex(z), complex(w)
    if z == w:
        raise ValueError("coincident points")
    return _disk_green(_bc(bc), dom.to_disk(z)[0], dom.to_disk(w)[0])


def _disk_kernel(kind: str, bc: str, z, w):
    # z, w may be numpy arrays
    if kind == "JJ":
        return 1.0 / (z - w) ** 2
    if kind == "JbJb":
        return np.conj(1.0 / (z - w) ** 2)
    if kind == "JJb":
        s = -1.0 if bc == "D" else 1.0
        return s / (1 - z * np.conj(w)) ** 2
    if kind == "JbJ":
        s = -1.0 if bc == "D" else 1.0
        return s / (1 - w * np.conj(z)) ** 2
    raise ValueError(f"unknown kernel type {kind!r}")


_KIND = {"JJ": "JJ", "JJB": "JJb", "JJBAR": "JJb", "JBJB": "JbJb", "JBARJBAR": "JbJb",
         "JBJ": "JbJ"}


def current_two_point(dom: ContinuumDomain, bc: str, kind: str, z, w):
    """E[J(z)J(w)], E[J(z)Jbar(w)] or E[Jbar(z)Jbar(w)]."""
    kind = _KIND.get(kind.upper().replace("̄", "B").replace("_", ""), None)
    if kind is None:
        raise ValueError("kind must be JJ, JJb or JbJb")
    if complex(z) == complex(w) and kind in ("JJ", "JbJb"):
        raise ValueError("coincident points")
    return complex(_pulled_kernel(dom, _bc(bc), kind, complex(z), complex(w)))


def _pulled_kernel(dom: ContinuumDomain, bc: str, kind: str, z, w):
    if dom.tag == "unit_disk":
        return _disk_kernel(kind, bc, z, w)
    pz, dz = _map_many(dom, z)
    pw, dw = _map_many(dom, w)
    fz = dz if kind[:1] == "J" and kind[:2] != "Jb" else np.conj(dz)
    fw = dw if kind.endswith("J") and not kind.endswith("Jb") else np.conj(dw)
    return fz * fw * _disk_kernel(kind, bc, pz, pw)


def _map_many(dom: ContinuumDomain, z):
    if np.ndim(z) == 0:
        return dom.to_disk(complex(z))
    arr = np.asarray(z, dtype=complex)
    out = np.empty_like(arr)
    der = np.empty_like(arr)
    for idx, v in np.ndenumerate(arr):
        out[idx], der[idx] = dom.to_disk(complex(v))
    return out, der


def pairings(items: Sequence) -> list:
    """All perfect pairings of a list, as lists of index pairs."""
    idx = list(range(len(items)))
    if len(idx) % 2:
        return []

    def rec(rest):
        if not rest:
            yield []
            return
        a = rest[0]
        for i in range(1, len(rest)):
            b = rest[i]
            for tail in rec(rest[1:i] + rest[i + 1:]):
                yield [(a, b)] + tail

    return list(rec(idx))


def _kind(ca: str, cb: str) -> str:
    return {(HOLO, HOLO): "JJ", (HOLO, ANTI): "JJb", (ANTI, HOLO): "JbJ", (ANTI, ANTI): "JbJb"}[(ca, cb)]


def current_kernel(dom: ContinuumDomain, bc: str, zs: Sequence, ws: Sequence) -> complex:
    """E[J(z_1)...J(z_m) Jbar(w_1)...Jbar(w_m')] as a sum over pairings."""
    pts = [(complex(z), HOLO) for z in zs] + [(complex(w), ANTI) for w in ws]
    xs = [p for p, _ in pts]
    if len(set(xs)) != len(xs):
        raise ValueError("current insertion points must be distinct")
    bc = _bc(bc)
    total = 0j
    for P in pairings(pts):
        prod = 1 + 0j
        for a, b in P:
            prod *= complex(_pulled_kernel(dom, bc, _kind(pts[a][1], pts[b][1]), pts[a][0], pts[b][0]))
        total += prod
    return total


# ---- quadrature ----------------------------------------------------------------

@dataclass
class _Mode:
    center: complex
    radius: float
    exponent: int  # the integrand weight (zeta - z)^exponent
    chirality: str

    def nodes(self, M: int):
        theta = 2 * np.pi * np.arange(M) / M
        e = np.exp(1j * theta)
        zeta = self.center + self.radius * e
        if self.chirality == HOLO:
            w = (self.radius * e) ** self.exponent * self.radius * e / M
        else:
            w = np.conj(self.radius * e) ** self.exponent * self.radius * np.conj(e) / M
        return zeta, w


def _default_radius(dom: ContinuumDomain, pts: Sequence[complex]) -> float:
    dists = [dom.boundary_distance(p) for p in pts]
    for i, a in enumerate(pts):
        for b in pts[i + 1:]:
            dists.append(abs(a - b))
    R = min(dists) / 3.0
    if R <= 0:
        raise ValueError("insertion points must be distinct and inside the domain")
    return R


def _modes_for_word(center: complex, lam, lamb, R: float, lo: float, hi: float) -> list:
    """Radii increase from the rightmost (first acting) letter outward."""
    letters = [(k, HOLO) for k in lam] + [(k, ANTI) for k in lamb]
    # the word a_{-lam_1} ... abar_{-lamb_last} 1 acts right to left
    letters = letters[::-1]
    n = len(letters)
    out = []
    for j, (k, ch) in enumerate(letters):
        t = 0.5 if n == 1 else j / (n - 1)
        r = R * lo * (hi / lo) ** t
        out.append(_Mode(center, r, -k, ch))
    return out


def _pair_value(dom, bc, a: _Mode, b: _Mode, M: int) -> complex:
    za, wa = a.nodes(M)
    zb, wb = b.nodes(M)
    K = _pulled_kernel(dom, bc, _kind(a.chirality, b.chirality), za[:, None], zb[None, :])
    return complex(wa @ K @ wb)


def _hafnian(modes: list, pair) -> complex:
    n = len(modes)
    if n % 2:
        return 0j
    memo: dict = {}

    def rec(mask: int) -> complex:
        if mask == 0:
            return 1 + 0j
        if mask in memo:
            return memo[mask]
        i = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << i)
        tot = 0j
        m = rest
        while m:
            j = (m & -m).bit_length() - 1
            m &= m - 1
            tot += pair(i, j) * rec(rest & ~(1 << j))
        memo[mask] = tot
        return tot

    return rec((1 << n) - 1)


def _check_insertions(dom: ContinuumDomain, insertions) -> list:
    out = []
    for v, z in insertions:
        z = complex(z)
        if not dom.contains(z):
            raise ValueError(f"insertion point {z} outside the domain")
        out.append((v, z))
    pts = [z for _, z in out]
    if len(set(pts)) != len(pts):
        raise ValueError("insertion points must be distinct")
    return out


def _word_modes(dom, insertions, R, lo, hi):
    return [[(_modes_for_word(z, l, lb, R, lo, hi), c) for (l, lb), c in v.coeffs.items()]
            for v, z in insertions]


def cft_correlation(dom: ContinuumDomain, bc: str, insertions: Sequence, M: int = QUADRATURE_NODES,
                    R: Optional[float] = None, radii: tuple = (0.25, 1.0),
                    extra_modes: Sequence = ()) -> complex:
    """Correlation of Fock fields (FockVector, point) by nested contour quadrature."""
    bc = _bc(bc)
    insertions = _check_insertions(dom, insertions)
    if R is None:
        R = _default_radius(dom, [z for _, z in insertions])
    lo, hi = radii
    if not 0 < lo <= hi <= 1:
        raise ValueError("infeasible radius schedule")
    per = _word_modes(dom, insertions, R, lo, hi)
    cache: dict = {}

    def modes_pair(ma: _Mode, mb: _Mode) -> complex:
        key = (id(ma), id(mb))
        v = cache.get(key)
        if v is None:
            v = _pair_value(dom, bc, ma, mb, M)
            cache[key] = v
        return v

    total = 0j
    for combo in itertools.product(*per):
        coeff = 1 + 0j
        modes: list = list(extra_modes)
        for ms, c in combo:
            coeff *= complex(c)
            modes.extend(ms)
        if len(modes) % 2:
            continue
        total += coeff * _hafnian(modes, lambda i, j: modes_pair(modes[i], modes[j]))
    return total


def cft_correlation_bruteforce(dom: ContinuumDomain, bc: str, insertions: Sequence,
                               M: int = 16, R: Optional[float] = None,
                               radii: tuple = (0.25, 1.0)) -> complex:
    """Same quadrature summed over the full product grid with current_kernel."""
    insertions = _check_insertions(dom, insertions)
    if R is None:
        R = _default_radius(dom, [z for _, z in insertions])
    per = _word_modes(dom, insertions, R, *radii)
    total = 0j
    for combo in itertools.product(*per):
        coeff = 1 + 0j
        modes = []
        for ms, c in combo:
            coeff *= complex(c)
            modes.extend(ms)
        grids = [m.nodes(M) for m in modes]
        acc = 0j
        for idx in itertools.product(range(M), repeat=len(modes)):
            w = 1 + 0j
            zs, ws = [], []
            for m, g, j in zip(modes, grids, idx):
                w *= g[1][j]
                (zs if m.chirality == HOLO else ws).append(g[0][j])
            acc += w * current_kernel(dom, bc, zs, ws)
        total += coeff * acc
    return total


def ope_consistency(dom: ContinuumDomain, bc: str, insertions: Sequence, probe: int, k: int,
                    chirality: str = HOLO, M: int = QUADRATURE_NODES) -> float:
    """|(J-probe Laurent coefficient of order k) - <(a_k F)(z) ...>|.

    The probe current circles insertion ``probe`` outside the contours of
    its own modes; the base modes use the inner part of the radius budget.
    """
    insertions = _check_insertions(dom, insertions)
    R = _default_radius(dom, [z for _, z in insertions])
    v, z = insertions[probe]
    lhs_modes = [_Mode(z, R, k, chirality)]
    lhs = cft_correlation(dom, bc, insertions, M=M, R=R, radii=(0.125, 0.5),
                          extra_modes=lhs_modes)
    moved = list(insertions)
    moved[probe] = (heisenberg_apply(k, chirality, v), z)
    rhs = cft_correlation(dom, bc, moved, M=M, R=R, radii=(0.125, 0.5)) if moved[probe][0] else 0j
    return abs(lhs - rhs)


# ---- double derivatives of Green's functions -------------------------------------------

def green_double_derivative(dom: ContinuumDomain, bc: str, z: complex, w: complex,
                            mu: complex, nu: complex) -> float:
    """nabla^mu_z nabla^nu_w G(z, w) for unit directions mu, nu (disk only)."""
    if dom.tag != "unit_disk":
        raise ValueError("closed-form double derivatives are implemented for the disk")
    bc = _bc(bc)
    z, w, mu, nu = complex(z), complex(w), complex(mu), complex(nu)
    dzdw = -1.0 / (4 * math.pi * (z - w) ** 2)
    s = -1.0 if bc == "D" else 1.0
    dzdwb = s / (4 * math.pi * (1 - z * w.conjugate()) ** 2)
    return 2.0 * (mu * nu * dzdw + mu * nu.conjugate() * dzdwb).real
