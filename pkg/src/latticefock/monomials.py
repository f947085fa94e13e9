"""Discrete Laurent monomials u^[n] on the diamond and medial lattices.

Internally points of the half-integer grid are handled in half units
(hx, hy) = (2x, 2y).  The four cosets of that grid under unit translations
are the primal, dual, horizontal-medial and vertical-medial sublattices.

Positive orders come from integrating dee u^[n] = n u^[n-1] (with
deebar u^[n] = 0) inside each coset, then fixing the four coset constants.
The order -1 monomial is dee of a finite combination of potential kernels,
and lower orders are iterated derivatives of it.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from ._linalg import rref
from .exact_scalar import ExactScalar, ZERO, ONE, PI
from .grid import GridPoint, LatticeFunction, CornerContour, rectangle_contour, contour_integral
from .greens import potential

__all__ = ["MonomialTable", "monomial", "pole_set", "pole_values", "validate",
           "MONOMIAL_BOUND", "residue_contour"]

MONOMIAL_BOUND = 12
POLE_BOUND = 16

_F0 = Fraction(0)
_HALF = Fraction(1, 2)

# coset index by parity of (hx, hy)
_P, _D, _H, _V = 0, 1, 2, 3
_ANCHORS = {_P: (0, 0), _D: (1, 1), _H: (1, 0), _V: (0, 1)}


def _coset(hx: int, hy: int) -> int:
    a, b = hx & 1, hy & 1
    if a == 0 and b == 0:
        return _P
    if a and b:
        return _D
    return _H if a else _V


def _ipow(n: int) -> tuple:
    return ((1, 0), (0, 1), (-1, 0), (0, -1))[n % 4]


# gaussian rationals as (re, im) Fraction pairs for the positive tables
def _cmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _to_half(p) -> tuple:
    if isinstance(p, GridPoint):
        if p.qx % 2 or p.qy % 2:
            raise ValueError(f"{p} is not on the half-integer grid")
        return p.qx // 2, p.qy // 2
    return p


class MonomialTable:
    """Values of u^[n] with lazy, memoized evaluation."""

    def __init__(self, n: int):
        if abs(n) > MONOMIAL_BOUND:
            raise ValueError(f"|n| = {abs(n)} exceeds the configured bound {MONOMIAL_BOUND}")
        self.n = n
        self._box = -1
        self._vals: dict = {}
        self._memo: dict = {}

    # -- evaluation ------------------------------------------------------
    def __call__(self, p) -> ExactScalar:
        hx, hy = _to_half(p)
        return self.value_half(hx, hy)

    def value_half(self, hx: int, hy: int) -> ExactScalar:
        n = self.n
        if n == 0:
            return ONE
        if n > 0:
            r = max(abs(hx), abs(hy))
            if r > self._box:
                self._grow(max(r, 2 * self._box, 8))
            v = self._memo.get((hx, hy))
            if v is None:
                re, im = self._vals[(hx, hy)]
                v = ExactScalar.gaussian(re, im)
                self._memo[(hx, hy)] = v
            return v
        v = self._memo.get((hx, hy))
        if v is None:
            if n == -1:
                v = _neg_one_value(hx, hy)
            else:
                prev = monomial(n + 1)
                # u^[n] = dee u^[n+1] / (n+1)
                d = (prev.value_half(hx + 1, hy) - prev.value_half(hx - 1, hy)) * _HALF \
                    - (prev.value_half(hx, hy + 1) - prev.value_half(hx, hy - 1)) * ExactScalar.gaussian(0, _HALF)
                v = d * Fraction(1, n + 1)
            self._memo[(hx, hy)] = v
        return v

    def as_lattice_function(self) -> LatticeFunction:
        return LatticeFunction(self.__call__, domain="union")

    def to_float(self, p) -> complex:
        return self(p).to_float()

    # -- positive orders ---------------------------------------------------
    def raw_pair(self, hx: int, hy: int) -> tuple:
        r = max(abs(hx), abs(hy))
        if r > self._box:
            self._grow(max(r, 2 * self._box, 8))
        return self._vals[(hx, hy)]

    def _grow(self, box: int) -> None:
        n = self.n
        if n == 1:
            self._vals = {(x, y): (Fraction(x, 2), Fraction(y, 2))
                          for x in range(-box, box + 1) for y in range(-box, box + 1)}
            self._box = box
            return
        prev = monomial(n - 1)
        prev.raw_pair(box, box)
        pv = prev._vals
        f0: dict = {}
        for c, (ax, ay) in _ANCHORS.items():
            # integrate along the anchor row, then up and down each column
            xs = [x for x in range(-box, box + 1) if (x - ax) % 2 == 0]
            row = {ax: (_F0, _F0)}
            x = ax
            while x + 2 <= box:
                m = pv[(x + 1, ay)]
                a = row[x]
                row[x + 2] = (a[0] + n * m[0], a[1] + n * m[1])
                x += 2
            x = ax
            while x - 2 >= -box:
                m = pv[(x - 1, ay)]
                a = row[x]
                row[x - 2] = (a[0] - n * m[0], a[1] - n * m[1])
                x -= 2
            for x in xs:
                f0[(x, ay)] = row[x]
                y = ay
                while y + 2 <= box:
                    m = pv[(x, y + 1)]
                    a = f0[(x, y)]
                    # f(z + i) - f(z) = i n u^[n-1](z + i/2)
                    f0[(x, y + 2)] = (a[0] - n * m[1], a[1] + n * m[0])
                    y += 2
                y = ay
                while y - 2 >= -box:
                    m = pv[(x, y - 1)]
                    a = f0[(x, y)]
                    f0[(x, y - 2)] = (a[0] + n * m[1], a[1] - n * m[0])
                    y -= 2
        consts = self._constants(f0)
        self._vals = {p: (v[0] + consts[_coset(*p)][0], v[1] + consts[_coset(*p)][1])
                      for p, v in f0.items()}
        self._box = box
        self._memo.clear()

    def _constants(self, f0: dict) -> dict:
        if hasattr(self, "_consts"):
            return self._consts
        n = self.n
        w = _ipow(n)
        eqs = []

        def var(c, comp):
            return 2 * c + comp

        for c, (ax, ay) in _ANCHORS.items():
            for p in ((ax, ay), (-ax, ay), (ax, -ay), (-ax, -ay)):
                q = (-p[1], p[0])  # i * p
                cq, cp = _coset(*q), _coset(*p)
                lhs = [f0[q][0] - (w[0] * f0[p][0] - w[1] * f0[p][1]),
                       f0[q][1] - (w[0] * f0[p][1] + w[1] * f0[p][0])]
                # rotation: c_q - w c_p = -(f0(q) - w f0(p))
                r1 = [_F0] * 9
                r1[var(cq, 0)] += 1
                r1[var(cp, 0)] -= w[0]
                r1[var(cp, 1)] += w[1]
                r1[8] = -lhs[0]
                r2 = [_F0] * 9
                r2[var(cq, 1)] += 1
                r2[var(cp, 1)] -= w[0]
                r2[var(cp, 0)] -= w[1]
                r2[8] = -lhs[1]
                eqs += [r1, r2]
                # conjugation: f(conj p) = conj f(p), same coset
                pc = (p[0], -p[1])
                r3 = [_F0] * 9
                r3[var(cp, 1)] = Fraction(2)
                r3[8] = -(f0[pc][1] + f0[p][1])
                eqs.append(r3)
                r4 = [_F0] * 9
                r4[8] = -(f0[pc][0] - f0[p][0])
                eqs.append(r4)
        sol = _solve_with_anchors(eqs)
        self._consts = {c: (sol[2 * c], sol[2 * c + 1]) for c in range(4)}
        return self._consts


def _solve_with_anchors(eqs: list) -> list:
    """Solve the symmetry system; undetermined coset constants vanish at the anchor."""
    red, piv = rref(eqs)
    if 8 in piv:
        raise ArithmeticError("inconsistent symmetry constraints for a positive monomial")
    for c in (_P, _D, _H, _V):
        for comp in (0, 1):
            if len([p for p in piv if p < 8]) == 8:
                break
            trial = [r for r in red if any(r)] + [[Fraction(int(k == 2 * c + comp)) for k in range(8)] + [_F0]]
            red2, piv2 = rref(trial)
            if 8 not in piv2 and len(piv2) > len(piv):
                red, piv = red2, piv2
    if len(piv) < 8:
        raise ArithmeticError("coset constants not determined")
    sol = [_F0] * 8
    for r, p in zip(red, piv):
        sol[p] = r[8]
    return sol


# ---- order -1 ----------------------------------------------------------

# right-hand side of deebar u^[-1], divided by 2 pi, in half units
_RHS = {(0, 0): Fraction(1, 2),
        (1, 0): Fraction(1, 4), (-1, 0): Fraction(1, 4), (0, 1): Fraction(1, 4), (0, -1): Fraction(1, 4),
        (1, 1): Fraction(1, 8), (-1, 1): Fraction(1, 8), (1, -1): Fraction(1, 8), (-1, -1): Fraction(1, 8)}


@lru_cache(maxsize=None)
def _h_value(hx: int, hy: int) -> ExactScalar:
    """h = -4 (G_half * g), with g = 2 pi * _RHS."""
    c = _coset(hx, hy)
    out = ZERO
    for (wx, wy), m in _RHS.items():
        if _coset(wx, wy) != c:
            continue
        out = out + potential((hx - wx) // 2, (hy - wy) // 2) * (-8 * m)
    return out * PI


def _neg_one_value(hx: int, hy: int) -> ExactScalar:
    return (_h_value(hx + 1, hy) - _h_value(hx - 1, hy)) * _HALF \
        - (_h_value(hx, hy + 1) - _h_value(hx, hy - 1)) * ExactScalar.gaussian(0, _HALF)


@lru_cache(maxsize=None)
def monomial(n: int) -> MonomialTable:
    return MonomialTable(n)


# ---- pole sets -----------------------------------------------------------

_DEE_H = (((1, 0), (_HALF, _F0)), ((-1, 0), (-_HALF, _F0)),
          ((0, 1), (_F0, -_HALF)), ((0, -1), (_F0, _HALF)))


@lru_cache(maxsize=None)
def pole_values(k: int) -> dict:
    """deebar u^[-k] / (2 pi) as a finite table {(hx, hy): (re, im)}.

    Uses deebar u^[-k] = ((-1)^(k-1)/(k-1)!) dee^(k-1) deebar u^[-1].
    """
    if k < 1 or k > POLE_BOUND:
        raise ValueError("pole order out of range")
    cur = {p: (m, _F0) for p, m in _RHS.items()}
    for _ in range(k - 1):
        nxt: dict = {}
        for (x, y), v in cur.items():
            for (dx, dy), c in _DEE_H:
                # (dee f)(z) picks f(z + d) with coefficient c, i.e. f(p) feeds z = p - d
                z = (x - dx, y - dy)
                a = nxt.get(z, (_F0, _F0))
                t = _cmul(c, v)
                nxt[z] = (a[0] + t[0], a[1] + t[1])
        cur = {p: v for p, v in nxt.items() if v[0] or v[1]}
    scale = Fraction((-1) ** (k - 1), math.factorial(k - 1))
    return {p: (v[0] * scale, v[1] * scale) for p, v in cur.items()}


def pole_set(k: int) -> set:
    """Points (as GridPoints) where u^[-k] fails to be discrete holomorphic."""
    return {GridPoint(2 * x, 2 * y) for (x, y) in pole_values(k)}


# ---- validation --------------------------------------------------------------

def residue_contour(half: Fraction) -> CornerContour:
    return rectangle_contour(-half, half, -half, half)


def _deebar_half(t: MonomialTable, hx, hy) -> ExactScalar:
    return (t.value_half(hx + 1, hy) - t.value_half(hx - 1, hy)) * _HALF \
        + (t.value_half(hx, hy + 1) - t.value_half(hx, hy - 1)) * ExactScalar.gaussian(0, _HALF)


def _dee_half(t: MonomialTable, hx, hy) -> ExactScalar:
    return (t.value_half(hx + 1, hy) - t.value_half(hx - 1, hy)) * _HALF \
        - (t.value_half(hx, hy + 1) - t.value_half(hx, hy - 1)) * ExactScalar.gaussian(0, _HALF)


def validate(n: int, radius: int = 12, asymptotic_radii=(10, 20, 40)) -> dict:
    """Check the defining properties of u^[n] within an l-infinity radius.

    Returns a report {check name: list of violations (empty means pass)} plus
    the float asymptotic ratios.
    """
    t = monomial(n)
    R = 2 * radius
    report: dict = {"symmetry": [], "derivative": [], "holomorphic": [],
                    "poles": [], "residue": []}
    lower = monomial(n - 1) if n - 1 >= -MONOMIAL_BOUND else None
    iw = _ipow(n)
    iw_s = ExactScalar.gaussian(*iw)
    poles = pole_values(-n) if n < 0 else {}
    for hx in range(-R, R + 1):
        for hy in range(-R, R + 1):
            v = t.value_half(hx, hy)
            if t.value_half(-hy, hx) != iw_s * v:
                report["symmetry"].append(("rotation", hx, hy))
            if t.value_half(hx, -hy) != v.conjugate():
                report["symmetry"].append(("conjugation", hx, hy))
            if max(abs(hx), abs(hy)) < R:
                if lower is not None and _dee_half(t, hx, hy) != lower.value_half(hx, hy) * n:
                    report["derivative"].append((hx, hy))
                db = _deebar_half(t, hx, hy)
                want = poles.get((hx, hy))
                if want is None:
                    if db:
                        report["holomorphic"].append((hx, hy))
                else:
                    if db != ExactScalar([(1, 2 * want[0], 2 * want[1])]):
                        report["poles"].append((hx, hy))
    # residue pairing with every order in range on a contour enclosing the poles
    half = Fraction(4 * (max(abs(n), 2) // 2 + 2) + 1, 4)
    gamma = residue_contour(half)
    f = t.as_lattice_function()
    for m in range(-min(MONOMIAL_BOUND, 6), min(MONOMIAL_BOUND, 6) + 1):
        for a, b in ((f, monomial(m).as_lattice_function()), (monomial(m).as_lattice_function(), f)):
            val = contour_integral(gamma, a, b) * (ExactScalar([(1, 0, 2)]).inverse_monomial())
            want = ONE if n + m + 1 == 0 else ZERO
            if val != want:
                report["residue"].append((n, m))
    asym = {}
    for rad in asymptotic_radii:
        worst = 0.0
        for (x, y) in ((rad, 0), (0, rad), (rad, rad), (-rad, rad // 2)):
            z = complex(x, y)
            val = _float_value(t, 2 * x, 2 * y)
            worst = max(worst, abs(val - z ** n) / abs(z) ** n)
        asym[rad] = worst
    report["asymptotic_relative_error"] = asym
    return report


def _float_value(t: MonomialTable, hx: int, hy: int) -> complex:
    v = t.value_half(hx, hy)
    return exact_to_complex(v)


def exact_to_complex(v: ExactScalar) -> complex:
    """Float value robust against cancellation between huge pi-coefficients."""
    terms = v.terms
    if not terms:
        return 0j
    big = max(max(abs(a), abs(b)) for _, a, b in terms)
    if big < 1e8:
        return v.to_float()
    import mpmath

    bits = max(max(abs(a.numerator).bit_length(), abs(b.numerator).bit_length()) for _, a, b in terms) + 80
    with mpmath.workprec(bits):
        re = mpmath.mpf(0)
        im = mpmath.mpf(0)
        for k, a, b in terms:
            p = mpmath.pi ** k
            re += mpmath.mpf(a.numerator) / a.denominator * p
            im += mpmath.mpf(b.numerator) / b.denominator * p
        return complex(float(re), float(im))
