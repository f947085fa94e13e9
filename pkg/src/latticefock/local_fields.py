"""Local fields of the discrete Gaussian free field.

Field polynomials are polynomials in commuting indeterminates X(u), u in Z^2,
with exact coefficients.  X(u) evaluated at a vertex z of a domain is the
random variable phi(z + u) - phi(z).  Classes modulo null fields are
identified with Fock space vectors through the current-mode construction.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from ._linalg import rref
from .exact_scalar import ExactScalar, ZERO, ONE, I, PI, as_scalar
from .fock_algebra import ANTI, HOLO, FockVector
from .greens import DiscreteDomain, grad_green, harmonic_measure
from .grid import (CornerContour, GridPoint, classify, MEDIAL_H, MEDIAL_V,
                   dee_bullet_stencil, deebar_bullet_stencil, rectangle_contour)
from .monomials import MONOMIAL_BOUND, monomial, pole_values

__all__ = [
    "FieldPolynomial", "X", "laplacian_X", "dee_bullet_X", "deebar_bullet_X",
    "current", "current_bar", "contraction", "normal_order", "normal_order_inverse",
    "normal_order_product", "rho", "current_mode_apply", "reduce_linear",
    "linear_to_fock", "to_fock", "from_fock", "is_null", "LocalFieldClass",
    "lattice_sugawara", "scaling_dimension", "evaluate_correlation",
    "truncation_bound", "mode_contour", "linear_dimension", "wick_expand",
    "RHO_BOUND", "MAX_RADIUS",
]

from .monomials import POLE_BOUND as RHO_BOUND  # noqa: E402
MAX_RADIUS = 8

Point = tuple


def _l1(p) -> int:
    return abs(p[0]) + abs(p[1])


class FieldPolynomial:
    """Map from sorted tuples of primal points (monomials) to ExactScalar."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[dict] = None):
        out: dict = {}
        for m, c in (terms or {}).items():
            c = as_scalar(c)
            if not c:
                continue
            key = tuple(sorted(tuple(p) for p in m))
            prev = out.get(key)
            s = c if prev is None else prev + c
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        self.terms = out

    @classmethod
    def _raw(cls, terms: dict) -> "FieldPolynomial":
        f = object.__new__(cls)
        f.terms = terms
        return f

    @classmethod
    def constant(cls, c) -> "FieldPolynomial":
        c = as_scalar(c)
        return cls._raw({(): c} if c else {})

    @classmethod
    def linear(cls, coeffs: dict) -> "FieldPolynomial":
        return cls({((tuple(p)),): c for p, c in coeffs.items()})

    # -- algebra -------------------------------------------------------------
    def __add__(self, other) -> "FieldPolynomial":
        other = _as_poly(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            p = out.get(m)
            s = c if p is None else p + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return FieldPolynomial._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "FieldPolynomial":
        return FieldPolynomial._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "FieldPolynomial":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "FieldPolynomial":
        return _as_poly(other) - self

    def scale(self, c) -> "FieldPolynomial":
        c = as_scalar(c)
        if not c:
            return FieldPolynomial()
        return FieldPolynomial._raw({m: v * c for m, v in self.terms.items()})

    def __mul__(self, other) -> "FieldPolynomial":
        if not isinstance(other, FieldPolynomial):
            return self.scale(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(sorted(m1 + m2)) if m1 and m2 else (m1 or m2)
                v = c1 * c2
                p = out.get(m)
                s = v if p is None else p + v
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return FieldPolynomial._raw(out)

    def __rmul__(self, other) -> "FieldPolynomial":
        return self.scale(other)

    def __pow__(self, n: int) -> "FieldPolynomial":
        out = FieldPolynomial.constant(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, FieldPolynomial):
            try:
                other = _as_poly(other)
            except TypeError:
                return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # -- structure -------------------------------------------------------------
    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=-1)

    def support(self) -> set:
        return {p for m in self.terms for p in m}

    def radius(self) -> int:
        return max((_l1(p) for p in self.support()), default=0)

    def homogeneous_part(self, d: int) -> "FieldPolynomial":
        return FieldPolynomial._raw({m: c for m, c in self.terms.items() if len(m) == d})

    def constant_term(self) -> ExactScalar:
        return self.terms.get((), ZERO)

    def is_linear(self) -> bool:
        return all(len(m) == 1 for m in self.terms)

    def linear_coeffs(self) -> dict:
        if not self.is_linear():
            raise ValueError("not a linear field polynomial")
        return {m[0]: c for m, c in self.terms.items()}

    def derivative(self, p) -> "FieldPolynomial":
        p = tuple(p)
        out: dict = {}
        for m, c in self.terms.items():
            k = m.count(p)
            if not k:
                continue
            i = m.index(p)
            mm = m[:i] + m[i + 1:]
            v = c * k
            prev = out.get(mm)
            s = v if prev is None else prev + v
            if s:
                out[mm] = s
            else:
                out.pop(mm, None)
        return FieldPolynomial._raw(out)

    def translate(self, d) -> "FieldPolynomial":
        return FieldPolynomial({tuple((p[0] + d[0], p[1] + d[1]) for p in m): c
                                for m, c in self.terms.items()})

    def map_coefficients(self, f) -> "FieldPolynomial":
        return FieldPolynomial({m: f(c) for m, c in self.terms.items()})

    # -- display / io ---------------------------------------------------------------
    def __repr__(self) -> str:
        return f"FieldPolynomial({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items(), key=lambda t: (len(t[0]), t[0])):
            word = "*".join(f"X({p[0]},{p[1]})" for p in m)
            parts.append(f"({c})" + (f"*{word}" if word else ""))
        return " + ".join(parts)

    def to_json_obj(self) -> list:
        return [{"monomial": [list(p) for p in m], "coeff": c.to_json_obj()}
                for m, c in sorted(self.terms.items())]

    @classmethod
    def from_json_obj(cls, obj) -> "FieldPolynomial":
        return cls({tuple(tuple(p) for p in t["monomial"]): ExactScalar.from_json_obj(t["coeff"])
                    for t in obj})


def _as_poly(x) -> FieldPolynomial:
    if isinstance(x, FieldPolynomial):
        return x
    return FieldPolynomial.constant(as_scalar(x))


def X(x: int, y: int) -> FieldPolynomial:
    return FieldPolynomial._raw({((x, y),): ONE})


def laplacian_X(x: int, y: int) -> FieldPolynomial:
    return FieldPolynomial.linear({(x + 1, y): 1, (x - 1, y): 1, (x, y + 1): 1,
                                   (x, y - 1): 1, (x, y): -4})


def _bullet(stencil, p: GridPoint) -> FieldPolynomial:
    out: dict = {}
    for dqx, dqy, c in stencil:
        q = ((p.qx + dqx) // 4, (p.qy + dqy) // 4)
        out[(q,)] = out.get((q,), ZERO) + c
    return FieldPolynomial(out)


def dee_bullet_X(p: GridPoint) -> FieldPolynomial:
    return _bullet(dee_bullet_stencil(p), p)


def deebar_bullet_X(p: GridPoint) -> FieldPolynomial:
    return _bullet(deebar_bullet_stencil(p), p)


def current(p: GridPoint) -> FieldPolynomial:
    """Discrete holomorphic current i * dee_bullet X at a medial point."""
    return dee_bullet_X(p).scale(I)


def current_bar(p: GridPoint) -> FieldPolynomial:
    return deebar_bullet_X(p).scale(-I)


# ---- contractions and normal ordering ----------------------------------------------

_FOUR_PI = PI * 4


@lru_cache(maxsize=None)
def _wick_points(u: Point, v: Point) -> ExactScalar:
    return grad_green(u, v) * _FOUR_PI


def contraction(L1: FieldPolynomial, L2: FieldPolynomial) -> ExactScalar:
    a, b = L1.linear_coeffs(), L2.linear_coeffs()
    out = ZERO
    for u, cu in a.items():
        if u == (0, 0):
            continue
        for v, cv in b.items():
            if v == (0, 0):
                continue
            w = _wick_points(u, v)
            if w:
                out = out + cu * cv * w
    return out


def _linear_product_expand(forms: Sequence[FieldPolynomial], sign: int) -> FieldPolynomial:
    """sum over partial pairings of sign^|P| prod(contractions) prod(unpaired)."""
    forms = list(forms)
    keys = [_form_key(f) for f in forms]
    memo: dict = {}
    wmemo: dict = {}

    def wick(i, j):
        k = (keys[i], keys[j]) if keys[i] <= keys[j] else (keys[j], keys[i])
        v = wmemo.get(k)
        if v is None:
            v = contraction(forms[i], forms[j])
            wmemo[k] = v
        return v

    def rec(idx: tuple) -> FieldPolynomial:
        if not idx:
            return FieldPolynomial.constant(1)
        mk = tuple(sorted(keys[i] for i in idx))
        got = memo.get(mk)
        if got is not None:
            return got
        first, rest = idx[0], idx[1:]
        out = forms[first] * rec(rest)
        for pos, j in enumerate(rest):
            w = wick(first, j)
            if w:
                out = out + rec(rest[:pos] + rest[pos + 1:]).scale(w * sign)
        memo[mk] = out
        return out

    return rec(tuple(range(len(forms))))


def _form_key(f: FieldPolynomial):
    return tuple(sorted((m, c.terms) for m, c in f.terms.items()))


def normal_order_product(forms: Sequence[FieldPolynomial]) -> FieldPolynomial:
    """:L_1 ... L_d: for linear field polynomials."""
    for f in forms:
        if not f.is_linear():
            raise ValueError("normal_order_product takes linear field polynomials")
    return _linear_product_expand(forms, -1)


@lru_cache(maxsize=None)
def _normal_order_monomial(m: tuple, sign: int) -> FieldPolynomial:
    return _linear_product_expand([X(*p) for p in m], sign)


def normal_order(F: FieldPolynomial) -> FieldPolynomial:
    out = FieldPolynomial()
    for m, c in F.terms.items():
        if len(m) <= 1:
            out = out + FieldPolynomial._raw({m: c})
        else:
            out = out + _normal_order_monomial(m, -1).scale(c)
    return out


def normal_order_inverse(F: FieldPolynomial) -> FieldPolynomial:
    """The unique G with :G: = F, by recursion on the top degree."""
    out = FieldPolynomial()
    rest = F
    while rest:
        d = rest.degree()
        top = rest.homogeneous_part(d)
        out = out + top
        rest = rest - normal_order(top)
        if rest.degree() >= d and rest:
            raise ArithmeticError("normal ordering failed to lower the degree")
    return out


def wick_expand(F: FieldPolynomial) -> FieldPolynomial:
    """Closed form of the inverse: sum over partial pairings with + signs."""
    out = FieldPolynomial()
    for m, c in F.terms.items():
        if len(m) <= 1:
            out = out + FieldPolynomial._raw({m: c})
        else:
            out = out + _normal_order_monomial(m, 1).scale(c)
    return out


# ---- current mode representatives -------------------------------------------------

@lru_cache(maxsize=None)
def rho(k: int, chirality: str = HOLO) -> FieldPolynomial:
    """Representative of a_k 1 (k < 0) supported near the origin."""
    if k >= 0:
        return FieldPolynomial()
    if -k > RHO_BOUND:
        raise ValueError(f"|k| exceeds the representative bound {RHO_BOUND}")
    pv = pole_values(-k)
    out = FieldPolynomial()
    for (hx, hy), (re, im) in pv.items():
        p = GridPoint(2 * hx, 2 * hy)
        if classify(p) not in (MEDIAL_H, MEDIAL_V):
            continue
        c = ExactScalar.gaussian(re, im)
        if chirality == HOLO:
            out = out + dee_bullet_X(p).scale(c * I)
        elif chirality == ANTI:
            out = out + deebar_bullet_X(p).scale(c.conjugate() * (-I))
        else:
            raise ValueError(f"unknown chirality {chirality!r}")
    return out


def mode_contour(k: int, F: FieldPolynomial) -> CornerContour:
    """Square corner contour one unit outside supp(F) and the pole set of u^[k]."""
    r = F.radius() if F else 0
    if k < 0:
        r = max(r, (-k + 1) // 2 + 1)
    half = Fraction(4 * (r + 1) + 1, 4)
    return rectangle_contour(-half, half, -half, half)


def _derivation(k: int, chirality: str, F: FieldPolynomial) -> FieldPolynomial:
    """The part of a_k F coming from Laplacian nulls against factors of F."""
    t = monomial(k)
    u0 = t(GridPoint(0, 0))
    out = FieldPolynomial()
    for w in sorted(F.support()):
        c = t(GridPoint(4 * w[0], 4 * w[1])) - u0
        if chirality == ANTI:
            c = c.conjugate()
        if c:
            out = out + F.derivative(w).scale(c * (-I if chirality == HOLO else I))
    return out


def current_mode_apply(k: int, chirality: str, F: FieldPolynomial,
                       method: str = "stokes") -> FieldPolynomial:
    """Representative of a_k F (or abar_k F).

    method="stokes": contour integral reduced by Stokes' formula and the
    Laplacian null relations; the result is contour independent.
    method="contour": the literal discrete contour integral.
    """
    if abs(k) > MONOMIAL_BOUND:
        raise ValueError(f"|k| exceeds the monomial bound {MONOMIAL_BOUND}")
    if chirality not in (HOLO, ANTI):
        raise ValueError(f"unknown chirality {chirality!r}")
    if method == "stokes":
        return rho(k, chirality) * F + _derivation(k, chirality, F)
    if method == "contour":
        gamma = mode_contour(k, F)
        t = monomial(k)
        acc: dict = {}
        for dc, dmd, med in gamma.steps():
            val = t(dmd)
            if chirality == HOLO:
                c = dc * val * ExactScalar([(-1, Fraction(1, 2), 0)])  # dc u^[k] (1/2pi) dee_bullet
                j = dee_bullet_X(med)
            else:
                c = dc.conjugate() * val.conjugate() * ExactScalar([(-1, Fraction(1, 2), 0)])
                j = deebar_bullet_X(med)
            if not c:
                continue
            for (p,), cj in j.terms.items():
                acc[p] = acc.get(p, ZERO) + c * cj
        return FieldPolynomial.linear(acc) * F
    raise ValueError(f"unknown method {method!r}")


def truncation_bound(F: FieldPolynomial) -> int:
    """K such that a_k F and abar_k F are zero for all k >= K.

    Probed with current_mode_apply; positive monomials vanish on growing
    l1-balls around the origin, so a zero run reaching the support radius is
    final.
    """
    if not F:
        return 1
    r = F.radius()
    need = 2 * r + 1  # u^[k] vanishes on |u|_1 <= (k-1)/2
    if need > MONOMIAL_BOUND:
        raise ValueError("field support too large for the monomial bound")
    K = need
    while K > 1:
        if current_mode_apply(K - 1, HOLO, F) or current_mode_apply(K - 1, ANTI, F):
            break
        K -= 1
    return K


# ---- linear classification --------------------------------------------------------

def reduce_linear(L: FieldPolynomial, r: int) -> dict:
    """Boundary coordinates {b: c_b} on C(r) with L = sum c_b X(b) mod null."""
    coeffs = L.linear_coeffs()
    if any(_l1(p) > r for p in coeffs):
        raise ValueError(f"support does not fit in the ball of radius {r}")
    circ, interior, H = harmonic_measure(r)
    out = {b: ZERO for b in circ}
    for p, c in coeffs.items():
        if _l1(p) == r:
            out[p] = out[p] + c
        else:
            for b in circ:
                h = H[b][p]
                if h:
                    out[b] = out[b] + c * h
    return out


def _basis_at_radius(r: int) -> list:
    out = []
    for k in range(1, 2 * r):
        out.append(((HOLO, k), rho(-k, HOLO)))
        out.append(((ANTI, k), rho(-k, ANTI)))
    out.append((("split", 2 * r), rho(-2 * r, HOLO) - rho(-2 * r, ANTI)))
    return out


@lru_cache(maxsize=None)
def _boundary_inverse(r: int):
    """Coefficients of each X(b), b in C(r), on the radius-r basis."""
    circ, _, _ = harmonic_measure(r)
    basis = _basis_at_radius(r)
    cols = [reduce_linear(f, r) for _, f in basis]
    cols.append(reduce_linear(X(0, 0), r))
    n = len(circ)
    if len(cols) != n:
        raise ArithmeticError("basis size mismatch")
    mat = [[as_scalar(cols[j][circ[i]]) for j in range(n)] + [ONE if i == t else ZERO for t in range(n)]
           for i in range(n)]
    red, piv = rref(mat, ZERO)
    if piv[:n] != list(range(n)):
        raise ArithmeticError("boundary coordinates of the basis are degenerate")
    inv = {}
    for t, b in enumerate(circ):
        coeffs = {}
        for j, (lab, _) in enumerate(basis):
            c = red[j][n + t]
            if c:
                coeffs[lab] = c
        inv[b] = coeffs
    return inv


def linear_dimension(r: int) -> dict:
    """Exact ranks describing linear fields supported in the ball of radius r.

    ``dim`` is the rank of the boundary coordinates of all X(v), |v|_1 <= r,
    in the quotient by the relation vector of X(0); ``basis_rank`` is the
    rank of the proposed basis in the same quotient.
    """
    circ, interior, _ = harmonic_measure(r)
    rel = reduce_linear(X(0, 0), r)
    rel_row = [as_scalar(rel[b]) for b in circ]

    def quotient_rank(forms) -> int:
        rows = [rel_row] + [[as_scalar(c[b]) for b in circ] for c in forms]
        return len(rref(rows, ZERO)[1]) - 1

    pts = sorted(set(interior) | set(circ))
    dim = quotient_rank([reduce_linear(X(*p), r) for p in pts])
    basis_rank = quotient_rank([reduce_linear(f, r) for _, f in _basis_at_radius(r)])
    return {"r": r, "dim": dim, "basis_rank": basis_rank, "basis_size": 4 * r - 1}


def _split(coeffs: dict) -> dict:
    out: dict = {}
    for lab, c in coeffs.items():
        if lab[0] == "split":
            k = lab[1]
            out[(HOLO, k)] = out.get((HOLO, k), ZERO) + c
            out[(ANTI, k)] = out.get((ANTI, k), ZERO) - c
        else:
            out[lab] = out.get(lab, ZERO) + c
    return {k: v for k, v in out.items() if v}


@lru_cache(maxsize=None)
def _point_to_fock(p: Point) -> tuple:
    """Linear Fock image of X(p) as a tuple of ((chirality, k), coeff)."""
    r = _l1(p)
    if r == 0:
        return ()
    if r > MAX_RADIUS:
        raise ValueError(f"support radius {r} exceeds the exact reduction cap {MAX_RADIUS}")
    inv = _boundary_inverse(r)
    if r == _l1(p) and p in inv:
        return tuple(sorted(_split(inv[p]).items()))
    raise AssertionError("unreachable")


def linear_to_fock(L: FieldPolynomial) -> dict:
    """{(chirality, k): coefficient} with L = sum c a_{-k} 1 modulo null fields."""
    out: dict = {}
    for p, c in L.linear_coeffs().items():
        for lab, v in _point_to_fock(p):
            out[lab] = out.get(lab, ZERO) + c * v
    return {k: v for k, v in out.items() if v}


def _multiply_creation(vec: dict, lin: tuple) -> dict:
    out: dict = {}
    for (l, lb), c in vec.items():
        for (ch, k), v in lin:
            if ch == HOLO:
                key = (tuple(sorted(l + (k,), reverse=True)), lb)
            else:
                key = (l, tuple(sorted(lb + (k,), reverse=True)))
            val = c * v
            prev = out.get(key)
            s = val if prev is None else prev + val
            if s:
                out[key] = s
            else:
                out.pop(key, None)
    return out


def _terms_to_fock(terms: dict) -> dict:
    """Fock image of sum c_m :prod X(m_i): (monomials sorted).

    Factor out the last point, F = c_0 + sum_p Q_p X(p), and recurse on the
    Q_p; this shares the work of common prefixes.
    """
    out: dict = {}
    groups: dict = {}
    for m, c in terms.items():
        if not m:
            out[((), ())] = c
        else:
            groups.setdefault(m[-1], {})[m[:-1]] = c
    for p, sub in groups.items():
        lin = _point_to_fock(p)
        if not lin:
            continue
        part = _multiply_creation(_terms_to_fock(sub), lin)
        for key, v in part.items():
            prev = out.get(key)
            s = v if prev is None else prev + v
            if s:
                out[key] = s
            else:
                out.pop(key, None)
    return out


def to_fock(F: FieldPolynomial) -> FockVector:
    """Canonical Fock vector of the class of F."""
    G = normal_order_inverse(F)
    return FockVector._raw({k: v for k, v in _terms_to_fock(G.terms).items() if v})


def from_fock(v: FockVector) -> FieldPolynomial:
    """Representative sum of :prod rho^{-k} prod rhobar^{-k'}: over basis words."""
    out = FieldPolynomial()
    for (l, lb), c in v.coeffs.items():
        forms = [rho(-k, HOLO) for k in l] + [rho(-k, ANTI) for k in lb]
        out = out + normal_order_product(forms).scale(c)
    return out


def is_null(F: FieldPolynomial) -> bool:
    return to_fock(F).is_zero()


# ---- Virasoro on lattice fields ------------------------------------------------------

class LocalFieldClass:
    def __init__(self, fock: FockVector, representative: Optional[FieldPolynomial] = None):
        self.fock = fock
        self.representative = representative

    def is_zero(self) -> bool:
        return self.fock.is_zero()

    def grading(self) -> list:
        return sorted(self.fock.grades())

    def __eq__(self, other) -> bool:
        return isinstance(other, LocalFieldClass) and self.fock == other.fock

    def __repr__(self) -> str:
        return f"LocalFieldClass({self.fock})"


def lattice_sugawara(n: int, chirality: str, F: FieldPolynomial) -> LocalFieldClass:
    """L_n F built from lattice current modes, truncated by probing."""
    K = truncation_bound(F)
    acc = FieldPolynomial()
    for k in range(0, K):
        w = current_mode_apply(k, chirality, F)
        if w:
            acc = acc + current_mode_apply(n - k, chirality, w)
    for k in range(n - K + 1, 0):
        w = current_mode_apply(n - k, chirality, F)
        if w:
            acc = acc + current_mode_apply(k, chirality, w)
    rep = acc.scale(Fraction(1, 2))
    return LocalFieldClass(to_fock(rep), rep)


def scaling_dimension(F: FieldPolynomial) -> list:
    """[(Delta, Deltabar, component FockVector)] of the class of F."""
    comps = to_fock(F).components()
    return [(d, db, comps[(d, db)]) for d, db in sorted(comps)]


# ---- correlations in discrete domains ------------------------------------------------

def evaluate_correlation(d: DiscreteDomain, bc: str, insertions: Sequence) -> object:
    """E[prod of evaluated insertions] via Wick's formula.

    ``insertions`` is a list of (FieldPolynomial, vertex) with the vertex in
    the unit-scaled coordinates of the domain.  Returns an ExactScalar for
    exact-mode domains and a complex number otherwise.
    """
    bc = bc.upper()[0]
    if bc not in ("D", "N"):
        raise ValueError(f"unsupported boundary condition {bc!r}")
    ins = []
    for F, z in insertions:
        z = tuple(z)
        for p in F.support() | {(0, 0)}:
            q = (z[0] + p[0], z[1] + p[1])
            if q not in d.iset:
                raise ValueError(f"insertion support {q} leaves the domain interior")
        ins.append((F, z))
    exact = d.exact

    def green(a, b):
        if bc == "D":
            return d.dirichlet_column(b).get(a, 0)
        return d.neumann_column(b)[a]

    cov_memo: dict = {}

    def cov(va, vb):
        key = (va, vb) if va <= vb else (vb, va)
        v = cov_memo.get(key)
        if v is None:
            (a, z), (b, w) = key
            g = green(a, b) - green(a, w) - green(z, b) + green(z, w)
            v = (PI * 4) * g if exact else 4 * math.pi * g
            cov_memo[key] = v
        return v

    zero = ZERO if exact else 0.0
    one = ONE if exact else 1.0
    mom_memo: dict = {}

    def moment(vs: tuple):
        if not vs:
            return one
        if len(vs) % 2:
            return zero
        got = mom_memo.get(vs)
        if got is not None:
            return got
        first, rest = vs[0], vs[1:]
        out = zero
        for i, v in enumerate(rest):
            if i and v == rest[i - 1]:
                # identical variables give identical terms
                continue
            mult = rest.count(v)
            c = cov(first, v)
            if c:
                out = out + c * moment(rest[:i] + rest[i + 1:]) * mult
        mom_memo[vs] = out
        return out

    # variables of insertion i: ((z + p), z)
    expanded = []
    for F, z in ins:
        terms = []
        for m, c in F.terms.items():
            vs = tuple(((z[0] + p[0], z[1] + p[1]), z) for p in m if p != (0, 0))
            if len(vs) != len(m):
                continue  # X(0) evaluates to zero
            terms.append((vs, c if exact else c.to_float()))
        expanded.append(terms)
    total = zero
    for combo in itertools.product(*expanded):
        vs = tuple(sorted(v for t in combo for v in t[0]))
        if len(vs) % 2:
            continue
        coeff = one
        for t in combo:
            coeff = coeff * t[1]
        m = moment(vs)
        if m:
            total = total + coeff * m
    return total
