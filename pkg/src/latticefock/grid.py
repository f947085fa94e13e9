"""Square grid, its sublattices, discrete derivatives and corner contours.

Points live on the quarter-integer grid and are stored in units of 1/4, so
that the primal, dual, medial, diamond and corner lattices are all exact.
Everything here works at unit mesh.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, NamedTuple, Optional

from .exact_scalar import ExactScalar, ZERO, as_scalar

__all__ = [
    "GridPoint",
    "PRIMAL", "DUAL", "MEDIAL_H", "MEDIAL_V", "CORNER", "OTHER",
    "classify", "is_diamond", "is_medial", "epsilon",
    "LatticeFunction",
    "dee_stencil", "deebar_stencil", "dee_bullet_stencil", "deebar_bullet_stencil",
    "dee", "deebar", "dee_bullet", "deebar_bullet", "laplacian",
    "CornerContour", "rectangle_contour", "centered_square_contour", "contour_integral",
]

PRIMAL = "primal"
DUAL = "dual"
MEDIAL_H = "medial_h"
MEDIAL_V = "medial_v"
CORNER = "corner"
OTHER = "other"

_I = ExactScalar.gaussian(0, 1)
_HALF = Fraction(1, 2)


class GridPoint(NamedTuple):
    qx: int
    qy: int

    @classmethod
    def from_xy(cls, x, y) -> "GridPoint":
        qx, qy = Fraction(x) * 4, Fraction(y) * 4
        if qx.denominator != 1 or qy.denominator != 1:
            raise ValueError(f"({x}, {y}) is not on the quarter grid")
        return cls(int(qx), int(qy))

    @classmethod
    def primal(cls, x: int, y: int) -> "GridPoint":
        return cls(4 * x, 4 * y)

    @property
    def x(self) -> Fraction:
        return Fraction(self.qx, 4)

    @property
    def y(self) -> Fraction:
        return Fraction(self.qy, 4)

    @property
    def kind(self) -> str:
        return classify(self)

    def to_complex(self) -> complex:
        return complex(self.qx / 4, self.qy / 4)

    def to_scalar(self) -> ExactScalar:
        return ExactScalar.gaussian(self.x, self.y)

    def manhattan(self) -> Fraction:
        return Fraction(abs(self.qx) + abs(self.qy), 4)

    def modulus(self) -> float:
        return abs(self.to_complex())

    def shift(self, dqx: int, dqy: int) -> "GridPoint":
        return GridPoint(self.qx + dqx, self.qy + dqy)

    def times_i(self) -> "GridPoint":
        return GridPoint(-self.qy, self.qx)

    def conj(self) -> "GridPoint":
        return GridPoint(self.qx, -self.qy)

    def __neg__(self) -> "GridPoint":
        return GridPoint(-self.qx, -self.qy)

    def __str__(self) -> str:
        return f"({self.x}, {self.y})"


def classify(p: GridPoint) -> str:
    a, b = p.qx % 4, p.qy % 4
    if a == 0 and b == 0:
        return PRIMAL
    if a == 2 and b == 2:
        return DUAL
    if a == 2 and b == 0:
        return MEDIAL_H
    if a == 0 and b == 2:
        return MEDIAL_V
    if a % 2 == 1 and b % 2 == 1:
        return CORNER
    return OTHER


def is_diamond(p: GridPoint) -> bool:
    return classify(p) in (PRIMAL, DUAL)


def is_medial(p: GridPoint) -> bool:
    return classify(p) in (MEDIAL_H, MEDIAL_V)


def epsilon(p: GridPoint) -> int:
    """(-1)^(2 Im p) on the diamond and medial lattices."""
    if p.qy % 2:
        raise ValueError(f"epsilon undefined at {p}")
    return 1 if (p.qy // 2) % 2 == 0 else -1


class LatticeFunction:
    """A memoized function on some sublattice of the quarter grid.

    Either give a callback, or a finite table (zero outside) or both; the
    table takes precedence.
    """

    def __init__(
        self,
        func: Optional[Callable[[GridPoint], ExactScalar]] = None,
        table: Optional[dict] = None,
        domain: str = "union",
    ):
        if func is None and table is None:
            raise ValueError("need a callback or a table")
        self._func = func
        self._table = {GridPoint(*k): as_scalar(v) for k, v in (table or {}).items()}
        self._finite = func is None
        self._memo: dict = {}
        self.domain = domain

    def __call__(self, p: GridPoint) -> ExactScalar:
        v = self._table.get(p)
        if v is not None:
            return v
        if self._finite:
            return ZERO
        v = self._memo.get(p)
        if v is None:
            v = as_scalar(self._func(p))
            self._memo[p] = v
        return v

    def support(self) -> list:
        if not self._finite:
            raise ValueError("callback functions have no declared support")
        return [p for p, v in self._table.items() if v]


# ---- stencils -------------------------------------------------------
# Each stencil is a list of (dqx, dqy, coefficient) relative to the base point.

_H = ExactScalar.gaussian(_HALF)
_IH = ExactScalar.gaussian(0, _HALF)

_DEE = ((2, 0, _H), (-2, 0, -_H), (0, 2, -_IH), (0, -2, _IH))
_DEEBAR = ((2, 0, _H), (-2, 0, -_H), (0, 2, _IH), (0, -2, -_IH))


def dee_stencil(z: GridPoint) -> tuple:
    if not (is_diamond(z) or is_medial(z)):
        raise ValueError(f"dee needs a diamond or medial point, got {z}")
    return _DEE


def deebar_stencil(z: GridPoint) -> tuple:
    if not (is_diamond(z) or is_medial(z)):
        raise ValueError(f"deebar needs a diamond or medial point, got {z}")
    return _DEEBAR


_ONE = as_scalar(1)


def dee_bullet_stencil(z: GridPoint) -> tuple:
    """Primal-graph derivative at an edge midpoint, as (dqx, dqy, coeff)."""
    k = classify(z)
    if k == MEDIAL_H:
        return ((2, 0, _ONE), (-2, 0, -_ONE))
    if k == MEDIAL_V:
        return ((0, 2, -_I), (0, -2, _I))
    raise ValueError(f"dee_bullet needs a medial point, got {z}")


def deebar_bullet_stencil(z: GridPoint) -> tuple:
    k = classify(z)
    if k == MEDIAL_H:
        return ((2, 0, _ONE), (-2, 0, -_ONE))
    if k == MEDIAL_V:
        return ((0, 2, _I), (0, -2, -_I))
    raise ValueError(f"deebar_bullet needs a medial point, got {z}")


def _apply(stencil, f, z: GridPoint) -> ExactScalar:
    out = ZERO
    for dqx, dqy, c in stencil:
        v = f(GridPoint(z.qx + dqx, z.qy + dqy))
        if v:
            out = out + c * v
    return out


def dee(f, z: GridPoint) -> ExactScalar:
    return _apply(dee_stencil(z), f, z)


def deebar(f, z: GridPoint) -> ExactScalar:
    return _apply(deebar_stencil(z), f, z)


def dee_bullet(f, z: GridPoint) -> ExactScalar:
    return _apply(dee_bullet_stencil(z), f, z)


def deebar_bullet(f, z: GridPoint) -> ExactScalar:
    return _apply(deebar_bullet_stencil(z), f, z)


def laplacian(f, z: GridPoint) -> ExactScalar:
    """Unit-step combinatorial Laplacian."""
    out = f(z) * -4
    for dqx, dqy in ((4, 0), (-4, 0), (0, 4), (0, -4)):
        out = out + f(GridPoint(z.qx + dqx, z.qy + dqy))
    return out


# ---- corner contours ------------------------------------------------

class CornerContour:
    """Closed path on the corner lattice, steps of length 1/2.

    ``corners`` lists c_0..c_{l-1}; the closing step back to c_0 is implied.
    """

    def __init__(self, corners: Iterable[GridPoint]):
        cs = [GridPoint(*c) for c in corners]
        if len(cs) < 4:
            raise ValueError("a contour needs at least four corners")
        if len(set(cs)) != len(cs):
            raise ValueError("contour corners must be distinct")
        for c in cs:
            if classify(c) != CORNER:
                raise ValueError(f"{c} is not a corner point")
        for a, b in zip(cs, cs[1:] + cs[:1]):
            if abs(a.qx - b.qx) + abs(a.qy - b.qy) != 2:
                raise ValueError(f"step {a} -> {b} is not a half-unit step")
        self.corners = cs
        area2 = sum(a.qx * b.qy - b.qx * a.qy for a, b in zip(cs, cs[1:] + cs[:1]))
        self.positive = area2 > 0

    def steps(self):
        """Yield (dc as ExactScalar, diamond point, medial point) per step."""
        cs = self.corners
        for a, b in zip(cs, cs[1:] + cs[:1]):
            mx, my = (a.qx + b.qx) // 2, (a.qy + b.qy) // 2
            if a.qy == b.qy:
                p, q = GridPoint(mx, my - 1), GridPoint(mx, my + 1)
            else:
                p, q = GridPoint(mx - 1, my), GridPoint(mx + 1, my)
            dmd, med = (p, q) if is_diamond(p) else (q, p)
            dc = ExactScalar.gaussian(Fraction(b.qx - a.qx, 4), Fraction(b.qy - a.qy, 4))
            yield dc, dmd, med

    def _winding_inside(self, p: GridPoint) -> bool:
        # even-odd ray cast to the right; lattice points never lie on edges
        inside = False
        cs = self.corners
        for a, b in zip(cs, cs[1:] + cs[:1]):
            if a.qx == b.qx and (a.qy > p.qy) != (b.qy > p.qy) and a.qx > p.qx:
                inside = not inside
        return inside

    def bounding_box(self):
        xs = [c.qx for c in self.corners]
        ys = [c.qy for c in self.corners]
        return min(xs), max(xs), min(ys), max(ys)

    def interior(self, kinds=(PRIMAL, DUAL, MEDIAL_H, MEDIAL_V)) -> list:
        x0, x1, y0, y1 = self.bounding_box()
        out = []
        for qx in range(x0 + 1, x1, 2):
            if qx % 2:
                continue
            for qy in range(y0 + 1, y1, 2):
                if qy % 2:
                    continue
                p = GridPoint(qx, qy)
                if classify(p) in kinds and self._winding_inside(p):
                    out.append(p)
        return out

    def interior_diamond(self) -> list:
        return self.interior((PRIMAL, DUAL))

    def interior_medial(self) -> list:
        return self.interior((MEDIAL_H, MEDIAL_V))

    def interior_primal(self) -> list:
        return self.interior((PRIMAL,))

    def interior_flood(self) -> set:
        """Interior of the contour by flood fill on the half-integer grid."""
        x0, x1, y0, y1 = self.bounding_box()
        # walls: crossing from p to a neighbor p' crosses a step iff its midpoint
        # is a step midpoint
        walls = set()
        cs = self.corners
        for a, b in zip(cs, cs[1:] + cs[:1]):
            walls.add(((a.qx + b.qx) // 2, (a.qy + b.qy) // 2))
        lo_x, hi_x = x0 - 3, x1 + 3
        lo_y, hi_y = y0 - 3, y1 + 3
        start = GridPoint(lo_x - lo_x % 2, lo_y - lo_y % 2)
        seen = {start}
        stack = [start]
        while stack:
            p = stack.pop()
            for dx, dy in ((2, 0), (-2, 0), (0, 2), (0, -2)):
                q = GridPoint(p.qx + dx, p.qy + dy)
                if not (lo_x - 2 <= q.qx <= hi_x + 2 and lo_y - 2 <= q.qy <= hi_y + 2):
                    continue
                if q in seen or ((p.qx + q.qx) // 2, (p.qy + q.qy) // 2) in walls:
                    continue
                seen.add(q)
                stack.append(q)
        inside = set()
        for qx in range(x0 + 1, x1):
            for qy in range(y0 + 1, y1):
                if qx % 2 == 0 and qy % 2 == 0 and GridPoint(qx, qy) not in seen:
                    inside.add(GridPoint(qx, qy))
        return inside


def rectangle_contour(x0: Fraction, x1: Fraction, y0: Fraction, y1: Fraction) -> CornerContour:
    """Positively oriented rectangle with corners at the given coordinates.

    Coordinates must be odd multiples of 1/4.
    """
    qx0, qx1 = GridPoint.from_xy(x0, y0).qx, GridPoint.from_xy(x1, y0).qx
    qy0, qy1 = GridPoint.from_xy(x0, y0).qy, GridPoint.from_xy(x0, y1).qy
    if qx1 <= qx0 or qy1 <= qy0:
        raise ValueError("degenerate rectangle")
    cs = []
    for qx in range(qx0, qx1, 2):
        cs.append(GridPoint(qx, qy0))
    for qy in range(qy0, qy1, 2):
        cs.append(GridPoint(qx1, qy))
    for qx in range(qx1, qx0, -2):
        cs.append(GridPoint(qx, qy1))
    for qy in range(qy1, qy0, -2):
        cs.append(GridPoint(qx0, qy))
    return CornerContour(cs)


def centered_square_contour(half: Fraction) -> CornerContour:
    """Square [-half, half]^2 with half an odd multiple of 1/4."""
    half = Fraction(half)
    return rectangle_contour(-half, half, -half, half)


def contour_integral(gamma: CornerContour, f, g, conjugate: bool = False) -> ExactScalar:
    """Sum over steps of dc (or its conjugate) times f(diamond) g(medial)."""
    out = ZERO
    for dc, dmd, med in gamma.steps():
        a = f(dmd)
        if not a:
            continue
        b = g(med)
        if not b:
            continue
        out = out + (dc.conjugate() if conjugate else dc) * a * b
    return out
