"""Exact scalars: Gaussian rationals tensored with Laurent polynomials in pi.

A scalar is stored as a sorted tuple of ``(k, re, im)`` triples meaning
``sum_k (re + i*im) * pi**k``.  Zero coefficients are never stored, so
structural equality is mathematical equality.
"""
from __future__ import annotations

import json
import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Union

__all__ = ["ExactScalar", "ZERO", "ONE", "I", "PI", "as_scalar"]

Number = Union["ExactScalar", int, Fraction]


_ZF = Fraction(0)


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {x!r} to an exact rational")


class ExactScalar:
    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Iterable[tuple[int, Fraction, Fraction]] = ()):
        acc: dict[int, list] = {}
        for k, re, im in terms:
            slot = acc.get(k)
            if slot is None:
                acc[k] = [_frac(re), _frac(im)]
            else:
                slot[0] += re
                slot[1] += im
        self._terms = tuple(
            (k, v[0], v[1]) for k, v in sorted(acc.items()) if v[0] or v[1]
        )
        self._hash = None

    @classmethod
    def _raw(cls, terms: tuple) -> "ExactScalar":
        # terms already normalized and sorted
        obj = object.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def gaussian(cls, re=0, im=0, k: int = 0) -> "ExactScalar":
        re, im = _frac(re), _frac(im)
        if not re and not im:
            return ZERO
        return cls._raw(((k, re, im),))

    @property
    def terms(self) -> tuple:
        return self._terms

    # ---- predicates -------------------------------------------------
    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_gaussian_rational(self) -> bool:
        """True when no power of pi other than pi**0 occurs."""
        return all(k == 0 for k, _, _ in self._terms)

    def pi_exponents(self) -> list[int]:
        return [k for k, _, _ in self._terms]

    def coefficient(self, k: int) -> tuple[Fraction, Fraction]:
        for kk, re, im in self._terms:
            if kk == k:
                return re, im
        return Fraction(0), Fraction(0)

    # ---- arithmetic -------------------------------------------------
    def __add__(self, other: Number) -> "ExactScalar":
        other = as_scalar(other)
        if not other._terms:
            return self
        if not self._terms:
            return other
        acc = {k: (re, im) for k, re, im in self._terms}
        for k, re, im in other._terms:
            if k in acc:
                a, b = acc[k]
                acc[k] = (a + re, b + im)
            else:
                acc[k] = (re, im)
        return ExactScalar._raw(
            tuple((k, a, b) for k, (a, b) in sorted(acc.items()) if a or b)
        )

    __radd__ = __add__

    def __neg__(self) -> "ExactScalar":
        return ExactScalar._raw(tuple((k, -a, -b) for k, a, b in self._terms))

    def __sub__(self, other: Number) -> "ExactScalar":
        return self + (-as_scalar(other))

    def __rsub__(self, other: Number) -> "ExactScalar":
        return as_scalar(other) - self

    def __mul__(self, other: Number) -> "ExactScalar":
        if isinstance(other, (int, Fraction)):
            if not other:
                return ZERO
            return ExactScalar._raw(
                tuple((k, a * other, b * other) for k, a, b in self._terms)
            )
        other = as_scalar(other)
        if not self._terms or not other._terms:
            return ZERO
        acc: dict[int, tuple] = {}
        for k1, a1, b1 in self._terms:
            for k2, a2, b2 in other._terms:
                k = k1 + k2
                # most coefficients are real; skip the zero products
                if not b1 and not b2:
                    re, im = a1 * a2, _ZF
                elif not b1:
                    re, im = (a1 * a2 if a2 else _ZF), a1 * b2
                elif not b2:
                    re, im = (a1 * a2 if a1 else _ZF), b1 * a2
                else:
                    re = a1 * a2 - b1 * b2
                    im = a1 * b2 + b1 * a2
                if len(self._terms) == 1 == len(other._terms):
                    return ExactScalar._raw(((k, re, im),)) if re or im else ZERO
                if k in acc:
                    x, y = acc[k]
                    acc[k] = (x + re, y + im)
                else:
                    acc[k] = (re, im)
        return ExactScalar._raw(
            tuple((k, a, b) for k, (a, b) in sorted(acc.items()) if a or b)
        )

    __rmul__ = __mul__

    def inverse_monomial(self) -> "ExactScalar":
        """Inverse of a single-term scalar c*pi**k; general division is not supported."""
        if len(self._terms) != 1:
            raise ZeroDivisionError(
                "only single-term scalars (c * pi**k) can be inverted"
            )
        k, a, b = self._terms[0]
        n = a * a + b * b
        return ExactScalar._raw(((-k, a / n, -b / n),))

    def __truediv__(self, other: Number) -> "ExactScalar":
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division by zero")
            q = Fraction(1) / other
            return self * q
        return self * as_scalar(other).inverse_monomial()

    def __rtruediv__(self, other: Number) -> "ExactScalar":
        return as_scalar(other) * self.inverse_monomial()

    def __pow__(self, n: int) -> "ExactScalar":
        if not isinstance(n, int):
            raise TypeError("integer exponents only")
        if n < 0:
            return self.inverse_monomial() ** (-n)
        out, base = ONE, self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self) -> "ExactScalar":
        return ExactScalar._raw(tuple((k, a, -b) for k, a, b in self._terms))

    def real(self) -> "ExactScalar":
        return ExactScalar._raw(tuple((k, a, Fraction(0)) for k, a, b in self._terms if a))

    def imag(self) -> "ExactScalar":
        return ExactScalar._raw(tuple((k, b, Fraction(0)) for k, a, b in self._terms if b))

    # ---- comparison / hashing ---------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, ExactScalar):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == as_scalar(other)._terms
        if isinstance(other, complex) or isinstance(other, float):
            return NotImplemented
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._terms)
        return self._hash

    # ---- numeric boundary -------------------------------------------
    def to_float(self) -> complex:
        re = im = 0.0
        for k, a, b in self._terms:
            p = math.pi ** k
            re += float(a) * p
            im += float(b) * p
        return complex(re, im)

    __complex__ = to_float

    # ---- serialization ----------------------------------------------
    def to_json_obj(self) -> list:
        return [{"k": k, "re": str(a), "im": str(b)} for k, a, b in self._terms]

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj: list) -> "ExactScalar":
        return cls((int(t["k"]), Fraction(t["re"]), Fraction(t["im"])) for t in obj)

    @classmethod
    def from_json(cls, s: str) -> "ExactScalar":
        return cls.from_json_obj(json.loads(s))

    # ---- display ----------------------------------------------------
    def __repr__(self) -> str:
        return f"ExactScalar({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for k, a, b in self._terms:
            if a and b:
                c = f"({a}{'+' if b > 0 else '-'}{abs(b)}*i)"
            elif b:
                c = f"{b}*i"
            else:
                c = f"{a}"
            if k == 0:
                parts.append(c)
            elif k == 1:
                parts.append(f"{c}*pi")
            else:
                parts.append(f"{c}*pi^{k}")
        return " + ".join(parts)


def as_scalar(x) -> ExactScalar:
    if isinstance(x, ExactScalar):
        return x
    if isinstance(x, (int, Fraction)):
        if not x:
            return ZERO
        return ExactScalar._raw(((0, Fraction(x), Fraction(0)),))
    if isinstance(x, str):
        return as_scalar(Fraction(x))
    raise TypeError(f"cannot convert {type(x).__name__} to ExactScalar")


ZERO = ExactScalar._raw(())
ONE = ExactScalar._raw(((0, Fraction(1), Fraction(0)),))
I = ExactScalar._raw(((0, Fraction(0), Fraction(1)),))
PI = ExactScalar._raw(((1, Fraction(1), Fraction(0)),))
