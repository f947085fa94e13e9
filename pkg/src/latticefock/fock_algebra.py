"""Two commuting Heisenberg algebras acting on their (chargeless) Fock space.

Basis vectors are a_{-lam} abar_{-lambar} 1, indexed by pairs of partitions
stored as weakly decreasing tuples.  The central elements act as 1 and the
Sugawara Virasoro operators have central charge 1.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

from .exact_scalar import ExactScalar, ONE, as_scalar

__all__ = [
    "HOLO", "ANTI", "Partition", "FockVector", "vacuum", "partitions",
    "basis", "heisenberg_apply", "apply_word", "sugawara_L", "is_primary",
    "PrimaryReport", "creation_word",
]

HOLO = "holo"
ANTI = "anti"

Partition = tuple  # weakly decreasing positive integers


def _norm_part(parts: Iterable[int]) -> Partition:
    p = tuple(sorted((int(x) for x in parts), reverse=True))
    if any(x <= 0 for x in p):
        raise ValueError("partition parts must be positive")
    return p


def partitions(n: int, max_part: Optional[int] = None) -> Iterator[Partition]:
    """All partitions of n, parts weakly decreasing."""
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    for k in range(min(n, max_part), 0, -1):
        for rest in partitions(n - k, k):
            yield (k,) + rest


class FockVector:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Optional[dict] = None):
        out = {}
        for (lam, lamb), c in (coeffs or {}).items():
            c = as_scalar(c)
            if c:
                key = (_norm_part(lam), _norm_part(lamb))
                prev = out.get(key)
                c = c if prev is None else prev + c
                if c:
                    out[key] = c
                else:
                    out.pop(key, None)
        self.coeffs = out

    @classmethod
    def _raw(cls, coeffs: dict) -> "FockVector":
        v = object.__new__(cls)
        v.coeffs = coeffs
        return v

    @classmethod
    def basis_vector(cls, lam=(), lamb=(), c=ONE) -> "FockVector":
        return cls({(tuple(lam), tuple(lamb)): c})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __add__(self, other: "FockVector") -> "FockVector":
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            p = out.get(k)
            s = c if p is None else p + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return FockVector._raw(out)

    def __neg__(self) -> "FockVector":
        return FockVector._raw({k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other: "FockVector") -> "FockVector":
        return self + (-other)

    def scale(self, c) -> "FockVector":
        c = as_scalar(c)
        if not c:
            return FockVector()
        return FockVector._raw({k: v * c for k, v in self.coeffs.items()})

    def __mul__(self, c) -> "FockVector":
        return self.scale(c)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, FockVector) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def grades(self) -> set:
        return {(sum(l), sum(lb)) for l, lb in self.coeffs}

    def components(self) -> dict:
        """Split by bigrade (Delta, Deltabar)."""
        out: dict = {}
        for (l, lb), c in self.coeffs.items():
            out.setdefault((sum(l), sum(lb)), {})[(l, lb)] = c
        return {g: FockVector._raw(d) for g, d in out.items()}

    def __repr__(self) -> str:
        return f"FockVector({self})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for (l, lb), c in sorted(self.coeffs.items()):
            word = "*".join([f"J(-{k})" for k in l] + [f"Jb(-{k})" for k in lb]) or "1"
            parts.append(f"({c})*{word}")
        return " + ".join(parts)

    def to_json_obj(self) -> list:
        return [{"holo": list(l), "anti": list(lb), "coeff": c.to_json_obj()}
                for (l, lb), c in sorted(self.coeffs.items())]

    @classmethod
    def from_json_obj(cls, obj: list) -> "FockVector":
        return cls({(tuple(t["holo"]), tuple(t["anti"])): ExactScalar.from_json_obj(t["coeff"])
                    for t in obj})


def vacuum() -> FockVector:
    return FockVector._raw({((), ()): ONE})


def basis(max_grade: int) -> list:
    """All basis keys (lam, lambar) with total grade <= max_grade."""
    out = []
    for total in range(max_grade + 1):
        for a in range(total + 1):
            for l in partitions(a):
                for lb in partitions(total - a):
                    out.append((l, lb))
    return out


def _act_on_partition(k: int, lam: Partition) -> Optional[tuple]:
    """Return (multiplier, new partition) for a_k on a_{-lam} 1, or None."""
    if k == 0:
        return None
    if k < 0:
        return 1, tuple(sorted(lam + (-k,), reverse=True))
    m = lam.count(k)
    if not m:
        return None
    i = lam.index(k)
    return k * m, lam[:i] + lam[i + 1:]


def heisenberg_apply(k: int, chirality: str, v: FockVector) -> FockVector:
    if chirality not in (HOLO, ANTI):
        raise ValueError(f"unknown chirality {chirality!r}")
    if k == 0:
        return FockVector()
    out: dict = {}
    for (l, lb), c in v.coeffs.items():
        r = _act_on_partition(k, l if chirality == HOLO else lb)
        if r is None:
            continue
        mult, p = r
        key = (p, lb) if chirality == HOLO else (l, p)
        val = c * mult
        prev = out.get(key)
        val = val if prev is None else prev + val
        if val:
            out[key] = val
        else:
            out.pop(key, None)
    return FockVector._raw(out)


def apply_word(word: Sequence, v: Optional[FockVector] = None) -> FockVector:
    """Apply [(k, chirality), ...] right-to-left (last letter acts first)."""
    v = vacuum() if v is None else v
    for k, ch in reversed(list(word)):
        v = heisenberg_apply(k, ch, v)
    return v


def creation_word(lam: Sequence[int] = (), lamb: Sequence[int] = ()) -> FockVector:
    return FockVector.basis_vector(_norm_part(lam), _norm_part(lamb))


def _chiral_grade(v: FockVector, chirality: str) -> int:
    if not v.coeffs:
        return 0
    return max(sum(l if chirality == HOLO else lb) for l, lb in v.coeffs)


def sugawara_L(n: int, chirality: str, v: FockVector) -> FockVector:
    """L_n = 1/2 (sum_{k>=0} a_{n-k} a_k + sum_{k<0} a_k a_{n-k}), truncated by grade."""
    out = FockVector()
    # work per basis vector so the truncation depends on its own grade
    for key, c in v.coeffs.items():
        b = FockVector._raw({key: c})
        g = sum(key[0] if chirality == HOLO else key[1])
        acc = FockVector()
        for k in range(0, g + 1):
            w = heisenberg_apply(k, chirality, b)
            if w:
                acc = acc + heisenberg_apply(n - k, chirality, w)
        for k in range(min(n - g, 0), 0):
            w = heisenberg_apply(n - k, chirality, b)
            if w:
                acc = acc + heisenberg_apply(k, chirality, w)
        out = out + acc
    return out.scale(Fraction(1, 2))


class PrimaryReport:
    def __init__(self, primary: bool, weights: Optional[tuple], reason: str = ""):
        self.primary = primary
        self.weights = weights
        self.reason = reason

    def __bool__(self) -> bool:
        return self.primary

    def __repr__(self) -> str:
        return f"PrimaryReport(primary={self.primary}, weights={self.weights}, reason={self.reason!r})"


def is_primary(v: FockVector, max_mode: int = 0) -> PrimaryReport:
    if not v:
        return PrimaryReport(False, None, "zero vector")
    gr = v.grades()
    if len(gr) != 1:
        return PrimaryReport(False, None, f"not homogeneous: grades {sorted(gr)}")
    (d, db), = gr
    top = max(d + db, max_mode, 1)
    for n in range(1, top + 1):
        for ch in (HOLO, ANTI):
            w = sugawara_L(n, ch, v)
            if w:
                name = "L" if ch == HOLO else "Lbar"
                return PrimaryReport(False, (d, db), f"{name}_{n} v = {w}")
    return PrimaryReport(True, (d, db))
