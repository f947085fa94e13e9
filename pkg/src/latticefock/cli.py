"""Command line front end and the field / Fock-word expression language.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' INT)?
    atom   := NUMBER | 'pi' | 'i' | 'X' '(' INT ',' INT ')'
            | ('J' | 'Jb') '(' INT ')' | '(' expr ')'

``X`` terms build field polynomials; ``J``/``Jb`` words build Fock vectors by
acting right-to-left on the vacuum.  The two families cannot be mixed.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .exact_scalar import ExactScalar, ONE, ZERO, I, PI, as_scalar

__all__ = ["ParseError", "DomainError", "parse", "to_source", "evaluate", "parse_field",
           "parse_fock", "parse_polynomial", "main", "Num", "Pi", "Imag", "XVar", "Gen",
           "BinOp", "Neg", "Pow"]


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.msg = msg
        self.pos = pos


class DomainError(ValueError):
    pass


# ---- AST --------------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: Fraction
    pos: int = 0

    def __eq__(self, o):
        return isinstance(o, Num) and o.value == self.value

    def __hash__(self):
        return hash(("Num", self.value))


@dataclass(frozen=True)
class Pi:
    pos: int = 0

    def __eq__(self, o):
        return isinstance(o, Pi)

    def __hash__(self):
        return hash("Pi")


@dataclass(frozen=True)
class Imag:
    pos: int = 0

    def __eq__(self, o):
        return isinstance(o, Imag)

    def __hash__(self):
        return hash("Imag")


@dataclass(frozen=True)
class XVar:
    x: int
    y: int
    pos: int = 0

    def __eq__(self, o):
        return isinstance(o, XVar) and (o.x, o.y) == (self.x, self.y)

    def __hash__(self):
        return hash(("X", self.x, self.y))


@dataclass(frozen=True)
class Gen:
    anti: bool
    k: int
    pos: int = 0

    def __eq__(self, o):
        return isinstance(o, Gen) and (o.anti, o.k) == (self.anti, self.k)

    def __hash__(self):
        return hash(("Gen", self.anti, self.k))


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object
    pos: int = 0

    def __eq__(self, o):
        return isinstance(o, BinOp) and (o.op, o.left, o.right) == (self.op, self.left, self.right)

    def __hash__(self):
        return hash(("Bin", self.op, self.left, self.right))


@dataclass(frozen=True)
class Neg:
    arg: object
    pos: int = 0

    def __eq__(self, o):
        return isinstance(o, Neg) and o.arg == self.arg

    def __hash__(self):
        return hash(("Neg", self.arg))


@dataclass(frozen=True)
class Pow:
    base: object
    exp: int
    pos: int = 0

    def __eq__(self, o):
        return isinstance(o, Pow) and (o.base, o.exp) == (self.base, self.exp)

    def __hash__(self):
        return hash(("Pow", self.base, self.exp))


# ---- tokenizer / parser -------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<name>Jb|J|X|pi|i)|(?P<op>[-+*/^(),]))")


def _tokenize(s: str) -> list:
    toks = []
    pos = 0
    n = len(s)
    while pos < n:
        if s[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(s, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {s[pos]!r}", pos)
        start = m.start(m.lastgroup)
        kind = m.lastgroup
        text = m.group(kind)
        if kind == "name" and m.end() < n and (s[m.end()].isalnum() or s[m.end()] == "_"):
            raise ParseError(f"unknown identifier starting with {text!r}", start)
        toks.append((kind, text, start))
        pos = m.end()
    toks.append(("end", "", n))
    return toks


class _Parser:
    def __init__(self, s: str):
        self.toks = _tokenize(s)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, text: Optional[str] = None):
        t = self.toks[self.i]
        if text is not None and t[1] != text:
            raise ParseError(f"expected {text!r}, found {t[1] or 'end of input'!r}", t[2])
        self.i += 1
        return t

    def parse(self):
        e = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ParseError(f"unexpected token {t[1]!r}", t[2])
        _family(e)
        return e

    def expr(self):
        e = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()
            r = self.term()
            e = BinOp(op[1], e, r, op[2])
        return e

    def term(self):
        e = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()
            r = self.unary()
            e = BinOp(op[1], e, r, op[2])
        return e

    def unary(self):
        t = self.peek()
        if t[1] == "-" and t[0] == "op":
            self.take()
            return Neg(self.unary(), t[2])
        if t[1] == "+" and t[0] == "op":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        b = self.atom()
        if self.peek()[1] == "^":
            t = self.take()
            e = self.take()
            if e[0] != "num" or "." in e[1]:
                raise ParseError("exponent must be a non-negative integer", e[2])
            return Pow(b, int(e[1]), t[2])
        return b

    def _int(self) -> int:
        sign = 1
        t = self.peek()
        if t[1] in ("-", "+"):
            self.take()
            sign = -1 if t[1] == "-" else 1
        t = self.take()
        if t[0] != "num" or "." in t[1]:
            raise ParseError("expected an integer", t[2])
        return sign * int(t[1])

    def atom(self):
        t = self.take()
        kind, text, pos = t
        if kind == "num":
            try:
                return Num(Fraction(text), pos)
            except (ValueError, ZeroDivisionError):
                raise ParseError(f"malformed rational {text!r}", pos)
        if kind == "name":
            if text == "pi":
                return Pi(pos)
            if text == "i":
                return Imag(pos)
            self.take("(")
            if text == "X":
                a = self._int()
                self.take(",")
                b = self._int()
                self.take(")")
                return XVar(a, b, pos)
            k = self._int()
            self.take(")")
            return Gen(text == "Jb", k, pos)
        if text == "(":
            e = self.expr()
            self.take(")")
            return e
        raise ParseError(f"unexpected token {text or 'end of input'!r}", pos)


def _family(e) -> Optional[str]:
    """'field', 'fock' or None (pure scalar); raises on mixing."""
    if isinstance(e, (Num, Pi, Imag)):
        return None
    if isinstance(e, XVar):
        return "field"
    if isinstance(e, Gen):
        return "fock"
    if isinstance(e, Neg):
        return _family(e.arg)
    if isinstance(e, Pow):
        return _family(e.base)
    if isinstance(e, BinOp):
        a, b = _family(e.left), _family(e.right)
        if a and b and a != b:
            raise ParseError("cannot mix X(...) field terms with J/Jb Fock words", _first_pos(e.right, b))
        if e.op == "/" and b:
            raise ParseError("division only by scalars", e.pos)
        return a or b
    raise TypeError(e)


def _first_pos(e, fam: str) -> int:
    if isinstance(e, XVar) and fam == "field" or isinstance(e, Gen) and fam == "fock":
        return e.pos
    for child in (getattr(e, "left", None), getattr(e, "right", None),
                  getattr(e, "arg", None), getattr(e, "base", None)):
        if child is not None and _family(child) == fam:
            return _first_pos(child, fam)
    return e.pos


def parse(s: str):
    return _Parser(s).parse()


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def to_source(e, parent: int = 0) -> str:
    """Render an AST back to the expression language."""
    if isinstance(e, Num):
        v = e.value
        s = str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
        return f"({s})" if v.denominator != 1 and parent >= 2 else s
    if isinstance(e, Pi):
        return "pi"
    if isinstance(e, Imag):
        return "i"
    if isinstance(e, XVar):
        return f"X({e.x},{e.y})"
    if isinstance(e, Gen):
        return f"{'Jb' if e.anti else 'J'}({e.k})"
    if isinstance(e, Neg):
        return f"-{to_source(e.arg, 3)}" if parent < 3 else f"(-{to_source(e.arg, 3)})"
    if isinstance(e, Pow):
        b = to_source(e.base, 4)
        # the grammar has no chained powers
        return f"({b})^{e.exp}" if isinstance(e.base, Pow) else f"{b}^{e.exp}"
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        s = f"{to_source(e.left, p)}{e.op}{to_source(e.right, p + 1)}"
        return f"({s})" if p < parent else s
    raise TypeError(e)


# ---- evaluation --------------------------------------------------------------------

def evaluate(e):
    """ExactScalar, FieldPolynomial or FockVector depending on the family."""
    from .fock_algebra import ANTI, HOLO, apply_word, vacuum, FockVector
    from .local_fields import FieldPolynomial, X

    fam = _family(e)

    def words(node) -> dict:
        # operator polynomial: {tuple of (k, chirality): ExactScalar}
        if isinstance(node, (Num, Pi, Imag)):
            return {(): scalar(node)}
        if isinstance(node, Gen):
            return {((node.k, ANTI if node.anti else HOLO),): ONE}
        if isinstance(node, Neg):
            return {w: -c for w, c in words(node.arg).items()}
        if isinstance(node, Pow):
            out = {(): ONE}
            for _ in range(node.exp):
                out = _wmul(out, words(node.base))
            return out
        if isinstance(node, BinOp):
            if node.op in "+-":
                a, b = words(node.left), words(node.right)
                out = dict(a)
                for w, c in b.items():
                    out[w] = out.get(w, ZERO) + (c if node.op == "+" else -c)
                return out
            if node.op == "*":
                return _wmul(words(node.left), words(node.right))
            d = scalar(node.right)
            inv = _scalar_inverse(d, node.pos)
            return {w: c * inv for w, c in words(node.left).items()}
        raise TypeError(node)

    def scalar(node) -> ExactScalar:
        if isinstance(node, Num):
            return as_scalar(node.value)
        if isinstance(node, Pi):
            return PI
        if isinstance(node, Imag):
            return I
        if isinstance(node, Neg):
            return -scalar(node.arg)
        if isinstance(node, Pow):
            return scalar(node.base) ** node.exp
        if isinstance(node, BinOp):
            a, b = scalar(node.left), scalar(node.right)
            if node.op == "+":
                return a + b
            if node.op == "-":
                return a - b
            if node.op == "*":
                return a * b
            return a * _scalar_inverse(b, node.pos)
        raise TypeError(node)

    def poly(node):
        if isinstance(node, (Num, Pi, Imag)):
            return FieldPolynomial.constant(scalar(node))
        if isinstance(node, XVar):
            return X(node.x, node.y)
        if isinstance(node, Neg):
            return -poly(node.arg)
        if isinstance(node, Pow):
            return poly(node.base) ** node.exp
        if isinstance(node, BinOp):
            if node.op == "+":
                return poly(node.left) + poly(node.right)
            if node.op == "-":
                return poly(node.left) - poly(node.right)
            if node.op == "*":
                return poly(node.left) * poly(node.right)
            return poly(node.left).scale(_scalar_inverse(scalar(node.right), node.pos))
        raise TypeError(node)

    if fam is None:
        return scalar(e)
    if fam == "field":
        return poly(e)
    out = FockVector()
    for w, c in words(e).items():
        if c:
            out = out + apply_word(w, vacuum()).scale(c)
    return out


def _wmul(a: dict, b: dict) -> dict:
    out: dict = {}
    for w1, c1 in a.items():
        for w2, c2 in b.items():
            w = w1 + w2
            out[w] = out.get(w, ZERO) + c1 * c2
    return out


def _scalar_inverse(d: ExactScalar, pos: int) -> ExactScalar:
    if not d:
        raise ParseError("division by zero", pos)
    if len(d.terms) != 1:
        raise ParseError("division only by a single power of pi times a Gaussian rational", pos)
    return d.inverse_monomial()


def parse_field(s: str):
    return evaluate(parse(s))


def parse_fock(s: str):
    from .fock_algebra import FockVector, vacuum
    v = parse_field(s)
    if isinstance(v, ExactScalar):
        return vacuum().scale(v)
    if not isinstance(v, FockVector):
        raise ParseError("expected a J/Jb Fock expression", 0)
    return v


def parse_polynomial(s: str):
    from .local_fields import FieldPolynomial
    v = parse_field(s)
    if isinstance(v, ExactScalar):
        return FieldPolynomial.constant(v)
    if not isinstance(v, FieldPolynomial):
        raise ParseError("expected an X(...) field polynomial", 0)
    return v


# ---- commands -----------------------------------------------------------------------

def _point(s: str) -> complex:
    try:
        a, b = s.split(",")
        return complex(float(a), float(b))
    except ValueError:
        raise DomainError(f"malformed point {s!r}; expected x,y")


def _emit(args, payload) -> None:
    text = payload if isinstance(payload, str) else json.dumps(payload, default=str)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text + ("\n" if not text.endswith("\n") else ""))
    else:
        print(text)


def _cmd_monomial(args):
    from .monomials import monomial, exact_to_complex
    from .grid import GridPoint
    t = monomial(args.n)
    rows = []
    r = args.radius
    for hy in range(-2 * r, 2 * r + 1):
        for hx in range(-2 * r, 2 * r + 1):
            p = GridPoint(2 * hx, 2 * hy)
            v = t(p)
            z = exact_to_complex(v)
            rows.append({"x": str(Fraction(hx, 2)), "y": str(Fraction(hy, 2)), "value": str(v),
                         "float": [z.real, z.imag]})
    out = {"n": args.n, "values": rows}
    if args.validate:
        from .monomials import validate
        out["validation"] = validate(args.n, radius=max(r, 4))
    _emit(args, out)


def _cmd_residue(args):
    from .monomials import residue_contour, monomial
    from .grid import contour_integral
    from .exact_scalar import ExactScalar as ES
    m = args.max
    gamma = residue_contour(Fraction(4 * (m // 2 + 2) + 1, 4))
    fails = []
    scale = ES([(-1, Fraction(0), Fraction(-1, 2))])  # 1/(2 pi i)
    for a in range(-m, m + 1):
        for b in range(-m, m + 1):
            v = contour_integral(gamma, monomial(a), monomial(b)) * scale
            want = ONE if a + b + 1 == 0 else ZERO
            if v != want:
                fails.append({"n": a, "m": b, "value": str(v)})
    _emit(args, {"max": m, "pass": not fails, "failures": fails})
    return 0 if not fails else 1


def _lattice_domain(args):
    from .greens import build_domain
    return build_domain(args.domain, args.mesh)


def _vertex(d, s: str) -> tuple:
    z = _point(s)
    if d.name.startswith("ball"):
        return (int(round(z.real)), int(round(z.imag)))
    return d.nearest_vertex(z)


def _cmd_green(args):
    from .greens import dirichlet_green, neumann_green
    d = _lattice_domain(args)
    zs, ws = args.at if args.at else (args.z, args.w)
    if zs is None or ws is None:
        raise DomainError("green needs two points (--at Z W or --z/--w)")
    z, w = _vertex(d, zs), _vertex(d, ws)
    bc = args.bc.upper()[0]
    v = dirichlet_green(d, z, w) if bc == "D" else neumann_green(d, z, w)
    _emit(args, {"domain": d.name, "bc": bc, "z": list(z), "w": list(w), "exact": d.exact,
                 "value": str(v), "float": float(v)})


def _cmd_fock(args):
    from .fock_algebra import is_primary, sugawara_L, HOLO, ANTI
    v = parse_fock(args.expr)
    out = {"vector": str(v), "json": v.to_json_obj(), "grades": sorted(v.grades())}
    if args.check_primary:
        rep = is_primary(v, args.max_mode)
        out.update({"primary": rep.primary, "weights": rep.weights, "reason": rep.reason})
    if args.L is not None:
        w = sugawara_L(args.L, ANTI if args.anti else HOLO, v)
        out["L"] = {"n": args.L, "anti": args.anti, "vector": str(w)}
    _emit(args, out)


def _cmd_fock_expand(args):
    from .local_fields import to_fock
    v = to_fock(parse_polynomial(args.expr))
    _emit(args, {"vector": str(v), "json": v.to_json_obj(), "grades": sorted(v.grades())})


def _cmd_represent(args):
    from .local_fields import from_fock
    F = from_fock(parse_fock(args.expr))
    _emit(args, {"polynomial": str(F), "json": F.to_json_obj()})


def _cmd_is_null(args):
    from .local_fields import is_null
    _emit(args, {"null": is_null(parse_polynomial(args.expr))})


def _insertions(args, want: str):
    if len(args.field) != len(args.at):
        raise DomainError("each --field needs a matching --at")
    return list(zip(args.field, args.at))


def _cmd_correlate(args):
    from .fock_algebra import FockVector
    from .local_fields import evaluate_correlation, from_fock
    d = _lattice_domain(args)
    ins = []
    for f, at in _insertions(args, "field"):
        v = parse_field(f)
        if isinstance(v, FockVector):
            v = from_fock(v)
        elif isinstance(v, ExactScalar):
            v = parse_polynomial(f)
        ins.append((v, _vertex(d, at)))
    val = evaluate_correlation(d, args.bc, ins)
    if isinstance(val, ExactScalar):
        z = val.to_float()
        _emit(args, {"exact": str(val), "float": [z.real, z.imag]})
    else:
        _emit(args, {"float": [val.real, val.imag]})


def _cmd_cft(args):
    from . import cft
    dom = cft.domain(args.domain)
    ins = [(parse_fock(f), _point(at)) for f, at in _insertions(args, "fock")]
    val = cft.cft_correlation(dom, args.bc, ins, M=args.nodes)
    _emit(args, {"domain": dom.tag, "bc": args.bc, "value": [val.real, val.imag]})


def _cmd_sweep(args):
    import io
    from .scaling import load_config, run_sweep, write_csv
    cfg = load_config(args.config, parse_fock)
    if args.out:
        cfg.output = args.out
    rows = run_sweep(cfg)
    if not cfg.output:
        buf = io.StringIO()
        write_csv(rows, buf)
        sys.stdout.write(buf.getvalue())


def _cmd_dimensions(args):
    from .local_fields import linear_dimension
    rows = [linear_dimension(r) for r in range(1, args.max_r + 1)]
    lines = ["r,dim,expected"] + [f"{t['r']},{t['dim']},{t['basis_size']}" for t in rows]
    _emit(args, "\n".join(lines))
    return 0 if all(t["dim"] == t["basis_size"] == t["basis_rank"] for t in rows) else 1


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="latticefock", description="Local fields of the discrete GFF")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--out", help="write output to a file instead of stdout")
        p.set_defaults(fn=fn)
        return p

    p = add("monomial", _cmd_monomial, "tabulate a discrete monomial u^[n]")
    p.add_argument("--order", "--n", dest="n", type=int, required=True)
    p.add_argument("--radius", type=int, default=2)
    p.add_argument("--validate", action="store_true", help="include the validation report")
    p = add("residue-check", _cmd_residue, "verify the exact residue identity")
    p.add_argument("--max", type=int, default=6)
    p = add("green", _cmd_green, "lattice Green's function")
    p.add_argument("--domain", "--family", dest="domain", default="ball(3)")
    p.add_argument("--mesh", type=int, default=0)
    p.add_argument("--bc", default="D")
    p.add_argument("--at", nargs=2, metavar=("Z", "W"), help="the two points as x,y")
    p.add_argument("--z")
    p.add_argument("--w")
    p = add("fock", _cmd_fock, "inspect a Fock vector")
    p.add_argument("expr")
    p.add_argument("--check-primary", action="store_true")
    p.add_argument("--max-mode", type=int, default=0)
    p.add_argument("--L", type=int, default=None, help="apply the Sugawara L_n")
    p.add_argument("--anti", action="store_true")
    p = add("fock-expand", _cmd_fock_expand, "Fock vector of a field polynomial")
    p.add_argument("expr")
    p = add("represent", _cmd_represent, "field polynomial representing a Fock vector")
    p.add_argument("expr")
    p = add("is-null", _cmd_is_null, "decide whether a field polynomial is null")
    p.add_argument("expr")
    for name, fn, help_ in (("correlate", _cmd_correlate, "lattice correlation"),
                            ("cft", _cmd_cft, "continuum correlation")):
        p = add(name, fn, help_)
        p.add_argument("--domain", default="disk")
        p.add_argument("--bc", default="D")
        p.add_argument("--field", action="append", default=[])
        p.add_argument("--at", action="append", default=[])
        if name == "correlate":
            p.add_argument("--mesh", type=int, default=32)
        else:
            p.add_argument("--nodes", type=int, default=64)
    p = add("sweep", _cmd_sweep, "mesh-refinement sweep from a JSON config")
    p.add_argument("--config", required=True)
    p = add("dimensions", _cmd_dimensions, "dimensions of linear fields by radius")
    p.add_argument("--max-r", type=int, default=5)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = _parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    # points like -0.4,0 would otherwise be read as option flags
    argv = [" " + a if re.match(r"^-\d", a) else a for a in argv]
    args = ap.parse_args(argv)
    try:
        rc = args.fn(args)
    except ParseError as e:
        print(json.dumps({"error": "parse", "message": e.msg, "position": e.pos}), file=sys.stderr)
        return 2
    except (DomainError, ValueError, ArithmeticError) as e:
        print(json.dumps({"error": "domain", "message": str(e)}), file=sys.stderr)
        return 1
    return rc or 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
