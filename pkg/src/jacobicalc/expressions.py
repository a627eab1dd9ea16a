"""Expression grammar for scalars and graded elements, with canonical rendering.

Grammar (infix, usual precedence):

    scalar   atoms: integers, x1..xN, t, e^{k t}
    graded   atoms: e1..eR (sections), eps1..epsR (dual sections)
    operators: + - * / ^ and parentheses

``*`` multiplies scalars, or a scalar with a graded element.  ``^`` is
integer power between scalars and the wedge product between graded
elements (a graded element to an integer power is a wedge power).  ``/``
is exact division by a nonzero rational constant.

Rendering is canonical: component masks sorted by (degree, index set),
monomials sorted by (total degree, exponents), so equal values render
identically and every rendered string parses back to an equal value.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Union

from .exterior import BundleModel, Coeff, ModelMismatch, MultiVector
from .rings import ExpPoly, Poly, render_exppoly, render_poly

Value = Union[Coeff, MultiVector]


class ParseError(ValueError):
    """Syntax or symbol-resolution error, with position information."""

    def __init__(self, message: str, pos: int | None = None):
        self.pos = pos
        super().__init__(message if pos is None else f"{message} (at position {pos})")


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<exp>e\^\{\s*(?P<k>-?\d+)?\s*\*?\s*t\s*\})
  | (?P<name>eps\d+|e\d+|x\d+|t)
  | (?P<num>\d+)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            kind = m.lastgroup
            if kind == "exp":
                tokens.append(("exp", m.group("k") or "1", pos))
            else:
                tokens.append((kind, m.group(0), pos))
        pos = m.end()
    tokens.append(("end", "", pos))
    return tokens


class _Parser:
    def __init__(self, text: str, model: BundleModel):
        self.tokens = _tokenize(text)
        self.model = model
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, pos = self.advance()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}, found {val!r}", pos)

    # precedence-climbing over + - (10), * / (20), ^ (30)

    def parse_expr(self, min_prec: int = 10) -> Value:
        left = self.parse_unary()
        while True:
            kind, val, pos = self.peek()
            if kind != "op" or val not in "+-*/^":
                return left
            prec = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 30}[val]
            if prec < min_prec:
                return left
            self.advance()
            # ^ is right-associative, the rest left-associative
            right = self.parse_expr(prec if val == "^" else prec + 1)
            left = self.apply(val, left, right, pos)
        return left

    def parse_unary(self) -> Value:
        kind, val, pos = self.peek()
        if kind == "op" and val == "-":
            self.advance()
            operand = self.parse_expr(25)
            return -operand
        if kind == "op" and val == "+":
            self.advance()
            return self.parse_expr(25)
        return self.parse_atom()

    def parse_atom(self) -> Value:
        kind, val, pos = self.advance()
        model = self.model
        if kind == "num":
            return model.const_coeff(int(val))
        if kind == "exp":
            if not model.has_time:
                raise ParseError("exponential bands need a cylinder model (t direction)", pos)
            return ExpPoly.exp_band(model.nvars, model.tvar, int(val))
        if kind == "name":
            if val == "t":
                if not model.has_time:
                    raise ParseError("unknown symbol 't' in a model without a t direction", pos)
                return model.coordinate(model.base_dim)
            if val.startswith("eps"):
                idx = int(val[3:])
                if not 1 <= idx <= model.fiber_rank:
                    raise ParseError(f"unknown symbol {val!r} (rank {model.fiber_rank})", pos)
                return MultiVector.basis(model, idx, dual=True)
            if val.startswith("e"):
                idx = int(val[1:])
                if not 1 <= idx <= model.fiber_rank:
                    raise ParseError(f"unknown symbol {val!r} (rank {model.fiber_rank})", pos)
                return MultiVector.basis(model, idx)
            if val.startswith("x"):
                idx = int(val[1:])
                if not 1 <= idx <= model.base_dim:
                    raise ParseError(f"unknown symbol {val!r} (base dim {model.base_dim})", pos)
                return model.coordinate(idx - 1)
        if kind == "op" and val == "(":
            inner = self.parse_expr()
            self.expect_op(")")
            return inner
        raise ParseError(f"unexpected token {val!r}", pos)

    # -- semantics ----------------------------------------------------

    def apply(self, op: str, a: Value, b: Value, pos: int) -> Value:
        scalar_a = not isinstance(a, MultiVector)
        scalar_b = not isinstance(b, MultiVector)
        if op in "+-":
            if scalar_a and not scalar_b:
                a = MultiVector.function(self.model, a, dual=b.dual)
                scalar_a = False
            if scalar_b and not scalar_a:
                b = MultiVector.function(self.model, b, dual=a.dual)
                scalar_b = False
            try:
                return a + b if op == "+" else a - b
            except ModelMismatch as exc:
                raise ParseError(str(exc), pos)
        if op == "*":
            if scalar_a and scalar_b:
                return a * b
            if scalar_a:
                return b.cmul(a)
            if scalar_b:
                return a.cmul(b)
            raise ParseError("use ^ to wedge graded elements", pos)
        if op == "/":
            if not scalar_b:
                raise ParseError("division only by scalar constants", pos)
            try:
                c = b.constant_value() if isinstance(b, Poly) else b.poly_part().constant_value()
            except ValueError:
                raise ParseError("division only by constants", pos)
            if c == 0:
                raise ParseError("division by zero", pos)
            inv = Fraction(1) / c
            return a.scale(inv) if not scalar_a else a.scale(inv)
        if op == "^":
            n = _as_int(b)
            if n is not None:
                if scalar_a:
                    if n < 0:
                        raise ParseError("negative scalar powers are not supported", pos)
                    return _scalar_pow(a, n)
                acc = MultiVector.one(a.model, a.dual)
                for _ in range(n):
                    acc = acc ^ a
                return acc
            if scalar_a or scalar_b:
                raise ParseError("^ needs an integer exponent or two graded elements", pos)
            try:
                return a ^ b
            except ModelMismatch as exc:
                raise ParseError(str(exc), pos)
        raise ParseError(f"unknown operator {op!r}", pos)


def _as_int(v: Value) -> int | None:
    if isinstance(v, MultiVector):
        return None
    try:
        c = v.constant_value() if isinstance(v, Poly) else v.poly_part().constant_value()
    except ValueError:
        return None
    if c.denominator == 1:
        return int(c)
    return None


def _scalar_pow(v: Coeff, n: int) -> Coeff:
    if isinstance(v, Poly):
        return v**n
    acc = ExpPoly.const(v.nvars, v.tvar, 1)
    for _ in range(n):
        acc = acc * v
    return acc


def parse_scalar(text: str, model: BundleModel) -> Coeff:
    value = parse_value(text, model)
    if isinstance(value, MultiVector):
        raise ParseError("expected a scalar expression, found a graded element")
    return value


def parse_value(text: str, model: BundleModel) -> Value:
    parser = _Parser(text, model)
    value = parser.parse_expr()
    kind, val, pos = parser.peek()
    if kind != "end":
        raise ParseError(f"trailing input {val!r}", pos)
    return value


def parse_element(text: str, model: BundleModel, dual: bool | None = None) -> MultiVector:
    """Parse a graded element; bare scalars become degree-0 elements."""
    value = parse_value(text, model)
    if not isinstance(value, MultiVector):
        value = MultiVector.function(model, value, dual=bool(dual))
    elif dual is not None and value.dual != dual and not value.is_zero():
        raise ParseError("element is of the wrong kind (sections vs dual sections)")
    return value


# -- rendering -----------------------------------------------------------------


def _var_names(model: BundleModel) -> list[str]:
    names = [f"x{i + 1}" for i in range(model.base_dim)]
    if model.has_time:
        names.append("t")
    return names


def render_coeff(c: Coeff, model: BundleModel | None = None) -> str:
    names = _var_names(model) if model is not None else None
    if isinstance(c, Poly):
        return render_poly(c, names)
    return render_exppoly(c, names)


def _needs_parens(rendered: str) -> bool:
    return (" + " in rendered) or (" - " in rendered) or rendered.startswith("-")


def render_element(mv: MultiVector) -> str:
    """Canonical string form: masks sorted by (degree, indices)."""
    if not mv.components:
        return "0"
    model = mv.model
    sym = "eps" if mv.dual else "e"
    chunks = []
    for mask in sorted(mv.components, key=lambda m: (bin(m).count("1"), m)):
        coeff = render_coeff(mv.components[mask], model)
        factors = [f"{sym}{i + 1}" for i in range(model.fiber_rank) if mask & (1 << i)]
        body = "^".join(factors)
        if not body:
            chunk = f"({coeff})" if _needs_parens(coeff) else coeff
        elif coeff == "1":
            chunk = body
        elif coeff == "-1":
            chunk = f"-{body}"
        elif _needs_parens(coeff) or "*" in coeff or "^" in coeff:
            chunk = f"({coeff})*{body}"
        else:
            chunk = f"{coeff}*{body}"
        chunks.append(chunk)
    out = chunks[0]
    for chunk in chunks[1:]:
        out += f" - {chunk[1:]}" if chunk.startswith("-") else f" + {chunk}"
    return out
