"""Multivariate polynomials with exact coefficients, plus monomial orders.

Terms live in a dict from exponent tuples to nonzero FieldElements; the zero
polynomial has an empty term map.  All values are immutable after
construction and safe to share between threads.

Text syntax (parsed and printed): integer or rational coefficients, variable
names matching [a-zA-Z][a-zA-Z0-9_]*, operators + - * ^ and parentheses,
e.g. "x^3 - 2*t + 1/2".  Printing emits terms in descending degrevlex order,
so output is reproducible byte for byte.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from . import _sparse
from .errors import ParseError, RingMismatch
from .fields import FieldDesc, FieldElement

Monomial = tuple[int, ...]


@dataclass(frozen=True)
class MonomialOrder:
    """A term order: lex, degrevlex, or a two-block elimination order.

    For block orders, `split` counts the leading (eliminated) variables;
    both blocks are compared by degrevlex.
    """

    kind: str
    split: int = 0

    def key(self, nvars: int):
        if self.kind == "lex":
            return lambda e: e
        if self.kind == "degrevlex":
            return _sparse.degrevlex_key
        if self.kind == "blockelim":
            if not 1 <= self.split <= nvars:
                raise ValueError(f"block split {self.split} out of range for {nvars} vars")
            s = self.split
            return lambda e: (_sparse.degrevlex_key(e[:s]), _sparse.degrevlex_key(e[s:]))
        raise ValueError(f"unknown order kind {self.kind!r}")

    def __str__(self) -> str:
        return self.kind if self.kind != "blockelim" else f"blockelim({self.split})"


def lex() -> MonomialOrder:
    return MonomialOrder("lex")


def degrevlex() -> MonomialOrder:
    return MonomialOrder("degrevlex")


def block_elim(split: int) -> MonomialOrder:
    return MonomialOrder("blockelim", split=split)


_NAME_RE = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*\Z")


@dataclass(frozen=True)
class PolyRing:
    """A polynomial ring: a coefficient field plus an ordered variable list."""

    field: FieldDesc
    variables: tuple[str, ...]

    def __post_init__(self):
        seen = set()
        for v in self.variables:
            if not _NAME_RE.match(v):
                raise ValueError(f"bad variable name {v!r}")
            if v in seen:
                raise ValueError(f"duplicate variable {v!r}")
            seen.add(v)
        if self.field.kind == "RF" and seen & set(self.field.params):
            raise ValueError("ring variables collide with field parameters")

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise KeyError(f"no variable {name!r} in {self}") from None

    @property
    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    @property
    def one(self) -> "Polynomial":
        return self.const(1)

    def const(self, c) -> "Polynomial":
        if isinstance(c, FieldElement):
            if c.field != self.field:
                raise RingMismatch(f"constant from {c.field} in ring over {self.field}")
        elif isinstance(c, Fraction):
            c = self.field.from_fraction(c)
        else:
            c = self.field.from_int(int(c))
        if c.is_zero():
            return self.zero
        return Polynomial(self, {(0,) * self.nvars: c})

    def var(self, name: str) -> "Polynomial":
        e = tuple(1 if i == self.index(name) else 0 for i in range(self.nvars))
        return Polynomial(self, {e: self.field.one})

    def from_terms(self, terms: dict) -> "Polynomial":
        return Polynomial(self, _sparse.canon(terms))

    def parse(self, text: str) -> "Polynomial":
        return _parse_poly(self, text)

    def __str__(self) -> str:
        return f"{self.field}[{', '.join(self.variables)}]"


class Polynomial:
    """An element of a PolyRing, stored as a canonical sparse term map."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: PolyRing, terms: dict):
        for e in terms:
            if len(e) != ring.nvars:
                raise ValueError("exponent width does not match ring")
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "terms", _sparse.canon(terms))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, *a):
        raise AttributeError("Polynomial is immutable")

    # -- predicates and views -------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant(self) -> FieldElement:
        """The coefficient of the trivial monomial."""
        return self.terms.get((0,) * self.ring.nvars, self.ring.field.zero)

    def total_degree(self) -> int:
        return _sparse.total_degree(self.terms)

    def degree_in(self, name: str) -> int:
        return _sparse.degree_in(self.terms, self.ring.index(name))

    def variables_used(self) -> tuple[str, ...]:
        idx = sorted(_sparse.used_vars(self.terms))
        return tuple(self.ring.variables[i] for i in idx)

    def leading(self, order: MonomialOrder | None = None) -> tuple[Monomial, FieldElement]:
        if self.is_zero():
            raise ValueError("zero polynomial has no leading term")
        order = order or degrevlex()
        return _sparse.leading(self.terms, order.key(self.ring.nvars))

    def leading_monomial(self, order: MonomialOrder | None = None) -> Monomial:
        return self.leading(order)[0]

    def monic(self, order: MonomialOrder | None = None) -> "Polynomial":
        if self.is_zero():
            return self
        _, c = self.leading(order)
        return self * c.inv()

    # -- arithmetic ------------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise RingMismatch(f"mixed rings {self.ring} and {other.ring}")
            return other
        return self.ring.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        return Polynomial(self.ring, _sparse.add(self.terms, other.terms))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.ring, _sparse.neg(self.terms))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        return Polynomial(self.ring, _sparse.mul(self.terms, other.terms))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative exponent")
        result = self.ring.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def derivative(self, name: str) -> "Polynomial":
        return Polynomial(self.ring, _sparse.derivative(self.terms, self.ring.index(name)))

    def map_into(self, ring: PolyRing, rename: dict[str, str] | None = None) -> "Polynomial":
        """Re-express in another ring over the same field; variables map by
        name, optionally renamed first."""
        if ring.field != self.ring.field:
            raise RingMismatch("map_into requires the same coefficient field")
        rename = rename or {}
        out: dict = {}
        for e, c in self.terms.items():
            ne = [0] * ring.nvars
            for i, x in enumerate(e):
                if x:
                    ne[ring.index(rename.get(self.ring.variables[i], self.ring.variables[i]))] = x
            key = tuple(ne)
            out[key] = out.get(key, ring.field.zero) + c
        return Polynomial(ring, out)

    def substitute(self, images: dict[str, "Polynomial"], ring: PolyRing) -> "Polynomial":
        """Evaluate by sending each variable to a polynomial of `ring`.

        Every variable actually used must have an image; the fields agree.
        """
        if ring.field != self.ring.field:
            raise RingMismatch("substitution requires the same coefficient field")
        out = ring.zero
        for e, c in self.terms.items():
            term = ring.const(c)
            for i, x in enumerate(e):
                if x:
                    v = self.ring.variables[i]
                    if v not in images:
                        raise RingMismatch(f"no image for variable {v!r}")
                    term = term * images[v] ** x
            out = out + term
        return out

    # -- identity ---------------------------------------------------------------

    def _key(self):
        return tuple(sorted(self.terms.items()))

    def __eq__(self, other):
        return (isinstance(other, Polynomial) and other.ring == self.ring
                and other.terms == self.terms)

    def __hash__(self):
        h = object.__getattribute__(self, "_hash")
        if h is None:
            h = hash((self.ring, self._key()))
            object.__setattr__(self, "_hash", h)
        return h

    def __str__(self) -> str:
        return render_terms(self.terms, self.ring.variables, self.ring.field)

    def __repr__(self) -> str:
        return f"<{self} in {self.ring}>"


def divrem(f: Polynomial, divisors: list[Polynomial],
           order: MonomialOrder | None = None) -> tuple[list[Polynomial], Polynomial]:
    """Multivariate division with remainder, divisors tried in list order.

    Returns (quotients, remainder) with f == sum(q*d) + r and no remainder
    term divisible by any divisor's leading monomial.
    """
    order = order or degrevlex()
    ring = f.ring
    for d in divisors:
        if d.ring != ring:
            raise RingMismatch("divisor from a different ring")
        if d.is_zero():
            raise ValueError("zero divisor in division")
    key = order.key(ring.nvars)
    quots, rem = _sparse.divrem(f.terms, [d.terms for d in divisors], key)
    return [Polynomial(ring, q) for q in quots], Polynomial(ring, rem)


# -- printing ------------------------------------------------------------------


def _scalar_sign_abs(c: FieldElement) -> tuple[bool, FieldElement]:
    """Split a coefficient into a display sign and its 'absolute value'."""
    f = c.field
    if f.kind == "Q":
        if c.value < 0:
            return True, FieldElement(f, -c.value)
        return False, c
    if f.kind == "Fp":
        return False, c
    num = c.value[0]
    if num:
        lead = max(dict(num), key=_sparse.degrevlex_key)
        lc = dict(num)[lead]
        neg, _ = _scalar_sign_abs(lc)
        if neg:
            return True, -c
    return False, c


def _scalar_str(c: FieldElement, for_product: bool) -> str:
    s = str(c)
    if for_product and (" " in s or "/" in s and c.field.kind == "RF"):
        return f"({s})"
    return s


def _monomial_str(e: Monomial, names: tuple[str, ...]) -> str:
    parts = []
    for i, x in enumerate(e):
        if x == 1:
            parts.append(names[i])
        elif x > 1:
            parts.append(f"{names[i]}^{x}")
    return "*".join(parts)


def render_terms(terms: dict, names: tuple[str, ...], field: FieldDesc) -> str:
    """Canonical text for a term map: descending degrevlex, stable signs."""
    if not terms:
        return "0"
    pieces = []
    for e in sorted(terms, key=_sparse.degrevlex_key, reverse=True):
        neg, a = _scalar_sign_abs(terms[e])
        mono = _monomial_str(e, names)
        if not mono:
            body = _scalar_str(a, for_product=False)
        elif a == field.one:
            body = mono
        else:
            body = f"{_scalar_str(a, for_product=True)}*{mono}"
        pieces.append((neg, body))
    first_neg, first = pieces[0]
    out = ("-" if first_neg else "") + first
    for neg, body in pieces[1:]:
        out += (" - " if neg else " + ") + body
    return out


# -- parsing -------------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([a-zA-Z][a-zA-Z0-9_]*)|([-+*^()/]))")


class _Parser:
    def __init__(self, ring: PolyRing, text: str):
        self.ring = ring
        self.text = text
        self.pos = 0
        self.tokens: list[tuple[str, str]] = []
        while self.pos < len(text):
            m = _TOKEN_RE.match(text, self.pos)
            if not m or m.end() == self.pos:
                if text[self.pos:].strip():
                    raise ParseError(f"bad character {text[self.pos]!r} in polynomial {text!r}")
                break
            self.pos = m.end()
            if m.group(1):
                self.tokens.append(("num", m.group(1)))
            elif m.group(2):
                self.tokens.append(("name", m.group(2)))
            else:
                self.tokens.append(("op", m.group(3)))
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def expect_op(self, op: str):
        kind, val = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r} in polynomial {self.text!r}")

    def parse(self) -> Polynomial:
        p = self.expr()
        if self.peek()[0] is not None:
            raise ParseError(f"trailing input in polynomial {self.text!r}")
        return p

    def expr(self) -> Polynomial:
        kind, val = self.peek()
        negate = False
        if kind == "op" and val in "+-":
            self.take()
            negate = val == "-"
        p = self.term()
        if negate:
            p = -p
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                q = self.term()
                p = p - q if val == "-" else p + q
            else:
                return p

    def term(self) -> Polynomial:
        p = self.factor()
        while True:
            kind, val = self.peek()
            if kind == "op" and val == "*":
                self.take()
                p = p * self.factor()
            elif kind == "op" and val == "/":
                self.take()
                q = self.factor()
                if not q.is_constant() or q.is_zero():
                    raise ParseError(f"division only by nonzero constants in {self.text!r}")
                p = p * self.ring.const(q.constant().inv())
            else:
                return p

    def factor(self) -> Polynomial:
        kind, val = self.take()
        if kind == "op" and val == "-":
            return -self.factor()
        if kind == "num":
            base = self.ring.const(int(val))
        elif kind == "name":
            if val not in self.ring.variables:
                if self.ring.field.kind == "RF" and val in self.ring.field.params:
                    base = self.ring.const(self.ring.field.param(val))
                else:
                    raise ParseError(f"unknown variable {val!r} in polynomial {self.text!r}")
            else:
                base = self.ring.var(val)
        elif kind == "op" and val == "(":
            base = self.expr()
            self.expect_op(")")
        else:
            raise ParseError(f"unexpected token in polynomial {self.text!r}")
        kind, val = self.peek()
        if kind == "op" and val == "^":
            self.take()
            k, v = self.take()
            if k != "num":
                raise ParseError(f"exponent must be a number in {self.text!r}")
            return base ** int(v)
        return base


def _parse_poly(ring: PolyRing, text: str) -> Polynomial:
    if not text.strip():
        raise ParseError("empty polynomial")
    return _Parser(ring, text).parse()
