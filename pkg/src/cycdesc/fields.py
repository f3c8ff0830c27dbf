"""Coefficient fields: rationals, prime fields, and one rational-function layer.

A FieldDesc names a field; a FieldElement pairs a FieldDesc with a canonical
value.  Canonical forms are unique, so equality is representational:

  * rationals       -- a reduced Fraction (positive denominator),
  * prime field     -- an int in [0, p),
  * function field  -- a reduced fraction of parameter polynomials with a
                       monic (degrevlex) denominator.

Function-field towers are capped at one transcendental layer over the
rationals or a prime field; that is all the multiplicity reduction and the
bundled instances ever need, and it keeps gcd computations cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import _sparse
from .errors import DivisionByZero, FieldMismatch


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class FieldDesc:
    """Description of a supported coefficient field."""

    kind: str  # "Q" | "Fp" | "RF"
    p: int = 0
    base: Optional["FieldDesc"] = None
    params: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind == "Fp" and not _is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.kind == "RF":
            if self.base is None or self.base.kind == "RF":
                raise ValueError("function fields must sit directly over Q or Fp")
            if not self.params or len(set(self.params)) != len(self.params):
                raise ValueError("function field needs distinct parameter names")

    # -- characteristic and constants ---------------------------------------

    @property
    def char(self) -> int:
        if self.kind == "Q":
            return 0
        if self.kind == "Fp":
            return self.p
        return self.base.char

    @property
    def zero(self) -> "FieldElement":
        return self.from_int(0)

    @property
    def one(self) -> "FieldElement":
        return self.from_int(1)

    def from_int(self, n: int) -> "FieldElement":
        if self.kind == "Q":
            return FieldElement(self, Fraction(n))
        if self.kind == "Fp":
            return FieldElement(self, n % self.p)
        return self.lift(self.base.from_int(n))

    def from_fraction(self, q: Fraction) -> "FieldElement":
        if self.kind == "Q":
            return FieldElement(self, q)
        if self.kind == "Fp":
            num = q.numerator % self.p
            den = q.denominator % self.p
            if den == 0:
                raise DivisionByZero(f"denominator {q.denominator} vanishes mod {self.p}")
            return FieldElement(self, num * pow(den, self.p - 2, self.p) % self.p)
        return self.lift(self.base.from_fraction(q))

    def lift(self, c: "FieldElement") -> "FieldElement":
        """Embed a base-field element into this function field."""
        assert self.kind == "RF" and c.field == self.base
        width = len(self.params)
        num = {} if c.is_zero() else {(0,) * width: c}
        return FieldElement(self, _rf_canon(self, num, {(0,) * width: self.base.one}))

    def param(self, name: str) -> "FieldElement":
        """The parameter `name` as a field element."""
        assert self.kind == "RF"
        i = self.params.index(name)
        e = tuple(1 if j == i else 0 for j in range(len(self.params)))
        return FieldElement(
            self, _rf_canon(self, {e: self.base.one}, {(0,) * len(self.params): self.base.one}))

    def ratfunc(self, num: dict, den: dict) -> "FieldElement":
        """Build an element from raw numerator/denominator term dicts."""
        assert self.kind == "RF"
        return FieldElement(self, _rf_canon(self, num, den))

    def __str__(self) -> str:
        if self.kind == "Q":
            return "Q"
        if self.kind == "Fp":
            return f"F{self.p}"
        return f"{self.base}({', '.join(self.params)})"


def rationals() -> FieldDesc:
    return FieldDesc("Q")


def prime_field(p: int) -> FieldDesc:
    return FieldDesc("Fp", p=p)


def function_field(base: FieldDesc, params: tuple[str, ...]) -> FieldDesc:
    return FieldDesc("RF", base=base, params=tuple(params))


def _rf_canon(field: FieldDesc, num: dict, den: dict):
    num = _sparse.canon(num)
    den = _sparse.canon(den)
    if not den:
        raise DivisionByZero("zero denominator in function field")
    if not num:
        width = len(field.params)
        return ((), (((0,) * width, field.base.one),))
    g = _sparse.gcd(num, den)
    key = _sparse.degrevlex_key
    num = _sparse.exact_div(num, g, key)
    den = _sparse.exact_div(den, g, key)
    _, lc = _sparse.leading(den, key)
    inv = lc.inv()
    num = _sparse.scale(num, inv)
    den = _sparse.scale(den, inv)
    return (tuple(sorted(num.items())), tuple(sorted(den.items())))


@dataclass(frozen=True)
class FieldElement:
    """An exact element of a FieldDesc, kept in canonical form."""

    field: FieldDesc
    value: object

    def is_zero(self) -> bool:
        if self.field.kind == "RF":
            return not self.value[0]
        return self.value == 0

    def _pair(self, other: "FieldElement"):
        if not isinstance(other, FieldElement) or other.field != self.field:
            raise FieldMismatch(f"cannot combine elements of {self.field} and "
                                f"{getattr(other, 'field', type(other))}")
        return other

    def __add__(self, other):
        other = self._pair(other)
        k = self.field.kind
        if k == "Q":
            return FieldElement(self.field, self.value + other.value)
        if k == "Fp":
            return FieldElement(self.field, (self.value + other.value) % self.field.p)
        n1, d1 = _rf_dicts(self)
        n2, d2 = _rf_dicts(other)
        num = _sparse.add(_sparse.mul(n1, d2), _sparse.mul(n2, d1))
        return FieldElement(self.field, _rf_canon(self.field, num, _sparse.mul(d1, d2)))

    def __neg__(self):
        k = self.field.kind
        if k == "Q":
            return FieldElement(self.field, -self.value)
        if k == "Fp":
            return FieldElement(self.field, (-self.value) % self.field.p)
        n, d = _rf_dicts(self)
        return FieldElement(self.field, _rf_canon(self.field, _sparse.neg(n), d))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        other = self._pair(other)
        k = self.field.kind
        if k == "Q":
            return FieldElement(self.field, self.value * other.value)
        if k == "Fp":
            return FieldElement(self.field, (self.value * other.value) % self.field.p)
        n1, d1 = _rf_dicts(self)
        n2, d2 = _rf_dicts(other)
        return FieldElement(self.field, _rf_canon(
            self.field, _sparse.mul(n1, n2), _sparse.mul(d1, d2)))

    def inv(self) -> "FieldElement":
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        k = self.field.kind
        if k == "Q":
            return FieldElement(self.field, 1 / self.value)
        if k == "Fp":
            return FieldElement(self.field, pow(self.value, self.field.p - 2, self.field.p))
        n, d = _rf_dicts(self)
        return FieldElement(self.field, _rf_canon(self.field, d, n))

    def __truediv__(self, other):
        other = self._pair(other)
        return self * other.inv()

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        out = self.field.one
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __str__(self) -> str:
        k = self.field.kind
        if k in ("Q", "Fp"):
            return str(self.value)
        n, d = _rf_dicts(self)
        ns = _param_poly_str(self.field, n)
        if _sparse.total_degree(d) == 0 and next(iter(d.values())) == self.field.base.one:
            return ns
        return f"({ns})/({_param_poly_str(self.field, d)})"

    __repr__ = __str__


def _rf_dicts(x: FieldElement) -> tuple[dict, dict]:
    num, den = x.value
    return dict(num), dict(den)


def _param_poly_str(field: FieldDesc, d: dict) -> str:
    from .poly import render_terms  # deferred: poly builds on fields
    return render_terms(d, field.params, field.base)


def canonicalize(x: FieldElement) -> FieldElement:
    """Re-canonicalize an element; a no-op on well-formed values."""
    k = x.field.kind
    if k == "Q":
        return FieldElement(x.field, Fraction(x.value))
    if k == "Fp":
        return FieldElement(x.field, x.value % x.field.p)
    n, d = _rf_dicts(x)
    return FieldElement(x.field, _rf_canon(x.field, n, d))
