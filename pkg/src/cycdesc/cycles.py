"""The cycle calculus: free abelian group on points, cycles of subschemes,
pull-back along arbitrary morphisms, push-forward along closed immersions,
and the grading by codimension.

The pull-back is the linear extension of y |-> cycle of the scheme-theoretic
preimage of the closure of y.  It agrees with the classical flat pull-back
for flat morphisms and is deliberately not functorial in general; the
bundled instances reproduce both behaviours exactly.
"""

from __future__ import annotations

from .decomp import minimal_primes, multiplicity, point_codim
from .errors import NotClosedImmersion
from .scheme import (ClosedSubscheme, Scheme, SchemeMorphism, SchemePoint,
                     closure_of_point, image_point, preimage_subscheme)


class Cycle:
    """A finite integer combination of points of one scheme.

    Points are identified by ideal equality, so pullback results merge terms
    that present the same prime differently.  Printing is canonical: terms
    sorted by (piece, printed prime), signed integer coefficients.
    """

    __slots__ = ("scheme", "terms")

    def __init__(self, scheme: Scheme, terms: dict[SchemePoint, int] | None = None):
        self.scheme = scheme
        clean: dict[SchemePoint, int] = {}
        for pt, c in (terms or {}).items():
            if pt.scheme.name != scheme.name:
                raise ValueError(f"point {pt} does not live on {scheme}")
            if c:
                clean[pt] = clean.get(pt, 0) + c
        self.terms = {pt: c for pt, c in clean.items() if c}

    @classmethod
    def of_point(cls, pt: SchemePoint, coeff: int = 1) -> "Cycle":
        return cls(pt.scheme, {pt: coeff})

    def is_zero(self) -> bool:
        return not self.terms

    def support(self) -> list[SchemePoint]:
        return sorted(self.terms, key=lambda p: p.sort_key)

    def coeff(self, pt: SchemePoint) -> int:
        return self.terms.get(pt, 0)

    def __add__(self, other: "Cycle") -> "Cycle":
        self._check(other)
        out = dict(self.terms)
        for pt, c in other.terms.items():
            out[pt] = out.get(pt, 0) + c
        return Cycle(self.scheme, out)

    def __sub__(self, other: "Cycle") -> "Cycle":
        return self + (-1) * other

    def __rmul__(self, k: int) -> "Cycle":
        return Cycle(self.scheme, {pt: k * c for pt, c in self.terms.items()})

    __mul__ = __rmul__

    def __neg__(self):
        return (-1) * self

    def _check(self, other):
        if not isinstance(other, Cycle) or other.scheme.name != self.scheme.name:
            raise ValueError("cycles live on different schemes")

    def __eq__(self, other):
        return (isinstance(other, Cycle) and other.scheme.name == self.scheme.name
                and other.terms == self.terms)

    def __hash__(self):
        return hash((self.scheme.name, tuple(sorted(
            (pt.sort_key, c) for pt, c in self.terms.items()))))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for pt in self.support():
            parts.append((self.terms[pt], pt.render()))
        first_c, first_p = parts[0]
        out = f"{first_c}*{first_p}"
        for c, p in parts[1:]:
            out += f" - {-c}*{p}" if c < 0 else f" + {c}*{p}"
        return out

    __repr__ = __str__


def fundamental_cycle(Z: ClosedSubscheme) -> Cycle:
    """Each generic point weighted by the length of the local ring there."""
    terms: dict[SchemePoint, int] = {}
    for piece in Z.ambient.pieces:
        handle = Z.ideals[piece.name]
        if handle.is_unit():
            continue
        for prime in minimal_primes(handle):
            mult = multiplicity(handle, prime)
            pt = SchemePoint(Z.ambient, piece.name, prime)
            terms[pt] = terms.get(pt, 0) + mult
    return Cycle(Z.ambient, terms)


def pullback_cycle(f: SchemeMorphism, c: Cycle) -> Cycle:
    """Linear extension of y |-> cycle(preimage of the closure of y)."""
    if c.scheme.name != f.target.name:
        raise ValueError(f"cycle lives on {c.scheme}, not on {f.target}")
    out = Cycle(f.source)
    for pt, coeff in c.terms.items():
        pulled = fundamental_cycle(preimage_subscheme(f, closure_of_point(pt)))
        out = out + coeff * pulled
    return out


def pushforward_cycle(i: SchemeMorphism, c: Cycle) -> Cycle:
    """Push points forward along a closed immersion, merging coefficients."""
    if "closed_immersion" not in i.asserted:
        raise NotClosedImmersion(
            f"morphism {i.name} carries no closed-immersion witness")
    if c.scheme.name != i.source.name:
        raise ValueError(f"cycle lives on {c.scheme}, not on {i.source}")
    out = Cycle(i.target)
    for pt, coeff in c.terms.items():
        out = out + coeff * Cycle.of_point(image_point(i, pt))
    return out


def grade(c: Cycle) -> dict[int, Cycle]:
    """Split a cycle by codimension of each point inside its piece."""
    buckets: dict[int, dict[SchemePoint, int]] = {}
    for pt, coeff in c.terms.items():
        piece = c.scheme.piece(pt.piece)
        r = point_codim(piece.ideal, pt.prime)
        buckets.setdefault(r, {})[pt] = coeff
    return {r: Cycle(c.scheme, terms) for r, terms in sorted(buckets.items())}
