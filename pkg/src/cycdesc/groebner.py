"""Ideal arithmetic: reduced Groebner bases and the derived operations.

Buchberger with the normal selection strategy and both classical criteria;
no F4/F5.  The instances this engine sees are tiny, so determinism and
simplicity win over asymptotics.  Reduced bases are cached per monomial
order under a lock: concurrent readers trigger at most one computation per
(ideal, order), and published bases are immutable.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass

from . import _sparse
from .errors import RingMismatch, SaturationDivergence
from .poly import MonomialOrder, PolyRing, Polynomial, block_elim, degrevlex, divrem


@dataclass(frozen=True)
class DimensionInfo:
    """Krull dimension of ring/I plus one maximal independent variable set."""

    dim: int
    independent: tuple[str, ...]


class IdealHandle:
    """An ideal given by generators, with cached reduced Groebner bases."""

    def __init__(self, ring: PolyRing, generators):
        gens = []
        for g in generators:
            if not isinstance(g, Polynomial):
                g = ring.parse(g)
            if g.ring != ring:
                raise RingMismatch(f"generator {g} not in {ring}")
            if not g.is_zero():
                gens.append(g)
        self.ring = ring
        self.generators = tuple(gens)
        self._lock = threading.Lock()
        self._gb: dict[MonomialOrder, tuple[Polynomial, ...]] = {}
        self._elim: dict[tuple[str, ...], "IdealHandle"] = {}
        self._dim: DimensionInfo | None = None
        self._indep: tuple[tuple[str, ...], ...] | None = None

    # -- Groebner bases ---------------------------------------------------------

    def groebner_basis(self, order: MonomialOrder | None = None) -> tuple[Polynomial, ...]:
        order = order or degrevlex()
        with self._lock:
            if order not in self._gb:
                self._gb[order] = _reduced_basis(self.ring, self.generators, order)
            return self._gb[order]

    def normal_form(self, f: Polynomial, order: MonomialOrder | None = None) -> Polynomial:
        order = order or degrevlex()
        gb = self.groebner_basis(order)
        if not gb:
            return f
        return divrem(f, list(gb), order)[1]

    def contains(self, f: Polynomial) -> bool:
        if f.ring != self.ring:
            raise RingMismatch(f"membership test across rings {f.ring} / {self.ring}")
        return self.normal_form(f).is_zero()

    def contains_ideal(self, other: "IdealHandle") -> bool:
        return all(self.contains(g) for g in other.generators)

    def is_zero(self) -> bool:
        return not self.groebner_basis()

    def is_unit(self) -> bool:
        gb = self.groebner_basis()
        return bool(gb) and gb[0].is_constant()

    def is_proper(self) -> bool:
        return not self.is_unit()

    # -- derived operations -------------------------------------------------------

    def __add__(self, other: "IdealHandle") -> "IdealHandle":
        if other.ring != self.ring:
            raise RingMismatch("sum of ideals across rings")
        return IdealHandle(self.ring, self.generators + other.generators)

    def with_extra(self, *polys: Polynomial) -> "IdealHandle":
        return IdealHandle(self.ring, self.generators + tuple(polys))

    def eliminate(self, drop_vars) -> "IdealHandle":
        """Contract to the subring without drop_vars: I with the dropped
        variables eliminated through a block order."""
        drop = tuple(v for v in self.ring.variables if v in set(drop_vars))
        if not drop:
            return self
        with self._lock:
            hit = self._elim.get(drop)
        if hit is not None:
            return hit
        kept = tuple(v for v in self.ring.variables if v not in set(drop))
        perm_ring = PolyRing(self.ring.field, drop + kept)
        moved = [g.map_into(perm_ring) for g in self.generators]
        gb = _reduced_basis(perm_ring, moved, block_elim(len(drop)))
        kept_ring = PolyRing(self.ring.field, kept)
        dropset = set(drop)
        out = [g.map_into(kept_ring) for g in gb
               if not (set(g.variables_used()) & dropset)]
        result = IdealHandle(kept_ring, out)
        with self._lock:
            self._elim.setdefault(drop, result)
            return self._elim[drop]

    def intersect(self, other: "IdealHandle") -> "IdealHandle":
        if other.ring != self.ring:
            raise RingMismatch("intersection across rings")
        w = "W_"
        while w in self.ring.variables:
            w += "_"
        big = PolyRing(self.ring.field, (w,) + self.ring.variables)
        t = big.var(w)
        gens = [g.map_into(big) * t for g in self.generators]
        gens += [g.map_into(big) * (big.one - t) for g in other.generators]
        inner = IdealHandle(big, gens).eliminate((w,))
        return IdealHandle(self.ring, [g.map_into(self.ring) for g in inner.generators])

    def quotient(self, other: "IdealHandle") -> "IdealHandle":
        """(self : other), via the intersection trick."""
        if other.ring != self.ring:
            raise RingMismatch("quotient across rings")
        gens = [g for g in other.generators if not g.is_zero()]
        if not gens:
            return IdealHandle(self.ring, [self.ring.one])
        result: IdealHandle | None = None
        for f in gens:
            meet = self.intersect(IdealHandle(self.ring, [f]))
            part = []
            for h in meet.groebner_basis():
                q, r = divrem(h, [f])
                assert r.is_zero(), "intersection element not divisible in quotient"
                part.append(q[0])
            cur = IdealHandle(self.ring, part)
            result = cur if result is None else result.intersect(cur)
        return result

    def saturate(self, other: "IdealHandle") -> "IdealHandle":
        return self.saturate_with_exponent(other)[0]

    def saturate_with_exponent(self, other: "IdealHandle") -> tuple["IdealHandle", int]:
        """(self : other^infinity) plus the stabilization exponent."""
        if not any(not g.is_zero() for g in other.generators):
            raise ValueError("saturation by the zero ideal")
        current = self
        for k in range(64):
            nxt = current.quotient(other)
            if nxt.equals(current):
                return current, k
            current = nxt
        raise SaturationDivergence("saturation did not stabilize within 64 rounds")

    def dimension(self) -> DimensionInfo:
        """Krull dimension of ring/I (-1 for the unit ideal), computed from
        the leading-term ideal, with one maximal independent variable set."""
        with self._lock:
            if self._dim is not None:
                return self._dim
        gb = self.groebner_basis()
        if gb and gb[0].is_constant():
            info = DimensionInfo(-1, ())
        else:
            lms = [g.leading_monomial() for g in gb]
            n = self.ring.nvars
            info = None
            for size in range(n, -1, -1):
                for combo in itertools.combinations(range(n), size):
                    cs = set(combo)
                    if all(any(e[i] for i in range(n) if i not in cs) for e in lms):
                        info = DimensionInfo(size, tuple(self.ring.variables[i] for i in combo))
                        break
                if info is not None:
                    break
        with self._lock:
            if self._dim is None:
                self._dim = info
            return self._dim

    def independent_sets(self) -> tuple[tuple[str, ...], ...]:
        """All maximal independent variable sets, in index order."""
        with self._lock:
            if self._indep is not None:
                return self._indep
        dim = self.dimension().dim
        out: list[tuple[str, ...]] = []
        if dim >= 0:
            gb = self.groebner_basis()
            lms = [g.leading_monomial() for g in gb]
            n = self.ring.nvars
            for combo in itertools.combinations(range(n), dim):
                cs = set(combo)
                if all(any(e[i] for i in range(n) if i not in cs) for e in lms):
                    out.append(tuple(self.ring.variables[i] for i in combo))
        result = tuple(out)
        with self._lock:
            if self._indep is None:
                self._indep = result
            return self._indep

    def vector_space_dimension(self) -> int:
        """Number of standard monomials; requires a zero-dimensional ideal."""
        gb = self.groebner_basis()
        if gb and gb[0].is_constant():
            return 0
        n = self.ring.nvars
        lms = [g.leading_monomial() for g in gb]
        bounds = []
        for i in range(n):
            pure = [e[i] for e in lms if all(x == 0 for j, x in enumerate(e) if j != i)]
            if not pure:
                raise ValueError(f"ideal not zero-dimensional: no pure power of "
                                 f"{self.ring.variables[i]}")
            bounds.append(min(pure))
        count = 0
        for mono in itertools.product(*[range(b) for b in bounds]):
            if not any(_sparse.divides(lm, mono) for lm in lms):
                count += 1
        return count

    # -- identity -----------------------------------------------------------------

    def equals(self, other: "IdealHandle") -> bool:
        if not isinstance(other, IdealHandle) or other.ring != self.ring:
            return False
        return self.groebner_basis() == other.groebner_basis()

    __eq__ = equals

    def __hash__(self):
        return hash((self.ring, tuple(str(g) for g in self.groebner_basis())))

    def __str__(self) -> str:
        gb = self.groebner_basis()
        return f"ideal({', '.join(str(g) for g in gb) if gb else '0'})"

    __repr__ = __str__


# -- Buchberger ------------------------------------------------------------------


def _spoly(f: Polynomial, g: Polynomial, key) -> Polynomial:
    ring = f.ring
    ef, cf = _sparse.leading(f.terms, key)
    eg, cg = _sparse.leading(g.terms, key)
    lcm = tuple(max(a, b) for a, b in zip(ef, eg))
    mf = Polynomial(ring, {_sparse.exp_sub(lcm, ef): cf.inv()})
    mg = Polynomial(ring, {_sparse.exp_sub(lcm, eg): cg.inv()})
    return mf * f - mg * g


def _reduced_basis(ring: PolyRing, gens, order: MonomialOrder) -> tuple[Polynomial, ...]:
    key = order.key(ring.nvars)
    G = [g.monic(order) for g in gens if not g.is_zero()]
    if not G:
        return ()
    lms = [g.leading_monomial(order) for g in G]
    pairs = {(i, j) for i in range(len(G)) for j in range(i + 1, len(G))}

    def lcm_of(i, j):
        return tuple(max(a, b) for a, b in zip(lms[i], lms[j]))

    while pairs:
        i, j = min(pairs, key=lambda p: (key(lcm_of(*p)), p))
        pairs.discard((i, j))
        lcm = lcm_of(i, j)
        # first criterion: coprime leading monomials reduce to zero
        if all(a + b == c for a, b, c in zip(lms[i], lms[j], lcm)):
            continue
        # chain criterion: a third element dividing the lcm whose pairs with
        # both ends were already treated
        skip = False
        for k in range(len(G)):
            if k in (i, j) or not _sparse.divides(lms[k], lcm):
                continue
            p1 = (min(i, k), max(i, k))
            p2 = (min(j, k), max(j, k))
            if p1 not in pairs and p2 not in pairs:
                skip = True
                break
        if skip:
            continue
        s = _spoly(G[i], G[j], key)
        if s.is_zero():
            continue
        r = divrem(s, G, order)[1]
        if r.is_zero():
            continue
        r = r.monic(order)
        G.append(r)
        lms.append(r.leading_monomial(order))
        pairs |= {(k, len(G) - 1) for k in range(len(G) - 1)}

    # minimalize: drop elements whose leading monomial another one divides
    minimal: list[Polynomial] = []
    for g in sorted(G, key=lambda h: key(h.leading_monomial(order))):
        lm = g.leading_monomial(order)
        if not any(_sparse.divides(h.leading_monomial(order), lm) for h in minimal):
            minimal.append(g)
    # interreduce to the unique reduced basis
    changed = True
    while changed:
        changed = False
        for idx in range(len(minimal)):
            others = minimal[:idx] + minimal[idx + 1:]
            r = divrem(minimal[idx], others, order)[1] if others else minimal[idx]
            r = r.monic(order)
            if r != minimal[idx]:
                minimal[idx] = r
                changed = True
        minimal = [g for g in minimal if not g.is_zero()]
    minimal.sort(key=lambda h: key(h.leading_monomial(order)))
    return tuple(minimal)
