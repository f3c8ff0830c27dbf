"""Generic points and multiplicities.

minimal_primes splits an ideal recursively: squarefree reduction of basis
elements, factor splitting, and saturation splitting against the product of
leading coefficients over a maximal independent variable set.  Leaves are
certified prime by explicit rules (zero ideal, principal irreducible, linear
generators, or a triangular extension over the function field of an
independent set whose minimal polynomial is irreducible).  A leaf no rule
certifies raises UndecidedPrimality: the answer is refused, never guessed.

multiplicity reduces to dimension zero: extend scalars to k(u) for a maximal
independent set u of the prime, isolate the primary part by saturating away
the sibling components, and divide standard-monomial counts.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import (NonExactDivision, NotContaining, NotMinimal,
                     UndecidedPrimality, UnsupportedShape)
from .factor import factor, squarefree_part
from .fields import function_field
from .groebner import IdealHandle
from .poly import PolyRing, Polynomial, lex

CERT_FACTOR = "factor-split"
CERT_TRIANGULAR = "triangular-irreducible"
CERT_ASSERTED = "user-asserted"
CERT_CONTRACTION = "contraction-of-prime"


@dataclass(frozen=True)
class PrimeIdeal:
    """A prime ideal with a record of how primality was established."""

    inner: IdealHandle
    certificate: str

    def __post_init__(self):
        if self.inner.is_unit():
            raise ValueError("the unit ideal is not prime")

    @property
    def is_asserted(self) -> bool:
        return self.certificate == CERT_ASSERTED

    def contains(self, f: Polynomial) -> bool:
        return self.inner.contains(f)

    def basis_text(self) -> str:
        gb = self.inner.groebner_basis()
        return ", ".join(str(g) for g in gb) if gb else "0"

    def __str__(self) -> str:
        return f"({self.basis_text()})"

    def __eq__(self, other):
        return isinstance(other, PrimeIdeal) and self.inner.equals(other.inner)

    def __hash__(self):
        return hash(self.inner)


def assert_prime(I: IdealHandle) -> PrimeIdeal:
    """Wrap a user-supplied prime; tries to certify it first and falls back
    to the asserted marker."""
    cert = try_certify(I)
    if cert is not None:
        return cert
    return PrimeIdeal(I, CERT_ASSERTED)


def try_certify(I: IdealHandle) -> PrimeIdeal | None:
    """Certify primality with the leaf rules only (no splitting)."""
    kind, data = _leaf_analysis(I)
    if kind == "prime":
        return data
    return None


def minimal_primes(I: IdealHandle) -> tuple[PrimeIdeal, ...]:
    """The minimal primes over a proper ideal, certified and sorted."""
    cached = getattr(I, "_minimal_primes", None)
    if cached is not None:
        return cached
    if I.is_unit():
        raise ValueError("minimal_primes of the unit ideal")
    found = _collect(I, 0)
    unique: list[PrimeIdeal] = []
    for p in found:
        if not any(p.inner.equals(q.inner) for q in unique):
            unique.append(p)
    minimal = [p for p in unique
               if not any(q is not p and p.inner.contains_ideal(q.inner) for q in unique)]
    result = tuple(sorted(minimal, key=str))
    I._minimal_primes = result
    return result


def _collect(I: IdealHandle, depth: int) -> list[PrimeIdeal]:
    if depth > 64:
        raise UndecidedPrimality(f"splitting recursion exceeded its depth bound on {I}")
    gb = I.groebner_basis()
    if gb and gb[0].is_constant():
        return []
    if not gb:
        return [PrimeIdeal(I, CERT_TRIANGULAR)]

    # squarefree reduction: same radical, hence the same minimal primes
    reduced = []
    changed = False
    for g in gb:
        try:
            sf = squarefree_part(g)
        except UnsupportedShape:
            sf = g.monic()
        if sf != g.monic():
            changed = True
        reduced.append(sf)
    if changed:
        return _collect(IdealHandle(I.ring, reduced), depth + 1)

    # factor splitting on basis elements; the lex basis sees combinations the
    # default basis hides (e.g. differences of squares in product ideals)
    for order in (None, lex()):
        basis = gb if order is None else I.groebner_basis(order)
        for g in basis:
            try:
                parts = [p for p, _ in factor(g) if not p.is_constant()]
            except UnsupportedShape:
                continue
            if len(parts) >= 2:
                out: list[PrimeIdeal] = []
                for p in parts:
                    out.extend(_collect(I.with_extra(p), depth + 1))
                return out

    kind, data = _leaf_analysis(I)
    if kind == "prime":
        return [data]
    if kind == "split":
        first, second = data
        return _collect(first, depth + 1) + _collect(second, depth + 1)
    if kind == "radical-shrink":
        return _collect(data, depth + 1)
    if kind == "factor-ext":
        out = []
        for g in data:
            out.extend(_collect(I.with_extra(g), depth + 1))
        return out
    raise UndecidedPrimality(f"no rule certifies or splits {I}: {data}")


def _leaf_analysis(I: IdealHandle):
    """Classify a splitting leaf.

    Returns one of
      ("prime", PrimeIdeal)            -- certified
      ("split", (J1, J2))              -- saturation split, recurse on both
      ("radical-shrink", J)            -- same radical, strictly larger ideal
      ("factor-ext", [g1, g2, ...])    -- extension minimal polynomial split
      ("fail", reason)
    """
    gb = I.groebner_basis()
    if not gb:
        return "prime", PrimeIdeal(I, CERT_TRIANGULAR)
    if gb[0].is_constant():
        return "fail", "unit ideal"
    if len(gb) == 1:
        try:
            parts = factor(gb[0])
        except UnsupportedShape:
            parts = None
        if parts is not None and len(parts) == 1 and parts[0][1] == 1:
            return "prime", PrimeIdeal(I, CERT_FACTOR)
    if all(g.total_degree() == 1 for g in gb):
        # affine-linear generators present the quotient as a polynomial ring
        return "prime", PrimeIdeal(I, CERT_TRIANGULAR)

    ring = I.ring
    split_option = None
    stashed = []
    # u candidates: leading-term independent sets first, then every other
    # subset of the right size (a variable can be algebraically independent
    # modulo I without being leading-term independent); the block basis
    # computation rejects genuinely dependent subsets
    dim = I.dimension().dim
    candidates = list(I.independent_sets())
    if dim > 0:
        for combo in itertools.combinations(range(ring.nvars), dim):
            u = tuple(ring.variables[i] for i in combo)
            if u not in candidates:
                candidates.append(u)
    # cheap triangular certificates over every candidate first; the
    # expensive primitive-element search only runs when none applies
    for u in candidates:
        if ring.field.kind == "RF" and u:
            continue  # a second transcendental layer is out of scope
        h = _lead_coeff_product(I, u)
        if h is None:
            continue
        if not h.is_constant():
            hid = IdealHandle(ring, [h])
            sat, steps = I.saturate_with_exponent(hid)
            if not sat.equals(I):
                if split_option is None:
                    if sat.is_unit():
                        # h lies in the radical: adding it keeps the zero set
                        split_option = ("radical-shrink", I.with_extra(h))
                    else:
                        split_option = ("split",
                                        (sat, I.with_extra(h ** max(steps, 1))))
                continue
        ext_ring, ext = _extend_scalars(I, u)
        lex_gb = ext.groebner_basis(lex())
        if lex_gb and lex_gb[0].is_constant():
            continue
        shape = _triangular_shape(ext_ring, lex_gb)
        if shape is None:
            stashed.append((u, ext_ring, ext))
            continue
        if shape.is_constant():
            return "prime", PrimeIdeal(I, CERT_TRIANGULAR)
        try:
            parts = factor(shape)
        except UnsupportedShape:
            stashed.append((u, ext_ring, ext))
            continue
        if len(parts) == 1 and parts[0][1] == 1:
            return "prime", PrimeIdeal(I, CERT_TRIANGULAR)
        return "factor-ext", [_clear_to_ring(p, ring, u) for p, _ in parts]
    for u, ext_ring, ext in stashed:
        kind, data = _primitive_element_analysis(I, ext_ring, ext, u)
        if kind != "fail":
            return kind, data
    if split_option is not None:
        return split_option
    return "fail", f"no independent set certifies or splits {I}"


def _triangular_shape(ext_ring: PolyRing, lex_gb) -> Polynomial | None:
    """Check for a field-presenting tower under lex: every variable carries
    exactly one basis element with a pure-power leading monomial, all of
    them linear except at most one genuinely univariate minimal polynomial.

    An element with lex-leading monomial v means v minus a polynomial in
    strictly smaller variables, so the linear steps never leave the field
    and the single minimal polynomial decides primality.  Returns that
    minimal polynomial, the constant one when every step is linear, or None
    when the shape does not apply.
    """
    n = ext_ring.nvars
    if n == 0:
        return ext_ring.one if not lex_gb else None
    covered: set[str] = set()
    minpoly = None
    order = lex()
    for g in lex_gb:
        lm = g.leading_monomial(order)
        nz = [i for i, e in enumerate(lm) if e]
        if len(nz) != 1:
            return None
        v = ext_ring.variables[nz[0]]
        if v in covered:
            return None
        covered.add(v)
        if lm[nz[0]] == 1:
            continue
        if minpoly is not None or g.variables_used() != (v,):
            return None
        minpoly = g
    if covered != set(ext_ring.variables):
        return None
    return minpoly if minpoly is not None else ext_ring.one


def _linear_form_candidates(ext_ring: PolyRing):
    """Deterministic sequence of linear forms tried as primitive elements."""
    names = ext_ring.variables
    for v in names:
        yield ext_ring.var(v)
    char = ext_ring.field.char
    coeffs = [c for c in (1, 2, 3) if char == 0 or c % char]
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            for c in coeffs:
                yield ext_ring.var(names[i]) + c * ext_ring.var(names[j])
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            for k in range(j + 1, len(names)):
                yield (ext_ring.var(names[i]) + ext_ring.var(names[j])
                       + ext_ring.var(names[k]))


def _min_poly_of(ext_handle: IdealHandle, lam: Polynomial) -> Polynomial | None:
    """Generator of the univariate vanishing ideal of a linear form modulo a
    zero-dimensional ideal."""
    ext_ring = lam.ring
    z = "Z_"
    while z in ext_ring.variables:
        z += "_"
    big = PolyRing(ext_ring.field, ext_ring.variables + (z,))
    gens = [g.map_into(big) for g in ext_handle.generators]
    gens.append(big.var(z) - lam.map_into(big))
    contracted = IdealHandle(big, gens).eliminate(ext_ring.variables)
    basis = contracted.groebner_basis()
    if len(basis) != 1:
        return None
    return basis[0]


def _primitive_element_analysis(I: IdealHandle, ext_ring: PolyRing,
                                ext: IdealHandle, u: tuple[str, ...]):
    """Split or certify a zero-dimensional extension through the minimal
    polynomial of a linear form: a reducible minimal polynomial splits the
    ideal, an irreducible one of full vector-space degree presents the
    quotient as a field."""
    try:
        vec = ext.vector_space_dimension()
    except ValueError:
        return "fail", "extension is not zero-dimensional"
    ring = I.ring
    for lam in _linear_form_candidates(ext_ring):
        m = _min_poly_of(ext, lam)
        if m is None:
            continue
        try:
            parts = factor(m)
        except UnsupportedShape:
            continue
        zvar = m.ring.variables[0]
        if len(parts) == 1 and parts[0][1] == 1:
            if m.degree_in(zvar) == vec:
                return "prime", PrimeIdeal(I, CERT_TRIANGULAR)
            continue
        evaluated = []
        for p, _ in parts:
            at_lam = p.substitute({zvar: lam}, ext_ring)
            evaluated.append(_clear_to_ring(at_lam, ring, u))
        if len(parts) >= 2:
            return "factor-ext", evaluated
        # single repeated factor: adding it keeps the zero set
        return "radical-shrink", I.with_extra(evaluated[0])
    return "fail", f"no primitive element certified or split {I}"


def _lead_coeff_product(I: IdealHandle, u: tuple[str, ...]) -> Polynomial | None:
    """Product of the distinct leading coefficients (as polynomials in the
    independent variables) of a block-order basis; the saturation test
    against it detects whether I equals its extension-contraction."""
    ring = I.ring
    if not u:
        return ring.one
    y = tuple(v for v in ring.variables if v not in u)
    if not y:
        return ring.one
    from .poly import block_elim
    perm = PolyRing(ring.field, y + tuple(u))
    moved = IdealHandle(perm, [g.map_into(perm) for g in I.generators])
    gb = moved.groebner_basis(block_elim(len(y)))
    ny = len(y)
    from ._sparse import degrevlex_key
    h = ring.one
    seen = set()
    for g in gb:
        best = max((e[:ny] for e in g.terms), key=degrevlex_key)
        if all(x == 0 for x in best):
            return None
        lc_terms = {e: c for e, c in g.terms.items() if e[:ny] == best}
        lc = Polynomial(perm, {(0,) * ny + e[ny:]: c for e, c in lc_terms.items()})
        lc = lc.map_into(ring).monic()
        if lc.is_constant():
            continue
        if str(lc) not in seen:
            seen.add(str(lc))
            h = h * lc
    return h


def _extend_scalars(I: IdealHandle, u: tuple[str, ...]):
    """Extend coefficients to the function field of the independent set u."""
    ring = I.ring
    if not u:
        return ring, I
    K = function_field(ring.field, u)
    kept = tuple(v for v in ring.variables if v not in u)
    ext_ring = PolyRing(K, kept)
    gens = [extend_poly(g, u, ext_ring) for g in I.generators]
    return ext_ring, IdealHandle(ext_ring, gens)


def extend_poly(g: Polynomial, u: tuple[str, ...], ext_ring: PolyRing) -> Polynomial:
    ring = g.ring
    K = ext_ring.field
    u_idx = [ring.index(v) for v in u]
    kept_idx = [ring.index(v) for v in ext_ring.variables]
    width = len(u)
    one_den = {(0,) * width: K.base.one}
    terms: dict = {}
    for e, c in g.terms.items():
        eu = tuple(e[i] for i in u_idx)
        ek = tuple(e[i] for i in kept_idx)
        scalar = K.ratfunc({eu: c}, one_den)
        terms[ek] = terms.get(ek, K.zero) + scalar
    return Polynomial(ext_ring, terms)


def _clear_to_ring(p: Polynomial, ring: PolyRing, u: tuple[str, ...]) -> Polynomial:
    """Clear function-field denominators of p back into the base ring."""
    if not u:
        return p.map_into(ring)
    K = p.ring.field
    den = {(0,) * len(u): K.base.one}
    from . import _sparse
    for c in p.terms.values():
        cden = dict(c.value[1])
        den = _sparse.exact_div(_sparse.mul(den, cden), _sparse.gcd(den, cden),
                                _sparse.degrevlex_key)
    u_pos = [ring.index(v) for v in u]
    kept_pos = [ring.index(v) for v in p.ring.variables]
    out: dict = {}
    for e, c in p.terms.items():
        num, cden = dict(c.value[0]), dict(c.value[1])
        lifted = _sparse.mul(num, _sparse.exact_div(den, cden, _sparse.degrevlex_key))
        for pe, pc in lifted.items():
            full = [0] * ring.nvars
            for i, v in enumerate(u_pos):
                full[v] = pe[i]
            for i, v in enumerate(kept_pos):
                full[v] += e[i]
            key = tuple(full)
            out[key] = out.get(key, ring.field.zero) + pc
    return Polynomial(ring, out)


# -- multiplicities and codimension ------------------------------------------------


def multiplicity(I: IdealHandle, p: PrimeIdeal) -> int:
    """Length of (R/I) localized at a minimal prime p."""
    mins = minimal_primes(I)
    if not any(q.inner.equals(p.inner) for q in mins):
        raise NotMinimal(f"{p} is not a minimal prime of {I}")
    u = p.inner.dimension().independent
    siblings = [q for q in mins if not q.inner.equals(p.inner)]
    ext_ring, ext_I = _extend_scalars(I, u)
    if u:
        ext_p = IdealHandle(ext_ring, [extend_poly(g, u, ext_ring)
                                       for g in p.inner.generators])
    else:
        ext_p = p.inner
    if siblings:
        s = I.ring.one
        for q in siblings:
            pick = next(g for g in q.inner.groebner_basis() if not p.inner.contains(g))
            s = s * pick
        ext_s = extend_poly(s, u, ext_ring) if u else s
        ext_I = ext_I.saturate(IdealHandle(ext_ring, [ext_s]))
    num = ext_I.vector_space_dimension()
    den = ext_p.vector_space_dimension()
    if den == 0 or num % den:
        raise NonExactDivision(f"length computation failed for {p} over {I}: "
                               f"{num} / {den}")
    return num // den


def point_codim(I: IdealHandle, p: PrimeIdeal) -> int:
    """Codimension of the closure of p inside Spec(R/I); affine algebras over
    a field are catenary, so the dimension-difference formula applies."""
    if not p.inner.contains_ideal(I):
        raise NotContaining(f"{p} does not contain {I}")
    dim_p = p.inner.dimension().dim
    best = None
    for q in minimal_primes(I):
        if p.inner.contains_ideal(q.inner):
            d = q.inner.dimension().dim - dim_p
            best = d if best is None else max(best, d)
    assert best is not None, "a prime over I must contain a minimal prime"
    return best
