"""Schemes as finite disjoint unions of presented affine pieces.

Points are prime ideals of a piece; morphisms are per-piece algebra maps
plus user-asserted analytic properties.  The engine verifies what is
decidable at this level (well-definedness of the maps, the closed-immersion
witness) and merely echoes the rest of the assertions.

DVRs are modelled globally: Spec of a valuation ring becomes the affine line
over the residue characterystic-zero field with the distinguished points (0)
and (pi); the bundled instances confirm this reproduces the expected
multiplicities.
"""

from __future__ import annotations

from dataclasses import dataclass

from .decomp import CERT_CONTRACTION, PrimeIdeal, assert_prime
from .errors import IllFormedMorphism, RingMismatch
from .groebner import IdealHandle
from .poly import PolyRing, Polynomial, block_elim, divrem

ASSERTABLE = ("flat", "surjective", "generalizing", "universally_generalizing",
              "universally_bijective", "closed_immersion")

# properties that survive arbitrary base change; projections of a fiber
# square inherit these from the morphism they base-change
_BASE_CHANGE_STABLE = frozenset({"flat", "surjective", "universally_generalizing",
                                 "universally_bijective", "closed_immersion"})


@dataclass(frozen=True, eq=False)
class AffinePiece:
    name: str
    ring: PolyRing
    ideal: IdealHandle
    allow_empty: bool = False

    def __post_init__(self):
        if self.ideal.ring != self.ring:
            raise RingMismatch(f"piece {self.name}: ideal ring mismatch")
        if not self.allow_empty and self.ideal.is_unit():
            raise ValueError(f"piece {self.name} has the unit ideal")


class Scheme:
    def __init__(self, name: str, pieces):
        pieces = tuple(pieces)
        if not pieces:
            raise ValueError(f"scheme {name} needs at least one piece")
        names = [p.name for p in pieces]
        if len(set(names)) != len(names):
            raise ValueError(f"scheme {name}: duplicate piece names")
        fields = {p.ring.field for p in pieces}
        if len(fields) != 1:
            raise RingMismatch(f"scheme {name}: pieces over different fields")
        self.name = name
        self.pieces = pieces

    @property
    def field(self):
        return self.pieces[0].ring.field

    def piece(self, name: str) -> AffinePiece:
        for p in self.pieces:
            if p.name == name:
                return p
        raise KeyError(f"scheme {self.name} has no piece {name!r}")

    def __str__(self):
        return self.name

    __repr__ = __str__


class SchemePoint:
    """A prime of one piece, tagged with its scheme."""

    __slots__ = ("scheme", "piece", "prime", "_key")

    def __init__(self, scheme: Scheme, piece: str, prime: PrimeIdeal):
        ap = scheme.piece(piece)
        if prime.inner.ring != ap.ring:
            raise RingMismatch(f"point prime not in the ring of piece {piece}")
        if not prime.inner.contains_ideal(ap.ideal):
            raise ValueError(f"prime {prime} does not contain the ideal of piece {piece}")
        self.scheme = scheme
        self.piece = piece
        self.prime = prime
        self._key = (piece, prime.basis_text())

    @property
    def sort_key(self):
        return self._key

    def render(self) -> str:
        marker = "; asserted" if self.prime.is_asserted else ""
        return f"[piece={self.piece}; ({self._key[1]}){marker}]"

    def __eq__(self, other):
        return (isinstance(other, SchemePoint) and other.scheme.name == self.scheme.name
                and other._key == self._key)

    def __hash__(self):
        return hash((self.scheme.name, self._key))

    def __str__(self):
        return self.render()

    __repr__ = __str__


class ClosedSubscheme:
    """Per piece, an ideal containing that piece's ideal; the unit ideal
    marks pieces the subscheme misses."""

    def __init__(self, ambient: Scheme, ideals: dict[str, IdealHandle]):
        self.ambient = ambient
        full = {}
        for p in ambient.pieces:
            handle = ideals.get(p.name)
            if handle is None:
                handle = IdealHandle(p.ring, [p.ring.one])
            if handle.ring != p.ring:
                raise RingMismatch(f"subscheme ideal on {p.name}: wrong ring")
            if not handle.contains_ideal(p.ideal):
                raise ValueError(f"subscheme ideal on {p.name} does not contain "
                                 f"the piece ideal")
            full[p.name] = handle
        self.ideals = full

    def __str__(self):
        parts = [f"{n}: {self.ideals[n]}" for n in sorted(self.ideals)]
        return f"subscheme({'; '.join(parts)})"


class SchemeMorphism:
    """Per-piece algebra maps from target coordinates to source polynomials."""

    def __init__(self, name: str, source: Scheme, target: Scheme,
                 piece_map: dict[str, str],
                 var_images: dict[str, dict[str, Polynomial]],
                 asserted=()):
        if source.field != target.field:
            raise RingMismatch(f"morphism {name}: source and target fields differ")
        bad = set(asserted) - set(ASSERTABLE)
        if bad:
            raise IllFormedMorphism(f"morphism {name}: unknown assertions {sorted(bad)}")
        self.name = name
        self.source = source
        self.target = target
        self.piece_map = dict(piece_map)
        self.var_images = {sp: dict(m) for sp, m in var_images.items()}
        self.asserted = frozenset(asserted)
        self._validate()

    def _validate(self):
        for sp in self.source.pieces:
            if sp.name not in self.piece_map:
                raise IllFormedMorphism(f"morphism {self.name}: piece {sp.name} unmapped")
            tp = self.target.piece(self.piece_map[sp.name])
            images = self.var_images.get(sp.name, {})
            missing = [v for v in tp.ring.variables if v not in images]
            if missing:
                raise IllFormedMorphism(
                    f"morphism {self.name}: no image for {missing} on piece {sp.name}")
            for v, img in images.items():
                if img.ring != sp.ring:
                    raise IllFormedMorphism(
                        f"morphism {self.name}: image of {v} lives in the wrong ring")
            # well-definedness: target relations must map into the source ideal
            for g in tp.ideal.generators:
                if not sp.ideal.contains(self.pullback(sp.name, g)):
                    raise IllFormedMorphism(
                        f"morphism {self.name}: generator {g} of piece "
                        f"{tp.name} does not map into the ideal of {sp.name}")
        if "closed_immersion" in self.asserted:
            self._check_closed_immersion()

    def pullback(self, src_piece: str, f: Polynomial) -> Polynomial:
        """Apply the algebra map to a polynomial on the matched target piece."""
        sp = self.source.piece(src_piece)
        return f.substitute(self.var_images[src_piece], sp.ring)

    def _check_closed_immersion(self):
        for sp in self.source.pieces:
            gb, joint, src_names = self._graph_basis(sp, sp.ideal)
            for v in src_names:
                nf = divrem(joint.var(v), list(gb), block_elim(len(src_names)))[1] \
                    if gb else joint.var(v)
                if set(nf.variables_used()) & set(src_names):
                    raise IllFormedMorphism(
                        f"morphism {self.name}: not a closed immersion, "
                        f"{v} on piece {sp.name} is not hit by the pullback")

    def _graph_basis(self, sp: AffinePiece, src_ideal: IdealHandle):
        """Groebner basis of the graph ideal in k[src vars, renamed target
        vars] under an order eliminating the source block."""
        tp = self.target.piece(self.piece_map[sp.name])
        src_names = list(sp.ring.variables)
        ren = {}
        taken = set(src_names)
        for w in tp.ring.variables:
            nw = w
            while nw in taken:
                nw += "_img"
            ren[w] = nw
            taken.add(nw)
        joint = PolyRing(sp.ring.field, tuple(src_names) + tuple(ren[w] for w in tp.ring.variables))
        gens = [g.map_into(joint) for g in src_ideal.generators]
        for w in tp.ring.variables:
            gens.append(joint.var(ren[w]) - self.var_images[sp.name][w].map_into(joint))
        handle = IdealHandle(joint, gens)
        gb = handle.groebner_basis(block_elim(len(src_names)))
        return gb, joint, src_names

    def describe(self) -> str:
        tags = f" [{', '.join(sorted(self.asserted))}]" if self.asserted else ""
        return f"{self.name}: {self.source.name} -> {self.target.name}{tags}"

    def __str__(self):
        return self.describe()

    __repr__ = __str__


# -- constructions ---------------------------------------------------------------


def closure_of_point(x: SchemePoint) -> ClosedSubscheme:
    """The reduced closure: V(prime) on the point's piece, nothing elsewhere."""
    ap = x.scheme.piece(x.piece)
    return ClosedSubscheme(x.scheme, {
        x.piece: IdealHandle(ap.ring, x.prime.inner.generators)})


def preimage_subscheme(f: SchemeMorphism, Z: ClosedSubscheme) -> ClosedSubscheme:
    """Scheme-theoretic preimage, piece by piece."""
    if Z.ambient is not f.target and Z.ambient.name != f.target.name:
        raise ValueError(f"subscheme lives on {Z.ambient}, not on {f.target}")
    ideals = {}
    for sp in f.source.pieces:
        tp_name = f.piece_map[sp.name]
        pulled = [f.pullback(sp.name, g) for g in Z.ideals[tp_name].generators]
        ideals[sp.name] = IdealHandle(sp.ring, list(sp.ideal.generators) + pulled)
    return ClosedSubscheme(f.source, ideals)


def image_point(f: SchemeMorphism, x: SchemePoint) -> SchemePoint:
    """The image point: contract the prime through the algebra map, computed
    by eliminating the source block of the graph ideal.  Contractions of
    primes are prime."""
    sp = f.source.piece(x.piece)
    tp_name = f.piece_map[x.piece]
    tp = f.target.piece(tp_name)
    gb, joint, src_names = f._graph_basis(sp, x.prime.inner)
    keep = [v for v in joint.variables if v not in src_names]
    dropset = set(src_names)
    contracted = [g for g in gb if not (set(g.variables_used()) & dropset)]
    back = {nv: w for w, nv in zip(tp.ring.variables, keep)}
    gens = [g.map_into(tp.ring, rename={kv: back[kv] for kv in keep}) for g in contracted]
    prime = PrimeIdeal(IdealHandle(tp.ring, gens), CERT_CONTRACTION)
    return SchemePoint(f.target, tp_name, prime)


def compose(outer: SchemeMorphism, inner: SchemeMorphism,
            name: str | None = None) -> SchemeMorphism:
    """outer after inner; assertions survive when both maps carry them."""
    if inner.target is not outer.source and inner.target.name != outer.source.name:
        raise ValueError(f"cannot compose {outer.name} after {inner.name}")
    piece_map = {}
    var_images = {}
    for sp in inner.source.pieces:
        mid = inner.piece_map[sp.name]
        tgt = outer.piece_map[mid]
        piece_map[sp.name] = tgt
        images = {}
        for w in outer.target.piece(tgt).ring.variables:
            mid_poly = outer.var_images[mid][w]
            images[w] = inner.pullback(sp.name, mid_poly)
        var_images[sp.name] = images
    return SchemeMorphism(name or f"{outer.name}o{inner.name}",
                          inner.source, outer.target, piece_map, var_images,
                          asserted=outer.asserted & inner.asserted)


def fiber_product(f: SchemeMorphism, g: SchemeMorphism, name: str | None = None):
    """X x_S Y for f: X -> S, g: Y -> S.

    One piece per pair of pieces over a common S-piece: the ring on the
    disjoint union of the variable sets (right factor renamed), the ideal
    generated by both piece ideals and the gluing relations, unit pieces
    pruned.  Returns (scheme, pr1, pr2).
    """
    if f.target is not g.target and f.target.name != g.target.name:
        raise ValueError("fiber product of morphisms with different targets")
    field_ = f.source.field
    pname = name or f"{f.source.name}_x_{g.source.name}"
    pieces = []
    pr1_pieces, pr1_images = {}, {}
    pr2_pieces, pr2_images = {}, {}
    for pa in f.source.pieces:
        for pb in g.source.pieces:
            if f.piece_map[pa.name] != g.piece_map[pb.name]:
                continue
            sp = f.target.piece(f.piece_map[pa.name])
            left = list(pa.ring.variables)
            taken = set(left)
            ren = {}
            for v in pb.ring.variables:
                nv = v
                while nv in taken:
                    nv += "_r"
                ren[v] = nv
                taken.add(nv)
            ring = PolyRing(field_, tuple(left) + tuple(ren[v] for v in pb.ring.variables))
            gens = [h.map_into(ring) for h in pa.ideal.generators]
            gens += [h.map_into(ring, rename=ren) for h in pb.ideal.generators]
            for s in sp.ring.variables:
                lhs = f.var_images[pa.name][s].map_into(ring)
                rhs = g.var_images[pb.name][s].map_into(ring, rename=ren)
                gens.append(lhs - rhs)
            handle = IdealHandle(ring, gens)
            if handle.is_unit():
                continue
            piece_name = f"{pa.name}__{pb.name}"
            pieces.append(AffinePiece(piece_name, ring, handle))
            pr1_pieces[piece_name] = pa.name
            pr1_images[piece_name] = {v: ring.var(v) for v in pa.ring.variables}
            pr2_pieces[piece_name] = pb.name
            pr2_images[piece_name] = {v: ring.var(ren[v]) for v in pb.ring.variables}
    if not pieces:
        empty_ring = PolyRing(field_, ())
        pieces = [AffinePiece("empty", empty_ring,
                              IdealHandle(empty_ring, [empty_ring.one]), allow_empty=True)]
        product = Scheme(pname, pieces)
        pr1 = _empty_morphism(f"{pname}_pr1", product, f.source)
        pr2 = _empty_morphism(f"{pname}_pr2", product, g.source)
        return product, pr1, pr2
    product = Scheme(pname, pieces)
    pr1 = SchemeMorphism(f"{pname}_pr1", product, f.source, pr1_pieces, pr1_images,
                         asserted=g.asserted & _BASE_CHANGE_STABLE)
    pr2 = SchemeMorphism(f"{pname}_pr2", product, g.source, pr2_pieces, pr2_images,
                         asserted=f.asserted & _BASE_CHANGE_STABLE)
    return product, pr1, pr2


def _empty_morphism(name: str, source: Scheme, target: Scheme) -> SchemeMorphism:
    tgt_piece = target.pieces[0]
    piece_map = {p.name: tgt_piece.name for p in source.pieces}
    images = {p.name: {v: p.ring.zero for v in tgt_piece.ring.variables}
              for p in source.pieces}
    # an empty source makes every map well-defined: the ideal is the unit
    return SchemeMorphism(name, source, target, piece_map, images)


def diagonal_morphism(f: SchemeMorphism, square, pr1: SchemeMorphism,
                      pr2: SchemeMorphism) -> SchemeMorphism:
    """The section X -> X x_Y X of both projections."""
    piece_map = {}
    var_images = {}
    for p in square.pieces:
        left = pr1.piece_map[p.name]
        if left != pr2.piece_map[p.name] or left in piece_map:
            continue
        piece_map[left] = p.name
        src_ring = f.source.piece(left).ring
        images = {}
        for v, img in pr1.var_images[p.name].items():
            images[img.variables_used()[0]] = src_ring.var(v)
        for v, img in pr2.var_images[p.name].items():
            images[img.variables_used()[0]] = src_ring.var(v)
        var_images[left] = images
    return SchemeMorphism(f"{f.source.name}_diag", f.source, square,
                          piece_map, var_images)


def make_point(scheme: Scheme, piece: str, ideal: IdealHandle) -> SchemePoint:
    """Build a point from a prime ideal, certifying primality if possible."""
    return SchemePoint(scheme, piece, assert_prime(ideal))
