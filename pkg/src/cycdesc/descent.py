"""Descent of cycles along a morphism: the defect map, fiber gcd invariants,
effective-descent orders, and finite truncations of the obstruction group.

Everything scope-global here is a truncation: the set of base points over
which invariants are combined is finite and explicit, and every output
labels it.  Per-point computations are exact.  The fiberwise decomposition
of the obstruction group justifies per-point verification for universally
generalizing morphisms.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from .cycles import Cycle, fundamental_cycle, pullback_cycle
from .decomp import minimal_primes, multiplicity
from .errors import (EmptyFiber, EmptyScope, NotUniversallyGeneralizing,
                     VerificationFailure)
from .intlat import (IntMatrix, is_saturated, kernel_basis, quotient_invariants,
                     snf, solve_integer)
from .scheme import (SchemeMorphism, SchemePoint, closure_of_point,
                     fiber_product, image_point, preimage_subscheme)


def _factorize(n: int) -> dict[int, int]:
    assert n >= 1
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass(frozen=True)
class FactoredInt:
    """A positive integer kept in factored form; used for the scope-truncated
    lcm and product invariants."""

    factors: tuple[tuple[int, int], ...]

    @classmethod
    def from_int(cls, n: int) -> "FactoredInt":
        return cls(tuple(sorted(_factorize(n).items())))

    @classmethod
    def one(cls) -> "FactoredInt":
        return cls(())

    def value(self) -> int:
        out = 1
        for p, e in self.factors:
            out *= p ** e
        return out

    def lcm(self, other: "FactoredInt") -> "FactoredInt":
        merged = dict(self.factors)
        for p, e in other.factors:
            merged[p] = max(merged.get(p, 0), e)
        return FactoredInt(tuple(sorted(merged.items())))

    def times(self, other: "FactoredInt") -> "FactoredInt":
        merged = dict(self.factors)
        for p, e in other.factors:
            merged[p] = merged.get(p, 0) + e
        return FactoredInt(tuple(sorted(merged.items())))

    def divides(self, other: "FactoredInt") -> bool:
        have = dict(other.factors)
        return all(have.get(p, 0) >= e for p, e in self.factors)

    def __str__(self) -> str:
        if not self.factors:
            return "1"
        return " * ".join(f"{p}^{e}" if e > 1 else str(p) for p, e in self.factors)


@dataclass(frozen=True)
class FiberComponent:
    point: SchemePoint
    length: int
    lies_over: bool


class DescentProblem:
    """A morphism with its cached self-product and a finite base-point scope."""

    def __init__(self, f: SchemeMorphism, point_scope=()):
        self.f = f
        self.point_scope = tuple(point_scope)
        for y in self.point_scope:
            if y.scheme.name != f.target.name:
                raise ValueError(f"scope point {y} does not lie on {f.target}")
        self._lock = threading.Lock()
        self._square = None
        self._fibers: dict[SchemePoint, tuple[FiberComponent, ...]] = {}
        self._pullbacks: dict[SchemePoint, Cycle] = {}
        self._defects: dict[SchemePoint, Cycle] = {}

    @property
    def square(self):
        with self._lock:
            if self._square is None:
                self._square = fiber_product(self.f, self.f,
                                             name=f"{self.f.source.name}_sq")
            return self._square

    @property
    def pr1(self) -> SchemeMorphism:
        return self.square[1]

    @property
    def pr2(self) -> SchemeMorphism:
        return self.square[2]

    def pullback_of(self, y: SchemePoint) -> Cycle:
        with self._lock:
            hit = self._pullbacks.get(y)
        if hit is not None:
            return hit
        c = pullback_cycle(self.f, Cycle.of_point(y))
        with self._lock:
            self._pullbacks.setdefault(y, c)
            return self._pullbacks[y]

    def fiber_components(self, y: SchemePoint) -> tuple[FiberComponent, ...]:
        """Generic points of the preimage of the closure of y, with local
        lengths, flagged by whether they map onto y itself."""
        with self._lock:
            hit = self._fibers.get(y)
        if hit is not None:
            return hit
        W = preimage_subscheme(self.f, closure_of_point(y))
        comps = []
        for piece in self.f.source.pieces:
            handle = W.ideals[piece.name]
            if handle.is_unit():
                continue
            for prime in minimal_primes(handle):
                pt = SchemePoint(self.f.source, piece.name, prime)
                comps.append(FiberComponent(
                    pt, multiplicity(handle, prime),
                    image_point(self.f, pt) == y))
        comps.sort(key=lambda c: c.point.sort_key)
        result = tuple(comps)
        with self._lock:
            self._fibers.setdefault(y, result)
            return self._fibers[y]

    def is_generalizing(self) -> bool:
        return bool(self.f.asserted & {"generalizing", "universally_generalizing"})


def descent_defect(P: DescentProblem, c: Cycle) -> Cycle:
    """(pr1* - pr2*) of a cycle on the source; zero means descent datum."""
    _, pr1, pr2 = P.square
    square = P.square[0]
    out = Cycle(square)
    for pt, coeff in c.terms.items():
        with P._lock:
            hit = P._defects.get(pt)
        if hit is None:
            single = Cycle.of_point(pt)
            hit = pullback_cycle(pr1, single) - pullback_cycle(pr2, single)
            with P._lock:
                P._defects.setdefault(pt, hit)
        out = out + coeff * hit
    return out


def fiber_gcd(P: DescentProblem, y: SchemePoint) -> int:
    """gcd of the lengths at all generic points of the pulled-back closure."""
    comps = P.fiber_components(y)
    if not comps:
        raise EmptyFiber(f"the preimage of the closure of {y} is empty")
    out = 0
    for comp in comps:
        out = _gcd(out, comp.length)
    return out


def residual_gcd(P: DescentProblem, y: SchemePoint) -> int:
    """gcd of the lengths at the generic points lying over y itself."""
    comps = [c for c in P.fiber_components(y) if c.lies_over]
    if not comps:
        raise EmptyFiber(f"no generic point of the fiber lies over {y}")
    out = 0
    for comp in comps:
        out = _gcd(out, comp.length)
    return out


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def fiber_gcd_lcm(P: DescentProblem) -> FactoredInt:
    """Scope-truncated lcm of the per-point fiber gcds."""
    if not P.point_scope:
        raise EmptyScope("the point scope is empty")
    out = FactoredInt.one()
    for y in P.point_scope:
        out = out.lcm(FactoredInt.from_int(fiber_gcd(P, y)))
    return out


def residual_gcd_lcm(P: DescentProblem) -> FactoredInt:
    if not P.point_scope:
        raise EmptyScope("the point scope is empty")
    out = FactoredInt.one()
    for y in P.point_scope:
        out = out.lcm(FactoredInt.from_int(residual_gcd(P, y)))
    return out


def residual_gcd_product(P: DescentProblem) -> FactoredInt:
    """Scope-truncated product of the residual fiber gcds."""
    if not P.point_scope:
        raise EmptyScope("the point scope is empty")
    out = FactoredInt.one()
    for y in P.point_scope:
        out = out.times(FactoredInt.from_int(residual_gcd(P, y)))
    return out


def _coordinates(cycles: list[Cycle], points: list[SchemePoint]) -> IntMatrix:
    index = {pt: i for i, pt in enumerate(points)}
    cols = []
    for c in cycles:
        col = [0] * len(points)
        for pt, coeff in c.terms.items():
            col[index[pt]] = coeff
        cols.append(col)
    return IntMatrix.from_columns(cols, len(points))


def _union_support(cycles) -> list[SchemePoint]:
    seen = {}
    for c in cycles:
        for pt in c.terms:
            seen[pt] = True
    return sorted(seen, key=lambda p: p.sort_key)


def effective_order(P: DescentProblem, c: Cycle):
    """Smallest m >= 1 with m*c in the image of the pull-back, together with
    a witness cycle on the base; None if no multiple is effective.

    Candidate base points are the images of the support of c; when the
    morphism is not asserted generalizing the scope points are added, since
    then pull-backs may spread over other fibers.
    """
    if c.is_zero():
        raise ValueError("effective_order of the zero cycle")
    candidates: dict[SchemePoint, bool] = {}
    for pt in c.support():
        candidates[image_point(P.f, pt)] = True
    if not P.is_generalizing():
        for y in P.point_scope:
            candidates[y] = True
    cand = sorted(candidates, key=lambda p: p.sort_key)
    pulls = [P.pullback_of(y) for y in cand]
    rows = _union_support(pulls + [c])
    A = _coordinates(pulls, rows)
    b_col = _coordinates([c], rows).column(0)
    res = snf(A)
    cb = res.U.mul_vec(b_col)
    diag = res.diagonal()
    rank = res.rank()
    for i in range(len(rows)):
        d = diag[i] if i < len(diag) else 0
        if d == 0 and cb[i]:
            return None
    if rank == 0:
        return None
    exponent = diag[rank - 1]
    for m in sorted(_divisors(exponent)):
        x = solve_integer(A, [m * v for v in b_col])
        if x is not None:
            witness = Cycle(P.f.target)
            for y, coeff in zip(cand, x):
                witness = witness + coeff * Cycle.of_point(y)
            assert pullback_cycle(P.f, witness) == m * c
            return m, witness
    raise AssertionError("torsion exponent bound failed to produce a solution")


def _divisors(n: int) -> list[int]:
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


def _fiber_kernel(P: DescentProblem, points: list[SchemePoint]):
    """Integer kernel of the defect map restricted to the span of the given
    source points."""
    defects = [descent_defect(P, Cycle.of_point(pt)) for pt in points]
    rows = _union_support(defects)
    M = _coordinates(defects, rows) if rows else IntMatrix.zero(0, len(points))
    return kernel_basis(M)


def descent_cohomology_at(P: DescentProblem, y: SchemePoint) -> list[int]:
    """Invariant factors of the local obstruction group at y: cycles with
    descent datum supported on the fiber, modulo the pull-back of y.

    Requires the universally-generalizing assertion; the fiberwise
    decomposition of the obstruction group needs it.  Trivial factors are
    dropped, so [] means the vanishing group.
    """
    if "universally_generalizing" not in P.f.asserted:
        raise NotUniversallyGeneralizing(
            f"morphism {P.f.name} is not asserted universally generalizing")
    comps = P.fiber_components(y)
    bad = [c for c in comps if not c.lies_over]
    if bad:
        raise VerificationFailure(
            f"asserted generalizing, but a generic point of the pulled-back "
            f"closure of {y} does not lie over it: {bad[0].point}")
    points = [c.point for c in comps]
    if not points:
        return []
    kern = _fiber_kernel(P, points)
    fy = P.pullback_of(y)
    if any(pt not in points for pt in fy.support()):
        raise VerificationFailure(
            f"pull-back of {y} is not supported on its fiber")
    v = _coordinates([fy], points).column(0)
    alpha = solve_integer(kern, v)
    if alpha is None:
        raise VerificationFailure(
            f"pull-back of {y} has a nonzero descent defect")
    invs = quotient_invariants(kern.cols, IntMatrix.from_columns([alpha], kern.cols))
    out = sorted(d for d in invs if d != 1)
    g = fiber_gcd(P, y)
    for d in out:
        if d and g % d:
            raise VerificationFailure(
                f"local invariant {d} at {y} does not divide the fiber gcd {g}")
    return out


def check_saturation(P: DescentProblem) -> dict:
    """Scope-truncated saturation report.

    Per point: both gcd invariants, the local obstruction factors (when
    computable), and the kernel-lattice saturation verdict.  Globally: the
    invariant factors of the effective-descent lattice over the scope, its
    saturation verdict, and the criterion cross-checks; a biconditional
    violation is a hard failure.
    """
    if not P.point_scope:
        raise EmptyScope("the point scope is empty")
    univ = "universally_generalizing" in P.f.asserted
    point_reports = []
    g_lcm = FactoredInt.one()
    gres_lcm = FactoredInt.one()
    pi_res = FactoredInt.one()
    all_fibers_nonempty = True
    for y in P.point_scope:
        entry = {"point": y.render()}
        try:
            gy = fiber_gcd(P, y)
            entry["g_y"] = gy
            g_lcm = g_lcm.lcm(FactoredInt.from_int(gy))
        except EmptyFiber:
            entry["g_y"] = None
            all_fibers_nonempty = False
        try:
            gr = residual_gcd(P, y)
            entry["g_res_y"] = gr
            gres_lcm = gres_lcm.lcm(FactoredInt.from_int(gr))
            pi_res = pi_res.times(FactoredInt.from_int(gr))
        except EmptyFiber:
            entry["g_res_y"] = None
            all_fibers_nonempty = False
        comps = P.fiber_components(y)
        points = [c.point for c in comps]
        if points:
            kern = _fiber_kernel(P, points)
            entry["kernel_rank"] = kern.cols
            entry["kernel_saturated"] = is_saturated(len(points), kern)
        else:
            entry["kernel_rank"] = 0
            entry["kernel_saturated"] = True
        if univ:
            entry["h_local_invariants"] = descent_cohomology_at(P, y)
        else:
            entry["h_local_invariants"] = None
        point_reports.append(entry)

    pulls = [P.pullback_of(y) for y in P.point_scope]
    ambient = _union_support(pulls)
    eff = _coordinates(pulls, ambient)
    invs = quotient_invariants(len(ambient), eff)
    eff_saturated = all(d in (0, 1) for d in invs)

    violations = []
    if eff_saturated and all_fibers_nonempty and g_lcm.value() != 1:
        violations.append("effective lattice saturated although the fiber-gcd "
                          f"truncation is {g_lcm}")
    if all_fibers_nonempty and gres_lcm.value() == 1 and not eff_saturated:
        violations.append("residual gcds are 1 but the effective lattice is "
                          "not saturated")
    if P.is_generalizing() and all_fibers_nonempty:
        if eff_saturated != (g_lcm.value() == 1):
            violations.append("generalizing biconditional failed: saturation "
                              f"is {eff_saturated} but the gcd truncation is {g_lcm}")

    return {
        "morphism": P.f.describe(),
        "scope_size": len(P.point_scope),
        "points": point_reports,
        "g_scope": str(g_lcm),
        "g_res_scope": str(gres_lcm),
        "pi_res_scope": str(pi_res),
        "effective_invariants": invs,
        "effective_saturated": eff_saturated,
        "surjective_on_scope": all_fibers_nonempty,
        "violations": violations,
    }


def format_report(report: dict) -> str:
    """Deterministic plain-text rendering: one stanza per scope point,
    machine-parseable `key: value` lines."""
    lines = [f"morphism: {report['morphism']}",
             f"scope_size: {report['scope_size']}"]
    for entry in report["points"]:
        lines.append(f"point: {entry['point']}")
        gy = entry["g_y"]
        lines.append(f"  g_y: {'empty-fiber' if gy is None else gy}")
        gr = entry["g_res_y"]
        lines.append(f"  g_res_y: {'empty-fiber' if gr is None else gr}")
        h = entry["h_local_invariants"]
        if h is None:
            lines.append("  h_local_invariants: n/a (not universally generalizing)")
        else:
            lines.append(f"  h_local_invariants: [{', '.join(map(str, h))}]")
        lines.append(f"  kernel_saturated: {'yes' if entry['kernel_saturated'] else 'no'}")
    lines.append(f"g_scope (lcm over {report['scope_size']} points): {report['g_scope']}")
    lines.append(f"g_res_scope (lcm over {report['scope_size']} points): "
                 f"{report['g_res_scope']}")
    lines.append(f"pi_res_scope (product over {report['scope_size']} points): "
                 f"{report['pi_res_scope']}")
    lines.append("effective_invariants: "
                 f"[{', '.join(map(str, report['effective_invariants']))}]")
    lines.append(f"effective_saturated: {'yes' if report['effective_saturated'] else 'no'}")
    lines.append(f"surjective_on_scope: {'yes' if report['surjective_on_scope'] else 'no'}")
    if report["violations"]:
        for v in report["violations"]:
            lines.append(f"VIOLATION: {v}")
    else:
        lines.append("violations: none")
    return "\n".join(lines)
