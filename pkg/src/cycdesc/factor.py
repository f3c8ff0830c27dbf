"""Exact factorization for the polynomial shapes the engine needs.

This is deliberately not a general multivariate factorizer.  Supported:

  * univariate over Q: rational roots, quadratic/cubic by root exclusion,
    then exhaustive Kronecker interpolation at bounded degree;
  * univariate over a prime field: squarefree decomposition, distinct-degree
    splitting, then equal-degree splitting (deterministically seeded);
  * polynomials that are univariate over a one-parameter function field, or
    equivalently bivariate over Q/Fp: content extraction, a shortcut for
    parameter-linear inputs, discriminants for quadratics, and otherwise
    monicized evaluation/interpolation reusing the univariate engines;
  * anything reachable from the above by splitting off monomials and
    contents.

Everything else raises UnsupportedShape, which callers treat as "try another
rule", never as an answer.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

from . import _sparse
from .errors import UnsupportedShape
from .fields import FieldDesc, FieldElement
from .poly import PolyRing, Polynomial, divrem

_DEGREE_CAP = 32
_COMBINATION_CAP = 200_000


def factor(f: Polynomial) -> list[tuple[Polynomial, int]]:
    """Factor into irreducibles over the coefficient field.

    Returns (factor, multiplicity) pairs, factors monic under degrevlex and
    sorted by printed form; the product of the factors times a unit equals f.
    """
    if f.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    if f.total_degree() > _DEGREE_CAP:
        raise UnsupportedShape(f"degree {f.total_degree()} exceeds the supported bound")
    acc: dict[Polynomial, int] = {}
    _factor_into(f, 1, acc)
    return sorted(((p, m) for p, m in acc.items()), key=lambda t: str(t[0]))


def is_irreducible(f: Polynomial) -> bool:
    fs = factor(f)
    return len(fs) == 1 and fs[0][1] == 1 and not fs[0][0].is_constant()


def _add(acc: dict, p: Polynomial, mult: int):
    p = p.monic()
    acc[p] = acc.get(p, 0) + mult


def _factor_into(f: Polynomial, mult: int, acc: dict):
    ring = f.ring
    work = f
    # split off the monomial part first
    for i, v in enumerate(ring.variables):
        e = min(t[i] for t in work.terms)
        if e > 0:
            _add(acc, ring.var(v), e * mult)
            work = Polynomial(ring, _sparse.shift_var(work.terms, i, -e))
    if work.is_constant():
        return
    used = work.variables_used()
    if len(used) == 1:
        _factor_one_var(work, used[0], mult, acc)
        return
    # several ring variables: peel off the content w.r.t. a main variable
    main = min(used, key=lambda v: (work.degree_in(v), ring.index(v)))
    m = ring.index(main)
    cont = ring.zero
    for c in _sparse._coeffs_in(work.terms, m):
        cont = Polynomial(ring, _sparse.gcd(cont.terms, c))
    if not cont.is_constant():
        _factor_into(cont, mult, acc)
        work = Polynomial(ring, _sparse.exact_div(work.terms, cont.terms, _sparse.degrevlex_key))
        if work.is_constant():
            return
    if work.degree_in(main) == 1:
        _add(acc, work, mult)
        return
    others = [v for v in work.variables_used() if v != main]
    if ring.field.kind in ("Q", "Fp") and len(others) == 1:
        sub = PolyRing(ring.field, (others[0], main))
        for g, k in _factor_bivariate(work.map_into(sub), others[0], main):
            _add(acc, g.map_into(ring), k * mult)
        return
    if work.degree_in(main) == 2 and ring.field.char != 2:
        split = _quadratic_split(work, main)
        if split is None:
            _add(acc, work, mult)
        else:
            for g in split:
                _factor_into(g, mult, acc)
        return
    raise UnsupportedShape(f"cannot factor {work} (genuinely multivariate shape)")


def _factor_one_var(f: Polynomial, var: str, mult: int, acc: dict):
    kind = f.ring.field.kind
    if kind == "Q":
        pairs = _factor_uni_rat(f, var)
    elif kind == "Fp":
        pairs = _factor_uni_fp(f, var)
    else:
        pairs = _factor_over_function_field(f, var)
    for g, k in pairs:
        _add(acc, g, k * mult)


# -- squarefree helpers --------------------------------------------------------


def squarefree_part(f: Polynomial) -> Polynomial:
    """Product of the distinct irreducible factors, monic.

    Uses the derivative gcd; if that degenerates (only possible in positive
    characteristic) it falls back to a full factorization.
    """
    if f.is_zero() or f.is_constant():
        return f
    g = f.ring.zero
    for v in f.variables_used():
        g = Polynomial(f.ring, _sparse.gcd(g.terms, f.derivative(v).terms))
    g = Polynomial(f.ring, _sparse.gcd(g.terms, f.terms))
    if g.is_constant():
        return f.monic()
    part = Polynomial(f.ring, _sparse.exact_div(f.terms, g.terms, _sparse.degrevlex_key))
    if part.is_constant():
        out = f.ring.one
        for p, _ in factor(f):
            if not p.is_constant():
                out = out * p
        return out.monic()
    # the quotient can still carry repeated factors shared with g
    return squarefree_part(part) if not Polynomial(
        f.ring, _sparse.gcd(part.terms, g.terms)).is_constant() else part.monic()


def _multiplicity_split(f: Polynomial, primes: list[Polynomial]) -> list[tuple[Polynomial, int]]:
    out = []
    rest = f
    for p in primes:
        k = 0
        while True:
            q, r = divrem(rest, [p])
            if not r.is_zero():
                break
            rest = q[0]
            k += 1
        if k:
            out.append((p, k))
    if not rest.is_constant():
        raise UnsupportedShape(f"radical computation missed a factor of {f}")
    return out


# -- univariate over Q ----------------------------------------------------------


def _int_divisors(n: int) -> list[int]:
    n = abs(n)
    if n > 10 ** 12:
        raise UnsupportedShape(f"divisor enumeration infeasible for {n}")
    out = set()
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.add(d)
            out.add(n // d)
        d += 1
    return sorted(out)


def _factor_uni_rat(f: Polynomial, var: str) -> list[tuple[Polynomial, int]]:
    radical = squarefree_part(f)
    primes = _factor_squarefree_rat(radical, var)
    return _multiplicity_split(f.monic(), [p.monic() for p in primes])


def _factor_squarefree_rat(f: Polynomial, var: str) -> list[Polynomial]:
    ring = f.ring
    deg = f.degree_in(var)
    if deg <= 1:
        return [f]
    x = ring.var(var)
    # rational roots: p/q with p | trailing, q | leading integer coefficient
    coeffs = _rat_coeff_list(f, var)
    scale = math.lcm(*[c.denominator for c in coeffs])
    ints = [int(c * scale) for c in coeffs]
    content = math.gcd(*[abs(c) for c in ints if c]) or 1
    ints = [c // content for c in ints]
    lead, trail = ints[-1], next(c for c in ints if c)
    for p in _int_divisors(trail):
        for q in _int_divisors(lead):
            for sign in (1, -1):
                r = Fraction(sign * p, q)
                if _eval_rat(ints, r) == 0:
                    quot, rem = divrem(f, [x - ring.const(r)])
                    assert rem.is_zero()
                    return [x - ring.const(r)] + _factor_squarefree_rat(quot[0], var)
    if deg <= 3:
        return [f]
    return _kronecker_rat(f, var, ints)


def _rat_coeff_list(f: Polynomial, var: str) -> list[Fraction]:
    i = f.ring.index(var)
    out = [Fraction(0)] * (f.degree_in(var) + 1)
    for e, c in f.terms.items():
        out[e[i]] += c.value
    return out


def _eval_rat(ints: list[int], r: Fraction) -> Fraction:
    total = Fraction(0)
    for c in reversed(ints):
        total = total * r + c
    return total


def _kronecker_rat(f: Polynomial, var: str, ints: list[int]) -> list[Polynomial]:
    """Exhaustive search for a factor of degree d by interpolation through
    divisors of integer values; sound because a true factor divides f at
    every integer point.

    The interpolation points are chosen to minimize divisor counts and extra
    points act as a cheap divisibility filter before the actual division.
    """
    ring = f.ring
    deg = f.degree_in(var)
    pool = [0, 1, -1, 2, -2, 3, -3, 4, -4, 5, -5, 6, -6, 7, -7, 8, -8]
    evals = []
    for a in pool:
        v = int(_eval_rat(ints, Fraction(a)))
        try:
            cost = len(_int_divisors(v))
        except UnsupportedShape:
            cost = None
        evals.append((a, v, cost))
    evals.sort(key=lambda av: (av[2] is None, av[2] or 0, abs(av[0])))
    for d in range(2, deg // 2 + 1):
        chosen = [(a, v) for a, v, cost in evals[:d + 1]]
        if any(cost is None for _, _, cost in evals[:d + 1]):
            raise UnsupportedShape(f"Kronecker values too large for {f}")
        holdout = [(a, v) for a, v, _ in evals[d + 1:d + 4]]
        pts = [a for a, _ in chosen]
        choice_sets = []
        for j, (_, v) in enumerate(chosen):
            divs = _int_divisors(v)
            signed = divs if j == 0 else [s * t for s in divs for t in (1, -1)]
            choice_sets.append(signed)
        count = 1
        for s in choice_sets:
            count *= len(s)
        if count > _COMBINATION_CAP:
            raise UnsupportedShape(f"Kronecker search space too large for {f}")
        for combo in itertools.product(*choice_sets):
            cand = _interpolate_rat(ring, var, pts, combo)
            if cand is None or cand.degree_in(var) < 1:
                continue
            coeffs = _rat_coeff_list(cand, var)
            # a primitive integer factor exists whenever any factor does
            if any(c.denominator != 1 for c in coeffs):
                continue
            int_coeffs = [int(c) for c in coeffs]
            ok = True
            for a, v in holdout:
                gv = int(_eval_rat(int_coeffs, Fraction(a)))
                if gv == 0 or v % gv:
                    ok = False
                    break
            if not ok:
                continue
            quot, rem = divrem(f, [cand])
            if rem.is_zero():
                return [cand] + _factor_squarefree_rat(quot[0], var)
    return [f]


def _interpolate_rat(ring: PolyRing, var: str, pts, vals) -> Polynomial | None:
    x = ring.var(var)
    out = ring.zero
    for i, (a, v) in enumerate(zip(pts, vals)):
        num = ring.const(v)
        den = Fraction(1)
        for j, b in enumerate(pts):
            if j == i:
                continue
            num = num * (x - ring.const(b))
            den *= Fraction(a - b)
        out = out + num * ring.const(Fraction(1) / den)
    return out


# -- univariate over a prime field ----------------------------------------------


def _factor_uni_fp(f: Polynomial, var: str) -> list[tuple[Polynomial, int]]:
    out: list[tuple[Polynomial, int]] = []
    for part, mult in _sff_fp(f.monic(), var):
        for deg, prod in _ddf_fp(part, var):
            for g in _edf_fp(prod, deg, var):
                out.append((g, mult))
    return out


def _sff_fp(f: Polynomial, var: str) -> list[tuple[Polynomial, int]]:
    p = f.ring.field.p
    out = []
    c = Polynomial(f.ring, _sparse.gcd(f.terms, f.derivative(var).terms))
    w = Polynomial(f.ring, _sparse.exact_div(f.terms, c.terms, _sparse.degrevlex_key))
    i = 1
    while not w.is_constant():
        y = Polynomial(f.ring, _sparse.gcd(w.terms, c.terms))
        z = Polynomial(f.ring, _sparse.exact_div(w.terms, y.terms, _sparse.degrevlex_key))
        if not z.is_constant():
            out.append((z.monic(), i))
        w = y
        c = Polynomial(f.ring, _sparse.exact_div(c.terms, y.terms, _sparse.degrevlex_key))
        i += 1
    if not c.is_constant():
        # leftover is a p-th power; prime-field coefficients are Frobenius-fixed
        vi = f.ring.index(var)
        root_terms = {}
        for e, coef in c.terms.items():
            assert e[vi] % p == 0, "inseparable leftover is not a p-th power"
            root_terms[e[:vi] + (e[vi] // p,) + e[vi + 1:]] = coef
        for g, m in _sff_fp(Polynomial(f.ring, root_terms).monic(), var):
            out.append((g, m * p))
    return out


def _powmod_fp(base: Polynomial, exp: int, mod: Polynomial) -> Polynomial:
    result = base.ring.one
    while exp:
        if exp & 1:
            result = divrem(result * base, [mod])[1]
        base = divrem(base * base, [mod])[1]
        exp >>= 1
    return result


def _ddf_fp(f: Polynomial, var: str) -> list[tuple[int, Polynomial]]:
    p = f.ring.field.p
    x = f.ring.var(var)
    out = []
    h = divrem(x, [f])[1]
    d = 0
    while f.degree_in(var) >= 2 * (d + 1):
        d += 1
        h = _powmod_fp(h, p, f)
        g = Polynomial(f.ring, _sparse.gcd((h - x).terms, f.terms))
        if not g.is_constant():
            out.append((d, g.monic()))
            f = divrem(f, [g])[0][0].monic()
            h = divrem(h, [f])[1]
    if f.degree_in(var) > 0:
        out.append((f.degree_in(var), f.monic()))
    return out


def _edf_fp(g: Polynomial, d: int, var: str) -> list[Polynomial]:
    """Split a product of distinct irreducibles of equal degree d."""
    ring = g.ring
    p = ring.field.p
    if g.degree_in(var) == d:
        return [g.monic()]
    rng = random.Random(f"edf:{p}:{d}:{g}")
    x = ring.var(var)
    while True:
        coeffs = [rng.randrange(p) for _ in range(g.degree_in(var))]
        a = ring.zero
        for i, c in enumerate(coeffs):
            a = a + ring.const(c) * x ** i
        if a.is_constant():
            continue
        if p == 2:
            b = ring.zero
            t = a
            for _ in range(d):
                b = divrem(b + t, [g])[1]
                t = divrem(t * t, [g])[1]
        else:
            b = _powmod_fp(a, (p ** d - 1) // 2, g) - ring.one
        h = Polynomial(ring, _sparse.gcd(b.terms, g.terms))
        if 0 < h.degree_in(var) < g.degree_in(var):
            rest = divrem(g, [h])[0][0]
            return sorted(_edf_fp(h.monic(), d, var) + _edf_fp(rest.monic(), d, var),
                          key=str)


# -- function-field and bivariate shapes -----------------------------------------


def _factor_over_function_field(f: Polynomial, var: str) -> list[tuple[Polynomial, int]]:
    """Univariate over k0(params): clear denominators and factor the joint
    polynomial over k0, then push factors back."""
    K = f.ring.field
    base = K.base
    joint_ring = PolyRing(base, K.params + (var,))
    joint = _clear_denominators(f, var, joint_ring)
    used_params = [v for v in joint.variables_used() if v != var]
    if not used_params:
        inner = _restrict(joint, (var,))
        pairs = (_factor_uni_rat if base.kind == "Q" else _factor_uni_fp)(inner, var)
        return [(_lift_joint(p.map_into(joint_ring), var, f.ring), m) for p, m in pairs]
    if len(used_params) == 1:
        pairs = _factor_bivariate(joint, used_params[0], var)
        out = []
        for g, m in pairs:
            if g.degree_in(var) == 0:
                continue  # parameter-only factor: a unit of the function field
            out.append((_lift_joint(g, var, f.ring), m))
        return out
    if f.degree_in(var) == 2 and K.char != 2:
        split = _quadratic_split(joint, var)
        if split is not None:
            out: dict[Polynomial, int] = {}
            for g in split:
                if g.degree_in(var) == 0:
                    continue
                lifted = _lift_joint(g, var, f.ring)
                out[lifted.monic()] = out.get(lifted.monic(), 0) + 1
            return list(out.items())
        return [(f.monic(), 1)]
    if f.degree_in(var) == 1:
        return [(f.monic(), 1)]
    raise UnsupportedShape(f"{f} uses several transcendentals at degree > 2")


def _clear_denominators(f: Polynomial, var: str, joint_ring: PolyRing) -> Polynomial:
    K = f.ring.field
    den = {(0,) * len(K.params): K.base.one}
    for c in f.terms.values():
        den = _sparse.exact_div(_sparse.mul(den, dict(c.value[1])),
                                _sparse.gcd(den, dict(c.value[1])), _sparse.degrevlex_key)
    out: dict = {}
    vi = f.ring.index(var)
    for e, c in f.terms.items():
        num, cden = dict(c.value[0]), dict(c.value[1])
        lifted = _sparse.mul(num, _sparse.exact_div(den, cden, _sparse.degrevlex_key))
        for pe, pc in lifted.items():
            out[pe + (e[vi],)] = pc
    return Polynomial(joint_ring, out)


def _restrict(f: Polynomial, keep: tuple[str, ...]) -> Polynomial:
    ring = PolyRing(f.ring.field, keep)
    return f.map_into(ring)


def _lift_joint(g: Polynomial, var: str, target: PolyRing) -> Polynomial:
    """Send k0[params, var] back into target = k0(params)[vars] and make monic."""
    K = target.field
    vi = g.ring.index(var)
    width = len(K.params)
    out: dict = {}
    one_den = {(0,) * width: K.base.one}
    ti = target.index(var)
    for e, c in g.terms.items():
        pe = e[:vi] + e[vi + 1:]
        scalar = K.ratfunc({pe: c}, one_den)
        te = tuple(e[vi] if i == ti else 0 for i in range(target.nvars))
        out[te] = out.get(te, K.zero) + scalar
    return Polynomial(target, out).monic()


def _quadratic_split(f: Polynomial, main: str) -> list[Polynomial] | None:
    """Split a*main^2 + b*main + c by taking an exact square root of the
    discriminant in the remaining variables; None means irreducible."""
    ring = f.ring
    m = ring.index(main)
    a = Polynomial(ring, _sparse.coeff_of_power(f.terms, m, 2))
    b = Polynomial(ring, _sparse.coeff_of_power(f.terms, m, 1))
    c = Polynomial(ring, _sparse.coeff_of_power(f.terms, m, 0))
    disc = b * b - 4 * a * c
    if disc.is_zero():
        s = ring.zero
    else:
        s = poly_sqrt(disc)
        if s is None:
            return None
    x = ring.var(main)
    f1 = (2 * a * x + b - s)
    f2 = (2 * a * x + b + s)
    out = []
    rest = f
    for g in (f1, f2):
        g = _primitive_wrt(g, main)
        quot, rem = divrem(rest, [g])
        if not rem.is_zero():
            return None
        rest = quot[0]
        out.append(g)
    assert rest.is_constant()
    return out


def _primitive_wrt(f: Polynomial, main: str) -> Polynomial:
    m = f.ring.index(main)
    cont: dict = {}
    for c in _sparse._coeffs_in(f.terms, m):
        cont = _sparse.gcd(cont, c)
    return Polynomial(f.ring, _sparse.exact_div(f.terms, cont, _sparse.degrevlex_key)).monic()


def poly_sqrt(f: Polynomial) -> Polynomial | None:
    """Exact square root of a polynomial over Q or Fp (odd char), or None."""
    if f.is_zero():
        return f
    field = f.ring.field
    if field.kind == "RF" or field.char == 2:
        return None
    key = _sparse.degrevlex_key
    le, lc = _sparse.leading(f.terms, key)
    if any(e % 2 for e in le):
        return None
    c = _scalar_sqrt(lc)
    if c is None:
        return None
    s = Polynomial(f.ring, {tuple(e // 2 for e in le): c})
    two_lc = (c + c)
    for _ in range((len(f.terms) + 2) ** 2):
        r = f - s * s
        if r.is_zero():
            return s
        re, rc = _sparse.leading(r.terms, key)
        se = tuple(a - b for a, b in zip(re, [e // 2 for e in le]))
        if any(x < 0 for x in se):
            return None
        s = s + Polynomial(f.ring, {tuple(se): rc * two_lc.inv()})
    return None


def _scalar_sqrt(c: FieldElement) -> FieldElement | None:
    field = c.field
    if field.kind == "Q":
        v = c.value
        if v < 0:
            return None
        n, d = math.isqrt(v.numerator), math.isqrt(v.denominator)
        if n * n == v.numerator and d * d == v.denominator:
            return field.from_fraction(Fraction(n, d))
        return None
    if field.kind == "Fp":
        p = field.p
        if p == 2 or c.value == 0:
            return c
        if pow(c.value, (p - 1) // 2, p) != 1:
            return None
        return field.from_int(_tonelli(c.value, p))
    return None


def _tonelli(n: int, p: int) -> int:
    if p % 4 == 3:
        return pow(n, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(n, q, p), pow(n, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def _factor_bivariate(f: Polynomial, u: str, x: str) -> list[tuple[Polynomial, int]]:
    """Factor a polynomial in k0[u, x] with x-degree >= 1 over k0 in {Q, Fp}."""
    ring = f.ring
    out: dict[Polynomial, int] = {}
    m = ring.index(x)
    cont: dict = {}
    for c in _sparse._coeffs_in(f.terms, m):
        cont = _sparse.gcd(cont, c)
    cont_poly = Polynomial(ring, cont)
    if not cont_poly.is_constant():
        _factor_into(cont_poly, 1, out)
        f = Polynomial(ring, _sparse.exact_div(f.terms, cont, _sparse.degrevlex_key))
    if f.degree_in(x) == 0:
        return list(out.items())
    dfx = f.derivative(x)
    if dfx.is_zero():
        raise UnsupportedShape(f"{f} is inseparable in {x}")
    radical = Polynomial(ring, _sparse.exact_div(
        f.terms, _sparse.gcd(f.terms, dfx.terms), _sparse.degrevlex_key))
    primes = _factor_bivariate_squarefree(radical, u, x)
    for p, k in _multiplicity_split(f.monic(), [q.monic() for q in primes]):
        out[p] = out.get(p, 0) + k
    return list(out.items())


def _squarefree_uni_primes(g: Polynomial, x: str) -> list[Polynomial]:
    if g.ring.field.kind == "Q":
        return _factor_squarefree_rat(g, x)
    return [p for p, _ in _factor_uni_fp(g, x)]


def _factor_bivariate_squarefree(f: Polynomial, u: str, x: str) -> list[Polynomial]:
    ring = f.ring
    if f.degree_in(u) == 0:
        return _squarefree_uni_primes(f, x)
    if f.degree_in(x) == 1:
        return [f]
    if f.degree_in(u) == 1:
        # A(x)*u + B(x): any common divisor of A and B splits off, the rest
        # is irreducible
        ui = ring.index(u)
        A = Polynomial(ring, _sparse.coeff_of_power(f.terms, ui, 1))
        B = Polynomial(ring, _sparse.coeff_of_power(f.terms, ui, 0))
        g = Polynomial(ring, _sparse.gcd(A.terms, B.terms))
        if g.is_constant():
            return [f]
        rest = Polynomial(ring, _sparse.exact_div(f.terms, g.terms, _sparse.degrevlex_key))
        return _factor_bivariate_squarefree(g, u, x) + [rest]
    if f.degree_in(x) == 2 and ring.field.char != 2:
        split = _quadratic_split(f, x)
        if split is None:
            return [f]
        return split
    return _kronecker_bivariate(f, u, x)


def _kronecker_bivariate(f: Polynomial, u: str, x: str) -> list[Polynomial]:
    """Evaluation/interpolation factor search for squarefree primitive f."""
    ring = f.ring
    base = ring.field
    n = f.degree_in(x)
    ui, xi = ring.index(u), ring.index(x)
    lc = Polynomial(ring, _sparse.coeff_of_power(f.terms, xi, n))
    # monicize: H(y) has coefficient a_i * lc^(n-1-i) at y^i, and y^n on top
    y = ring.var(x)
    H = y ** n
    for i in range(n):
        a = Polynomial(ring, _sparse.coeff_of_power(f.terms, xi, i))
        if not a.is_zero():
            H = H + a * lc ** (n - 1 - i) * y ** i
    M = H.degree_in(u)
    if base.kind == "Q":
        pool = [0] + [s * k for k in range(1, M + n + 20) for s in (1, -1)]
    else:
        pool = list(range(base.p))
    alphas, specs = [], []
    uni_ring = PolyRing(base, (x,))
    for a in pool:
        if len(alphas) == M + 1:
            break
        spec = _eval_at_param(H, ui, a, uni_ring)
        dspec = spec.derivative(x)
        if Polynomial(uni_ring, _sparse.gcd(spec.terms, dspec.terms)).is_constant():
            alphas.append(a)
            specs.append(spec)
    if len(alphas) < M + 1:
        raise UnsupportedShape(f"not enough good evaluation points for {f}")
    fact_lists = []
    for spec in specs:
        pairs = (_factor_uni_rat if base.kind == "Q" else _factor_uni_fp)(spec, x)
        irr = [p.monic() for p, k in pairs for _ in range(k)]
        if len(irr) == 1:
            return [f]
        if len(irr) > 16:
            raise UnsupportedShape("too many specialized factors")
        fact_lists.append(irr)
    for d in range(1, n // 2 + 1):
        subset_choices = []
        for irr in fact_lists:
            opts = []
            for mask in range(1, 1 << len(irr)):
                degs = sum(irr[j].degree_in(x) for j in range(len(irr)) if mask >> j & 1)
                if degs == d:
                    g = uni_ring.one
                    for j in range(len(irr)):
                        if mask >> j & 1:
                            g = g * irr[j]
                    opts.append(g)
            if not opts:
                break
            seen, uniq = set(), []
            for g in opts:
                if str(g) not in seen:
                    seen.add(str(g))
                    uniq.append(g)
            subset_choices.append(uniq)
        else:
            count = 1
            for s in subset_choices:
                count *= len(s)
            if count > _COMBINATION_CAP:
                raise UnsupportedShape("bivariate Kronecker search space too large")
            for combo in itertools.product(*subset_choices):
                cand = _interpolate_bivariate(ring, u, x, alphas, combo, d)
                if cand is None:
                    continue
                quot, rem = divrem(H, [cand])
                if rem.is_zero():
                    rest = quot[0]
                    factors = [cand]
                    if rest.degree_in(x) > 0:
                        factors += _factor_bivariate_squarefree(rest, u, x)
                    return [_demonicize(g, lc, u, x) for g in factors]
    return [f]


def _demonicize(h: Polynomial, lc: Polynomial, u: str, x: str) -> Polynomial:
    """Translate a factor of the monicized polynomial back: substitute
    y -> lc*x and strip the u-content."""
    if lc.is_constant():
        return h.monic()
    ring = h.ring
    images = {v: ring.var(v) for v in ring.variables}
    images[x] = lc * ring.var(x)
    g = h.substitute(images, ring)
    return _primitive_wrt(g, x)


def _eval_at_param(f: Polynomial, ui: int, a: int, uni_ring: PolyRing) -> Polynomial:
    field = f.ring.field
    av = field.from_int(a)
    out: dict = {}
    xi = 1 - ui if f.ring.nvars == 2 else None
    for e, c in f.terms.items():
        scaled = c * (av ** e[ui] if e[ui] else field.one)
        key = (e[xi],)
        if key in out:
            out[key] = out[key] + scaled
        else:
            out[key] = scaled
    return Polynomial(uni_ring, out)


def _interpolate_bivariate(ring: PolyRing, u: str, x: str, alphas, combo, d: int):
    """Reassemble a candidate monic degree-d factor from its specializations."""
    field = ring.field
    xi = ring.index(x)
    ui = ring.index(u)
    cand: dict = {}
    e_lead = [0, 0]
    e_lead[xi] = d
    cand[tuple(e_lead)] = field.one
    for j in range(d):
        pts = [field.from_int(a) for a in alphas]
        vals = []
        for g, a in zip(combo, alphas):
            vals.append(g.terms.get((j,), field.zero))
        coeffs = _lagrange(field, pts, vals)
        for k, c in enumerate(coeffs):
            if c.is_zero():
                continue
            e = [0, 0]
            e[ui] = k
            e[xi] = j
            key = tuple(e)
            cand[key] = cand.get(key, field.zero) + c
    return Polynomial(ring, cand)


def _lagrange(field: FieldDesc, pts: list[FieldElement], vals: list[FieldElement]):
    """Coefficients (low to high) of the interpolating polynomial."""
    n = len(pts)
    coeffs = [field.zero] * n
    for i in range(n):
        basis = [field.one]
        denom = field.one
        for j in range(n):
            if j == i:
                continue
            new = [field.zero] * (len(basis) + 1)
            for k, b in enumerate(basis):
                new[k] = new[k] + (-pts[j]) * b
                new[k + 1] = new[k + 1] + b
            basis = new
            denom = denom * (pts[i] - pts[j])
        scalar = vals[i] * denom.inv()
        for k, b in enumerate(basis):
            coeffs[k] = coeffs[k] + scalar * b
    return coeffs
