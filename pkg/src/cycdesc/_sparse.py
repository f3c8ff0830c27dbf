"""Sparse multivariate polynomial kernel.

A polynomial is a dict mapping exponent tuples to nonzero scalars.  The
scalar type is duck-typed: anything supporting +, -, *, unary -, .inv(),
.is_zero() and carrying a .field with .one/.zero works (FieldElement does).
The same kernel backs ring elements and the numerators/denominators of
rational-function coefficients.

The zero polynomial is the empty dict.  Exponent tuples within one dict all
have the same length.
"""

from __future__ import annotations

from typing import Callable

Term = tuple[int, ...]


def canon(d: dict) -> dict:
    return {e: c for e, c in d.items() if not c.is_zero()}


def is_zero(d: dict) -> bool:
    return not d


def add(a: dict, b: dict) -> dict:
    out = dict(a)
    for e, c in b.items():
        if e in out:
            s = out[e] + c
            if s.is_zero():
                del out[e]
            else:
                out[e] = s
        else:
            out[e] = c
    return out


def neg(a: dict) -> dict:
    return {e: -c for e, c in a.items()}


def sub(a: dict, b: dict) -> dict:
    return add(a, neg(b))


def mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            p = ca * cb
            if e in out:
                s = out[e] + p
                if s.is_zero():
                    del out[e]
                else:
                    out[e] = s
            elif not p.is_zero():
                out[e] = p
    return out


def scale(a: dict, c) -> dict:
    if c.is_zero():
        return {}
    return {e: x * c for e, x in a.items()}


def total_degree(a: dict) -> int:
    if not a:
        return -1
    return max(sum(e) for e in a)


def degree_in(a: dict, i: int) -> int:
    if not a:
        return -1
    return max(e[i] for e in a)


def used_vars(a: dict) -> set[int]:
    out: set[int] = set()
    for e in a:
        for i, x in enumerate(e):
            if x:
                out.add(i)
    return out


def leading(a: dict, key: Callable[[Term], object]) -> tuple[Term, object]:
    e = max(a, key=key)
    return e, a[e]


def divides(e: Term, f: Term) -> bool:
    return all(x <= y for x, y in zip(e, f))


def exp_sub(f: Term, e: Term) -> Term:
    return tuple(y - x for x, y in zip(e, f))


def divrem(f: dict, divisors: list[dict], key: Callable[[Term], object]):
    """Multivariate division: f = sum(q_i * d_i) + r, divisors tried in order.

    No term of r is divisible by any divisor's leading monomial.
    """
    work = dict(f)
    quots: list[dict] = [{} for _ in divisors]
    rem: dict = {}
    lead_info = [leading(d, key) for d in divisors]
    while work:
        e, c = leading(work, key)
        for i, d in enumerate(divisors):
            de, dc = lead_info[i]
            if divides(de, e):
                qe = exp_sub(e, de)
                qc = c * dc.inv()
                quots[i] = add(quots[i], {qe: qc})
                work = sub(work, mul({qe: qc}, d))
                break
        else:
            rem[e] = c
            del work[e]
    return quots, rem


def exact_div(a: dict, b: dict, key: Callable[[Term], object]) -> dict:
    """Divide a by b, which must be exact."""
    if not a:
        return {}
    (q,), r = divrem(a, [b], key)
    assert not r, "exact_div called on a non-divisible pair"
    return q


def degrevlex_key(e: Term):
    return (sum(e), tuple(-x for x in reversed(e)))


def coeff_of_power(a: dict, i: int, d: int) -> dict:
    """Coefficient of var_i^d as a polynomial with var_i zeroed out."""
    out = {}
    for e, c in a.items():
        if e[i] == d:
            out[e[:i] + (0,) + e[i + 1:]] = c
    return out


def shift_var(a: dict, i: int, d: int) -> dict:
    return {e[:i] + (e[i] + d,) + e[i + 1:]: c for e, c in a.items()}


def derivative(a: dict, i: int) -> dict:
    out = {}
    for e, c in a.items():
        if e[i] == 0:
            continue
        k = c.field.from_int(e[i])
        p = c * k
        if not p.is_zero():
            out[e[:i] + (e[i] - 1,) + e[i + 1:]] = p
    return out


def _one_like(a: dict) -> dict:
    e, c = next(iter(a.items()))
    return {(0,) * len(e): c.field.one}


def monic(a: dict) -> dict:
    """Normalize the degrevlex-leading coefficient to one."""
    if not a:
        return a
    _, c = leading(a, degrevlex_key)
    return scale(a, c.inv())


def _prem(a: dict, b: dict, m: int) -> dict:
    """Pseudo-remainder of a by b with respect to var m."""
    db = degree_in(b, m)
    lcb = coeff_of_power(b, m, db)
    r = a
    while r and degree_in(r, m) >= db:
        dr = degree_in(r, m)
        lcr = coeff_of_power(r, m, dr)
        r = sub(mul(lcb, r), mul(shift_var(lcr, m, dr - db), b))
    return r


def _coeffs_in(a: dict, m: int) -> list[dict]:
    out: dict[int, dict] = {}
    for e, c in a.items():
        out.setdefault(e[m], {})[e[:m] + (0,) + e[m + 1:]] = c
    return list(out.values())


def _content(a: dict, m: int) -> dict:
    g: dict = {}
    for c in _coeffs_in(a, m):
        g = gcd(g, c)
    return g


def gcd(a: dict, b: dict) -> dict:
    """Multivariate gcd over a field, by primitive pseudo-remainder sequences.

    The result is monic under degrevlex; the gcd of units is one.
    """
    a, b = canon(a), canon(b)
    if not a and not b:
        return {}
    if not a:
        return monic(b)
    if not b:
        return monic(a)
    vs = used_vars(a) | used_vars(b)
    if not vs:
        return _one_like(a)
    m = max(vs)
    ca, cb = _content(a, m), _content(b, m)
    A = exact_div(a, ca, degrevlex_key)
    B = exact_div(b, cb, degrevlex_key)
    c = gcd(ca, cb)
    if degree_in(A, m) < degree_in(B, m):
        A, B = B, A
    while True:
        if not B:
            g = A
            break
        if degree_in(B, m) == 0:
            g = _one_like(a)
            break
        R = canon(_prem(A, B, m))
        if not R:
            g = B
            break
        A, B = B, exact_div(R, _content(R, m), degrevlex_key)
    return monic(mul(c, g))
