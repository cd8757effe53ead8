"""Sums of many rational functions with binomial denominators, done in
python-flint's multivariate polynomials over Q.

A Laurent numerator is stored as a polynomial times a monomial offset, and a
binomial 1 - c m with m = x^a / x^b (a, b >= 0 disjoint) as x^-b (x^b - c x^a).
Only the polynomial parts x^b - c x^a enter the common denominator.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction

try:
    import flint
except ImportError:  # pragma: no cover - exercised only without the wheel
    flint = None

from .exact_algebra import LaurentPoly, RatFunc

AVAILABLE = flint is not None


def _ctx(nvars):
    names = ("u",) + tuple(f"x{k + 1}" for k in range(nvars))
    return flint.fmpq_mpoly_ctx.get(names, "lex")


def _q(c):
    c = Fraction(c)
    return flint.fmpq(c.numerator, c.denominator)


def _split(key):
    pos = tuple(max(e, 0) for e in key)
    neg = tuple(max(-e, 0) for e in key)
    return pos, neg


def _binomial_poly(ctx, c, key):
    pos, neg = _split(key)
    return ctx.from_dict({neg: 1, pos: _q(-Fraction(c))}), neg


def _to_poly(ctx, p: LaurentPoly):
    """(polynomial, offset) with p = polynomial * x^offset."""
    if not p.terms:
        return ctx.from_dict({}), (0,) * (p.nvars + 1)
    off = tuple(min(k[t] for k in p.terms) for t in range(p.nvars + 1))
    d = {tuple(a - b for a, b in zip(k, off)): _q(v) for k, v in p.terms.items()}
    return ctx.from_dict(d), off


def _from_poly(nvars, poly, off) -> LaurentPoly:
    out = {}
    for k, v in poly.to_dict().items():
        c = Fraction(int(v.p), int(v.q))
        out[tuple(a + b for a, b in zip(k, off))] = c.numerator if c.denominator == 1 else c
    return LaurentPoly(nvars, out, True)


def _shift_poly(ctx, poly, by):
    if not any(by):
        return poly
    return poly * ctx.from_dict({tuple(by): 1})


def sum_reduce(nvars, terms) -> RatFunc:
    """sum(terms) with denominator factors cancelled where they divide."""
    terms = [t for t in terms if not t.is_zero()]
    if not terms:
        return RatFunc.zero(nvars)
    ctx = _ctx(nvars)
    L = Counter()
    for t in terms:
        for f, m in t.den.items():
            L[f] = max(L[f], m)
    polys = {f: _binomial_poly(ctx, *f) for f in L}
    # term t = num_t x^o_t / prod_f (x^-b_f P_f)^m = num_t x^(o_t + sum m b_f) / prod P_f^m
    lifted = []
    for t in terms:
        p, off = _to_poly(ctx, t.num)
        off = list(off)
        for f, m in t.den.items():
            for k, e in enumerate(polys[f][1]):
                off[k] += m * e
        for f in sorted(L):
            miss = L[f] - t.den.get(f, 0)
            if miss:
                p = p * polys[f][0] ** miss
        lifted.append((p, off))
    base = [min(o[k] for _, o in lifted) for k in range(nvars + 1)]
    total = ctx.from_dict({})
    for p, off in lifted:
        total += _shift_poly(ctx, p, [a - b for a, b in zip(off, base)])
    den = dict(L)
    for f in sorted(L):
        P = polys[f][0]
        while den.get(f, 0):
            q, r = divmod(total, P)
            if not r.is_zero():
                break
            total = q
            den[f] -= 1
            if not den[f]:
                del den[f]
    # back to binomials: 1 / P_f = x^-b_f / (1 - c m)
    off = list(base)
    for f, m in den.items():
        for k, e in enumerate(polys[f][1]):
            off[k] -= m * e
    return RatFunc(_from_poly(nvars, total, off), den, True)


def poly_divides(p: LaurentPoly, fac) -> bool:
    ctx = _ctx(p.nvars)
    P, _ = _binomial_poly(ctx, *fac)
    q, r = divmod(_to_poly(ctx, p)[0], P)
    return r.is_zero()


def _lcm_size(a, b):
    return sum(max(a.get(f, 0), b.get(f, 0)) for f in a.keys() | b.keys())


def tree_sum(nvars, terms) -> RatFunc:
    """sum(terms), merging two partial sums at a time.

    Each step merges the pair with the smallest common denominator, so poles
    that cancel between a term and its reflected partner go away early and
    the partial sums stay small.  Ties break on position, so the merge order
    (and hence the output) is deterministic.
    """
    live = {k: t for k, t in enumerate(terms) if not t.is_zero()}
    if not live:
        return RatFunc.zero(nvars)
    cost = {(a, b): _lcm_size(live[a].den, live[b].den) for a in live for b in live if a < b}
    nxt = len(terms)
    while len(live) > 1:
        (a, b), _ = min(cost.items(), key=lambda kv: (kv[1], kv[0]))
        s = sum_reduce(nvars, [live.pop(a), live.pop(b)])
        cost = {p: c for p, c in cost.items() if a not in p and b not in p}
        for k, t in live.items():
            cost[(k, nxt)] = _lcm_size(t.den, s.den)
        live[nxt] = s
        nxt += 1
    (out,) = live.values()
    return out
