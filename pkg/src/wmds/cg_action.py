"""Sign involutions, the Chinta-Gunnells action of W on rational functions,
its twisted and auxiliary variants, and the products Delta and D.

Right actions are applied left to right along a word: ``cg_word(f, (i, j))``
means ``(f |cg s_i) |cg s_j``.

    >>> from wmds.root_system import build_root_system
    >>> from wmds.exact_algebra import rat_equals
    >>> A1 = build_root_system("A1")
    >>> g = cg_simple(RatFunc.one(1), 0, A1)
    >>> h = RatFunc(LaurentPoly.from_terms(1, {(0, 0): 1, (1, -1): -1}), {(1, (1, 1)): 1})
    >>> rat_equals(g, h)
    True
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact_algebra import LaurentPoly, RatFunc, rat_sum_n
from .root_system import RootSystem, WeylElement, element_from_word, inversion_set


def _as_rat(f) -> RatFunc:
    if isinstance(f, RatFunc):
        return f
    if isinstance(f, LaurentPoly):
        return RatFunc.from_poly(f)
    raise TypeError(f"expected LaurentPoly or RatFunc, got {type(f).__name__}")


def _unit_key(r, j, e=1, ue=0):
    k = [0] * (r + 1)
    k[0] = ue
    k[j + 1] = e
    return tuple(k)


@dataclass(frozen=True)
class TwistVector:
    """Twist parameters ell; omega = sum ell_i omega_i and theta = rho + omega."""

    ell: tuple

    def __post_init__(self):
        object.__setattr__(self, "ell", tuple(int(x) for x in self.ell))

    @classmethod
    def zero(cls, r):
        return cls((0,) * r)

    def is_zero(self):
        return not any(self.ell)

    def omega(self, rs: RootSystem):
        fw = rs.fundamental_weights
        return tuple(sum(Fraction(self.ell[i]) * fw[i][j] for i in range(rs.rank)) for j in range(rs.rank))

    def theta(self, rs: RootSystem):
        om = self.omega(rs)
        return tuple(rs.rho[j] + om[j] for j in range(rs.rank))


# ---------------------------------------------------------------------------
# sign involutions and Weyl substitutions


def parity_vector(rs: RootSystem, mu) -> tuple:
    """(<alpha_j, mu> mod 2)_j, the signs that eps^mu puts on the variables."""
    return tuple(rs.pair(rs.simple_roots[j], mu) % 2 for j in range(rs.rank))


def sign_twist(f, mu, rs: RootSystem):
    """eps^mu: x^lam -> (-1)^<lam,mu> x^lam."""
    par = parity_vector(rs, mu)
    return f.sign_twist(par)


def weyl_substitute(f, w: WeylElement | Sequence[int], rs: RootSystem):
    """f(w x), i.e. x^lam -> x^{w^-1 lam}."""
    if not isinstance(w, WeylElement):
        w = element_from_word(rs, w)
    winv = element_from_word(rs, tuple(reversed(w.word)))
    r = rs.rank
    images = [(1, (0,) + tuple(winv.images[j])) for j in range(r)]
    return f.substitute(images, r)


def reflect_simple(f, i, rs: RootSystem):
    """f(s_i x)."""
    if isinstance(f, LaurentPoly):
        return f.reflect(i, [rs.cartan[j][i] for j in range(rs.rank)])
    r = rs.rank
    images = [(1, (0,) + rs.reflect(i, rs.simple_roots[j])) for j in range(r)]
    return f.substitute(images, r)


def _parity_col(rs, i):
    return tuple(rs.pairing[j][i] % 2 for j in range(rs.rank))


# ---------------------------------------------------------------------------
# J factors


def j_factor(c, key, delta: int, nvars: int) -> RatFunc:
    """J(y, delta) = ((1 - u/y)/(1 - u y) + (-1)^delta / y) / 2 for y = c * u^a x^lam."""
    c = Fraction(c)
    sgn = -1 if delta % 2 else 1
    inv = tuple(-e for e in key)
    u1 = (1,) + (0,) * nvars
    y_inv = LaurentPoly.mono(nvars, inv[1:], inv[0], 1 / c)
    u_key = tuple(k + (1 if t == 0 else 0) for t, k in enumerate(key))
    # ((1 - u/y) + s (1 - u y)/y) / 2(1 - u y) = (1 - u/y + s/y - s u) / 2(1 - u y)
    num = LaurentPoly.one(nvars) - y_inv.shift(u1) + y_inv.scale(sgn) - LaurentPoly.mono(nvars, (0,) * nvars, 1, sgn)
    return RatFunc(num.scale(Fraction(1, 2)), {(c, u_key): 1})


# ---------------------------------------------------------------------------
# the action on simple reflections


def _cg_simple_m2(f: RatFunc, i: int, rs: RootSystem, swap: bool = False) -> RatFunc:
    r = rs.rank
    col = _parity_col(rs, i)
    g = f.evenize([col])
    ev, od = g.num.split_parity(i, col)
    if swap:
        ev, od = od, ev
    cart = [rs.cartan[j][i] for j in range(r)]
    ev = ev.reflect(i, cart)
    od = od.reflect(i, cart)
    den_sigma = RatFunc(LaurentPoly.one(r), g.den, True)
    den_sigma = reflect_simple(den_sigma, i, rs)
    # (1 - u/x)(1 + u x) = 1 + u x - u/x - u^2
    a = ev + ev.shift(_unit_key(r, i, 1, 1)) - ev.shift(_unit_key(r, i, -1, 1)) - ev.shift((2,) + (0,) * r)
    b = od.shift(_unit_key(r, i, -1)).mul_binomial(1, _unit_key(r, i, 2, 2))
    out = RatFunc(a + b, {(1, _unit_key(r, i, 2, 2)): 1}, True)
    return out * den_sigma


def cg_simple(f, i: int, rs: RootSystem) -> RatFunc:
    """f |cg s_i."""
    f = _as_rat(f)
    if rs.simple_m[i] == 1:
        return reflect_simple(f, i, rs)
    return _cg_simple_m2(f, i, rs)


def bar_simple(f, i: int, rs: RootSystem) -> RatFunc:
    """f | s_i = -x_i^{m_i} (f |cg s_i)."""
    g = cg_simple(f, i, rs)
    return RatFunc(g.num.shift(_unit_key(rs.rank, i, rs.simple_m[i])).scale(-1), g.den, True)


def twisted_cg_simple(f, i: int, twist: TwistVector, rs: RootSystem) -> RatFunc:
    """Twisted action: x_i^{ell_i} times the plain formula, with the even and
    odd parts exchanged when m_i = 2 and ell_i is odd."""
    f = _as_rat(f)
    li = twist.ell[i]
    if rs.simple_m[i] == 1:
        g = reflect_simple(f, i, rs)
    else:
        g = _cg_simple_m2(f, i, rs, swap=bool(li % 2))
    if li:
        g = RatFunc(g.num.shift(_unit_key(rs.rank, i, li)), g.den, True)
    return g


def twisted_bar_simple(f, i: int, twist: TwistVector, rs: RootSystem) -> RatFunc:
    g = twisted_cg_simple(f, i, twist, rs)
    return RatFunc(g.num.shift(_unit_key(rs.rank, i, rs.simple_m[i])).scale(-1), g.den, True)


def _word_of(w, rs):
    return w.word if isinstance(w, WeylElement) else tuple(w)


def cg_word(f, word, rs: RootSystem, reduce: bool = True) -> RatFunc:
    """Fold of cg_simple along the word (right action)."""
    g = _as_rat(f)
    for i in _word_of(word, rs):
        g = cg_simple(g, i, rs)
        if reduce:
            g = g.reduce()
    return g


def bar_word(f, word, rs: RootSystem, reduce: bool = True) -> RatFunc:
    g = _as_rat(f)
    for i in _word_of(word, rs):
        g = bar_simple(g, i, rs)
        if reduce:
            g = g.reduce()
    return g


def twisted_cg_word(f, word, twist: TwistVector, rs: RootSystem) -> RatFunc:
    g = _as_rat(f)
    for i in _word_of(word, rs):
        g = twisted_cg_simple(g, i, twist, rs).reduce()
    return g


def cg_word_closed_form(f, word, rs: RootSystem) -> RatFunc:
    """The delta-sum over the short inversions of w (word must be reduced).

    f |cg w (x) = sum_delta f(w eps_delta x) prod_beta J(sign_beta x^beta, delta_beta)
    with sign_beta = (-1)^<beta, sum_{gamma before beta} delta_gamma gamma>.
    """
    f = _as_rat(f)
    word = _word_of(word, rs)
    r = rs.rank
    w = element_from_word(rs, word)
    phi_s = [b for b in inversion_set(rs, word) if rs.m[b] == 2]
    fw = weyl_substitute(f, w, rs)
    terms = []
    for deltas in itertools.product((0, 1), repeat=len(phi_s)):
        mu = [0] * r
        prod = RatFunc.one(r)
        for beta, d in zip(phi_s, deltas):
            sgn = -1 if rs.pair(beta, mu) % 2 else 1
            prod = prod * j_factor(sgn, (0,) + tuple(beta), d, r)
            if d:
                mu = [a + b for a, b in zip(mu, beta)]
        # f(w eps^mu x) = (eps^{w mu} f(w .))(x)
        term = sign_twist(fw, w.act(mu), rs) * prod
        terms.append(term)
    return rat_sum_n(r, terms)


# ---------------------------------------------------------------------------
# Delta and D


def _roots(rs, roots):
    return rs.positive_roots if roots is None else [tuple(a) for a in roots]


def delta_poly(rs: RootSystem, roots=None) -> RatFunc:
    """prod (1 - x^{m_a a}) over the given positive roots (all by default)."""
    r = rs.rank
    p = LaurentPoly.one(r)
    for a in _roots(rs, roots):
        p = p.mul_binomial(1, (0,) + tuple(rs.m[a] * x for x in a))
    return RatFunc.from_poly(p)


def d_poly(rs: RootSystem, roots=None) -> RatFunc:
    """prod (1 - u^2 x^{m_a a}) over the given positive roots (all by default)."""
    r = rs.rank
    p = LaurentPoly.one(r)
    for a in _roots(rs, roots):
        p = p.mul_binomial(1, (2,) + tuple(rs.m[a] * x for x in a))
    return RatFunc.from_poly(p)


def d_factors(rs: RootSystem, roots=None) -> dict:
    """The factor multiset of D as a RatFunc denominator."""
    out = {}
    for a in _roots(rs, roots):
        key = (1, (2,) + tuple(rs.m[a] * x for x in a))
        out[key] = out.get(key, 0) + 1
    return out


def delta_factors(rs: RootSystem, roots=None) -> dict:
    out = {}
    for a in _roots(rs, roots):
        key = (1, (0,) + tuple(rs.m[a] * x for x in a))
        out[key] = out.get(key, 0) + 1
    return out
