"""Exact arithmetic: Q(u), Laurent polynomials in x and u, factored rational
functions, and the quadratic ring Q(sqrt q).

A ``LaurentPoly`` stores its terms keyed by a tuple ``(e_u, e_1, ..., e_r)``
so that a coefficient in Q[u, 1/u] is spread over several keys.  Coefficients
are Python ints or ``Fraction``.  Elements of Q(u) that are not Laurent
polynomials only ever occur as denominators, and those are binomials in u,
so they live in the factored denominator of a ``RatFunc``.

    >>> r = 1
    >>> f = RatFunc.from_factors(LaurentPoly.one(r), [(1, (1, 1))])   # 1/(1 - u x)
    >>> g = RatFunc.from_factors(LaurentPoly.from_terms(r, {(0, 0): 1, (1, 1): 1}), [(1, (2, 2))])
    >>> rat_equals(f, g)
    True
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from sympy import QQ
from sympy.polys.fields import field as _sympy_field

from .errors import EvaluationError, InconsistentError, NotExpandableError, PoleError

UField, u = _sympy_field("u", QQ)
UFieldElem = type(u)
_UPoly = UField.ring


def _norm_coeff(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c.numerator)
    return c


def _to_rational(c):
    if isinstance(c, (int, Fraction)):
        return c
    # sympy rationals
    try:
        return Fraction(int(c.numerator), int(c.denominator))
    except AttributeError:
        return Fraction(c)


# ---------------------------------------------------------------------------
# Q(u) helpers


def ufield(c) -> UFieldElem:
    """Coerce an int, Fraction, mapping {u-exponent: coeff} or sympy element into Q(u)."""
    if isinstance(c, UFieldElem):
        return c
    if isinstance(c, Mapping):
        out = UField(0)
        for e, v in c.items():
            out += QQ(int(Fraction(v).numerator), int(Fraction(v).denominator)) * u**e
        return out
    c = Fraction(c)
    return UField(QQ(c.numerator, c.denominator))


def ufield_to_laurent(e: UFieldElem) -> dict:
    """Return {u-exponent: coeff} if e is a Laurent polynomial in u, else raise."""
    num, den = e.numer, e.denom
    dterms = den.terms()
    if len(dterms) != 1:
        raise InconsistentError(f"{e} is not a Laurent polynomial in u")
    (dexp,), dc = dterms[0]
    out = {}
    for (k,), c in num.terms():
        out[k - dexp] = _norm_coeff(Fraction(int(c.numerator), int(c.denominator)) / Fraction(int(dc.numerator), int(dc.denominator)))
    return out


# ---------------------------------------------------------------------------
# Laurent polynomials


class LaurentPoly:
    """Sparse Laurent polynomial in u and x_1..x_r with rational coefficients."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict | None = None, _clean: bool = False):
        self.nvars = nvars
        if terms is None:
            self.terms = {}
        elif _clean:
            self.terms = terms
        else:
            t = {}
            for k, v in terms.items():
                if v:
                    k = tuple(k)
                    if len(k) != nvars + 1:
                        raise ValueError("exponent key has wrong length")
                    t[k] = _norm_coeff(v)
            self.terms = t

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, nvars):
        return cls(nvars, {}, True)

    @classmethod
    def one(cls, nvars):
        return cls(nvars, {(0,) * (nvars + 1): 1}, True)

    @classmethod
    def const(cls, nvars, c):
        c = _norm_coeff(_to_rational(c))
        return cls(nvars, {(0,) * (nvars + 1): c} if c else {}, True)

    @classmethod
    def from_terms(cls, nvars, terms):
        return cls(nvars, dict(terms))

    @classmethod
    def mono(cls, nvars, lam, uexp=0, coeff=1):
        coeff = _norm_coeff(_to_rational(coeff))
        if not coeff:
            return cls.zero(nvars)
        return cls(nvars, {(uexp,) + tuple(lam): coeff}, True)

    @classmethod
    def binomial(cls, nvars, c, key):
        """1 - c * u^a x^lam with key = (a, lam...)."""
        p = cls.one(nvars)
        return p.mul_binomial(c, key)

    # -- basic protocol -------------------------------------------------

    def __len__(self):
        return len(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def copy(self):
        return LaurentPoly(self.nvars, dict(self.terms), True)

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == LaurentPoly.const(self.nvars, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self):
        return f"LaurentPoly({render_poly(self)})"

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.const(self.nvars, other)
        if len(other.terms) > len(self.terms):
            big, small = other.terms, self.terms
        else:
            big, small = self.terms, other.terms
        out = dict(big)
        for k, v in small.items():
            nv = out.get(k, 0) + v
            if nv:
                out[k] = nv
            else:
                out.pop(k, None)
        return LaurentPoly(self.nvars, out, True)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.nvars, {k: -v for k, v in self.terms.items()}, True)

    def __sub__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.const(self.nvars, other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            nv = out.get(k, 0) - v
            if nv:
                out[k] = nv
            else:
                out.pop(k, None)
        return LaurentPoly(self.nvars, out, True)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = _norm_coeff(_to_rational(c))
        if not c:
            return LaurentPoly.zero(self.nvars)
        if c == 1:
            return self
        return LaurentPoly(self.nvars, {k: _norm_coeff(v * c) for k, v in self.terms.items()}, True)

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            return self.scale(other)
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            (k2, v2), = b.items()
            return LaurentPoly(self.nvars, {tuple(x + y for x, y in zip(k, k2)): _norm_coeff(v * v2) for k, v in a.items()}, True)
        out = defaultdict(int)
        for k2, v2 in b.items():
            for k, v in a.items():
                out[tuple(x + y for x, y in zip(k, k2))] += v * v2
        return LaurentPoly(self.nvars, {k: _norm_coeff(v) for k, v in out.items() if v}, True)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = LaurentPoly.one(self.nvars)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def shift(self, key):
        """Multiply by the monomial u^key[0] x^key[1:]."""
        if not any(key):
            return self
        return LaurentPoly(self.nvars, {tuple(x + y for x, y in zip(k, key)): v for k, v in self.terms.items()}, True)

    def mul_binomial(self, c, key):
        """self * (1 - c u^a x^lam)."""
        out = dict(self.terms)
        for k, v in self.terms.items():
            nk = tuple(x + y for x, y in zip(k, key))
            nv = out.get(nk, 0) - c * v
            if nv:
                out[nk] = _norm_coeff(nv)
            else:
                out.pop(nk, None)
        return LaurentPoly(self.nvars, out, True)

    def div_binomial(self, c, key):
        """Exact quotient self / (1 - c u^a x^lam); raises if the remainder is nonzero."""
        if not self.terms:
            return self
        if not any(key):
            if c == 1:
                raise PoleError("division by the zero binomial 1 - 1")
            return self.scale(Fraction(1) / (1 - Fraction(c)))
        j = next(t for t, e in enumerate(key) if e)
        mj = key[j]
        if mj < 0:
            # 1 - c m = -c m (1 - c^{-1} m^{-1})
            inv = tuple(-e for e in key)
            q = self.div_binomial(Fraction(1) / Fraction(c), inv)
            return q.shift(inv).scale(Fraction(-1) / Fraction(c))
        chains = defaultdict(dict)
        for k, v in self.terms.items():
            t = k[j] // mj
            base = tuple(x - t * y for x, y in zip(k, key))
            chains[base][t] = v
        out = {}
        for base, ch in chains.items():
            lo, hi = min(ch), max(ch)
            prev = 0
            for t in range(lo, hi + 1):
                val = ch.get(t, 0) + c * prev
                if t == hi:
                    if val:
                        raise InconsistentError("nonzero remainder in binomial division")
                    break
                if val:
                    out[tuple(x + t * y for x, y in zip(base, key))] = _norm_coeff(val)
                prev = val
        return LaurentPoly(self.nvars, out, True)

    def try_div_binomial(self, c, key):
        try:
            return self.div_binomial(c, key)
        except InconsistentError:
            return None

    # -- structure --------------------------------------------------------

    def x_support(self):
        return {k[1:] for k in self.terms}

    def coefficient(self, lam) -> dict:
        """{u-exponent: coeff} of x^lam."""
        lam = tuple(lam)
        return {k[0]: v for k, v in self.terms.items() if k[1:] == lam}

    def coefficient_u(self, lam) -> UFieldElem:
        return ufield(self.coefficient(lam))

    def by_x(self) -> dict:
        out = defaultdict(dict)
        for k, v in self.terms.items():
            out[k[1:]][k[0]] = v
        return dict(out)

    def constant_term(self) -> dict:
        return self.coefficient((0,) * self.nvars)

    def degree_bounds(self, var):
        """(min, max) exponent of variable ``var`` (0 = u, j = x_j)."""
        es = [k[var] for k in self.terms]
        return (min(es), max(es)) if es else (0, 0)

    def is_polynomial_in_x(self):
        return all(e >= 0 for k in self.terms for e in k[1:])

    # -- substitutions ----------------------------------------------------

    def map_keys(self, fn):
        out = defaultdict(int)
        for k, v in self.terms.items():
            out[fn(k)] += v
        return LaurentPoly(self.nvars if not out else len(next(iter(out))) - 1, {k: _norm_coeff(v) for k, v in out.items() if v}, True)

    def reflect(self, i, cartan_col):
        """Substitute x^lam -> x^{s_i lam}; cartan_col[j] = <alpha_j, alpha_i^vee>."""
        col = [(j, a) for j, a in enumerate(cartan_col) if a]
        p = i + 1
        out = {}
        for k, v in self.terms.items():
            s = 0
            for j, a in col:
                s += k[j + 1] * a
            if s:
                k = list(k)
                k[p] -= s
                k = tuple(k)
            out[k] = v
        return LaurentPoly(self.nvars, out, True)

    def split_parity(self, i, pair_col):
        """(even, odd) parts with respect to eps_i; pair_col[j] = <alpha_j, alpha_i>."""
        col = [(j + 1, a) for j, a in enumerate(pair_col) if a % 2]
        ev, od = {}, {}
        for k, v in self.terms.items():
            s = 0
            for j, a in col:
                s += k[j]
            (od if s % 2 else ev)[k] = v
        return LaurentPoly(self.nvars, ev, True), LaurentPoly(self.nvars, od, True)

    def sign_twist(self, parity):
        """x^lam -> (-1)^{sum parity_j lam_j} x^lam."""
        idx = [j + 1 for j, a in enumerate(parity) if a % 2]
        if not idx:
            return self
        out = {}
        for k, v in self.terms.items():
            s = 0
            for j in idx:
                s += k[j]
            out[k] = -v if s % 2 else v
        return LaurentPoly(self.nvars, out, True)

    def substitute(self, images, target_nvars, u_image=(1, 1)):
        """General monomial substitution.

        ``images[j] = (c, key)`` sends x_j to c * u^key[0] x^key[1:] (key in the
        target ring); ``u_image = (c, k)`` sends u to c * u^k.
        """
        cu, ku = u_image
        n = target_nvars
        out = defaultdict(int)
        for k, v in self.terms.items():
            coeff = Fraction(v)
            nk = [0] * (n + 1)
            eu = k[0]
            if eu:
                nk[0] += ku * eu
                if cu != 1:
                    coeff *= Fraction(cu) ** eu
            for j, e in enumerate(k[1:]):
                if not e:
                    continue
                c, key = images[j]
                if c != 1:
                    coeff *= Fraction(c) ** e
                for t in range(n + 1):
                    if key[t]:
                        nk[t] += e * key[t]
            out[tuple(nk)] += coeff
        return LaurentPoly(n, {k: _norm_coeff(v) for k, v in out.items() if v}, True)

    def truncate(self, upper):
        """Drop terms whose x-exponent exceeds ``upper`` in some coordinate."""
        return LaurentPoly(self.nvars, {k: v for k, v in self.terms.items() if all(a <= b for a, b in zip(k[1:], upper))}, True)

    def embed(self, positions, target_nvars):
        """Rename variable j to x_{positions[j]} of a larger ring."""
        out = {}
        for k, v in self.terms.items():
            nk = [0] * (target_nvars + 1)
            nk[0] = k[0]
            for j, e in enumerate(k[1:]):
                nk[positions[j] + 1] += e
            out[tuple(nk)] = v
        return LaurentPoly(target_nvars, out, True)


def monomial(lam, coeff=1) -> LaurentPoly:
    """x^lam times a coefficient in Q[u, 1/u] (given as int, Fraction, mapping or Q(u) element)."""
    lam = tuple(lam)
    n = len(lam)
    if isinstance(coeff, UFieldElem) or isinstance(coeff, Mapping):
        cu = ufield_to_laurent(ufield(coeff)) if not isinstance(coeff, Mapping) else dict(coeff)
        return LaurentPoly(n, {(e,) + lam: c for e, c in cu.items()})
    return LaurentPoly.mono(n, lam, 0, coeff)


# ---------------------------------------------------------------------------
# Factored rational functions


def _first_nonzero(key):
    for e in key[1:]:
        if e:
            return e
    return 0


def normalize_factor(c, key):
    """Rewrite 1 - c m as pref_c * m_pref * (1 - c' m') with m' normalized.

    Returns (pref_c, pref_key, factor) where factor is (c', key') or None when
    the binomial is a nonzero constant.
    """
    c = _norm_coeff(_to_rational(c))
    if c == 0:
        return 1, None, None
    if not any(key):
        val = 1 - c
        if val == 0:
            raise PoleError("binomial factor vanishes identically")
        return _norm_coeff(Fraction(val)), None, None
    lead = _first_nonzero(key)
    if lead > 0 or (lead == 0 and key[0] > 0):
        return 1, None, (c, tuple(key))
    inv = tuple(-e for e in key)
    return _norm_coeff(-Fraction(c)), tuple(key), (_norm_coeff(Fraction(1) / Fraction(c)), inv)


def factor_poly(nvars, fac) -> LaurentPoly:
    c, key = fac
    return LaurentPoly.binomial(nvars, c, key)


def render_factor(fac, names=None) -> str:
    c, key = fac
    m = render_monomial(key, names)
    if c == 1:
        return f"(1 - {m})"
    if c == -1:
        return f"(1 + {m})"
    return f"(1 - ({c})*{m})"


class RatFunc:
    """numerator / prod (1 - c u^a x^lam)^mult with normalized binomial factors."""

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentPoly, den: Mapping | None = None, _clean=False):
        self.num = num
        if _clean:
            self.den = den if den is not None else {}
            return
        pref = Fraction(1)
        shift = [0] * (num.nvars + 1)
        out = Counter()
        for fac, mult in (den or {}).items():
            if mult <= 0:
                if mult < 0:
                    raise ValueError("negative multiplicity in denominator")
                continue
            pc, pk, f = normalize_factor(*fac)
            pref *= Fraction(pc) ** mult
            if pk is not None:
                for t in range(len(shift)):
                    shift[t] -= mult * pk[t]
            if f is not None:
                out[f] += mult
        n = num
        if pref != 1:
            n = n.scale(1 / pref)
        if any(shift):
            n = n.shift(tuple(shift))
        self.num = n
        self.den = dict(out)

    @property
    def nvars(self):
        return self.num.nvars

    @classmethod
    def from_poly(cls, p: LaurentPoly):
        return cls(p, {}, True)

    @classmethod
    def from_factors(cls, num: LaurentPoly, factors: Iterable):
        cnt = Counter()
        for f in factors:
            cnt[(f[0], tuple(f[1]))] += 1
        return cls(num, cnt)

    @classmethod
    def one(cls, nvars):
        return cls(LaurentPoly.one(nvars), {}, True)

    @classmethod
    def zero(cls, nvars):
        return cls(LaurentPoly.zero(nvars), {}, True)

    def copy(self):
        return RatFunc(self.num, dict(self.den), True)

    def __repr__(self):
        return f"RatFunc({render_ratfunc(self)})"

    def is_zero(self):
        return self.num.is_zero()

    def den_factors(self):
        return sorted(self.den.items())

    def den_poly(self) -> LaurentPoly:
        p = LaurentPoly.one(self.nvars)
        for (c, key), mult in sorted(self.den.items()):
            for _ in range(mult):
                p = p.mul_binomial(c, key)
        return p

    # -- arithmetic -------------------------------------------------------

    def __mul__(self, other):
        if isinstance(other, RatFunc):
            den = Counter(self.den)
            den.update(other.den)
            return RatFunc(self.num * other.num, dict(den), True)
        if isinstance(other, LaurentPoly):
            return RatFunc(self.num * other, dict(self.den), True)
        return RatFunc(self.num.scale(other), dict(self.den), True)

    __rmul__ = __mul__

    def __neg__(self):
        return RatFunc(-self.num, dict(self.den), True)

    def __add__(self, other):
        return rat_sum([self, other])

    def __sub__(self, other):
        return rat_sum([self, -other])

    def divide_by_binomial(self, c, key, mult=1):
        return RatFunc(self.num, {**{f: m for f, m in self.den.items()}}, True) * RatFunc(LaurentPoly.one(self.nvars), {(c, tuple(key)): mult})

    def times_binomial(self, c, key):
        """Multiply by 1 - c m, cancelling a matching denominator factor if present."""
        pc, pk, f = normalize_factor(c, key)
        out = self.copy()
        if pk is not None:
            out.num = out.num.shift(pk)
        if pc != 1:
            out.num = out.num.scale(pc)
        if f is None:
            return out
        if out.den.get(f, 0):
            out.den[f] -= 1
            if not out.den[f]:
                del out.den[f]
        else:
            out.num = out.num.mul_binomial(*f)
        return out

    def cancel_factor(self, c, key):
        """Multiply by 1 - c m which must occur in the denominator."""
        pc, pk, f = normalize_factor(c, key)
        if f is None or not self.den.get(f, 0):
            raise InconsistentError(f"factor {render_factor((c, key))} not present in the denominator")
        return self.times_binomial(c, key)

    def reduce(self):
        """Cancel denominator factors that divide the numerator exactly."""
        num = self.num
        den = dict(self.den)
        for f in sorted(den):
            while den.get(f, 0):
                q = num.try_div_binomial(*f)
                if q is None:
                    break
                num = q
                den[f] -= 1
                if not den[f]:
                    del den[f]
        return RatFunc(num, den, True)

    # -- substitutions ----------------------------------------------------

    def substitute(self, images, target_nvars, u_image=(1, 1)):
        """Monomial substitution applied to numerator and each factor.

        Raises PoleError when a denominator factor becomes identically zero.
        """
        num = self.num.substitute(images, target_nvars, u_image)
        den = Counter()
        pref = Fraction(1)
        shift = [0] * (target_nvars + 1)
        for (c, key), mult in self.den.items():
            mono = LaurentPoly(self.nvars, {key: c}, True).substitute(images, target_nvars, u_image)
            if len(mono.terms) != 1:
                raise InconsistentError("monomial substitution produced a non-monomial")
            (nk, nc), = mono.terms.items()
            try:
                pc, pk, f = normalize_factor(nc, nk)
            except PoleError:
                raise PoleError(f"denominator factor {render_factor((c, key))} vanishes under the substitution") from None
            pref *= Fraction(pc) ** mult
            if pk is not None:
                for t in range(target_nvars + 1):
                    shift[t] -= mult * pk[t]
            if f is not None:
                den[f] += mult
        if pref != 1:
            num = num.scale(1 / pref)
        if any(shift):
            num = num.shift(tuple(shift))
        return RatFunc(num, dict(den), True)

    def sign_twist(self, parity):
        num = self.num.sign_twist(parity)
        den = Counter()
        idx = [j + 1 for j, a in enumerate(parity) if a % 2]
        for (c, key), mult in self.den.items():
            s = sum(key[j] for j in idx) % 2
            den[(_norm_coeff(-Fraction(c)) if s else c, key)] += mult
        return RatFunc(num, dict(den), True)

    def evenize(self, parities):
        """Rewrite every factor 1 - c m that is not invariant under all the given
        sign changes as (1 + c m)/(1 - c^2 m^2)."""
        idxs = [[j + 1 for j, a in enumerate(p) if a % 2] for p in parities]
        num = self.num
        den = Counter()
        for (c, key), mult in sorted(self.den.items()):
            odd = any(sum(key[j] for j in idx) % 2 for idx in idxs)
            if odd:
                for _ in range(mult):
                    num = num.mul_binomial(_norm_coeff(-Fraction(c)), key)
                den[(_norm_coeff(Fraction(c) ** 2), tuple(2 * e for e in key))] += mult
            else:
                den[(c, key)] += mult
        return RatFunc(num, dict(den), True)


def rat_sum(terms: Sequence[RatFunc]) -> RatFunc:
    """Sum over the least common multiple of the factored denominators."""
    terms = [t for t in terms if not t.is_zero()]
    if not terms:
        raise ValueError("rat_sum of an empty list needs nvars; use RatFunc.zero")
    L = Counter()
    for t in terms:
        for f, m in t.den.items():
            if m > L[f]:
                L[f] = m
    num = LaurentPoly.zero(terms[0].nvars)
    for t in terms:
        p = t.num
        for f in sorted(L):
            for _ in range(L[f] - t.den.get(f, 0)):
                p = p.mul_binomial(*f)
        num = num + p
    return RatFunc(num, dict(L), True)


def rat_sum_n(nvars, terms) -> RatFunc:
    terms = list(terms)
    if not any(not t.is_zero() for t in terms):
        return RatFunc.zero(nvars)
    return rat_sum(terms)


def rat_equals(f: RatFunc, g: RatFunc) -> bool:
    """Decide f == g by cross multiplication after cancelling shared factors."""
    if f.nvars != g.nvars:
        raise ValueError("rational functions live in different rings")
    A, B = Counter(f.den), Counter(g.den)
    common = A & B
    A -= common
    B -= common
    lhs = f.num
    for fac in sorted(B):
        for _ in range(B[fac]):
            lhs = lhs.mul_binomial(*fac)
    rhs = g.num
    for fac in sorted(A):
        for _ in range(A[fac]):
            rhs = rhs.mul_binomial(*fac)
    return lhs == rhs


def rat_difference_numerator(f: RatFunc, g: RatFunc) -> LaurentPoly:
    A, B = Counter(f.den), Counter(g.den)
    common = A & B
    A -= common
    B -= common
    lhs = f.num
    for fac in sorted(B):
        for _ in range(B[fac]):
            lhs = lhs.mul_binomial(*fac)
    rhs = g.num
    for fac in sorted(A):
        for _ in range(A[fac]):
            rhs = rhs.mul_binomial(*fac)
    return lhs - rhs


def substitute(f, assignment: Mapping | Sequence, target_nvars: int | None = None, u_image=(1, 1)):
    """Substitute x_j -> c * u^k * x^mu for each j (identity for missing j).

    ``assignment`` maps variable index j (0-based) to ``(c, k, mu)``; ``mu`` is a
    vector in the target ring.
    """
    n = f.nvars
    target = n if target_nvars is None else target_nvars
    images = []
    items = dict(assignment) if isinstance(assignment, Mapping) else dict(enumerate(assignment))
    for j in range(n):
        if j in items:
            c, k, mu = items[j]
            images.append((c, (k,) + tuple(mu)))
        else:
            if target != n:
                raise ValueError("every variable needs an image when the ring changes")
            images.append((1, tuple(1 if t == j + 1 else 0 for t in range(n + 1))))
    if isinstance(f, LaurentPoly):
        return f.substitute(images, target, u_image)
    return f.substitute(images, target, u_image)


# ---------------------------------------------------------------------------
# Power series


def series_coefficients(f: RatFunc, bound: Sequence[int]) -> dict:
    """Coefficients a_lam (in Q(u)) of the expansion of f for 0 <= lam <= bound."""
    bound = tuple(bound)
    for (c, key), _ in f.den.items():
        lam = key[1:]
        if any(e < 0 for e in lam) or not any(lam):
            raise NotExpandableError(f"factor {render_factor((c, key))} has no positive x-monomial")

    def ok(k):
        return all(0 <= a <= b for a, b in zip(k[1:], bound))

    def ok_upper(k):
        return all(a <= b for a, b in zip(k[1:], bound))

    cur = {k: v for k, v in f.num.terms.items() if ok_upper(k)}
    for (c, key), mult in sorted(f.den.items()):
        for _ in range(mult):
            # multiply by 1/(1 - c m) = sum_t c^t m^t, truncated
            out = defaultdict(int)
            for k, v in cur.items():
                kk, vv = k, v
                while ok_upper(kk):
                    out[kk] += vv
                    kk = tuple(x + y for x, y in zip(kk, key))
                    vv = vv * c
            cur = {k: v for k, v in out.items() if v}
    res = defaultdict(dict)
    for k, v in cur.items():
        if ok(k):
            res[k[1:]][k[0]] = _norm_coeff(v)
    return {lam: ufield(cu) for lam, cu in res.items()}


def series_coefficients_raw(f: RatFunc, bound: Sequence[int]) -> dict:
    """As series_coefficients but returns {lam: {u-exponent: coeff}}."""
    return {lam: ufield_to_laurent(e) for lam, e in series_coefficients(f, bound).items()}


# ---------------------------------------------------------------------------
# Q(sqrt q)


@dataclass(frozen=True)
class QSqrtNumber:
    a: Fraction
    b: Fraction
    q: int

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))

    @classmethod
    def rational(cls, x, q):
        return cls(Fraction(x), Fraction(0), q)

    @classmethod
    def sqrt(cls, q):
        return cls(Fraction(0), Fraction(1), q)

    def _coerce(self, other):
        if isinstance(other, QSqrtNumber):
            if other.q != self.q:
                raise ValueError("mixing different quadratic fields")
            return other
        return QSqrtNumber(Fraction(other), Fraction(0), self.q)

    def __add__(self, other):
        o = self._coerce(other)
        return QSqrtNumber(self.a + o.a, self.b + o.b, self.q)

    __radd__ = __add__

    def __neg__(self):
        return QSqrtNumber(-self.a, -self.b, self.q)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return QSqrtNumber(self.a * o.a + self.q * self.b * o.b, self.a * o.b + self.b * o.a, self.q)

    __rmul__ = __mul__

    def norm(self):
        return self.a * self.a - self.q * self.b * self.b

    def inverse(self):
        nm = self.norm()
        if nm == 0:
            raise EvaluationError("division by zero in Q(sqrt q)")
        return QSqrtNumber(self.a / nm, -self.b / nm, self.q)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        out = QSqrtNumber(Fraction(1), Fraction(0), self.q)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if not isinstance(other, QSqrtNumber):
            return NotImplemented
        return (self.a, self.b, self.q) == (other.a, other.b, other.q)

    def __hash__(self):
        return hash((self.a, self.b, self.q))

    def is_zero(self):
        return self.a == 0 and self.b == 0

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        if self.a == 0:
            return f"{self.b}*sqrt({self.q})"
        return f"{self.a} + {self.b}*sqrt({self.q})"

    def to_json(self):
        return {"a": str(self.a), "b": str(self.b), "q": self.q}


def sqrt_q_power(k: int, q: int) -> QSqrtNumber:
    """(q^{1/2})^k exactly."""
    if k >= 0:
        if k % 2 == 0:
            return QSqrtNumber(Fraction(q) ** (k // 2), 0, q)
        return QSqrtNumber(0, Fraction(q) ** ((k - 1) // 2), q)
    return sqrt_q_power(-k, q).inverse()


def eval_u_poly(coeffs: Mapping, q: int, sign: int = 1) -> QSqrtNumber:
    """Evaluate {u-exponent: coeff} at u = q^{sign/2}."""
    out = QSqrtNumber(0, 0, q)
    for e, c in coeffs.items():
        out = out + sqrt_q_power(sign * e, q) * Fraction(c)
    return out


def eval_at_sqrt_q(e, q: int, sign_of_exponent: int = 1) -> QSqrtNumber:
    """Value of an element of Q(u) at u = q^{1/2} (sign +1) or q^{-1/2} (sign -1)."""
    if q <= 0:
        raise EvaluationError("q must be positive")
    if sign_of_exponent not in (1, -1):
        raise EvaluationError("sign_of_exponent must be +1 or -1")
    e = ufield(e)
    num = {k: Fraction(int(c.numerator), int(c.denominator)) for (k,), c in e.numer.terms()}
    den = {k: Fraction(int(c.numerator), int(c.denominator)) for (k,), c in e.denom.terms()}
    nv = eval_u_poly(num, q, sign_of_exponent)
    dv = eval_u_poly(den, q, sign_of_exponent)
    if dv.is_zero():
        raise EvaluationError(f"denominator of {e} vanishes at u = q^({sign_of_exponent}/2)")
    return nv / dv


# ---------------------------------------------------------------------------
# Canonical rendering


def render_monomial(key, names=None) -> str:
    parts = []
    eu = key[0]
    if eu:
        parts.append("u" if eu == 1 else f"u^{eu}")
    for j, e in enumerate(key[1:]):
        if e:
            nm = names[j] if names else f"x{j + 1}"
            parts.append(nm if e == 1 else f"{nm}^{e}")
    return "*".join(parts) if parts else "1"


def sort_key(k):
    return (k[1:], k[0])


def render_poly(p: LaurentPoly, names=None) -> str:
    if not p.terms:
        return "0"
    out = []
    for k in sorted(p.terms, key=sort_key):
        c = p.terms[k]
        m = render_monomial(k, names)
        if m == "1":
            s = str(c)
        elif c == 1:
            s = m
        elif c == -1:
            s = "-" + m
        else:
            s = f"{c}*{m}"
        out.append(s)
    txt = " + ".join(out)
    return txt.replace("+ -", "- ")


def render_ratfunc(f: RatFunc, names=None) -> str:
    if not f.den:
        return render_poly(f.num, names)
    den = "*".join(render_factor(fac, names) + (f"^{m}" if m > 1 else "") for fac, m in sorted(f.den.items()))
    return f"({render_poly(f.num, names)}) / ({den})"


def poly_to_json(p: LaurentPoly) -> list:
    return [[str(p.terms[k]), k[0], list(k[1:])] for k in sorted(p.terms, key=sort_key)]


def factors_to_json(f: RatFunc) -> list:
    return [{"c": str(c), "u": key[0], "x": list(key[1:]), "mult": m} for (c, key), m in sorted(f.den.items())]


def ratfunc_to_json(f: RatFunc) -> dict:
    return {"numerator": poly_to_json(f.num), "denominator": factors_to_json(f)}


def poly_from_json(nvars, data) -> LaurentPoly:
    return LaurentPoly(nvars, {(int(e),) + tuple(x): _norm_coeff(Fraction(c)) for c, e, x in data})
