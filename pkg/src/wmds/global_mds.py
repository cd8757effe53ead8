"""The function-field side: monic polynomials over F_q (q prime, q = 1 mod 4),
quadratic residue symbols, the coefficients H(m_1, ..., m_r) and the
coefficient-level comparison with Z(x; q^{1/2}).

Polynomial arithmetic is delegated to sympy's dense GF(p) routines; a
polynomial is stored as its coefficient tuple, highest degree first.

    >>> q = 5
    >>> t, t1 = MonicPoly.from_coeffs(q, (1, 0)), MonicPoly.from_coeffs(q, (1, 1))
    >>> residue_symbol(t, t1), residue_symbol_euler(t, t1)
    (1, 1)
"""

from __future__ import annotations

import functools
import itertools
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from sympy import isprime
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_factor, gf_irreducible_p, gf_mul, gf_pow_mod, gf_rem

from .errors import EnumerationLimitError, EvaluationError, UnsupportedFieldError
from .exact_algebra import (
    QSqrtNumber,
    RatFunc,
    series_coefficients,
    sqrt_q_power,
    ufield,
)
from .root_system import RootSystem, default_cap
from .zeta_average import zeta_average


def check_field(q: int):
    if not (isinstance(q, int) and q > 2 and isprime(q) and q % 4 == 1):
        raise UnsupportedFieldError(f"q = {q} must be a prime congruent to 1 mod 4")


@functools.total_ordering
@dataclass(frozen=True)
class MonicPoly:
    q: int
    coeffs: tuple  # highest degree first, leading coefficient 1

    @classmethod
    def from_coeffs(cls, q, coeffs):
        c = tuple(int(x) % q for x in coeffs)
        while c and c[0] == 0:
            c = c[1:]
        if not c or c[0] != 1:
            raise ValueError("not a monic polynomial")
        return cls(q, c)

    @classmethod
    def one(cls, q):
        return cls(q, (1,))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def norm(self):
        return self.q ** self.degree

    def is_one(self):
        return self.coeffs == (1,)

    def __mul__(self, other):
        return MonicPoly(self.q, tuple(int(x) for x in gf_mul(list(self.coeffs), list(other.coeffs), self.q, ZZ)))

    def __pow__(self, n):
        out = MonicPoly.one(self.q)
        for _ in range(n):
            out = out * self
        return out

    def __lt__(self, other):
        return (self.degree, self.coeffs) < (other.degree, other.coeffs)

    def is_irreducible(self):
        return self.degree >= 1 and gf_irreducible_p(list(self.coeffs), self.q, ZZ)

    def factor(self) -> tuple:
        """((p, e), ...) with monic irreducible p, sorted."""
        return _factor(self.q, self.coeffs)

    def __str__(self):
        d = self.degree
        parts = []
        for k, c in enumerate(self.coeffs):
            e = d - k
            if not c:
                continue
            mono = "" if e == 0 else ("t" if e == 1 else f"t^{e}")
            if c == 1 and mono:
                parts.append(mono)
            else:
                parts.append(f"{c}{'*' + mono if mono else ''}")
        return " + ".join(parts) if parts else "0"

    def to_json(self):
        return list(self.coeffs)


@functools.lru_cache(maxsize=None)
def _factor(q, coeffs):
    if len(coeffs) == 1:
        return ()
    _, facs = gf_factor(list(coeffs), q, ZZ)
    out = [(MonicPoly(q, tuple(int(x) for x in g)), e) for g, e in facs]
    return tuple(sorted(out))


def monics(q: int, d: int):
    """All monic polynomials of degree d, in lexicographic coefficient order."""
    for tail in itertools.product(range(q), repeat=d):
        yield MonicPoly(q, (1,) + tail)


# ---------------------------------------------------------------------------
# residue symbols


def _rem(a, b, q):
    return tuple(int(x) for x in gf_rem(list(a), list(b), q, ZZ))


def _legendre_const(c, q):
    c %= q
    if c == 0:
        return 0
    return 1 if pow(c, (q - 1) // 2, q) == 1 else -1


def _symbol_prime(a: MonicPoly | tuple, p: MonicPoly) -> int:
    """Euler's criterion in F_q[t]/(p)."""
    coeffs = a.coeffs if isinstance(a, MonicPoly) else a
    r = _rem(coeffs, p.coeffs, p.q)
    if not r:
        return 0
    e = (p.q ** p.degree - 1) // 2
    v = tuple(int(x) for x in gf_pow_mod(list(r), e, list(p.coeffs), p.q, ZZ))
    if v == (1,):
        return 1
    if v == (p.q - 1,):
        return -1
    raise ArithmeticError("Euler criterion produced a non-sign")  # p not irreducible


def residue_symbol_euler(a: MonicPoly, b: MonicPoly) -> int:
    """(a/b) from the factorization of b and Euler's criterion at each prime."""
    check_field(b.q)
    out = 1
    for p, e in b.factor():
        s = _symbol_prime(a, p)
        if s == 0:
            return 0
        out *= s**e
    return out


def residue_symbol(a: MonicPoly, b: MonicPoly) -> int:
    """(a/b) by Euclidean reduction and the reciprocity law (a/b) = (b/a)."""
    check_field(b.q)
    q = b.q
    x, y = a.coeffs, b.coeffs
    sign = 1
    while True:
        if len(y) == 1:
            return sign
        r = _rem(x, y, q)
        if not r:
            return 0
        lc = r[0]
        if lc != 1:
            # pull out the constant: (c/b) = legendre(c)^{deg b}
            sign *= _legendre_const(lc, q) ** (len(y) - 1)
            inv = pow(lc, q - 2, q)
            r = tuple(c * inv % q for c in r)
        x, y = y, r


# ---------------------------------------------------------------------------
# p-parts and twisted multiplicativity


def _eval_at_power(e, q: int, k: int) -> QSqrtNumber:
    """An element of Q(u) at u = q^{k/2}."""
    e = ufield(e)

    def ev(poly):
        out = QSqrtNumber(0, 0, q)
        for (j,), c in poly.terms():
            out = out + sqrt_q_power(k * j, q) * Fraction(int(c.numerator), int(c.denominator))
        return out

    num, den = ev(e.numer), ev(e.denom)
    if den.is_zero():
        raise EvaluationError(f"denominator of {e} vanishes at u = q^({k}/2)")
    return num / den


class CoefficientTable:
    """a_lam(u) of Z, expanded lazily to cover the requested box."""

    def __init__(self, rs: RootSystem):
        self.rs = rs
        self.Z = zeta_average(rs).value
        self.bound = (0,) * rs.rank
        self.coeffs = {}
        self._grow(self.bound)

    def _grow(self, bound):
        self.bound = tuple(max(a, b) for a, b in zip(self.bound, bound))
        self.coeffs = series_coefficients(self.Z, self.bound)

    def __getitem__(self, lam):
        lam = tuple(lam)
        if any(a > b for a, b in zip(lam, self.bound)):
            self._grow(tuple(a + 1 for a in lam))
        return self.coeffs.get(lam, ufield(0))


@functools.lru_cache(maxsize=None)
def _table(pairing) -> CoefficientTable:
    return CoefficientTable(RootSystem(pairing))


def table_for(rs: RootSystem) -> CoefficientTable:
    return _table(rs.pairing)


def p_part_coefficient(rs: RootSystem, p: MonicPoly, n: Sequence[int]) -> QSqrtNumber:
    """H(p^n_1, ..., p^n_r) = a_lam(|p|^{-1/2}) with lam = sum n_j alpha_j."""
    n = tuple(int(x) for x in n)
    if not any(n):
        return QSqrtNumber(1, 0, p.q)
    return _eval_at_power(table_for(rs)[n], p.q, -p.degree)


@dataclass(frozen=True)
class MDSCoefficient:
    tuple: tuple
    value: QSqrtNumber

    def to_json(self):
        return {"tuple": [m.to_json() for m in self.tuple], "value": self.value.to_json()}


def _blocks(ms: Sequence[MonicPoly]) -> list:
    """[(p, n-vector)] over the primes dividing some entry, sorted by p."""
    r = len(ms)
    ex = {}
    for j, m in enumerate(ms):
        for p, e in m.factor():
            ex.setdefault(p, [0] * r)[j] = e
    return [(p, tuple(v)) for p, v in sorted(ex.items())]


def _adjacent_pairs(rs: RootSystem, skip=None):
    return [(k, j) for k in range(rs.rank) for j in range(k + 1, rs.rank) if rs.pairing[k][j] == -1 and skip not in (k, j)]


def _block_cocycle(pairs, p, n, p2, n2):
    """prod (m_k / m'_j)(m'_k / m_j) for two prime-power blocks p^n and p2^n2."""
    s = 1
    sym = None
    for k, j in pairs:
        e = n[k] * n2[j] + n2[k] * n[j]
        if e:
            if sym is None:
                sym = residue_symbol(p, p2)
            s *= sym**e
    return s


def h_coefficient(rs: RootSystem, ms: Sequence[MonicPoly]) -> MDSCoefficient:
    """H(m_1, ..., m_r) from p-parts and the residue-symbol cocycle."""
    ms = tuple(ms)
    if len(ms) != rs.rank:
        raise ValueError("one polynomial per node")
    q = ms[0].q
    check_field(q)
    blocks = _blocks(ms)
    pairs = _adjacent_pairs(rs)
    val = QSqrtNumber(1, 0, q)
    for p, n in blocks:
        val = val * p_part_coefficient(rs, p, n)
        if val.is_zero():
            return MDSCoefficient(ms, val)
    sign = 1
    for (p, n), (p2, n2) in itertools.combinations(blocks, 2):
        sign *= _block_cocycle(pairs, p, n, p2, n2)
    return MDSCoefficient(ms, val * sign)


def h_coefficient_sequential(rs: RootSystem, ms: Sequence[MonicPoly], order=None) -> QSqrtNumber:
    """H by folding the prime blocks in the given order with the tuple-level
    rule H(m m') = H(m) H(m') prod (m_k/m'_j)(m'_k/m_j); used to check that the
    result does not depend on the order."""
    ms = tuple(ms)
    q = ms[0].q
    blocks = _blocks(ms)
    if order is not None:
        blocks = [blocks[k] for k in order]
    pairs = _adjacent_pairs(rs)
    acc = [MonicPoly.one(q)] * rs.rank
    val = QSqrtNumber(1, 0, q)
    for p, n in blocks:
        b = [p**e for e in n]
        s = 1
        for k, j in pairs:
            s *= residue_symbol(acc[k], b[j]) * residue_symbol(b[k], acc[j])
        val = val * p_part_coefficient(rs, p, n) * s
        acc = [x * y for x, y in zip(acc, b)]
    return val


def _threads(threads):
    from .zeta_average import _threads as t

    return t(threads)


def coefficient_sum(rs: RootSystem, q: int, d: Sequence[int], threads: int | None = None, cap: int | None = None) -> QSqrtNumber:
    """Sum of H over all monic tuples with deg m_j = d_j."""
    check_field(q)
    d = tuple(int(x) for x in d)
    cap = default_cap() if cap is None else cap
    count = q ** sum(d)
    if count > cap:
        raise EnumerationLimitError(count, cap)
    lists = [list(monics(q, dj)) for dj in d]
    first = lists[0]
    rest = lists[1:]

    def chunk(m0):
        acc = QSqrtNumber(0, 0, q)
        for tail in itertools.product(*rest):
            acc = acc + h_coefficient(rs, (m0,) + tail).value
        return acc

    n = _threads(threads)
    if n > 1:
        with ThreadPoolExecutor(n) as ex:
            parts = list(ex.map(chunk, first))
    else:
        parts = [chunk(m0) for m0 in first]
    total = QSqrtNumber(0, 0, q)
    for v in parts:
        total = total + v
    return total


def expected_cell(rs: RootSystem, q: int, d: Sequence[int]) -> QSqrtNumber:
    """a_lam(q^{1/2}) for lam = sum d_j alpha_j."""
    d = tuple(int(x) for x in d)
    if not any(d):
        return QSqrtNumber(1, 0, q)
    return _eval_at_power(table_for(rs)[d], q, 1)


def local_to_global_report(rs: RootSystem, q: int, d_max, threads: int | None = None, cap: int | None = None, timing: bool = False) -> dict:
    check_field(q)
    if isinstance(d_max, int):
        d_max = (d_max,) * rs.rank
    cells = []
    for d in itertools.product(*(range(x + 1) for x in d_max)):
        t0 = time.perf_counter()
        got = coefficient_sum(rs, q, d, threads, cap)
        exp = expected_cell(rs, q, d)
        cell = {"d": list(d), "expected": exp.to_json(), "computed": got.to_json(), "equal": got == exp}
        if timing:
            cell["seconds"] = round(time.perf_counter() - t0, 3)
        cells.append(cell)
    return {"system": rs.name, "q": q, "d_max": list(d_max), "cells": cells, "equal": all(c["equal"] for c in cells)}


def verify_local_to_global(rs: RootSystem, q: int, d_max, threads: int | None = None) -> bool:
    return local_to_global_report(rs, q, d_max, threads)["equal"]


# ---------------------------------------------------------------------------
# the residue series and its twisted multiplicativity


def _pure_u_split(f: RatFunc):
    pure, rest = {}, {}
    for (c, key), mult in f.den.items():
        (pure if not any(key[1:]) else rest)[(c, key)] = mult
    return pure, rest


class ResidueLocalTable:
    """Coefficients of Z(x; u)|_{x_i = chi u} in the remaining variables, chi = +-1."""

    def __init__(self, rs: RootSystem, i: int, chi: int):
        r = rs.rank
        Z = zeta_average(rs).value
        images = [(1, (0,) + tuple(1 if k == j else 0 for k in range(r))) for j in range(r)]
        images[i] = (chi, (1,) + (0,) * r)
        Zi = Z.substitute(images, r)
        pure, rest = _pure_u_split(Zi)
        scale = ufield(1)
        for (c, key), mult in pure.items():
            scale = scale * (1 - ufield(c) * ufield(1) * _u_power(key[0])) ** mult
        self.scale = scale
        self.f = RatFunc(Zi.num, rest, True)
        self.i = i
        self.bound = (0,) * r
        self.coeffs = {}

    def __getitem__(self, lam):
        lam = tuple(lam)
        if any(a > b for a, b in zip(lam, self.bound)):
            self.bound = tuple(max(a + 1, b) for a, b in zip(lam, self.bound))
            self.coeffs = series_coefficients(self.f, self.bound)
        return self.coeffs.get(lam, ufield(0)) / self.scale


def _u_power(k):
    from .exact_algebra import u

    return u**k


@functools.lru_cache(maxsize=None)
def _residue_table(pairing, i, chi):
    return ResidueLocalTable(RootSystem(pairing), i, chi)


def _local_parts(rs: RootSystem, i: int, p: MonicPoly, n) -> tuple:
    """Even and odd parts in k of sum_k a_{n + k alpha_i}(u) u^k at u = |p|^{-1/2}."""
    plus = _eval_at_power(_residue_table(rs.pairing, i, 1)[n], p.q, -p.degree)
    minus = _eval_at_power(_residue_table(rs.pairing, i, -1)[n], p.q, -p.degree)
    half = Fraction(1, 2)
    return (plus + minus) * half, (plus - minus) * half


def h_prime(rs: RootSystem, i: int, ms: Sequence[MonicPoly]) -> QSqrtNumber:
    """H'(m_) for the tuple without position i (entry i of ``ms`` is ignored).

    H'(m_) = prod_{p | prod m_j} (1 - |p|^{-1}) sum_m H(..., m, ...) |m|^{-1/2},
    the inner sum over m supported on the primes dividing the other entries.
    Writing m = prod p^{k_p}, H is a product of p-parts times residue symbols
    whose exponents are linear in the k_p, so the symbols only see k_p mod 2.
    The sum is therefore grouped by the parity vector of (k_p): each prime
    contributes the even or odd part of its local series, and the symbols
    (including those that involve m) are evaluated on actual polynomials.
    """
    ms = list(ms)
    q = ms[0].q
    ms[i] = MonicPoly.one(q)
    blocks = _blocks(ms)
    pairs = _adjacent_pairs(rs)
    parts = [_local_parts(rs, i, p, n) for p, n in blocks]
    total = QSqrtNumber(0, 0, q)
    for parity in itertools.product((0, 1), repeat=len(blocks)):
        term = QSqrtNumber(1, 0, q)
        for (even, odd), e in zip(parts, parity):
            term = term * (odd if e else even)
        if term.is_zero():
            continue
        full = [(p, n[:i] + (e,) + n[i + 1 :]) for (p, n), e in zip(blocks, parity)]
        sign = 1
        for (p, n), (p2, n2) in itertools.combinations(full, 2):
            sign *= _block_cocycle(pairs, p, n, p2, n2)
        total = total + term * sign
    for p, _ in blocks:
        total = total * (1 - sqrt_q_power(-2 * p.degree, q))
    return total


def _is_square(m: MonicPoly) -> bool:
    return all(e % 2 == 0 for _, e in m.factor())


def square_condition(rs: RootSystem, i: int, ms) -> bool:
    prod = MonicPoly.one(ms[0].q)
    for j in range(rs.rank):
        if rs.pairing[i][j] == -1:
            prod = prod * ms[j]
    return _is_square(prod)


def _coprime(a: Sequence[MonicPoly], b: Sequence[MonicPoly]) -> bool:
    pa = {p for m in a for p, _ in m.factor()}
    pb = {p for m in b for p, _ in m.factor()}
    return not (pa & pb)


def _random_monic(rng, q, dmax):
    d = rng.randint(0, dmax)
    return MonicPoly(q, (1,) + tuple(rng.randrange(q) for _ in range(d)))


def sample_square_tuples(rs: RootSystem, i: int, q: int, count: int, seed: int = 0, dmax: int = 2) -> list:
    """Coprime pairs (m_, m_') satisfying the square condition; entries at i are 1."""
    rng = random.Random(seed)
    nbrs = [j for j in range(rs.rank) if rs.pairing[i][j] == -1]
    out = []
    while len(out) < count:
        pair = []
        for _ in range(2):
            ms = [_random_monic(rng, q, dmax) for _ in range(rs.rank)]
            ms[i] = MonicPoly.one(q)
            # force the square condition: the last neighbour absorbs the odd part
            prod = MonicPoly.one(q)
            for j in nbrs[:-1]:
                prod = prod * ms[j]
            odd = MonicPoly.one(q)
            for p, e in prod.factor():
                if e % 2:
                    odd = odd * p
            base = _random_monic(rng, q, 1)
            ms[nbrs[-1]] = odd * base * base
            pair.append(ms)
        if _coprime(pair[0], pair[1]) and all(square_condition(rs, i, m) for m in pair):
            out.append(tuple(map(tuple, pair)))
    return out


def twisted_mult_residue_report(rs: RootSystem, i: int, q: int, samples: int = 100, seed: int = 0) -> dict:
    check_field(q)
    pairs = _adjacent_pairs(rs, skip=i)
    results = []
    for a, b in sample_square_tuples(rs, i, q, samples, seed):
        prod = [x * y for x, y in zip(a, b)]
        lhs = h_prime(rs, i, prod)
        s = 1
        for k, j in pairs:
            s *= residue_symbol(a[k], b[j]) * residue_symbol(b[k], a[j])
        rhs = h_prime(rs, i, a) * h_prime(rs, i, b) * s
        results.append(lhs == rhs)
    return {"system": rs.name, "node": i + 1, "q": q, "samples": len(results), "equal": all(results), "failures": results.count(False)}


def verify_twisted_mult_residue(rs: RootSystem, i: int, q: int, samples: int = 100, seed: int = 0) -> bool:
    return twisted_mult_residue_report(rs, i, q, samples, seed)["equal"]


# ---------------------------------------------------------------------------
# symbol properties


def residue_symbol_report(q: int, dmax: int = 3, random_pairs: int = 1000, seed: int = 0) -> dict:
    check_field(q)
    polys = [m for d in range(dmax + 1) for m in monics(q, d)]
    agree = all(residue_symbol(a, b) == residue_symbol_euler(a, b) for a in polys for b in polys)
    rng = random.Random(seed)
    recip = True
    n = 0
    while n < random_pairs:
        a, b = _random_monic(rng, q, 6), _random_monic(rng, q, 6)
        if residue_symbol(a, b) == 0:
            continue
        n += 1
        recip &= residue_symbol(a, b) == residue_symbol(b, a)
    mult = True
    for _ in range(random_pairs):
        a, b, c = (_random_monic(rng, q, 5) for _ in range(3))
        mult &= residue_symbol(a * b, c) == residue_symbol(a, c) * residue_symbol(b, c)
        mult &= residue_symbol(c, a * b) == residue_symbol(c, a) * residue_symbol(c, b)
    return {"q": q, "euler_agreement": agree, "pairs_checked": len(polys) ** 2, "reciprocity": recip, "multiplicativity": mult}


__all__ = [
    "MonicPoly",
    "MDSCoefficient",
    "check_field",
    "monics",
    "residue_symbol",
    "residue_symbol_euler",
    "p_part_coefficient",
    "h_coefficient",
    "h_coefficient_sequential",
    "coefficient_sum",
    "expected_cell",
    "local_to_global_report",
    "verify_local_to_global",
    "h_prime",
    "square_condition",
    "sample_square_tuples",
    "twisted_mult_residue_report",
    "verify_twisted_mult_residue",
    "residue_symbol_report",
]
