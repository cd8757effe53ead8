"""The zeta average Z = N / D of a root system, computed two independent ways.

``zeta_direct`` averages 1|w over the Weyl group.  Small groups are folded
element by element; larger ones are split into right cosets of a maximal
parabolic subgroup W_J, whose average is computed recursively:

    Z = sum_c (Z_J |cg c) / Delta^J(c x),   c minimal in W_J c.

Multiplying through by D * Delta turns each coset term into a Laurent
polynomial, and their sum is N * Delta.  Since N is supported in [0, 2 rho]
only that box is materialized (as a dense numpy array) before dividing by
Delta.

``numerator_recursive`` solves the linear relations that the invariance
Z |cg s_i = Z imposes on the coefficients of N, one Weyl orbit at a time.

    >>> from wmds.root_system import build_root_system
    >>> from wmds.exact_algebra import render_poly
    >>> render_poly(zeta_direct(build_root_system("A1")).numerator)
    '1 + u*x1'
"""

from __future__ import annotations

import functools
import itertools
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cg_action import (
    TwistVector,
    bar_word,
    cg_simple,
    d_factors,
    delta_factors,
    twisted_cg_simple,
)
from .errors import EnumerationLimitError, InconsistentError, WMDSError
from .exact_algebra import (
    LaurentPoly,
    RatFunc,
    UField,
    factors_to_json,
    normalize_factor,
    poly_to_json,
    rat_equals,
    rat_sum_n,
    render_poly,
    u as U_GEN,
    ufield_to_laurent,
)
from .root_system import (
    RootSystem,
    build_root_system,
    default_cap,
    dominant_rep,
    element_from_word,
    group_order,
    identity_element,
    weyl_elements,
)

FOLD_LIMIT = 48


@dataclass(frozen=True)
class ZetaAverage:
    system: RootSystem
    numerator: LaurentPoly
    method: str = ""
    seconds: float = field(default=0.0, compare=False)

    @property
    def value(self) -> RatFunc:
        return RatFunc(self.numerator, d_factors(self.system), True)

    @property
    def rank(self):
        return self.system.rank

    def coefficient(self, lam):
        return self.numerator.coefficient_u(lam)

    def support(self):
        return sorted(self.numerator.x_support())

    def to_json(self, timing=False):
        out = {
            "system": self.system.name,
            "method": self.method,
            "group_order": group_order(self.system),
            "numerator": poly_to_json(self.numerator),
            "numerator_text": render_poly(self.numerator),
            "denominator": factors_to_json(self.value),
            "terms": len(self.numerator),
        }
        if timing:
            out["seconds"] = round(self.seconds, 3)
        return out


def _threads(threads):
    if threads is None:
        threads = int(os.environ.get("WMDS_THREADS", "1") or 1)
    return max(1, int(threads))


# ---------------------------------------------------------------------------
# per-element fold


def _fold_numerator(rs: RootSystem) -> LaurentPoly:
    r = rs.rank
    terms = []
    # 1|(w s_i) = (1|w)|s_i, reusing the parent's value along the BFS tree
    cache = {(): RatFunc.one(r)}
    for w in weyl_elements(rs):
        if w.word:
            cache[w.word] = bar_word(cache[w.word[:-1]], (w.word[-1],), rs)
        terms.append(cache[w.word])
    S = rat_sum_n(r, terms)
    Z = S * RatFunc(LaurentPoly.one(r), delta_factors(rs))
    for (c, key), mult in sorted(d_factors(rs).items()):
        for _ in range(mult):
            Z = Z.times_binomial(c, key)
    Z = Z.reduce()
    if Z.den:
        raise InconsistentError("the Weyl average times D is not a polynomial")
    return Z.num


# ---------------------------------------------------------------------------
# coset decomposition


def minimal_coset_reps(rs: RootSystem, J: Sequence[int]) -> list:
    """Elements c with c^-1 alpha_j > 0 for j in J, by BFS over right multiplication."""
    J = tuple(J)
    out = []
    level = [identity_element(rs)]
    seen = {level[0].images}
    while level:
        out.extend(level)
        nxt = []
        for c in level:
            for i in range(rs.rank):
                if any(x < 0 for x in c.images[i]):
                    continue
                w = element_from_word(rs, c.word + (i,))
                if w.images in seen:
                    continue
                winv = element_from_word(rs, tuple(reversed(w.word)))
                if all(all(x >= 0 for x in winv.act(rs.simple_roots[j])) for j in J):
                    seen.add(w.images)
                    nxt.append(w)
        level = nxt
    return out


def best_parabolic(rs: RootSystem) -> tuple:
    """The maximal parabolic node set with the fewest cosets (ties: smallest dropped node)."""
    best = None
    for drop in range(rs.rank):
        J = rs.parabolic_nodes([drop])
        n = group_order(rs, J)
        if best is None or n > best[0]:
            best = (n, J)
    return best[1]


def _coset_term(rs, NJ_c: RatFunc, cinv, J_pos, rest_pos):
    """Sparse part and positive binomial multipliers of T_c * D * Delta."""
    den = {}

    def add(fac):
        den[fac] = den.get(fac, 0) + 1

    for a in J_pos:
        b = cinv.act(a)
        add((1, (2,) + tuple(rs.m[a] * x for x in b)))
    for a in rest_pos:
        b = cinv.act(a)
        add((1, (0,) + tuple(rs.m[a] * x for x in b)))
    for fac, k in NJ_c.den.items():
        for _ in range(k):
            add(fac)
    F = RatFunc(NJ_c.num, den)
    remaining = dict(F.den)
    mults = []
    for fac_map in (d_factors(rs), delta_factors(rs)):
        for fac, k in sorted(fac_map.items()):
            _, _, f = normalize_factor(*fac)
            for _ in range(k):
                if remaining.get(f, 0):
                    remaining[f] -= 1
                    if not remaining[f]:
                        del remaining[f]
                else:
                    mults.append(f)
    if remaining:
        raise InconsistentError(f"coset term has poles outside D * Delta: {remaining}")
    for c, key in mults:
        if any(e < 0 for e in key):
            raise InconsistentError("non-positive multiplier in coset term")
    return F.num, mults


def _slices(shape, key, offset_src=True):
    """Destination and source slices for A[k + key] <- A[k] inside ``shape``."""
    dst, src = [], []
    for n, s in zip(shape, key):
        if s >= 0:
            dst.append(slice(s, n))
            src.append(slice(0, n - s))
        else:
            dst.append(slice(0, n + s))
            src.append(slice(-s, n))
    return tuple(dst), tuple(src)


def _dense_mul_binomial(A, c, key):
    if any(k >= n for k, n in zip(key, A.shape)):
        return
    dst, src = _slices(A.shape, key)
    A[dst] -= c * A[src]


def _dense_div_binomial(A, key):
    """In place A <- A / (1 - x^key) as a power series truncated to the array."""
    j = next(t for t, e in enumerate(key) if e)
    step = key[j]
    n = A.shape[j]
    for k in range(step, n):
        dst = [slice(None)] * A.ndim
        src = [slice(None)] * A.ndim
        dst[j] = k
        src[j] = k - step
        ok = True
        for t, e in enumerate(key):
            if t == j:
                continue
            m = A.shape[t]
            if e >= m:
                ok = False
                break
            dst[t] = slice(e, m)
            src[t] = slice(0, m - e)
        if not ok:
            return
        A[tuple(dst)] += A[tuple(src)]


def _coset_numerator(rs: RootSystem, NJ: LaurentPoly, J, threads=1, margin=1) -> LaurentPoly:
    r = rs.rank
    reps = minimal_coset_reps(rs, J)
    Jset = set(J)
    J_pos = [a for a in rs.positive_roots if all(a[k] == 0 for k in range(r) if k not in Jset)]
    rest_pos = [a for a in rs.positive_roots if a not in set(J_pos)]
    cache = {(): RatFunc.from_poly(NJ)}
    for c in reps:
        if c.word:
            cache[c.word] = cg_simple(cache[c.word[:-1]], c.word[-1], rs).reduce()
    parts = []
    for c in reps:
        cinv = element_from_word(rs, tuple(reversed(c.word)))
        parts.append(_coset_term(rs, cache[c.word], cinv, J_pos, rest_pos))

    upper_x = [x + margin for x in rs.two_rho]
    lo = [0] * (r + 1)
    u_hi = 0
    bound = 0
    for num, mults in parts:
        for k in num.terms:
            for t in range(r + 1):
                lo[t] = min(lo[t], k[t])
        umax = max(k[0] for k in num.terms) + sum(key[0] for _, key in mults)
        u_hi = max(u_hi, umax)
        bound += sum(abs(Fraction(v)) for v in num.terms.values()) * 2 ** len(mults)
    if any(isinstance(v, Fraction) for num, _ in parts for v in num.terms.values()):
        raise InconsistentError("non-integral coefficients in coset terms")
    dtype = np.int64 if bound < 2**62 else object
    hi = [u_hi] + upper_x
    shape = tuple(h - l + 1 for h, l in zip(hi, lo))

    def build(part):
        num, mults = part
        A = np.zeros(shape, dtype=dtype)
        for k, v in num.terms.items():
            if all(a <= b for a, b in zip(k, hi)):
                A[tuple(a - l for a, l in zip(k, lo))] += v
        for c, key in mults:
            _dense_mul_binomial(A, int(c), key)
        return A

    X = np.zeros(shape, dtype=dtype)
    nthreads = _threads(threads)
    if nthreads > 1:
        # each worker sums a fixed contiguous block; blocks are merged in order
        blocks = [parts[k::nthreads] for k in range(nthreads)]

        def work(block):
            acc = np.zeros(shape, dtype=dtype)
            for p in block:
                acc += build(p)
            return acc

        with ThreadPoolExecutor(nthreads) as ex:
            for acc in ex.map(work, blocks):
                X += acc
    else:
        for p in parts:
            X += build(p)

    origin = tuple(-l for l in lo)
    inner = tuple(slice(o, None) for o in origin)
    if np.count_nonzero(X) != np.count_nonzero(X[inner]):
        raise InconsistentError("N * Delta has terms with negative exponents")
    N = np.ascontiguousarray(X[inner])
    if dtype is np.int64:
        mag = np.abs(N).astype(np.float64)
    for a in rs.positive_roots:
        key = (0,) + tuple(rs.m[a] * x for x in a)
        _dense_div_binomial(N, key)
        if dtype is np.int64:
            _dense_div_binomial(mag, key)
    if dtype is np.int64 and mag.size and mag.max() > 2.0**60:
        raise InconsistentError("possible int64 overflow while dividing by Delta")
    out = {}
    nz = np.nonzero(N)
    for idx in zip(*nz):
        if any(idx[t + 1] > rs.two_rho[t] for t in range(r)):
            raise InconsistentError("numerator has support outside [0, 2 rho]")
        out[tuple(int(i) for i in idx)] = int(N[idx])
    return LaurentPoly(r, out, True)


# ---------------------------------------------------------------------------
# public constructors


def _cap_check(rs, cap):
    cap = default_cap() if cap is None else cap
    n = group_order(rs)
    if n > cap:
        raise EnumerationLimitError(n, cap)
    return n


def zeta_direct(rs: RootSystem, method: str = "auto", threads: int | None = None, cap: int | None = None) -> ZetaAverage:
    """Z as the Weyl average (sum_w 1|w) / Delta; N recovered exactly."""
    t0 = time.perf_counter()
    if rs.rank == 0:
        return ZetaAverage(rs, LaurentPoly.one(0), "direct", 0.0)
    n = _cap_check(rs, cap)
    if method == "auto":
        method = "fold" if (n <= FOLD_LIMIT or not rs.is_irreducible) else "coset"
    if method == "fold":
        N = _fold_numerator(rs)
    elif method == "coset":
        J = best_parabolic(rs)
        sub = rs.node_subsystem(J).system
        NJ = _direct_cached(sub.pairing).numerator.embed(list(J), rs.rank)
        N = _coset_numerator(rs, NJ, J, threads=threads)
    else:
        raise ValueError(f"unknown method {method!r}")
    if N.constant_term() != {0: 1}:
        raise InconsistentError("N(0) != 1")
    return ZetaAverage(rs, N, "direct-" + method, time.perf_counter() - t0)


@functools.lru_cache(maxsize=64)
def _direct_cached(pairing) -> ZetaAverage:
    return zeta_direct(RootSystem(pairing))


def zeta_product(parts: Sequence[tuple], nvars: int | None = None) -> ZetaAverage:
    """Product of averages on disjoint variable blocks.

    ``parts`` is a list of (ZetaAverage, positions) with positions the target
    variable index of each of its variables.  The target system is the direct
    sum, so its D is the union of the D's.
    """
    used = set()
    for z, pos in parts:
        if len(pos) != z.rank:
            raise ValueError("positions must match the rank of each part")
        if used & set(pos):
            raise ValueError("variable blocks overlap")
        used |= set(pos)
    n = len(used) if nvars is None else nvars
    P = [[0] * n for _ in range(n)]
    for z, pos in parts:
        for a in range(z.rank):
            for b in range(z.rank):
                P[pos[a]][pos[b]] = z.system.pairing[a][b]
    for k in range(n):
        if P[k][k] == 0:
            raise ValueError("every variable must belong to some block")
    num = LaurentPoly.one(n)
    for z, pos in parts:
        num = num * z.numerator.embed(list(pos), n)
    rs = RootSystem(P)
    return ZetaAverage(rs, num, "product")


# ---------------------------------------------------------------------------
# the orbit recursion


def _vec_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _vec_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def numerator_recursive(rs: RootSystem, twist: TwistVector | None = None, check: bool = False) -> LaurentPoly:
    """Solve the invariance relations for the coefficients c_lam of N.

    Orbits O_xi = {theta - w xi} are processed by increasing height of
    lam0 = theta - xi (so decreasing xi).  The first coefficient of each orbit
    comes from a wall of xi (where s_i xi = xi), the rest by walking down the
    orbit one reflection at a time.
    """
    r = rs.rank
    if r == 0:
        return LaurentPoly.one(0)
    twist = TwistVector.zero(r) if twist is None else twist
    if len(twist.ell) != r:
        raise ValueError("twist has the wrong length")
    if any(x < 0 for x in twist.ell):
        raise ValueError("only dominant twists (all ell_i >= 0) are supported")
    theta = twist.theta(rs)
    m = rs.simple_m
    ell = twist.ell
    units = rs.simple_roots
    upper = [int(2 * t) for t in theta]
    cands = []
    for lam0 in itertools.product(*[range(0, b + 1) for b in upper]):
        xi = tuple(theta[j] - lam0[j] for j in range(r))
        if all(rs.coroot_pair(xi, i) >= 0 for i in range(r)):
            cands.append(lam0)
    cands.sort(key=lambda l: (sum(l), l))
    zero = UField(0)
    c = {}

    def get(lam):
        return c.get(lam, zero)

    def relation_rhs(lam, mu, i, par):
        # returns the coefficient of c_lam and the known part for c_mu
        a = units[i]
        if m[i] == 2 and par == 0:
            return U_GEN, get(_vec_sub(lam, a)) - U_GEN * get(_vec_add(mu, a))
        if m[i] == 2:
            a2 = tuple(2 * x for x in a)
            return -U_GEN**2, get(_vec_sub(lam, a2)) + U_GEN**2 * get(_vec_add(mu, a2))
        return -U_GEN**2, get(_vec_sub(lam, a)) + U_GEN**2 * get(_vec_add(mu, a))

    for lam0 in cands:
        xi = tuple(theta[j] - lam0[j] for j in range(r))
        if not any(lam0):
            val = UField(1)
        else:
            walls = [i for i in range(r) if rs.coroot_pair(xi, i) == 0]
            if not walls:
                # strongly dominant below the top: the relations leave it free
                raise InconsistentError(f"orbit of {xi} has no wall to seed from")
            else:
                i = walls[0]
                par = (ell[i] + int(rs.coroot_pair(lam0, i))) % 2
                k, rest = relation_rhs(lam0, lam0, i, par)
                # c_lam = k c_lam + rest  ->  c_lam (1 - k) = rest
                if 1 - k == 0:
                    raise InconsistentError("degenerate wall relation")
                val = rest / (1 - k)
        orbit = {xi: val}
        frontier = [xi]
        while frontier:
            nf = []
            for eta in frontier:
                for i in range(r):
                    kk = rs.coroot_pair(eta, i)
                    if kk > 0:
                        seta = tuple(eta[j] - kk * units[i][j] for j in range(r))
                        if seta in orbit:
                            continue
                        lam = tuple(int(theta[j] - eta[j]) for j in range(r))
                        mu = tuple(int(theta[j] - seta[j]) for j in range(r))
                        par = (ell[i] + int(rs.coroot_pair(lam, i))) % 2
                        k, rest = relation_rhs(lam, mu, i, par)
                        orbit[seta] = k * orbit[eta] + rest
                        nf.append(seta)
            frontier = nf
        for eta, v in orbit.items():
            lam = tuple(int(theta[j] - eta[j]) for j in range(r))
            if v != 0:
                c[lam] = v
            else:
                c.pop(lam, None)
    terms = {}
    for lam, v in c.items():
        for e, coeff in ufield_to_laurent(v).items():
            terms[(e,) + lam] = coeff
    N = LaurentPoly(r, terms)
    if check or not twist.is_zero():
        if not satisfies_invariance(N, rs, twist):
            raise InconsistentError("recursion output is not invariant; seeding does not apply to this twist")
    return N


def satisfies_invariance(N: LaurentPoly, rs: RootSystem, twist: TwistVector | None = None) -> bool:
    """N = (1 - u^2 x_i^m)/(1 - u^2 x_i^-m) * (N |cg_omega s_i) for every i."""
    r = rs.rank
    twist = TwistVector.zero(r) if twist is None else twist
    for i in range(r):
        mi = rs.simple_m[i]
        g = twisted_cg_simple(N, i, twist, rs)
        e = [0] * (r + 1)
        e[0], e[i + 1] = 2, mi
        g = g.times_binomial(1, tuple(e))
        e2 = list(e)
        e2[i + 1] = -mi
        g = RatFunc(g.num, {**g.den}) * RatFunc(LaurentPoly.one(r), {(1, tuple(e2)): 1})
        if not rat_equals(g, RatFunc.from_poly(N)):
            return False
    return True


@functools.lru_cache(maxsize=128)
def _recursive_cached(pairing) -> LaurentPoly:
    return numerator_recursive(RootSystem(pairing))


def zeta_average(rs: RootSystem) -> ZetaAverage:
    """Z with N from the (fast, cached) recursion."""
    t0 = time.perf_counter()
    N = _recursive_cached(rs.pairing)
    return ZetaAverage(rs, N, "recursive", time.perf_counter() - t0)


def zeta(label) -> ZetaAverage:
    rs = label if isinstance(label, RootSystem) else build_root_system(label)
    return zeta_average(rs)


# ---------------------------------------------------------------------------
# verification


def verify_w_invariance(z: ZetaAverage) -> bool:
    Z = z.value
    return all(rat_equals(cg_simple(Z, i, z.system), Z) for i in range(z.rank))


def verify_divisibility(z: ZetaAverage) -> bool:
    rs, N = z.system, z.numerator
    r = rs.rank
    for i in range(r):
        if rs.simple_m[i] == 2:
            key = [0] * (r + 1)
            key[0], key[i + 1] = 1, 1
            if N.try_div_binomial(-1, tuple(key)) is None:
                return False
    for a in rs.positive_roots:
        if rs.m[a] == 1:
            if N.try_div_binomial(1, (2,) + tuple(a)) is None:
                return False
    return True


def verify_polynomial_shape(z: ZetaAverage) -> dict:
    """Supp(N) in Q+, N(0) = 1 and every support point below 2 rho."""
    rs, N = z.system, z.numerator
    supp = N.x_support()
    return {
        "support_in_Q_plus": all(all(e >= 0 for e in lam) for lam in supp) and all(k[0] >= 0 for k in N.terms),
        "constant_term_one": N.constant_term() == {0: 1},
        "below_two_rho": all(all(a <= b for a, b in zip(lam, rs.two_rho)) for lam in supp),
    }


def _orbit(rs, xi):
    seen = {xi}
    frontier = [xi]
    while frontier:
        nxt = []
        for eta in frontier:
            for i in range(rs.rank):
                s = rs.reflect(i, eta)
                if s not in seen:
                    seen.add(s)
                    nxt.append(s)
        frontier = nxt
    return seen


def verify_support_orbits(z: ZetaAverage) -> bool:
    """Maximal xi meeting the support are strongly dominant with full orbits inside it;
    every support point is rho - w xi with xi dominant and xi <= rho."""
    rs = z.system
    rho = rs.rho
    supp = z.numerator.x_support()
    xis = set()
    for lam in supp:
        xi, _ = dominant_rep(rs, tuple(Fraction(rho[j]) - lam[j] for j in range(rs.rank)))
        xi = tuple(Fraction(x) for x in xi)
        diff = [rho[j] - xi[j] for j in range(rs.rank)]
        if any(d < 0 or Fraction(d).denominator != 1 for d in diff):
            return False
        xis.add(xi)

    def leq(a, b):
        d = [y - x for x, y in zip(a, b)]
        return all(Fraction(e).denominator == 1 and e >= 0 for e in d)

    maximal = [x for x in xis if not any(y != x and leq(x, y) for y in xis)]
    for xi in maximal:
        if not rs.is_strongly_dominant(xi):
            return False
        for eta in _orbit(rs, xi):
            lam = tuple(int(rho[j] - eta[j]) for j in range(rs.rank))
            if lam not in supp:
                return False
    return True


def invariant_report(z: ZetaAverage) -> dict:
    rep = {"w_invariance": verify_w_invariance(z), "divisibility": verify_divisibility(z)}
    rep.update(verify_polynomial_shape(z))
    rep["support_orbits"] = verify_support_orbits(z)
    return rep


def short_root_substitution(rs: RootSystem):
    """(target system, monomial images) for the double-laced identity."""
    if not rs.is_irreducible or not rs.is_double_laced:
        raise WMDSError("the short-root identity needs an irreducible double-laced system")
    lab = rs.label
    r = rs.rank
    if lab.family == "B":
        images = [tuple(1 if j >= i else 0 for j in range(r)) for i in range(r)]
        return "A1^%d" % r, images
    if lab.family == "C":
        images = [tuple(1 if j == i else 0 for j in range(r)) for i in range(r - 1)]
        images.append(tuple(1 if j in (r - 2, r - 1) else 0 for j in range(r)))
        return f"D{r}", images
    if lab.family == "F":
        images = [(0, 0, 1, 0), (0, 0, 0, 1), (0, 1, 1, 0), (1, 1, 1, 0)]
        return "D4", images
    raise WMDSError(f"no short-root identity for {lab}")


def verify_short_root_identity(rs: RootSystem) -> bool:
    target, images = short_root_substitution(rs)
    r = rs.rank
    Z = zeta_average(rs).value
    if target.startswith("A1^"):
        a1 = zeta_average(build_root_system("A1"))
        prod = zeta_product([(a1, (k,)) for k in range(r)])
        W = prod.value
    else:
        W = zeta_average(build_root_system(target)).value
    img = [(1, (0,) + tuple(v)) for v in images]
    lhs = W.substitute(img, r)
    return rat_equals(lhs, Z)
