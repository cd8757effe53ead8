"""Residues of zeta averages along x_i = 1/u and the orthogonal-complement side.

Functions of the restricted variables x_ = x|_{x_i=1/u} are stored as RatFuncs
in the full ring in which x_i simply does not occur.

    >>> from wmds.root_system import build_root_system
    >>> A3 = build_root_system("A3")
    >>> verify_theorem_A(A3, 1).equal
    True
    >>> f = orthogonal_zeta_eval(A3, 1)
    >>> rat_equals(f, RatFunc(LaurentPoly.one(3), {(1, (0, 1, 0, 1)): 1}))
    True
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from .cg_action import j_factor, parity_vector
from .errors import InconsistentError, PoleError, UnsupportedNodeError, WMDSError
from .exact_algebra import (
    LaurentPoly,
    RatFunc,
    normalize_factor,
    rat_equals,
    render_ratfunc,
)
from .root_system import RootSystem, build_root_system, orthogonal_complement
from .zeta_average import ZetaAverage, zeta_average, zeta_product


def _key(r, lam, ue=0):
    return (ue,) + tuple(lam)


def _unit(r, i, e=1):
    return tuple(e if k == i else 0 for k in range(r))


def _zeta_value(z) -> RatFunc:
    return z.value if isinstance(z, ZetaAverage) else z


def _multiply_out(Z: RatFunc, roots, rs: RootSystem) -> RatFunc:
    out = Z
    for a in roots:
        out = out.cancel_factor(1, _key(rs.rank, [2 * x for x in a], 2))
    return out


def phi_level(rs: RootSystem, i: int, level: int) -> list:
    """Positive roots a with <alpha_i, a> = level."""
    ai = rs.simple_roots[i]
    return [a for a in rs.positive_roots if rs.pair(ai, a) == level]


def bracket_modified(z, i: int) -> RatFunc:
    """Z^[i]: cancel the factors 1 - u^2 x^{2a} for <alpha_i, a> = 1 (for G2:
    every positive a != alpha_i with <a, alpha_i> > 0)."""
    Z = _zeta_value(z)
    rs = z.system
    if rs.is_g2:
        roots = [a for a in rs.positive_roots if a != rs.simple_roots[i] and rs.pair(a, rs.simple_roots[i]) > 0]
    else:
        if rs.simple_m[i] != 2:
            raise UnsupportedNodeError(f"alpha_{i + 1} is long")
        roots = phi_level(rs, i, 1)
    return _multiply_out(Z, roots, rs)


def paren_modified(z, i: int) -> RatFunc:
    """Z^(i): cancel 1 - u^2 x^{2a} over short a with n_i(a) >= 2 (all a for G2)."""
    Z = _zeta_value(z)
    rs = z.system
    if not rs.is_g2 and rs.theta[i] > 2:
        raise UnsupportedNodeError(f"n_{i + 1}(theta) > 2")
    roots = [a for a in rs.positive_roots if a[i] >= 2 and rs.m[a] == 2]
    return _multiply_out(Z, roots, rs)


def _restrict_images(rs: RootSystem, i: int, vectors, sign: int = 1):
    """Images x_j -> x_^{v_j} where x_i is replaced by sign/u."""
    out = []
    for v in vectors:
        e = v[i]
        c = Fraction(sign) ** e if e >= 0 else Fraction(1, sign ** (-e))
        lam = tuple(0 if k == i else v[k] for k in range(rs.rank))
        out.append((c, (-e,) + lam))
    return out


def restrict(f: RatFunc, i: int, sign: int = 1) -> RatFunc:
    """f|_{x_i = sign/u}."""
    r = f.nvars
    images = []
    for j in range(r):
        if j == i:
            images.append((Fraction(sign), (-1,) + (0,) * r))
        else:
            images.append((1, (0,) + _unit(r, j)))
    return f.substitute(images, r)


def residue_at(f: RatFunc, i: int, sign: int = 1) -> RatFunc:
    """lim (1 - sign*u*x_i) f at x_i = sign/u, for at most a simple pole.

    >>> f = RatFunc(LaurentPoly.one(1), {(1, (2, 2)): 1})
    >>> render_ratfunc(residue_at(f, 0))
    '1/2'
    >>> g = RatFunc(LaurentPoly.binomial(1, -1, (1, 1)), {(1, (2, 2)): 1})
    >>> residue_at(g, 0, sign=-1).is_zero()
    True
    """
    r = f.nvars
    order = 0
    scale = Fraction(1)
    rest = {}
    for (c, key), mult in f.den.items():
        lam = key[1:]
        k = lam[i]
        pure = all(e == 0 for j, e in enumerate(lam) if j != i)
        if pure and k > 0 and key[0] == k and Fraction(c) * Fraction(sign) ** k == 1:
            # 1 - (sign u x_i)^k = (1 - sign u x_i)(1 + ... ), the cofactor is k at the pole
            order += mult
            scale *= Fraction(k) ** mult
        else:
            rest[(c, key)] = mult
    if order == 0:
        return RatFunc.zero(r)
    num = f.num
    lin = (Fraction(sign), (1,) + _unit(r, i))
    for _ in range(order - 1):
        num = num.try_div_binomial(*lin)
        if num is None:
            raise PoleError(f"pole of order > 1 along x_{i + 1} = {'-' if sign < 0 else ''}1/u")
    if num.try_div_binomial(*lin) is not None:
        return RatFunc.zero(r)
    g = RatFunc(num.scale(1 / scale), rest, True)
    return restrict(g, i, sign)


def orthogonal_zeta_eval(rs: RootSystem, i: int, u_power: int = 1) -> RatFunc:
    """Z_{Phi_0} with x_beta = x^beta, then x_i = 1/u (u -> u^u_power on the Phi_0 side)."""
    data = orthogonal_complement(rs, i) if not rs.is_g2 else _g2_orthogonal(rs, i)
    r = rs.rank
    parts, basis = [], []
    for comp in data.components:
        sub = rs.subsystem(comp.basis).system
        z = zeta_average(sub)
        parts.append((z, tuple(range(len(basis), len(basis) + len(comp.basis)))))
        basis.extend(comp.basis)
    if not parts:
        return RatFunc.one(r)
    Z0 = zeta_product(parts).value
    images = [(1, (0,) + tuple(b)) for b in basis]
    Z = Z0.substitute(images, r, u_image=(1, u_power))
    return restrict(Z, i)


@dataclass(frozen=True)
class _G2Orth:
    components: tuple
    pi_new: tuple


@dataclass(frozen=True)
class _Comp:
    basis: tuple


def _g2_orthogonal(rs, i):
    ai = rs.simple_roots[i]
    beta = max((a for a in rs.positive_roots if rs.pair(a, ai) == 0), key=sum)
    return _G2Orth((_Comp((beta,)),), (beta,))


@dataclass
class ResidueReport:
    system: str
    node: int
    lhs: RatFunc
    rhs: RatFunc
    equal: bool
    seconds: float = field(default=0.0, compare=False)

    def to_json(self, timing=False):
        out = {
            "system": self.system,
            "node": self.node + 1,
            "equal": self.equal,
            "lhs_terms": len(self.lhs.num),
            "rhs_terms": len(self.rhs.num),
            "rhs": render_ratfunc(self.rhs),
        }
        if timing:
            out["seconds"] = round(self.seconds, 3)
        return out


def residue_function(rs: RootSystem, i: int) -> RatFunc:
    """F(x_) = Res_{x_i=1/u} Z^[i], with denominator factors cancelled where possible."""
    return residue_at(bracket_modified(zeta_average(rs), i), i).reduce()


def verify_theorem_A(rs: RootSystem, i: int) -> ResidueReport:
    if rs.is_g2:
        raise WMDSError("use verify_theorem_A_g2 for G2")
    if not rs.is_irreducible:
        raise WMDSError("the residue theorem is stated for irreducible systems")
    t0 = time.perf_counter()
    rhs = orthogonal_zeta_eval(rs, i)
    lhs = residue_function(rs, i)
    eq = rat_equals(lhs, rhs)
    return ResidueReport(rs.name, i, lhs, rhs, eq, time.perf_counter() - t0)


def verify_theorem_A_g2(i: int) -> ResidueReport:
    rs = build_root_system("G2")
    if i not in (0, 1):
        raise UnsupportedNodeError("G2 has nodes 1 and 2")
    t0 = time.perf_counter()
    lhs = residue_function(rs, i)
    rhs = orthogonal_zeta_eval(rs, i, u_power=3 if i == 0 else 1)
    return ResidueReport(rs.name, i, lhs, rhs, rat_equals(lhs, rhs), time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# residue-side invariants


def _sigma_beta_restricted(F: RatFunc, rs: RootSystem, i: int, beta) -> RatFunc:
    """F(sigma_beta x_): x_j -> x^{sigma_beta alpha_j}|_{x_i=1/u}."""
    vecs = [rs.reflect_in(beta, rs.simple_roots[j]) if j != i else rs.simple_roots[i] for j in range(rs.rank)]
    images = _restrict_images(rs, i, vecs)
    images[i] = (1, (0,) + _unit(rs.rank, i))
    return F.substitute(images, rs.rank)


def functional_equation_report(rs: RootSystem, i: int, F: RatFunc | None = None) -> dict:
    """epsilon_i-evenness of F and the sigma_beta relations for beta in Pi_new."""
    if F is None:
        F = residue_function(rs, i)
    r = rs.rank
    out = {"even": rat_equals(F.sign_twist(parity_vector(rs, rs.simple_roots[i])), F)}
    data = orthogonal_complement(rs, i)
    for beta in data.pi_new:
        Fs = _sigma_beta_restricted(F, rs, i, beta)
        if rs.m[beta] == 2:
            Fse = Fs.sign_twist(parity_vector(rs, beta))
            y = (-beta[i],) + tuple(0 if k == i else beta[k] for k in range(r))
            rhs = Fs * j_factor(1, y, 0, r) + Fse * j_factor(1, y, 1, r)
        else:
            rhs = Fs
        out["beta=" + ",".join(map(str, beta))] = rat_equals(rhs, F)
    return out


def verify_residue_functional_equations(rs: RootSystem, i: int) -> bool:
    return all(functional_equation_report(rs, i).values())


def residue_vanishes_at_minus(rs: RootSystem, i: int) -> bool:
    """Res_{x_i=-1/u} Z^[i] = 0."""
    return residue_at(bracket_modified(zeta_average(rs), i), i, sign=-1).is_zero()


def evaluated_numerator_cofactor(rs: RootSystem, i: int) -> LaurentPoly:
    """N_0 with N|_{x_i=1/u} = 2 prod (1 - u^2 x_^{m a}) N_0, the product over
    <alpha_i, a> = -1 and over long roots outside Phi_0.  Raises if not exact."""
    r = rs.rank
    N = zeta_average(rs).numerator
    ai = rs.simple_roots[i]
    roots = phi_level(rs, i, -1) + [a for a in rs.positive_roots if rs.m[a] == 1 and rs.pair(ai, a) != 0]
    Nr = restrict(RatFunc.from_poly(N), i).num
    facs = Counter()
    pref = Fraction(2)
    shift = [0] * (r + 1)
    for a in roots:
        (c, key), = _restrict_images(rs, i, [tuple(rs.m[a] * x for x in a)])
        pc, pk, f = normalize_factor(c, (key[0] + 2,) + key[1:])
        pref *= Fraction(pc)
        if pk is not None:
            shift = [s + k for s, k in zip(shift, pk)]
        if f is None:
            raise InconsistentError("factor degenerates to a constant")
        facs[f] += 1
    q = Nr.scale(1 / pref)
    if any(shift):
        q = q.shift(tuple(-s for s in shift))
    for f, mult in sorted(facs.items()):
        for _ in range(mult):
            q = q.div_binomial(*f)
    return q


def degN_report(rs: RootSystem, i: int) -> dict:
    """Divisibility of the evaluated numerator, shape of N_0 and its degree bound."""
    try:
        N0 = evaluated_numerator_cofactor(rs, i)
    except InconsistentError:
        return {"divisible": False, "polynomial": False, "constant_term_one": False, "degree_bound": False}
    data = orthogonal_complement(rs, i)
    bound = [sum(a[k] for a in data.phi0_positive) for k in range(rs.rank)]
    supp = N0.x_support()
    return {
        "divisible": True,
        "polynomial": all(min(lam) >= 0 for lam in supp),
        "constant_term_one": N0.constant_term() == {0: 1},
        "degree_bound": all(lam[k] <= bound[k] for lam in supp for k in range(rs.rank) if k != i),
    }


def residue_invariant_report(rs: RootSystem, i: int) -> dict:
    F = residue_function(rs, i)
    rep = {"functional_equations": functional_equation_report(rs, i, F)}
    rep["vanishes_at_minus"] = residue_vanishes_at_minus(rs, i)
    rep["evaluated_numerator"] = degN_report(rs, i)
    return rep


def all_checks_pass(d):
    return all(all_checks_pass(v) if isinstance(v, dict) else bool(v) for v in d.values())


def residue_invariants_hold(rs: RootSystem, i: int) -> bool:
    return all_checks_pass(residue_invariant_report(rs, i))


__all__ = [
    "ResidueReport",
    "bracket_modified",
    "paren_modified",
    "residue_at",
    "restrict",
    "orthogonal_zeta_eval",
    "residue_function",
    "verify_theorem_A",
    "verify_theorem_A_g2",
    "functional_equation_report",
    "verify_residue_functional_equations",
    "residue_vanishes_at_minus",
    "evaluated_numerator_cofactor",
    "degN_report",
    "residue_invariant_report",
    "residue_invariants_hold",
    "all_checks_pass",
    "phi_level",
]
