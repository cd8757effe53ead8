"""The cascade graph of a short simple root, admissible nodes, kernels and
parabolic averages.

Starting from alpha_i inside the whole system, a short vertex beta with
companion Psi has as children the new simple roots of beta^perp in Psi, each
with the irreducible component of beta^perp containing it as companion.  Long
vertices are terminal.

    >>> from wmds.root_system import build_root_system
    >>> g = build_cascade(build_root_system("A5"), 2)
    >>> sorted(g.vertices)
    [(0, 0, 1, 0, 0), (0, 1, 1, 1, 0), (1, 1, 1, 1, 1)]
    >>> [tuple(b) for b in g.chain]  # the vertices with children
    [(0, 0, 1, 0, 0), (0, 1, 1, 1, 0)]
    >>> render_ratfunc(kernel(build_root_system("A4"), 1))
    '(1) / ((1 - x1*x3))'
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from . import _flint
from .cg_action import bar_word, delta_factors
from .errors import EnumerationLimitError, UnsupportedNodeError, WMDSError
from .exact_algebra import LaurentPoly, RatFunc, rat_equals, rat_sum_n, render_factor, render_ratfunc
from .root_system import (
    RootSystem,
    build_root_system,
    default_cap,
    element_from_word,
    group_order,
    orthogonal_complement,
    orthogonal_in,
    weyl_elements,
)
from .residues import paren_modified
from .zeta_average import zeta_average

Vec = tuple


@dataclass
class CascadeGraph:
    system: RootSystem
    node: int
    vertices: list
    edges: list
    companion: dict  # vertex -> positive roots of its companion subsystem
    new_star: dict  # vertex -> children that are highest roots of an A3 with the vertex in the middle
    consistent: bool = True
    chain: list = field(default_factory=list)

    def children(self, b):
        return [g for a, g in self.edges if a == b]

    def terminal(self, b):
        return not self.children(b)

    @property
    def admissible(self):
        return all(b[self.node] == 1 for b in self.vertices)

    def to_json(self):
        rs = self.system
        return {
            "system": rs.name,
            "node": self.node + 1,
            "vertices": [
                {
                    "root": list(b),
                    "long": not rs.is_short(b),
                    "companion_rank": _rank_of(rs, self.companion[b]),
                    "companion_size": len(self.companion[b]),
                }
                for b in self.vertices
            ],
            "edges": [[list(a), list(b)] for a, b in self.edges],
            "admissible": self.admissible,
            "chain": [list(b) for b in self.chain] if self.admissible else None,
            "companions_consistent": self.consistent,
        }

    def to_dot(self):
        def name(b):
            return "b_" + "_".join(map(str, b))

        lines = [f'digraph "K({self.system.name},{self.node + 1})" {{', "  rankdir=LR;"]
        for b in self.vertices:
            shape = "box" if not self.system.is_short(b) else "ellipse"
            lines.append(f'  {name(b)} [label="{",".join(map(str, b))}", shape={shape}];')
        for a, b in self.edges:
            lines.append(f"  {name(a)} -> {name(b)};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _rank_of(rs, positives):
    from .root_system import indecomposables

    return len(indecomposables(positives))


def _component_positives(rs, comp, phi0):
    sub = rs.subsystem(comp.basis)
    return tuple(sorted(sub.embed(a) for a in sub.system.positive_roots))


def build_cascade(rs: RootSystem, i: int) -> CascadeGraph:
    if rs.is_g2:
        raise WMDSError("the cascade is defined for systems other than G2")
    if not rs.is_short(rs.simple_roots[i]):
        raise UnsupportedNodeError(f"alpha_{i + 1} is long")
    root = rs.simple_roots[i]
    companion = {root: tuple(rs.positive_roots)}
    new_star = {}
    vertices, edges = [root], []
    consistent = True
    queue = [root]
    while queue:
        b = queue.pop(0)
        if not rs.is_short(b):
            continue
        if b == root:
            data = orthogonal_complement(rs, i)
        else:
            data = orthogonal_in(rs, b, companion[b])
        new_star[b] = tuple(data.pi_new_star)
        for g in data.pi_new:
            comp = next(c for c in data.components if g in c.basis)
            pos = _component_positives(rs, comp, data.phi0_positive)
            edges.append((b, g))
            if g in companion:
                if companion[g] != pos:
                    consistent = False
                continue
            companion[g] = pos
            vertices.append(g)
            queue.append(g)
    graph = CascadeGraph(rs, i, vertices, edges, companion, new_star, consistent)
    graph.chain = _chain(graph)
    return graph


def _chain(g: CascadeGraph) -> list:
    inner = [b for b in g.vertices if not g.terminal(b)]
    if not inner:
        return []
    # a chain: each inner vertex has at most one inner child, starting at alpha_i
    out = [g.vertices[0]]
    seen = {out[0]}
    while True:
        nxt = [c for c in g.children(out[-1]) if not g.terminal(c)]
        if len(nxt) > 1:
            return []
        if not nxt:
            break
        if nxt[0] in seen:
            return []
        out.append(nxt[0])
        seen.add(nxt[0])
    return out if set(out) == set(inner) else []


def is_chain(g: CascadeGraph) -> bool:
    inner = [b for b in g.vertices if not g.terminal(b)]
    return set(inner) == set(g.chain)


def admissible_nodes(rs: RootSystem) -> tuple:
    """Short nodes whose cascade has n_i = 1 on every vertex (0-based)."""
    if rs.is_g2:
        raise WMDSError("admissibility is defined for systems other than G2")
    out = []
    for i in range(rs.rank):
        if not rs.is_short(rs.simple_roots[i]):
            continue
        if build_cascade(rs, i).admissible:
            out.append(i)
    return tuple(out)


def table_one(label) -> tuple:
    """The published admissible node sets (1-based), used as an independent check."""
    rs = build_root_system(label) if not isinstance(label, RootSystem) else label
    fam, r = rs.label.family, rs.label.rank
    rng = range(1, r + 1)
    if fam == "A":
        return tuple(rng)
    if fam == "B":
        return (r,)
    if fam == "C":
        return tuple(i for i in rng if 2 * i <= r)
    if fam == "D":
        return tuple(i for i in rng if 2 * i <= r + 1 or i in (r - 1, r))
    if fam == "E":
        return {6: (1, 2, 3, 5, 6), 7: (1, 2, 7), 8: (1, 8)}[r]
    if fam == "F":
        return (4,)
    raise WMDSError(f"no table entry for {rs.label}")


def kernel_factors(rs: RootSystem, i: int, graph: CascadeGraph | None = None) -> list:
    g = graph or build_cascade(rs, i)
    if not g.admissible or not is_chain(g):
        raise UnsupportedNodeError(f"node {i + 1} not admissible for {rs.name}")
    out = []
    for b in g.chain:
        kids = g.children(b)
        if rs.is_double_laced:
            kids = [c for c in kids if c in g.new_star.get(b, ())]
        for c in kids:
            out.append((1, (0,) + tuple(x - y for x, y in zip(c, b))))
    return out


def kernel(rs: RootSystem, i: int) -> RatFunc:
    """prod over the chain beta_j and its new simple roots gamma of 1/(1 - x^{gamma - beta_j})."""
    return RatFunc.from_factors(LaurentPoly.one(rs.rank), kernel_factors(rs, i))


def _right_coset_reps(rs: RootSystem, inner, outer) -> list:
    """c in W_outer with c^-1 alpha_j > 0 for j in inner: every w in W_outer
    is uniquely v c with v in W_inner."""
    out = []
    for c in weyl_elements(rs, outer):
        cinv = element_from_word(rs, tuple(reversed(c.word)))
        if all(all(x >= 0 for x in cinv.act(rs.simple_roots[j])) for j in inner):
            out.append(c)
    return out


def weyl_average(f: RatFunc, rs: RootSystem, nodes, cap: int | None = None) -> RatFunc:
    """(sum over w in W_nodes of f|w) / Delta over the positive roots of the parabolic.

    With python-flint the terms f|w are summed pairwise, cheapest common
    denominator first (see ``_flint.tree_sum``).  Without it the sum is taken
    in stages along W_{J_1} < W_{J_2} < ... (one node added at a time),
    reducing after each stage: sum_{W_J'} f|w = sum_c (sum_{W_J} f|v)|c over
    right coset representatives c.
    """
    nodes = tuple(sorted(nodes))
    cap = default_cap() if cap is None else cap
    n = group_order(rs, nodes)
    if n > cap:
        raise EnumerationLimitError(n, cap)
    r = rs.rank
    sub_pos = [a for a in rs.positive_roots if all(a[k] == 0 for k in range(r) if k not in nodes)]
    delta = RatFunc(LaurentPoly.one(r), delta_factors(rs, sub_pos))
    if _flint.AVAILABLE:
        seen = {(): f}
        for w in weyl_elements(rs, nodes):
            if w.word:
                seen[w.word] = bar_word(seen[w.word[:-1]], w.word[-1:], rs)
        S = _flint.tree_sum(r, list(seen.values()))
        return _flint.sum_reduce(r, [S * delta])
    S = f
    for k in range(len(nodes)):
        inner, outer = nodes[:k], nodes[: k + 1]
        terms = [bar_word(S, c.word, rs) if c.word else S for c in _right_coset_reps(rs, inner, outer)]
        S = rat_sum_n(r, terms).reduce()
    return (S * delta).reduce()


def _seed(rs, i, K: RatFunc) -> RatFunc:
    key = tuple(1 if t in (0, i + 1) else 0 for t in range(rs.rank + 1))
    return K * RatFunc(LaurentPoly.one(rs.rank), {(1, key): 1})


def parabolic_average(rs: RootSystem, i: int, cap: int | None = None) -> RatFunc:
    K = kernel(rs, i)
    return weyl_average(_seed(rs, i, K), rs, rs.parabolic_nodes([i]), cap)


@dataclass
class ParabolicReport:
    system: str
    node: int
    kernel: RatFunc
    equal: bool
    seconds: float = field(default=0.0, compare=False)

    def to_json(self, timing=False):
        out = {
            "system": self.system,
            "node": self.node + 1,
            "kernel": render_ratfunc(self.kernel),
            "kernel_factors": [render_factor(f) for f, m in sorted(self.kernel.den.items()) for _ in range(m)],
            "equal": self.equal,
        }
        if timing:
            out["seconds"] = round(self.seconds, 3)
        return out


def theorem_D_report(rs: RootSystem, i: int, cap: int | None = None) -> ParabolicReport:
    t0 = time.perf_counter()
    K = kernel(rs, i)
    avg = weyl_average(_seed(rs, i, K), rs, rs.parabolic_nodes([i]), cap)
    lhs = paren_modified(zeta_average(rs), i)
    return ParabolicReport(rs.name, i, K, rat_equals(lhs, avg), time.perf_counter() - t0)


def verify_theorem_D(rs: RootSystem, i: int, cap: int | None = None) -> bool:
    return theorem_D_report(rs, i, cap).equal


def verify_theorem_D_g2() -> bool:
    """Z^(2) of G2 as the <s_1>-average of 1/((1 - u x_2)(1 - u x^{theta_s}))."""
    rs = build_root_system("G2")
    ts = rs.theta_short
    seed = RatFunc(LaurentPoly.one(2), {(1, (1, 0, 1)): 1, (1, (1,) + tuple(ts)): 1})
    avg = weyl_average(seed, rs, (0,))
    return rat_equals(paren_modified(zeta_average(rs), 1), avg)


# ---------------------------------------------------------------------------
# standalone identities


def _times_poles(Z: RatFunc, roots, rs):
    out = Z
    for a in roots:
        out = out.cancel_factor(1, (2,) + tuple(2 * x for x in a))
    return out


def example_identity(name: str) -> bool:
    """The three worked identities: a cascade average and two multi-node averages.

    case1: A3, node 2, kernel 1/(1 - x1 x3) (the same as the cascade kernel).
    case2: A3, (1 - u^2 x^{2 theta}) Z as the W^{1,3}-average of 1/((1-ux1)(1-ux3)).
    case3: A5, (1 - u^2 x^{2 theta})(1 - u^2 x^{2(theta - alpha_1)}) Z as the
    W^{2,5}-average of 1/((1-ux2)(1-x1x3)(1-ux5)).
    """
    if name == "case1":
        rs = build_root_system("A3")
        seed = RatFunc(LaurentPoly.one(3), {(1, (1, 0, 1, 0)): 1, (1, (0, 1, 0, 1)): 1})
        avg = weyl_average(seed, rs, (0, 2))
        return rat_equals(zeta_average(rs).value, avg)
    if name == "case2":
        rs = build_root_system("A3")
        seed = RatFunc(LaurentPoly.one(3), {(1, (1, 1, 0, 0)): 1, (1, (1, 0, 0, 1)): 1})
        avg = weyl_average(seed, rs, (1,))
        lhs = _times_poles(zeta_average(rs).value, [rs.theta], rs)
        return rat_equals(lhs, avg)
    if name == "case3":
        rs = build_root_system("A5")
        seed = RatFunc(
            LaurentPoly.one(5),
            {(1, (1, 0, 1, 0, 0, 0)): 1, (1, (0, 1, 0, 1, 0, 0)): 1, (1, (1, 0, 0, 0, 0, 1)): 1},
        )
        avg = weyl_average(seed, rs, (0, 2, 3))
        th = rs.theta
        lhs = _times_poles(zeta_average(rs).value, [th, (0,) + th[1:]], rs)
        return rat_equals(lhs, avg)
    raise ValueError(f"unknown example {name!r}")


def rank_two_case1() -> bool:
    """The A2 reading of the first example: node 2 has kernel 1, so Z_{A2} is the
    W^2-average of 1/(1 - u x_2)."""
    rs = build_root_system("A2")
    return verify_theorem_D(rs, 1)


def verify_d6_modified_kernel() -> bool:
    """D6, node 4 (not admissible): the identity holds with the extra factor
    (1 + u x^theta|_{x_4=1/u}) in the kernel."""
    rs = build_root_system("D6")
    i = 3
    g = build_cascade(rs, i)
    b1 = rs.simple_roots[i]
    factors = [(1, (0,) + tuple(x - y for x, y in zip(c, b1))) for c in g.children(b1)]
    th = rs.theta
    extra = LaurentPoly.one(6) + LaurentPoly.mono(6, tuple(0 if k == i else th[k] for k in range(6)), 1 - th[i])
    K = RatFunc.from_factors(extra, factors)
    avg = weyl_average(_seed(rs, i, K), rs, rs.parabolic_nodes([i]))
    return rat_equals(paren_modified(zeta_average(rs), i), avg)


__all__ = [
    "CascadeGraph",
    "ParabolicReport",
    "build_cascade",
    "is_chain",
    "admissible_nodes",
    "table_one",
    "kernel",
    "kernel_factors",
    "weyl_average",
    "parabolic_average",
    "theorem_D_report",
    "verify_theorem_D",
    "verify_theorem_D_g2",
    "example_identity",
    "rank_two_case1",
    "verify_d6_modified_kernel",
]
