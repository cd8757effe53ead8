import pytest

from wmds.cg_action import bar_simple, bar_word, cg_simple, cg_word, d_factors, delta_factors
from wmds.exact_algebra import LaurentPoly, RatFunc, rat_equals
from wmds.root_system import build_root_system


def seed(rs):
    """A generic test function: x^lam / (1 - u x^beta) with no symmetry."""
    r = rs.rank
    lam = tuple(range(1, r + 1))
    beta = tuple(1 if j % 2 == 0 else 2 for j in range(r))
    num = LaurentPoly.mono(r, lam, 1, 3) + LaurentPoly.one(r)
    return RatFunc.from_factors(num, [(1, (1,) + beta)])


@pytest.mark.parametrize("label", ["A2", "B2", "G2", "A3", "C3"])
def test_generators_are_involutions(label):
    rs = build_root_system(label)
    f = seed(rs)
    for i in range(rs.rank):
        assert rat_equals(cg_simple(cg_simple(f, i, rs), i, rs), f)
        assert rat_equals(bar_simple(bar_simple(f, i, rs), i, rs), f)


BRAIDS = {"A2": 3, "B2": 4, "G2": 6}


@pytest.mark.parametrize("label", sorted(BRAIDS))
def test_braid_relations(label):
    rs = build_root_system(label)
    m = BRAIDS[label]
    f = seed(rs)
    w1 = tuple((0, 1)[k % 2] for k in range(m))
    w2 = tuple((1, 0)[k % 2] for k in range(m))
    assert rat_equals(cg_word(f, w1, rs), cg_word(f, w2, rs))
    assert rat_equals(bar_word(f, w1, rs), bar_word(f, w2, rs))


def test_commuting_generators():
    rs = build_root_system("A3")
    f = seed(rs)
    assert rat_equals(cg_word(f, (0, 2), rs), cg_word(f, (2, 0), rs))


def test_rank_one_action_on_constant():
    # 1 | s = (1 - u/x) / (1 - u x) in rank one
    rs = build_root_system("A1")
    g = cg_simple(RatFunc.one(1), 0, rs)
    h = RatFunc.from_factors(LaurentPoly.from_terms(1, {(0, 0): 1, (1, -1): -1}), [(1, (1, 1))])
    assert rat_equals(g, h)


def test_d_and_delta_factor_counts():
    rs = build_root_system("B2")
    assert sum(d_factors(rs).values()) == 4
    assert sum(delta_factors(rs).values()) == 4
