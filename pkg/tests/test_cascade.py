import pytest

from wmds.cascade import (
    _seed,
    admissible_nodes,
    build_cascade,
    example_identity,
    is_chain,
    kernel,
    kernel_factors,
    table_one,
    verify_theorem_D,
    verify_theorem_D_g2,
    weyl_average,
)
from wmds.errors import UnsupportedNodeError
from wmds.exact_algebra import LaurentPoly, RatFunc, rat_equals
from wmds.residues import paren_modified
from wmds.root_system import build_root_system
from wmds.zeta_average import zeta_average

LABELS = ["A1", "A4", "A7", "B2", "B5", "C3", "C6", "D4", "D5", "D6", "D8", "E6", "E7", "E8", "F4"]


@pytest.mark.parametrize("label", LABELS)
def test_admissible_nodes_match_published_table(label):
    rs = build_root_system(label)
    assert tuple(i + 1 for i in admissible_nodes(rs)) == table_one(rs)


@pytest.mark.parametrize("label", ["A6", "C5", "D7", "E6", "F4"])
def test_admissible_cascades_are_chains(label):
    rs = build_root_system(label)
    for i in admissible_nodes(rs):
        g = build_cascade(rs, i)
        assert is_chain(g) and g.consistent


def factor(*lam):
    return (1, (0,) + lam)


def test_d6_kernel():
    # 1 / ((1-x1x5)(1-x1x6)(1-x5x6)(1-x2x4)(1-x4^2x5x6)) at node 3
    expected = RatFunc.from_factors(
        LaurentPoly.one(6),
        [factor(1, 0, 0, 0, 1, 0), factor(1, 0, 0, 0, 0, 1), factor(0, 0, 0, 0, 1, 1), factor(0, 1, 0, 1, 0, 0), factor(0, 0, 0, 2, 1, 1)],
    )
    assert rat_equals(kernel(build_root_system("D6"), 2), expected)


def test_a_kernel():
    # A_r at node i: (1 - x_{i-k} x_{i+k})^-1 for k = 1, 2, ...
    expected = RatFunc.from_factors(LaurentPoly.one(5), [factor(0, 1, 0, 1, 0), factor(1, 0, 0, 0, 1)])
    assert rat_equals(kernel(build_root_system("A5"), 2), expected)


def test_non_admissible_node():
    with pytest.raises(UnsupportedNodeError):
        kernel_factors(build_root_system("D6"), 3)


@pytest.mark.parametrize("label", ["A2", "A3", "B3", "D4"])
def test_theorem_D(label):
    rs = build_root_system(label)
    for i in admissible_nodes(rs):
        assert verify_theorem_D(rs, i)


def test_theorem_D_needs_the_kernel():
    rs = build_root_system("A3")
    bare = weyl_average(_seed(rs, 1, RatFunc.one(3)), rs, rs.parabolic_nodes([1]))
    assert not rat_equals(paren_modified(zeta_average(rs), 1), bare)


def test_theorem_D_g2():
    assert verify_theorem_D_g2()


@pytest.mark.parametrize("name", ["case1", "case2"])
def test_examples(name):
    assert example_identity(name)


@pytest.mark.parametrize("label,node", [("A3", 2), ("A4", 2), ("D4", 2), ("B3", 3)])
def test_flint_and_staged_sums_agree(label, node, monkeypatch):
    from wmds import _flint

    rs = build_root_system(label)
    i = node - 1
    f = _seed(rs, i, kernel(rs, i))
    nodes = rs.parabolic_nodes([i])
    fast = weyl_average(f, rs, nodes)
    monkeypatch.setattr(_flint, "AVAILABLE", False)
    slow = weyl_average(f, rs, nodes)
    assert fast.num == slow.num and fast.den == slow.den


def test_flint_sum_matches_python_sum():
    from wmds import _flint
    from wmds.cg_action import bar_word
    from wmds.exact_algebra import rat_sum_n

    rs = build_root_system("A3")
    f = _seed(rs, 1, kernel(rs, 1))
    terms = [bar_word(f, w, rs) for w in [(), (0,), (2,), (0, 2)]]
    ref = rat_sum_n(3, terms).reduce()
    for got in (_flint.sum_reduce(3, terms), _flint.tree_sum(3, terms)):
        assert got.num == ref.num and got.den == ref.den
