import pytest

from wmds.errors import ConstructionError, NonReducedWordError
from wmds.root_system import (
    build_root_system,
    element_from_word,
    group_order,
    inversion_set,
    longest_element,
    orthogonal_complement,
    weyl_elements,
)

POSITIVE_COUNTS = {
    "A1": 1, "A4": 10, "B3": 9, "C4": 16, "D4": 12, "D5": 20,
    "E6": 36, "E7": 63, "E8": 120, "F4": 24, "G2": 6,
}


@pytest.mark.parametrize("label,count", sorted(POSITIVE_COUNTS.items()))
def test_positive_root_count(label, count):
    assert len(build_root_system(label).positive_roots) == count


@pytest.mark.parametrize("label,order", [("A3", 24), ("B3", 48), ("C3", 48), ("D4", 192), ("F4", 1152), ("G2", 12), ("E6", 51840)])
def test_group_order(label, order):
    assert group_order(build_root_system(label)) == order


def test_enumeration_matches_order():
    rs = build_root_system("B3")
    elems = list(weyl_elements(rs))
    assert len(elems) == 48
    assert len({e.images for e in elems}) == 48
    assert [e.length for e in elems] == sorted(e.length for e in elems)


def test_inversion_set_reads_word_from_the_right():
    rs = build_root_system("A2")
    # w = s1 s2: Phi(w) = {alpha_2, s_2 alpha_1}
    assert inversion_set(rs, element_from_word(rs, (0, 1))) == [(0, 1), (1, 1)]


def test_longest_element_inverts_everything():
    rs = build_root_system("C3")
    w0 = longest_element(rs)
    assert w0.length == 9
    assert sorted(inversion_set(rs, w0)) == sorted(rs.positive_roots)


def test_non_reduced_word():
    rs = build_root_system("A2")
    with pytest.raises(NonReducedWordError):
        inversion_set(rs, (0, 0))


def test_highest_roots():
    assert build_root_system("F4").theta == (2, 3, 4, 2)
    g2 = build_root_system("G2")
    assert (g2.theta_long, g2.theta_short) == ((3, 2), (2, 1))
    assert build_root_system("E8").theta == (2, 3, 4, 6, 5, 4, 3, 2)


def test_m_alpha():
    b2 = build_root_system("B2")
    assert sorted(b2.m[a] for a in b2.positive_roots) == [1, 1, 2, 2]
    assert set(build_root_system("D4").m.values()) == {2}
    assert set(build_root_system("G2").m.values()) == {2}


@pytest.mark.parametrize("bad", ["A0", "B1", "D1", "E5", "F3", "G3", "Q2", ""])
def test_bad_labels(bad):
    with pytest.raises(ConstructionError):
        build_root_system(bad)


def test_degenerate_d_aliases():
    d2, d3 = build_root_system("D2"), build_root_system("D3")
    assert not d2.is_irreducible and len(d2.positive_roots) == 2
    assert len(d3.positive_roots) == 6 and group_order(d3) == 24


def test_orthogonal_complement_a3():
    od = orthogonal_complement(build_root_system("A3"), 1)
    assert od.phi0_positive == ((1, 1, 1),)
    assert od.pi_new == ((1, 1, 1),)


def test_orthogonal_complement_d4_centre():
    od = orthogonal_complement(build_root_system("D4"), 1)
    # alpha_2 is the branch node: its complement is three orthogonal A1's
    assert len(od.components) == 3
    assert all(len(c.basis) == 1 for c in od.components)
