import pytest

from wmds.errors import EnumerationLimitError
from wmds.exact_algebra import LaurentPoly
from wmds.root_system import build_root_system
from wmds.zeta_average import (
    invariant_report,
    numerator_recursive,
    verify_short_root_identity,
    zeta_average,
    zeta_direct,
)

# the eight-term printed G2 polynomial; the full numerator carries the three
# factors 1 + u x1, 1 + u x2, 1 + u x^theta_s that the printed form cancels
G2_PRINTED = {(5, 7, 4): 1, (3, 6, 3): -1, (3, 4, 3): -1, (2, 4, 2): 1, (3, 3, 2): 1, (2, 3, 1): -1, (2, 1, 1): -1, (0, 0, 0): 1}


def plus_u(key):
    return LaurentPoly.from_terms(2, {(0, 0, 0): 1, (1,) + key: 1})


def test_rank_one():
    z = zeta_direct(build_root_system("A1"))
    assert z.numerator == LaurentPoly.from_terms(1, {(0, 0): 1, (1, 1): 1})


def test_g2_printed_numerator():
    N = LaurentPoly.from_terms(2, G2_PRINTED) * plus_u((1, 0)) * plus_u((0, 1)) * plus_u((2, 1))
    assert zeta_direct(build_root_system("G2")).numerator == N


@pytest.mark.parametrize("label", ["A2", "A3", "B2", "B3", "C3", "G2"])
def test_recursion_matches_direct(label):
    rs = build_root_system(label)
    assert numerator_recursive(rs) == zeta_direct(rs).numerator


@pytest.mark.parametrize("label", ["A3", "B3", "C3", "G2"])
def test_invariants(label):
    rep = invariant_report(zeta_average(build_root_system(label)))
    assert all(rep.values()), rep


def test_threads_do_not_change_the_numerator():
    rs = build_root_system("B3")
    one = zeta_direct(rs, method="coset", threads=1).numerator
    assert zeta_direct(rs, method="coset", threads=4).numerator == one


def test_cap():
    with pytest.raises(EnumerationLimitError):
        zeta_direct(build_root_system("A4"), cap=100)


@pytest.mark.parametrize("label", ["B3", "C3"])
def test_short_root_identity(label):
    assert verify_short_root_identity(build_root_system(label))


def test_reducible_is_a_product():
    # A1 x A1 (as D2): Z factors
    z = zeta_direct(build_root_system("D2")).numerator
    assert z == LaurentPoly.from_terms(2, {(0, 0, 0): 1, (1, 1, 0): 1}) * LaurentPoly.from_terms(2, {(0, 0, 0): 1, (1, 0, 1): 1})
